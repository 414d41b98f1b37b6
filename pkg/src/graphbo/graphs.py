"""Combinatorial search spaces as Cartesian products of per-variable graphs.

Each variable gets a small undirected graph over its categories: a complete
graph for unordered choices, a path for ordered ones. A point of the search
space is a tuple of per-variable category indices. The product graph itself is
never materialized; neighborhoods and spectra are derived from the factors.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    EnumerationRefusedError,
    InvalidVariableError,
    NumericError,
    VertexBoundsError,
)

Vertex = tuple[int, ...]

ENUMERATION_CAP = 1_000_000


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def _is_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(adj[i]):
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


@dataclass(frozen=True)
class SubGraph:
    """Undirected, connected graph over one variable's categories."""

    adjacency: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=np.float64)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidVariableError("adjacency must be a square matrix")
        if adj.shape[0] < 1:
            raise InvalidVariableError("a variable needs at least one category")
        if not np.array_equal(adj, adj.T):
            raise InvalidVariableError("adjacency must be symmetric")
        if np.any(np.diag(adj) != 0.0):
            raise InvalidVariableError("self loops are not allowed")
        if not np.isin(adj, (0.0, 1.0)).all():
            raise InvalidVariableError("adjacency entries must be 0 or 1")
        if adj.shape[0] > 1 and not _is_connected(adj):
            raise InvalidVariableError("sub-graph must be connected")
        object.__setattr__(self, "adjacency", _readonly(adj))

    @classmethod
    def complete(cls, k: int) -> "SubGraph":
        """Complete graph on k categories (unordered variable)."""
        if k < 1:
            raise InvalidVariableError("category count must be >= 1")
        return cls(np.ones((k, k)) - np.eye(k), kind="complete")

    @classmethod
    def path(cls, n: int) -> "SubGraph":
        """Path graph on n categories (ordered variable)."""
        if n < 1:
            raise InvalidVariableError("category count must be >= 1")
        adj = np.zeros((n, n))
        idx = np.arange(n - 1)
        adj[idx, idx + 1] = 1.0
        adj[idx + 1, idx] = 1.0
        return cls(adj, kind="path")

    @classmethod
    def custom(cls, adjacency) -> "SubGraph":
        return cls(np.asarray(adjacency, dtype=np.float64), kind="custom")

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]

    def neighbors_of(self, i: int) -> np.ndarray:
        if not 0 <= i < self.size:
            raise VertexBoundsError(f"category {i} out of range [0, {self.size})")
        return np.flatnonzero(self.adjacency[i])


@dataclass(frozen=True)
class Eigensystem:
    """Laplacian spectrum of one sub-graph, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _readonly(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _readonly(self.eigenvectors))


def laplacian(g: SubGraph) -> np.ndarray:
    """Graph Laplacian, degree matrix minus adjacency."""
    adj = g.adjacency
    return np.diag(adj.sum(axis=1)) - adj


def eigensystem(g: SubGraph) -> Eigensystem:
    """Eigendecomposition of the Laplacian of ``g``.

    Complete graphs use their closed-form spectrum {0, k} with an orthonormal
    basis whose first column is constant; other kinds go through a dense
    symmetric eigensolver. Tiny negative eigenvalues from roundoff are
    clamped to zero.
    """
    k = g.size
    if g.kind == "complete":
        vals = np.full(k, float(k))
        vals[0] = 0.0
        # Householder reflection mapping e1 to the constant unit vector;
        # symmetric orthogonal, so its columns form the eigenbasis.
        if k == 1:
            vecs = np.ones((1, 1))
        else:
            w = -np.full(k, 1.0 / np.sqrt(k))
            w[0] += 1.0
            w /= np.linalg.norm(w)
            vecs = np.eye(k) - 2.0 * np.outer(w, w)
        return Eigensystem(vals, vecs)
    lap = laplacian(g)
    try:
        vals, vecs = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"Laplacian eigendecomposition failed for a {g.kind} graph of "
            f"size {k}: {exc}"
        ) from exc
    if vals[0] < -1e-10:
        raise NumericError(
            f"Laplacian produced eigenvalue {vals[0]:.3e} far below zero"
        )
    return Eigensystem(np.maximum(vals, 0.0), vecs)


class SearchSpace:
    """Ordered collection of sub-graphs with precomputed eigensystems."""

    def __init__(self, subgraphs: Sequence[SubGraph]):
        if len(subgraphs) == 0:
            raise InvalidVariableError("search space needs at least one variable")
        self.subgraphs: tuple[SubGraph, ...] = tuple(subgraphs)
        self.eigensystems: tuple[Eigensystem, ...] = tuple(
            eigensystem(g) for g in self.subgraphs
        )
        self.sizes: tuple[int, ...] = tuple(g.size for g in self.subgraphs)
        total = 1
        for s in self.sizes:
            total *= s
        self.total_size: int = total
        self._neighbor_lists = tuple(
            tuple(tuple(int(j) for j in g.neighbors_of(i)) for i in range(g.size))
            for g in self.subgraphs
        )

    @classmethod
    def categorical(cls, sizes: Sequence[int]) -> "SearchSpace":
        return cls([SubGraph.complete(s) for s in sizes])

    @classmethod
    def ordinal(cls, sizes: Sequence[int]) -> "SearchSpace":
        return cls([SubGraph.path(s) for s in sizes])

    @classmethod
    def binary(cls, n: int) -> "SearchSpace":
        return cls.categorical([2] * n)

    @property
    def n_variables(self) -> int:
        return len(self.subgraphs)

    def validate_vertex(self, v: Sequence[int]) -> Vertex:
        if len(v) != self.n_variables:
            raise VertexBoundsError(
                f"vertex has {len(v)} components, space has {self.n_variables}"
            )
        for i, (c, s) in enumerate(zip(v, self.sizes)):
            if not 0 <= c < s:
                raise VertexBoundsError(
                    f"component {i} is {c}, outside [0, {s})"
                )
        return tuple(int(c) for c in v)

    def contains(self, v: Sequence[int]) -> bool:
        return len(v) == self.n_variables and all(
            0 <= c < s for c, s in zip(v, self.sizes)
        )

    def neighbors(self, v: Sequence[int]) -> list[Vertex]:
        """Vertices differing from v in exactly one variable, along an edge."""
        v = self.validate_vertex(v)
        out = []
        for i, c in enumerate(v):
            for j in self._neighbor_lists[i][c]:
                out.append(v[:i] + (j,) + v[i + 1 :])
        return out

    def random_vertex(self, rng: np.random.Generator) -> Vertex:
        return tuple(int(rng.integers(0, s)) for s in self.sizes)

    def random_vertices(self, rng: np.random.Generator, count: int) -> np.ndarray:
        cols = [rng.integers(0, s, size=count) for s in self.sizes]
        return np.stack(cols, axis=1)

    def enumerate_vertices(self) -> Iterator[Vertex]:
        return itertools.product(*(range(s) for s in self.sizes))

    def hamming(self, v1: Sequence[int], v2: Sequence[int]) -> int:
        v1 = self.validate_vertex(v1)
        v2 = self.validate_vertex(v2)
        return sum(a != b for a, b in zip(v1, v2))


def shortest_path_oracle(
    space: SearchSpace,
    v1: Sequence[int],
    v2: Sequence[int],
    max_vertices: int = ENUMERATION_CAP,
) -> int:
    """Breadth-first graph distance on the product graph. Test use only.

    Walks the implicit product graph, so cost is O(vertices reached); refuses
    spaces above ``max_vertices``.
    """
    if space.total_size > max_vertices:
        raise EnumerationRefusedError(
            f"space has {space.total_size} vertices, cap is {max_vertices}"
        )
    start = space.validate_vertex(v1)
    goal = space.validate_vertex(v2)
    if start == goal:
        return 0
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        d = dist[v] + 1
        for w in space.neighbors(v):
            if w not in dist:
                if w == goal:
                    return d
                dist[w] = d
                queue.append(w)
    raise NumericError("product graph is disconnected; factors must be connected")
