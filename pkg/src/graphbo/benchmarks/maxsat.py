"""Weighted MaxSAT instances in DIMACS WCNF form.

Strict line-based reader: 'c' comment lines, one 'p wcnf' header, then
one clause per line as '<weight> <lit> ... 0'. Hard clauses (weight at
or above the header's top value) are rejected. Clause weights are
normalized once at parse time; the objective for an assignment is the
negated sum of normalized weights over satisfied clauses, so lower is
better.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import EnumerationRefusedError, WcnfParseError

Clause = tuple  # (weight: float, literals: tuple of nonzero ints)


@dataclass(frozen=True)
class WcnfInstance:
    n_vars: int
    clauses: tuple
    normalization: str = "standardize"
    normalized_weights: np.ndarray = field(compare=False, repr=False, default=None)

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)


def normalize_weights(raw: Sequence[float], mode: str) -> np.ndarray:
    """'standardize': subtract mean, divide by population std.

    'unit': divide by the largest absolute weight. Degenerate inputs
    (zero spread, all-zero weights) map to all-zero weights.
    """
    w = np.asarray(raw, dtype=float)
    if w.size == 0:
        return w
    if mode == "standardize":
        std = float(w.std())
        if std == 0.0:
            return np.zeros_like(w)
        return (w - w.mean()) / std
    if mode == "unit":
        top = float(np.max(np.abs(w)))
        if top == 0.0:
            return np.zeros_like(w)
        return w / top
    raise ValueError(f"unknown normalization mode {mode!r}")


def make_instance(n_vars: int, clauses: Sequence[Clause],
                  normalization: str = "standardize") -> WcnfInstance:
    clauses = tuple((float(w), tuple(int(l) for l in lits)) for w, lits in clauses)
    for w, lits in clauses:
        if not math.isfinite(w):
            raise ValueError("clause weights must be finite")
        if not lits:
            raise ValueError("empty clause")
        for lit in lits:
            if lit == 0 or abs(lit) > n_vars:
                raise ValueError(f"literal {lit} out of range for {n_vars} variables")
    normalized = normalize_weights([w for w, _ in clauses], normalization)
    return WcnfInstance(n_vars, clauses, normalization, normalized)


def parse_wcnf(text: str, normalization: str = "standardize") -> WcnfInstance:
    n_vars = None
    n_clauses_declared = None
    top = None
    header_line = 0
    clauses = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        tokens = stripped.split()
        if tokens[0] == "p":
            if n_vars is not None:
                raise WcnfParseError(lineno, "duplicate header")
            if len(tokens) not in (4, 5) or tokens[1] != "wcnf":
                raise WcnfParseError(lineno, "malformed header, expected 'p wcnf <n_vars> <n_clauses> [top]'")
            try:
                n_vars = int(tokens[2])
                n_clauses_declared = int(tokens[3])
                top = int(tokens[4]) if len(tokens) == 5 else None
            except ValueError:
                raise WcnfParseError(lineno, "header fields must be integers") from None
            if n_vars < 0 or n_clauses_declared < 0 or (top is not None and top <= 0):
                raise WcnfParseError(lineno, "header fields out of range")
            header_line = lineno
            continue
        if n_vars is None:
            raise WcnfParseError(lineno, "clause before 'p wcnf' header")
        try:
            weight = float(tokens[0])
        except ValueError:
            raise WcnfParseError(lineno, f"bad weight token {tokens[0]!r}") from None
        if not math.isfinite(weight):
            raise WcnfParseError(lineno, "clause weight must be finite")
        if top is not None and weight >= top:
            raise WcnfParseError(lineno, "hard clauses (weight >= top) are not supported")
        try:
            body = [int(t) for t in tokens[1:]]
        except ValueError:
            raise WcnfParseError(lineno, "bad literal token") from None
        if not body or body[-1] != 0:
            raise WcnfParseError(lineno, "missing clause terminator 0")
        literals = body[:-1]
        if not literals:
            raise WcnfParseError(lineno, "empty clause")
        for lit in literals:
            if lit == 0:
                raise WcnfParseError(lineno, "literal 0 before end of clause")
            if abs(lit) > n_vars:
                raise WcnfParseError(lineno, f"literal {lit} exceeds {n_vars} variables")
        clauses.append((weight, tuple(literals)))
    if n_vars is None:
        raise WcnfParseError(1, "missing 'p wcnf' header")
    if len(clauses) != n_clauses_declared:
        raise WcnfParseError(
            header_line,
            f"header declares {n_clauses_declared} clauses, found {len(clauses)}")
    return make_instance(n_vars, clauses, normalization)


def serialize_wcnf(inst: WcnfInstance) -> str:
    """Emit WCNF text that reparses to an equal instance (raw weights)."""
    lines = [f"p wcnf {inst.n_vars} {inst.n_clauses}"]
    for w, lits in inst.clauses:
        w_str = str(int(w)) if w == int(w) else repr(w)
        lines.append(" ".join([w_str] + [str(l) for l in lits] + ["0"]))
    return "\n".join(lines) + "\n"


def wmaxsat_objective(x: Sequence[int], inst: WcnfInstance) -> float:
    xa = np.asarray(x)
    if xa.shape != (inst.n_vars,):
        raise ValueError(f"expected {inst.n_vars} boolean values, got shape {xa.shape}")
    total = 0.0
    for w_norm, (_, lits) in zip(inst.normalized_weights, inst.clauses):
        for lit in lits:
            if (lit > 0) == bool(xa[abs(lit) - 1]):
                total += w_norm
                break
    return -total


def brute_force_optimum(inst: WcnfInstance, max_vars: int = 20) -> tuple:
    """Exhaustive scan over all assignments; returns (best x, best value)."""
    if inst.n_vars > max_vars:
        raise EnumerationRefusedError(
            f"{inst.n_vars} variables exceed the enumeration limit of {max_vars}")
    best_x, best_val = None, math.inf
    for bits in range(2 ** inst.n_vars):
        x = tuple((bits >> i) & 1 for i in range(inst.n_vars))
        val = wmaxsat_objective(x, inst)
        if val < best_val:
            best_x, best_val = x, val
    return best_x, best_val
