"""Constraint-set descriptions for the projection operators.

Each variant is a small frozen dataclass; ``dimension`` gives the length of
a flattened point, ``contains`` tests feasibility within a tolerance, and
``ordered_table_polytope`` assembles the linear system encoding a two-way
probability table whose cumulative row sums are nondecreasing down the rows.
Tables are flattened row-major (row i, column j maps to index ``i * J + j``)
so the constraint matrices are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Interval",
    "Box",
    "Simplex",
    "Polytope",
    "OrderedTable",
    "Sphere",
    "Stiefel",
    "ConstraintSet",
]


@dataclass(frozen=True)
class Interval:
    """Closed interval [c, d]; either bound may be infinite, not both."""

    c: float
    d: float

    def __post_init__(self):
        if math.isinf(self.c) and math.isinf(self.d):
            raise ValueError("interval must have at least one finite bound")
        if not self.c < self.d:
            raise ValueError(f"interval requires c < d, got [{self.c}, {self.d}]")

    def dimension(self) -> int:
        return 1

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        x = float(np.asarray(x).reshape(()))
        return self.c - tol <= x <= self.d + tol


@dataclass(frozen=True)
class Box:
    """Axis-aligned box {x : lower <= x <= upper} componentwise."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if not np.all(lo <= hi):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def dimension(self) -> int:
        return self.lower.size

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))


@dataclass(frozen=True)
class Simplex:
    """Probability simplex {x >= 0, sum(x) = 1} in the given dimension."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("simplex dimension must be >= 1")

    def dimension(self) -> int:
        return self.dim

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and abs(float(x.sum()) - 1.0) <= max(tol, 1e-12))


@dataclass(frozen=True)
class Polytope:
    """{x : A_ineq x >= b_ineq, C_eq x = e_eq}; either block may be empty."""

    A_ineq: np.ndarray | None = None
    b_ineq: np.ndarray | None = None
    C_eq: np.ndarray | None = None
    e_eq: np.ndarray | None = None

    def __post_init__(self):
        dims = set()
        for mat_name, vec_name in (("A_ineq", "b_ineq"), ("C_eq", "e_eq")):
            mat = getattr(self, mat_name)
            vec = getattr(self, vec_name)
            if (mat is None) != (vec is None):
                raise ValueError(f"{mat_name} and {vec_name} must be supplied together")
            if mat is None:
                continue
            mat = np.atleast_2d(np.asarray(mat, dtype=float))
            vec = np.atleast_1d(np.asarray(vec, dtype=float))
            if mat.shape[0] != vec.size:
                raise ValueError(f"{mat_name} has {mat.shape[0]} rows but {vec_name} has {vec.size} entries")
            dims.add(mat.shape[1])
            object.__setattr__(self, mat_name, mat)
            object.__setattr__(self, vec_name, vec)
        if not dims:
            raise ValueError("polytope needs at least one constraint block")
        if len(dims) > 1:
            raise ValueError(f"constraint blocks disagree on dimension: {sorted(dims)}")

    def dimension(self) -> int:
        block = self.A_ineq if self.A_ineq is not None else self.C_eq
        return block.shape[1]

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        ok = True
        if self.A_ineq is not None:
            ok &= bool(np.all(self.A_ineq @ x >= self.b_ineq - tol))
        if self.C_eq is not None:
            ok &= bool(np.all(np.abs(self.C_eq @ x - self.e_eq) <= max(tol, 1e-12)))
        return ok


@dataclass(frozen=True)
class OrderedTable:
    """I x J probability tables with nondecreasing cumulative rows.

    Each row lies on the J-simplex and, for every column cut j < J, the
    cumulative sum of row i+1 dominates that of row i.  The j = J cut is
    1 >= 1 for any pair of simplex rows and is omitted.
    """

    I: int
    J: int

    def __post_init__(self):
        if self.I < 2 or self.J < 2:
            raise ValueError(f"ordered table needs I >= 2 and J >= 2, got {self.I} x {self.J}")

    def dimension(self) -> int:
        return self.I * self.J

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        table = np.asarray(x, dtype=float).reshape(self.I, self.J)
        if not np.all(table >= -tol):
            return False
        if not np.all(np.abs(table.sum(axis=1) - 1.0) <= max(tol, 1e-12)):
            return False
        cum = np.cumsum(table, axis=1)[:, : self.J - 1]
        return bool(np.all(np.diff(cum, axis=0) >= -tol))


@dataclass(frozen=True)
class Sphere:
    """Unit sphere {x : ||x||_2 = 1} in R^m."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("sphere dimension must be >= 1")

    def dimension(self) -> int:
        return self.m

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return abs(float(np.linalg.norm(x)) - 1.0) <= max(tol, 1e-12)


@dataclass(frozen=True)
class Stiefel:
    """Orthonormal p-frames in R^m, as m x p matrices (flattened row-major)."""

    p: int
    m: int

    def __post_init__(self):
        if not 1 <= self.p <= self.m:
            raise ValueError(f"stiefel requires 1 <= p <= m, got p={self.p}, m={self.m}")

    def dimension(self) -> int:
        return self.m * self.p

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        theta = np.asarray(x, dtype=float).reshape(self.m, self.p)
        gram = theta.T @ theta
        return float(np.max(np.abs(gram - np.eye(self.p)))) <= max(tol, 1e-10)


ConstraintSet = Interval | Box | Simplex | Polytope | OrderedTable | Sphere | Stiefel

CONVEX_VARIANTS = (Interval, Box, Simplex, Polytope, OrderedTable)


def ordered_table_polytope(table: OrderedTable) -> Polytope:
    """Linear description of an OrderedTable over the flattened vector.

    Equalities: each row sums to one.  Inequalities: every entry is
    nonnegative, and cumulative sums grow down the rows for column cuts
    1..J-1.
    """
    I, J = table.I, table.J
    n = I * J

    C_eq = np.zeros((I, n))
    for i in range(I):
        C_eq[i, i * J : (i + 1) * J] = 1.0
    e_eq = np.ones(I)

    rows = [np.eye(n)]
    for i in range(I - 1):
        for j in range(J - 1):
            row = np.zeros(n)
            row[(i + 1) * J : (i + 1) * J + j + 1] = 1.0
            row[i * J : i * J + j + 1] = -1.0
            rows.append(row[None, :])
    A_ineq = np.vstack(rows)
    b_ineq = np.zeros(A_ineq.shape[0])
    return Polytope(A_ineq=A_ineq, b_ineq=b_ineq, C_eq=C_eq, e_eq=e_eq)
