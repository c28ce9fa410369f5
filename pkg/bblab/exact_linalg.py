"""
bblab/exact_linalg.py
-----------------------------------------------------------------------------
Exact integer and rational matrix kernel underpinning every lattice
computation in bblab.

Nothing in here touches floating point.  Entries are Python ``int`` (arbitrary
precision) or ``fractions.Fraction``; determinants and rational solves are
delegated to SymPy's ``DomainMatrix`` over ``ZZ``, which runs fraction-free
(Bareiss) elimination.  Smith and Hermite normal forms are implemented here
because the lattice layer needs the unimodular transforms and a fixed pivot
rule, which makes the transforms reproducible.

Exports
-------
IntMatrix
    Immutable integer matrix with row-major entries.
SnfDecomposition, smith_normal_form(a, *, transforms=True)
    ``u·a·v = diag(d)`` with ``d[k] | d[k+1]`` and trailing zeros.
HnfDecomposition, hermite_normal_form(a, *, transform=True)
    Column-style HNF ``h = a·v`` with non-negative pivots.
invariant_factors(a) -> tuple[int, ...]
det_exact(a) -> int
rank(a) -> int
kernel_basis(a) -> IntMatrix
solve_rational(a, b) / solve_rational_columns(a, columns)
solve_lower_triangular(rows, b)
inverse_unimodular(u) -> IntMatrix
as_integral(values) / denominator_lcm(values)

Pivot rules
-----------
SNF picks the nonzero entry of minimal absolute value, scanning row-major
and keeping the first on ties.  HNF works column-style: for each row it picks
the column of minimal absolute entry (first on ties), clears the row to the
right, makes the pivot positive and reduces the columns to its left modulo
the pivot.
sympy's ``hermite_normal_form`` gives the same column lattice but no
transform, and ``kernel_basis`` reads the kernel off ``v``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from bblab.errors import DimensionError, SingularMatrixError

logger = logging.getLogger(__name__)

Number = int | Fraction

# -----------------------------------------------------------------------------
# IntMatrix
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix:
    """
    Immutable integer matrix.

    ``entries`` is a tuple of row tuples.  ``ncols`` is stored separately so
    that matrices with zero rows still know their width (a 0×n matrix is the
    kernel input for an empty constraint set).
    """

    nrows: int
    ncols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.nrows:
            raise DimensionError(f"expected {self.nrows} rows, got {len(self.entries)}")
        for row in self.entries:
            if len(row) != self.ncols:
                raise DimensionError(f"row of length {len(row)} in a {self.ncols}-column matrix")
            for x in row:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise TypeError(f"IntMatrix entries must be int, got {type(x).__name__}")

    # ── constructors ────────────────────────────────────────────────────────

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(x) for x in row) for row in rows)
        width = ncols if ncols is not None else (len(data[0]) if data else 0)
        return cls(len(data), width, data)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], nrows: int) -> IntMatrix:
        cols = [tuple(int(x) for x in c) for c in columns]
        rows = tuple(tuple(c[i] for c in cols) for i in range(nrows))
        return cls(nrows, len(cols), rows)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> IntMatrix:
        return cls(m, n, tuple((0,) * n for _ in range(m)))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> IntMatrix:
        n = len(values)
        rows = tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n))
        return cls(n, n, rows)

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> IntMatrix:
        """Matrix sending basis vector ``j`` to basis vector ``perm[j]``."""
        n = len(perm)
        rows = [[0] * n for _ in range(n)]
        for j, image in enumerate(perm):
            rows[image][j] = 1
        return cls.from_rows(rows, n)

    @classmethod
    def block_diagonal(cls, *blocks: IntMatrix) -> IntMatrix:
        m = sum(b.nrows for b in blocks)
        n = sum(b.ncols for b in blocks)
        rows = [[0] * n for _ in range(m)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.entries):
                rows[r0 + i][c0 : c0 + b.ncols] = row
            r0 += b.nrows
            c0 += b.ncols
        return cls.from_rows(rows, n)

    # ── access ──────────────────────────────────────────────────────────────

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.nrows)
            for j in range(i + 1, self.ncols)
        )

    # ── arithmetic ──────────────────────────────────────────────────────────

    def transpose(self) -> IntMatrix:
        return IntMatrix(
            self.ncols,
            self.nrows,
            tuple(tuple(row[j] for row in self.entries) for j in range(self.ncols)),
        )

    @property
    def T(self) -> IntMatrix:
        return self.transpose()

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        width = other.ncols
        out: list[list[int]] = []
        # Row-by-row accumulation skipping zeros; the permutation and Gram
        # matrices used here are sparse.
        for row in self.entries:
            acc = [0] * width
            for k, a in enumerate(row):
                if a:
                    orow = other.entries[k]
                    for j in range(width):
                        b = orow[j]
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return IntMatrix.from_rows(out, width)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return IntMatrix.from_rows(
            ([a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)),
            self.ncols,
        )

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return self + other.scaled(-1)

    def __neg__(self) -> IntMatrix:
        return self.scaled(-1)

    def scaled(self, k: int) -> IntMatrix:
        return IntMatrix.from_rows(([k * x for x in row] for row in self.entries), self.ncols)

    def apply(self, vector: Sequence[Number]) -> tuple[Number, ...]:
        """Matrix–vector product; works for integer and rational vectors."""
        if len(vector) != self.ncols:
            raise DimensionError(f"vector of length {len(vector)} for {self.ncols} columns")
        return tuple(
            sum((a * x for a, x in zip(row, vector) if a), start=0) for row in self.entries
        )


def pairing(gram: IntMatrix, x: Sequence[Number], y: Sequence[Number]) -> Number:
    """Bilinear form ``xᵀ·gram·y`` for integer or rational vectors."""
    gy = gram.apply(y)
    return sum((a * b for a, b in zip(x, gy) if a), start=0)


# -----------------------------------------------------------------------------
# Rational helpers
# -----------------------------------------------------------------------------


def denominator_lcm(values: Iterable[Number]) -> int:
    """Least common multiple of the denominators of ``values`` (1 for integers)."""
    out = 1
    for x in values:
        if isinstance(x, Fraction):
            out = lcm(out, x.denominator)
    return out


def as_integral(values: Iterable[Number]) -> tuple[int, ...] | None:
    """Return ``values`` as ints, or None if any of them is not an integer."""
    out = []
    for x in values:
        f = Fraction(x)
        if f.denominator != 1:
            return None
        out.append(f.numerator)
    return tuple(out)


# -----------------------------------------------------------------------------
# Smith normal form
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SnfDecomposition:
    """
    Smith normal form ``u·a·v = diag(d)``.

    ``d`` has length ``min(m, n)``; nonzero factors come first, each dividing
    the next, zeros trail.  ``u`` and ``v`` are None when the decomposition
    was computed without transforms.
    """

    d: tuple[int, ...]
    u: IntMatrix | None
    v: IntMatrix | None

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """The nontrivial (> 1) nonzero factors."""
        return tuple(x for x in self.d if x > 1)


def _identity_rows(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _axpy(x: list[int], y: list[int], c: int) -> None:
    """In place ``x += c·y``."""
    for idx, yv in enumerate(y):
        if yv:
            x[idx] += c * yv


def _row_op(w: list[list[int]], u: list[list[int]] | None, i: int, k: int, c: int) -> None:
    _axpy(w[i], w[k], c)
    if u is not None:
        _axpy(u[i], u[k], c)


def _col_op(w: list[list[int]], v: list[list[int]] | None, j: int, k: int, c: int) -> None:
    for row in w:
        if row[k]:
            row[j] += c * row[k]
    if v is not None:
        for row in v:
            if row[k]:
                row[j] += c * row[k]


def _swap_rows(rows: list[list[int]] | None, i: int, k: int) -> None:
    if rows is not None and i != k:
        rows[i], rows[k] = rows[k], rows[i]


def _swap_cols(rows: list[list[int]] | None, j: int, k: int) -> None:
    if rows is not None and j != k:
        for row in rows:
            row[j], row[k] = row[k], row[j]


def _min_abs_entry(w: list[list[int]], t: int) -> tuple[int, int] | None:
    best: tuple[int, int] | None = None
    best_abs = 0
    for i in range(t, len(w)):
        row = w[i]
        for j in range(t, len(row)):
            x = row[j]
            if x and (best is None or abs(x) < best_abs):
                best, best_abs = (i, j), abs(x)
    return best


def _min_abs_cross(w: list[list[int]], t: int) -> tuple[int, int]:
    """Smallest nonzero entry in row ``t`` or column ``t`` (row ``t`` scanned first)."""
    best = (t, t)
    best_abs = abs(w[t][t]) or None
    for j in range(t, len(w[t])):
        x = w[t][j]
        if x and (best_abs is None or abs(x) < best_abs):
            best, best_abs = (t, j), abs(x)
    for i in range(t + 1, len(w)):
        x = w[i][t]
        if x and (best_abs is None or abs(x) < best_abs):
            best, best_abs = (i, t), abs(x)
    return best


def smith_normal_form(a: IntMatrix, *, transforms: bool = True) -> SnfDecomposition:
    """
    Smith normal form of ``a`` with optional unimodular transforms.

    Parameters
    ----------
    a          : Any integer matrix (not necessarily square).
    transforms : Track ``u`` and ``v``.  Skipping them is cheaper when only
                 the invariant factors are needed.

    Returns
    -------
    SnfDecomposition with ``u·a·v = diag(d)``.
    """
    m, n = a.shape
    w = a.to_lists()
    u = _identity_rows(m) if transforms else None
    v = _identity_rows(n) if transforms else None
    d: list[int] = []

    for t in range(min(m, n)):
        pos = _min_abs_entry(w, t)
        if pos is None:
            break
        _swap_rows(w, t, pos[0])
        _swap_rows(u, t, pos[0])
        _swap_cols(w, t, pos[1])
        _swap_cols(v, t, pos[1])

        while True:
            p = w[t][t]
            dirty = False
            for i in range(t + 1, m):
                if w[i][t]:
                    _row_op(w, u, i, t, -(w[i][t] // p))
                    dirty = dirty or w[i][t] != 0
            for j in range(t + 1, n):
                if w[t][j]:
                    _col_op(w, v, j, t, -(w[t][j] // p))
                    dirty = dirty or w[t][j] != 0
            if dirty:
                i, j = _min_abs_cross(w, t)
                _swap_rows(w, t, i)
                _swap_rows(u, t, i)
                _swap_cols(w, t, j)
                _swap_cols(v, t, j)
                continue
            # Row and column t are clear; enforce divisibility of the rest.
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if w[i][j] % p),
                None,
            )
            if bad is None:
                break
            _row_op(w, u, t, bad, 1)

        if w[t][t] < 0:
            w[t] = [-x for x in w[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        d.append(w[t][t])

    d.extend([0] * (min(m, n) - len(d)))
    return SnfDecomposition(
        d=tuple(d),
        u=IntMatrix.from_rows(u, m) if u is not None else None,
        v=IntMatrix.from_rows(v, n) if v is not None else None,
    )


def invariant_factors(a: IntMatrix) -> tuple[int, ...]:
    """Full SNF diagonal of ``a`` (including 1s and trailing zeros), no transforms."""
    return smith_normal_form(a, transforms=False).d


# -----------------------------------------------------------------------------
# Hermite normal form
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class HnfDecomposition:
    """
    Column-style Hermite normal form ``h = a·v``.

    The first ``rank`` columns of ``h`` are in echelon form with positive
    pivots at ``pivot_rows``; entries left of a pivot lie in ``[0, pivot)``.
    The remaining columns of ``h`` are zero, so the matching columns of ``v``
    span the integer kernel of ``a``.
    """

    h: IntMatrix
    v: IntMatrix | None
    rank: int
    pivot_rows: tuple[int, ...]

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(self.h[i, k] for k, i in enumerate(self.pivot_rows))


def hermite_normal_form(a: IntMatrix, *, transform: bool = True) -> HnfDecomposition:
    """Column-style HNF of ``a``; ``v`` is tracked unless ``transform`` is False."""
    m, n = a.shape
    # Work on columns as lists; each carries its slice of v after position m.
    cols = []
    for j in range(n):
        unit = [1 if k == j else 0 for k in range(n)] if transform else []
        cols.append(list(a.column(j)) + unit)
    r = 0
    pivot_rows: list[int] = []

    for i in range(m):
        if r == n:
            break
        found = False
        while True:
            live = [k for k in range(r, n) if cols[k][i]]
            if not live:
                break
            found = True
            k = min(live, key=lambda c: abs(cols[c][i]))
            cols[r], cols[k] = cols[k], cols[r]
            p = cols[r][i]
            residue = False
            for k in range(r + 1, n):
                c = cols[k][i]
                if c:
                    _axpy(cols[k], cols[r], -(c // p))
                    residue = residue or cols[k][i] != 0
            if not residue:
                break
        if not found:
            continue
        if cols[r][i] < 0:
            cols[r] = [-x for x in cols[r]]
        p = cols[r][i]
        for k in range(r):
            q = cols[k][i] // p
            if q:
                _axpy(cols[k], cols[r], -q)
        pivot_rows.append(i)
        r += 1

    h = IntMatrix.from_columns((c[:m] for c in cols), m) if n else IntMatrix.zeros(m, 0)
    v = IntMatrix.from_columns((c[m:] for c in cols), n) if transform else None
    return HnfDecomposition(h=h, v=v, rank=r, pivot_rows=tuple(pivot_rows))


def rank(a: IntMatrix) -> int:
    """Rank over Q."""
    return hermite_normal_form(a, transform=False).rank


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """
    Saturated basis of the integer kernel ``{x : a·x = 0}`` as columns.

    The columns come from a unimodular transform, so they extend to a basis
    of Z^n and the kernel they span is primitive.  A zero kernel gives an
    n×0 matrix.
    """
    hnf = hermite_normal_form(a)
    assert hnf.v is not None
    n = a.ncols
    return IntMatrix.from_columns((hnf.v.column(j) for j in range(hnf.rank, n)), n)


# -----------------------------------------------------------------------------
# Determinants and rational solves (SymPy DomainMatrix)
# -----------------------------------------------------------------------------


def _to_domain(a: IntMatrix) -> DomainMatrix:
    return DomainMatrix([[ZZ(x) for x in row] for row in a.entries], a.shape, ZZ)


def det_exact(a: IntMatrix) -> int:
    """Exact determinant by fraction-free elimination over ZZ."""
    if not a.is_square:
        raise DimensionError(f"determinant of non-square {a.shape} matrix")
    if a.nrows == 0:
        return 1
    if a.nrows > 100:
        logger.info("computing %dx%d exact determinant", a.nrows, a.ncols)
    return int(_to_domain(a).det())


def solve_rational_columns(
    a: IntMatrix, columns: Sequence[Sequence[Number]]
) -> list[tuple[Fraction, ...]]:
    """
    Solve ``a·x = b`` exactly for several right-hand sides at once.

    Raises
    ------
    DimensionError      : ``a`` is not square or a column has the wrong length.
    SingularMatrixError : ``a`` is singular.
    """
    if not a.is_square:
        raise DimensionError(f"solve on non-square {a.shape} matrix")
    n = a.nrows
    for b in columns:
        if len(b) != n:
            raise DimensionError(f"right-hand side of length {len(b)} for {n} rows")
    if not columns:
        return []
    if n == 0:
        return [() for _ in columns]

    scale = denominator_lcm(x for b in columns for x in b)
    rhs_rows = [[ZZ(int(Fraction(b[i]) * scale)) for b in columns] for i in range(n)]
    rhs = DomainMatrix(rhs_rows, (n, len(columns)), ZZ)
    try:
        xnum, xden = _to_domain(a).solve_den(rhs)
    except DMNonInvertibleMatrixError as exc:
        raise SingularMatrixError(f"{n}x{n} matrix is singular") from exc

    den = int(xden) * scale
    num = xnum.to_list()
    return [tuple(Fraction(int(num[i][j]), den) for i in range(n)) for j in range(len(columns))]


def solve_rational(a: IntMatrix, b: Sequence[Number]) -> tuple[Fraction, ...]:
    """Exact solution of ``a·x = b`` for a nonsingular square ``a``."""
    return solve_rational_columns(a, [b])[0]


def solve_lower_triangular(
    rows: Sequence[Sequence[Number]], b: Sequence[Number]
) -> tuple[Fraction, ...]:
    """Forward substitution for a lower-triangular matrix given by rows."""
    n = len(rows)
    x: list[Fraction] = []
    for i in range(n):
        diag = Fraction(rows[i][i])
        if diag == 0:
            raise SingularMatrixError(f"zero diagonal at position {i}")
        known = sum((rows[i][j] * x[j] for j in range(i) if rows[i][j]), start=Fraction(0))
        x.append((Fraction(b[i]) - known) / diag)
    return tuple(x)


def inverse_unimodular(u: IntMatrix) -> IntMatrix:
    """Integer inverse of a unimodular matrix."""
    n = u.nrows
    units = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    cols = solve_rational_columns(u, units)
    ints = []
    for c in cols:
        ic = as_integral(c)
        if ic is None:
            raise DimensionError("matrix is not unimodular: inverse has fractional entries")
        ints.append(ic)
    return IntMatrix.from_columns(ints, n)
