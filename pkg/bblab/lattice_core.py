"""
bblab/lattice_core.py
-----------------------------------------------------------------------------
The lattice calculus: constructions, sublattices, saturation, discriminant
data, invariant sublattices of isometries, norm overlattices and glue.

A ``Lattice`` is just a symmetric integer Gram matrix with a label.  Anything
living inside another lattice is a ``Sublattice`` (integer basis columns in
ambient coordinates); anything built by adjoining rational vectors is an
``Overlattice`` (rational basis columns in the coordinates of the lattice it
was built from).

Exports
-------
Lattice, Sublattice, Isometry, Overlattice
DiscriminantGroup, DiscriminantProfile, Parity
GlueSearchResult, GlueSearchStatus
direct_sum, rescale, signature, is_even
discriminant_group, dual_generators, discriminant_form_values
discriminant_profile, profile_equal
orthogonal_complement, saturation, saturation_index, is_primitive
invariant_sublattice, anti_invariant_sublattice
norm_overlattice, adjoin_glue_vectors, glue_unimodular_search

Design notes
------------
- Signatures come from exact congruence diagonalisation over Fraction.  A
  zero pivot with a nonzero off-diagonal entry is a hyperbolic block and
  counts (+1, −1) directly.
- "Discriminant" in reports is the order of the discriminant group; the
  signed determinant is carried separately.
- Discriminant-form values are taken over the whole group when it has at
  most ``FULL_FORM_LIMIT`` elements, which makes them an isometry invariant.
  Larger groups only record the values on the Smith generators.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from bblab.errors import (
    DegenerateLatticeError,
    DimensionError,
    GlueError,
    LatticeError,
    NotAnIsometryError,
)
from bblab.exact_linalg import (
    IntMatrix,
    Number,
    as_integral,
    denominator_lcm,
    det_exact,
    hermite_normal_form,
    kernel_basis,
    pairing,
    rank,
    smith_normal_form,
    solve_lower_triangular,
    solve_rational_columns,
)

logger = logging.getLogger(__name__)

RationalVector = tuple[Fraction, ...]

# Discriminant groups up to this order get their full value multiset.
FULL_FORM_LIMIT = 4096

# The glue search enumerates the second discriminant group explicitly.
MAX_GLUE_GROUP_ORDER = 4096


def _mod(x: Fraction, m: int) -> Fraction:
    return x - m * math.floor(x / m)


def _dot(x: Sequence[Number], y: Sequence[Number]) -> Number:
    return sum((a * b for a, b in zip(x, y) if a), start=0)


# -----------------------------------------------------------------------------
# Core types
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """A free Z-module with a symmetric integral bilinear form."""

    gram: IntMatrix
    label: str = ""

    def __post_init__(self) -> None:
        if not self.gram.is_square:
            raise DimensionError(f"Gram matrix of shape {self.gram.shape} is not square")
        if not self.gram.is_symmetric():
            raise DimensionError(f"Gram matrix of {self.label or 'lattice'} is not symmetric")

    @property
    def rank(self) -> int:
        return self.gram.nrows

    @cached_property
    def det(self) -> int:
        return det_exact(self.gram)

    def pair(self, x: Sequence[Number], y: Sequence[Number]) -> Number:
        return pairing(self.gram, x, y)

    def relabel(self, label: str) -> Lattice:
        return Lattice(self.gram, label)


@dataclass(frozen=True)
class Sublattice:
    """Columns of ``basis`` are ambient coordinates of a basis of the sublattice."""

    ambient: Lattice
    basis: IntMatrix

    def __post_init__(self) -> None:
        if self.basis.nrows != self.ambient.rank:
            raise DimensionError(
                f"basis has {self.basis.nrows} rows, ambient has rank {self.ambient.rank}"
            )
        if rank(self.basis) != self.basis.ncols:
            raise DimensionError("sublattice basis columns are linearly dependent")

    @property
    def rank(self) -> int:
        return self.basis.ncols

    @cached_property
    def gram(self) -> IntMatrix:
        return self.basis.T @ (self.ambient.gram @ self.basis)

    def as_lattice(self, label: str = "") -> Lattice:
        return Lattice(self.gram, label)


@dataclass(frozen=True)
class Isometry:
    """An integer matrix acting on ``lattice`` coordinates and preserving its Gram matrix."""

    lattice: Lattice
    matrix: IntMatrix

    def __post_init__(self) -> None:
        n = self.lattice.rank
        if self.matrix.shape != (n, n):
            raise DimensionError(f"isometry of shape {self.matrix.shape} on a rank-{n} lattice")
        if self.matrix.T @ self.lattice.gram @ self.matrix != self.lattice.gram:
            raise NotAnIsometryError(f"matrix does not preserve the Gram of {self.lattice.label}")

    @cached_property
    def is_involution(self) -> bool:
        return self.matrix @ self.matrix == IntMatrix.identity(self.lattice.rank)

    def require_involution(self) -> None:
        if not self.is_involution:
            raise NotAnIsometryError(f"isometry of {self.lattice.label} is not an involution")


@dataclass(frozen=True)
class Overlattice:
    """
    A lattice obtained by adjoining rational vectors to ``parent``.

    ``basis`` lists the new basis vectors as rational columns in ``parent``
    coordinates.  ``index`` is the index over the lattice the construction
    started from (the parent itself for glue, the doubled invariant lattice
    for norm overlattices).
    """

    lattice: Lattice
    parent: Lattice
    basis: tuple[RationalVector, ...]
    glue: tuple[RationalVector, ...] = ()
    index: int = 1

    @cached_property
    def _rows(self) -> list[list[Fraction]]:
        n = len(self.basis[0]) if self.basis else self.parent.rank
        return [[col[i] for col in self.basis] for i in range(n)]

    def coordinates(self, vector: Sequence[Number]) -> RationalVector:
        """
        Coordinates of ``vector`` (parent coordinates) in the overlattice basis.

        Raises
        ------
        LatticeError : ``vector`` is not in the rational span of the basis.
        """
        rows = self._rows
        k = len(self.basis)
        if len(rows) == k and all(rows[i][j] == 0 for i in range(k) for j in range(i + 1, k)):
            coords = solve_lower_triangular(rows, vector)
        else:
            # Normal equations against the Euclidean form, solved exactly.
            scale = denominator_lcm(x for col in self.basis for x in col)
            cols = [tuple(int(x * scale) for x in col) for col in self.basis]
            b = IntMatrix.from_columns(cols, len(rows))
            rhs = b.T.apply(tuple(Fraction(x) * scale for x in vector))
            (coords,) = solve_rational_columns(b.T @ b, [rhs])
        back = tuple(
            sum((col[i] * c for col, c in zip(self.basis, coords)), start=Fraction(0))
            for i in range(len(rows))
        )
        if back != tuple(Fraction(x) for x in vector):
            raise LatticeError("vector is not in the span of the overlattice")
        return coords

    def contains(self, vector: Sequence[Number]) -> bool:
        try:
            return as_integral(self.coordinates(vector)) is not None
        except LatticeError:
            return False


# -----------------------------------------------------------------------------
# Constructions
# -----------------------------------------------------------------------------


def direct_sum(a: Lattice, b: Lattice, label: str | None = None) -> Lattice:
    """Orthogonal direct sum with block-diagonal Gram."""
    return Lattice(IntMatrix.block_diagonal(a.gram, b.gram), label or f"{a.label}+{b.label}")


def rescale(a: Lattice, n: int, label: str | None = None) -> Lattice:
    """``a(n)``: the Gram multiplied by ``n``."""
    if n == 0:
        raise LatticeError("cannot rescale a lattice by 0")
    return Lattice(a.gram.scaled(n), label or f"{a.label}({n})")


def is_even(a: Lattice) -> bool:
    return all(a.gram[i, i] % 2 == 0 for i in range(a.rank))


def signature(gram: IntMatrix) -> tuple[int, int]:
    """
    ``(positive, negative)`` inertia of a symmetric integer matrix.

    Exact symmetric elimination over Fraction; the radical of a degenerate
    form is not counted.
    """
    m = [[Fraction(x) for x in row] for row in gram.entries]
    active = list(range(gram.nrows))
    pos = neg = 0
    while active:
        k = next((i for i in active if m[i][i] != 0), None)
        if k is not None:
            piv = m[k][k]
            if piv > 0:
                pos += 1
            else:
                neg += 1
            active.remove(k)
            col = {i: m[i][k] for i in active if m[i][k] != 0}
            for i, a in col.items():
                for j, b in col.items():
                    m[i][j] -= a * b / piv
            continue
        pair = next(((i, j) for i in active for j in active if i < j and m[i][j] != 0), None)
        if pair is None:
            break
        i, j = pair
        b = m[i][j]
        pos += 1
        neg += 1
        active.remove(i)
        active.remove(j)
        for r in active:
            for s in active:
                m[r][s] -= (m[r][i] * m[j][s] + m[r][j] * m[i][s]) / b
    return pos, neg


# -----------------------------------------------------------------------------
# Discriminant group and profile
# -----------------------------------------------------------------------------


class Parity(StrEnum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class DiscriminantGroup:
    """
    ``L*/L`` presented as ``⊕ Z/orders[i]`` with dual generators.

    Generators are rational vectors in lattice coordinates; elements are
    coefficient tuples modulo ``orders``.
    """

    lattice: Lattice
    orders: tuple[int, ...]
    generators: tuple[RationalVector, ...]

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @cached_property
    def even(self) -> bool:
        return is_even(self.lattice)

    @cached_property
    def _products(self) -> list[list[Fraction]]:
        g = self.generators
        return [[Fraction(self.lattice.pair(x, y)) for y in g] for x in g]

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.orders)

    def unit(self, i: int) -> tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(len(self.orders)))

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.orders))

    def add(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def scale(self, x: Sequence[int], k: int) -> tuple[int, ...]:
        return tuple((k * a) % d for a, d in zip(x, self.orders))

    def lift(self, x: Sequence[int]) -> RationalVector:
        n = self.lattice.rank
        out = [Fraction(0)] * n
        for c, g in zip(x, self.generators):
            if c:
                for i in range(n):
                    out[i] += c * g[i]
        return tuple(out)

    def _raw(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        p = self._products
        return sum(
            (a * b * p[i][j] for i, a in enumerate(x) if a for j, b in enumerate(y) if b),
            start=Fraction(0),
        )

    def bilinear(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        """Discriminant bilinear form, values in Q/Z."""
        return _mod(self._raw(x, y), 1)

    def quadratic(self, x: Sequence[int]) -> Fraction:
        """Discriminant quadratic form: Q/2Z for even lattices, Q/Z otherwise."""
        return _mod(self._raw(x, x), 2 if self.even else 1)


@lru_cache(maxsize=128)
def discriminant_group(a: Lattice) -> DiscriminantGroup:
    """Smith presentation of ``a*/a``: if ``u·G·v = diag(d)`` the columns ``v_i/d_i`` generate."""
    if a.det == 0:
        raise DegenerateLatticeError(f"{a.label or 'lattice'} is degenerate")
    snf = smith_normal_form(a.gram)
    assert snf.v is not None
    orders: list[int] = []
    gens: list[RationalVector] = []
    for i, d in enumerate(snf.d):
        if d > 1:
            orders.append(d)
            gens.append(tuple(Fraction(x, d) for x in snf.v.column(i)))
    return DiscriminantGroup(a, tuple(orders), tuple(gens))


def dual_generators(a: Lattice) -> tuple[tuple[int, ...], tuple[RationalVector, ...]]:
    """Orders and dual generators of the discriminant group of ``a``."""
    group = discriminant_group(a)
    return group.orders, group.generators


def discriminant_form_values(a: Lattice) -> tuple[tuple[Fraction, ...], bool]:
    """
    Sorted discriminant-form values and whether they cover the whole group.

    Groups of order at most ``FULL_FORM_LIMIT`` are enumerated completely;
    otherwise only the generators are evaluated.
    """
    group = discriminant_group(a)
    if group.order <= FULL_FORM_LIMIT:
        return tuple(sorted(group.quadratic(x) for x in group.elements())), True
    values = (group.quadratic(group.unit(i)) for i in range(len(group.orders)))
    return tuple(sorted(values)), False


@dataclass(frozen=True)
class DiscriminantProfile:
    """Comparison fingerprint of a nondegenerate lattice."""

    rank: int
    signature: tuple[int, int]
    parity: Parity
    invariant_factors: tuple[int, ...]
    disc_form_values: tuple[Fraction, ...]
    form_values_complete: bool
    determinant: int

    @property
    def discriminant_order(self) -> int:
        return math.prod(self.invariant_factors)


def discriminant_profile(a: Lattice) -> DiscriminantProfile:
    """
    Rank, signature, parity, discriminant group and form values of ``a``.

    Raises
    ------
    DegenerateLatticeError : ``det(a) == 0``.
    """
    group = discriminant_group(a)
    values, complete = discriminant_form_values(a)
    return DiscriminantProfile(
        rank=a.rank,
        signature=signature(a.gram),
        parity=Parity.EVEN if group.even else Parity.ODD,
        invariant_factors=group.orders,
        disc_form_values=values,
        form_values_complete=complete,
        determinant=a.det,
    )


def profile_equal(a: Lattice, b: Lattice) -> bool:
    """
    True when ``a`` and ``b`` share rank, signature, parity, discriminant
    group and (when both are complete) discriminant-form value multiset.
    """
    pa, pb = discriminant_profile(a), discriminant_profile(b)
    same = (
        pa.rank == pb.rank
        and pa.signature == pb.signature
        and pa.parity == pb.parity
        and pa.invariant_factors == pb.invariant_factors
    )
    if not same:
        return False
    if pa.form_values_complete and pb.form_values_complete:
        return pa.disc_form_values == pb.disc_form_values
    logger.debug("form values incomplete for %s / %s; compared groups only", a.label, b.label)
    return True


# -----------------------------------------------------------------------------
# Sublattices
# -----------------------------------------------------------------------------


def orthogonal_complement(s: Sublattice) -> Sublattice:
    """Saturated ``{x : B(x, s) = 0}`` in the ambient lattice."""
    constraints = s.basis.T @ s.ambient.gram
    return Sublattice(s.ambient, kernel_basis(constraints))


def saturation(s: Sublattice) -> Sublattice:
    """The smallest primitive sublattice of the ambient containing ``s``."""
    euclidean_perp = kernel_basis(s.basis.T)
    return Sublattice(s.ambient, kernel_basis(euclidean_perp.T))


def saturation_index(s: Sublattice) -> int:
    """
    ``[saturation(s) : s]``.

    Equal to the product of the invariant factors of the basis matrix, read
    off the pivots of the column HNF of its transpose.
    """
    hnf = hermite_normal_form(s.basis.T, transform=False)
    if hnf.rank != s.rank:
        raise DimensionError("sublattice basis columns are linearly dependent")
    return math.prod(hnf.pivots)


def is_primitive(s: Sublattice) -> bool:
    return saturation_index(s) == 1


def invariant_sublattice(g: Isometry) -> Sublattice:
    """Saturated kernel of ``g − 1``."""
    n = g.lattice.rank
    return Sublattice(g.lattice, kernel_basis(g.matrix - IntMatrix.identity(n)))


def anti_invariant_sublattice(g: Isometry) -> Sublattice:
    """Saturated kernel of ``g + 1``."""
    n = g.lattice.rank
    return Sublattice(g.lattice, kernel_basis(g.matrix + IntMatrix.identity(n)))


# -----------------------------------------------------------------------------
# Overlattices
# -----------------------------------------------------------------------------


def _overlattice_from_generators(
    gram: IntMatrix, generators: Sequence[Sequence[int]], scale: int
) -> tuple[IntMatrix, IntMatrix, int]:
    """
    Basis of the lattice spanned by ``generators / scale``.

    Returns the integer basis matrix ``M`` (columns, still multiplied by
    ``scale``), the Gram ``Mᵀ·gram·M / scale²`` and the product of the HNF
    pivots.
    """
    n = gram.nrows
    hnf = hermite_normal_form(IntMatrix.from_columns(generators, n), transform=False)
    if hnf.rank != n:
        raise DimensionError("generators do not span a full-rank lattice")
    m = IntMatrix.from_columns((hnf.h.column(j) for j in range(n)), n)
    raw = m.T @ gram @ m
    sq = scale * scale
    if any(x % sq for row in raw.entries for x in row):
        raise GlueError("overlattice Gram is not integral", [])
    new_gram = IntMatrix.from_rows(([x // sq for x in row] for row in raw.entries), n)
    return m, new_gram, math.prod(hnf.pivots)


def adjoin_glue_vectors(
    l: Lattice,
    glue: Sequence[Sequence[Number]],
    *,
    even: bool = False,
    label: str | None = None,
) -> Overlattice:
    """
    Overlattice generated by ``l`` and the rational vectors in ``glue``.

    Parameters
    ----------
    l     : The lattice to enlarge.
    glue  : Rational vectors in ``l`` coordinates, each of finite order mod l.
    even  : Additionally require even self-pairings.
    label : Label of the result (defaults to ``l.label`` with a "+glue" tag).

    Raises
    ------
    GlueError : A glue vector pairs non-integrally with ``l``, with itself,
                or with another glue vector.  The offending vector is attached.
    """
    n = l.rank
    vecs = [tuple(Fraction(x) for x in v) for v in glue]
    images: list[tuple[Number, ...]] = []
    for v in vecs:
        if len(v) != n:
            raise DimensionError(f"glue vector of length {len(v)} for rank {n}")
        gv = l.gram.apply(v)
        if as_integral(gv) is None:
            raise GlueError("glue vector pairs non-integrally with the lattice", v)
        self_pair = Fraction(_dot(v, gv))
        if self_pair.denominator != 1:
            raise GlueError("glue vector has non-integral self-pairing", v)
        if even and self_pair.numerator % 2:
            raise GlueError("glue vector has odd self-pairing", v)
        images.append(gv)
    for i, v in enumerate(vecs):
        for j in range(i + 1, len(vecs)):
            if Fraction(_dot(v, images[j])).denominator != 1:
                raise GlueError("glue vectors pair non-integrally with each other", vecs[j])

    name = label or (f"{l.label}+glue" if vecs else l.label)
    if not vecs:
        unit = tuple(tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n))
        return Overlattice(l.relabel(name), l, unit, (), 1)

    scale = denominator_lcm(x for v in vecs for x in v)
    generators = [tuple(scale if i == j else 0 for i in range(n)) for j in range(n)]
    generators += [tuple(int(x * scale) for x in v) for v in vecs]
    m, gram, pivot_product = _overlattice_from_generators(l.gram, generators, scale)
    basis = tuple(tuple(Fraction(x, scale) for x in m.column(j)) for j in range(n))
    index = scale**n // pivot_product
    logger.debug("adjoined %d glue vectors to %s: index %d", len(vecs), l.label, index)
    return Overlattice(Lattice(gram, name), l, basis, tuple(vecs), index)


def norm_overlattice(l: Lattice, g: Isometry, label: str | None = None) -> Overlattice:
    """
    Model of the pushforward of ``l`` along the double cover defined by ``g``.

    The result is generated, inside (invariant sublattice)⊗Q with the form
    doubled, by the invariant sublattice together with ``½(1+g)·t`` for all
    ``t`` in ``l``.  ``basis`` is given in ``l`` coordinates and ``index`` is
    the index over the doubled invariant sublattice.

    Raises
    ------
    NotAnIsometryError : ``g`` is not an involution.
    """
    if g.lattice.gram != l.gram:
        raise DimensionError("isometry acts on a different lattice")
    g.require_involution()
    n = l.rank
    inv = invariant_sublattice(g)
    k = inv.rank
    plus = g.matrix + IntMatrix.identity(n)
    rhs = (inv.basis.T @ l.gram) @ plus
    coords = solve_rational_columns(inv.gram, rhs.columns())
    int_coords = [as_integral(c) for c in coords]
    if any(c is None for c in int_coords):
        raise LatticeError("(1+g)·l does not lie in the invariant sublattice")

    generators = [tuple(2 if i == j else 0 for i in range(k)) for j in range(k)]
    generators += [c for c in int_coords if c is not None and any(c)]
    m, gram, pivot_product = _overlattice_from_generators(inv.gram.scaled(2), generators, 2)
    ambient = inv.basis @ m
    basis = tuple(tuple(Fraction(x, 2) for x in ambient.column(j)) for j in range(k))
    halves = tuple(
        tuple(Fraction(x, 2) for x in plus.column(j)) for j in range(n) if any(plus.column(j))
    )
    index = 2**k // pivot_product
    name = label or f"norm({l.label})"
    logger.info(
        "norm overlattice of %s: rank %d, index %d over the doubled invariant", l.label, k, index
    )
    return Overlattice(Lattice(gram, name), l, basis, halves, index)


# -----------------------------------------------------------------------------
# Unimodular glue search
# -----------------------------------------------------------------------------


class GlueSearchStatus(StrEnum):
    FOUND = "found"
    BOUND_EXHAUSTED = "bound_exhausted"
    ENUMERATION_EXHAUSTED = "enumeration_exhausted"


@dataclass(frozen=True)
class GlueSearchResult:
    """
    Outcome of ``glue_unimodular_search``.

    ``images`` lists, per generator of ``A_a``, the element of ``A_b`` it is
    sent to.  ``ENUMERATION_EXHAUSTED`` means the generator-wise enumeration
    finished without a match; it is not a proof that no gluing exists.
    """

    status: GlueSearchStatus
    candidates: int
    overlattice: Overlattice | None = None
    images: tuple[tuple[int, ...], ...] = ()

    @property
    def found(self) -> bool:
        return self.status is GlueSearchStatus.FOUND


class _BoundReached(Exception):
    pass


def glue_unimodular_search(
    a: Lattice,
    b: Lattice,
    bound: int,
    *,
    target_signature: tuple[int, int] | None = None,
) -> GlueSearchResult:
    """
    Look for an anti-isometry ``A_a → A_b`` whose graph glues ``a ⊕ b`` to an
    even unimodular overlattice.

    Generators of ``A_a`` are assigned images one at a time; a candidate image
    must have the right order, the opposite quadratic value, opposite
    pairings with the images already chosen, and must enlarge the image
    subgroup by the full generator order.  Every examined candidate counts
    against ``bound``.

    Raises
    ------
    LatticeError : the discriminant groups differ, a lattice is odd, the
                   signatures miss ``target_signature``, or the groups are
                   too large to enumerate.
    """
    if abs(a.det) != abs(b.det):
        raise LatticeError(f"|disc {a.label}| = {abs(a.det)} but |disc {b.label}| = {abs(b.det)}")
    if not (is_even(a) and is_even(b)):
        raise LatticeError("unimodular glue search needs even lattices")
    if target_signature is not None:
        sa, sb = signature(a.gram), signature(b.gram)
        if (sa[0] + sb[0], sa[1] + sb[1]) != target_signature:
            raise LatticeError(f"signatures {sa} + {sb} do not give {target_signature}")

    total = direct_sum(a, b)
    ga, gb = discriminant_group(a), discriminant_group(b)
    if ga.orders != gb.orders:
        raise LatticeError(f"discriminant groups {ga.orders} and {gb.orders} are not isomorphic")
    if ga.order == 1:
        return GlueSearchResult(GlueSearchStatus.FOUND, 0, adjoin_glue_vectors(total, []))
    if gb.order > MAX_GLUE_GROUP_ORDER:
        raise LatticeError(f"discriminant group of order {gb.order} is too large to enumerate")

    ngen = len(ga.orders)
    elements = list(gb.elements())
    zero = gb.zero()
    q_b = {e: gb.quadratic(e) for e in elements}
    need_q = [_mod(-ga.quadratic(ga.unit(i)), 2) for i in range(ngen)]
    need_b = [
        [_mod(-ga.bilinear(ga.unit(i), ga.unit(j)), 1) for j in range(ngen)] for i in range(ngen)
    ]
    images: list[tuple[int, ...]] = []
    counter = 0

    def extend(i: int, span: frozenset[tuple[int, ...]]) -> bool:
        nonlocal counter
        if i == ngen:
            return True
        d = ga.orders[i]
        for e in elements:
            counter += 1
            if counter > bound:
                raise _BoundReached
            if gb.scale(e, d) != zero or q_b[e] != need_q[i]:
                continue
            if any(gb.bilinear(e, images[j]) != need_b[i][j] for j in range(i)):
                continue
            grown = frozenset(gb.add(s, gb.scale(e, t)) for s in span for t in range(d))
            if len(grown) != len(span) * d:
                continue
            images.append(e)
            if extend(i + 1, grown):
                return True
            images.pop()
        return False

    try:
        hit = extend(0, frozenset({zero}))
    except _BoundReached:
        logger.warning("glue search %s / %s stopped at bound %d", a.label, b.label, bound)
        return GlueSearchResult(GlueSearchStatus.BOUND_EXHAUSTED, bound)
    if not hit:
        return GlueSearchResult(GlueSearchStatus.ENUMERATION_EXHAUSTED, counter)

    glue = [ga.lift(ga.unit(i)) + gb.lift(images[i]) for i in range(ngen)]
    over = adjoin_glue_vectors(total, glue, even=True, label=f"glue({a.label}, {b.label})")
    if abs(over.lattice.det) != 1:
        raise LatticeError("graph glue did not produce a unimodular lattice")
    logger.info("glued %s and %s after %d candidates", a.label, b.label, counter)
    return GlueSearchResult(GlueSearchStatus.FOUND, counter, over, tuple(images))
