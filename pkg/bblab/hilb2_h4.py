"""
bblab/hilb2_h4.py
-----------------------------------------------------------------------------
Integral degree-4 cohomology of the Hilbert square of a surface: the integral
Nakajima-operator basis, its exact cup-product pairing, the action of the
involution, the classes δ² and Σ, the invariant sublattice and the parity and
primitivity certificates built on them.

Everything is parametrised by a ``SurfaceModel`` (an even unimodular surface
lattice, an involution and a ``BasisConvention``), so the 276-dimensional K3
build and the 15-dimensional ``U ⊕ U`` harness run the same code.

Basis (order is fixed; positions are 0-based)
---------------------------------------------
    pt            q₁(1)q₁(x)|0⟩                     1
    q2(k)         q₂(α_k)|0⟩                        n
    q1q1(k, m)    q₁(α_k)q₁(α_m)|0⟩, k < m          n(n−1)/2, lexicographic
    m11(k)        m₁,₁(α_k)|0⟩                      n

Pairing rules
-------------
Each basis element expands into monomials in H² classes plus the point class:

    q2(k)      = δ·γ_k
    q1q1(k, m) = γ_k·γ_m − B(γ_k, γ_m)·pt
    m11(k)     = ½γ_k² − ½δ·γ_k − ½B(γ_k, γ_k)·pt

Products of two H²-monomials follow the polarised Fujiki relation with
constant 3; products with pt follow pt·pt = 1, pt·(δγ) = 0,
pt·(γγ') = B(γ, γ').  None of the basis elements involves δ·δ, so the Gram
never reads the constant pt·δδ; that constant is recovered afterwards by
``resolve_delta_point_constant``.

Exports
-------
QwKind, QwIndex, qw_basis, H4Type, SurfaceModel, k3_model, truncation_model
FujikiForm, fujiki_quadruple
Monomial, MonoKind, MonomialCombo, element_monomials, monomial_pairing, h2_product
h4_gram, mu_matrix, diagonal_square
DeltaResolution, resolve_delta_point_constant, delta_squared_coords
PrintedComparison, printed_delta_comparison
sigma_pairing_vector, sigma_coords, H4Class, h4_pairing
iota_on_h4, classify_h4_index, InvariantH4, invariant_h4, k_tilde
ParityCheck, adf_parity, adf_parity_check
monomials_to_h4, selectable_h2_classes, h2_half_vector_membership
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from bblab.catalog import (
    K3_CONVENTION,
    TRUNCATION_CONVENTION,
    BasisConvention,
    make_hyperbolic_swap_truncation,
    make_k3,
)
from bblab.errors import (
    DimensionError,
    LatticeError,
    RuleConsistencyError,
    UnresolvedConstantError,
)
from bblab.exact_linalg import (
    IntMatrix,
    Number,
    as_integral,
    det_exact,
    inverse_unimodular,
    pairing,
    solve_rational_columns,
)
from bblab.lattice_core import (
    Isometry,
    Lattice,
    Overlattice,
    Sublattice,
    adjoin_glue_vectors,
    is_even,
    rescale,
)

logger = logging.getLogger(__name__)

# Candidates for pt·δδ are scanned in [-DELTA_SCAN_RADIUS, DELTA_SCAN_RADIUS].
DELTA_SCAN_RADIUS = 4


def _num(x: Fraction) -> Number:
    return x.numerator if x.denominator == 1 else x


# -----------------------------------------------------------------------------
# Basis indexing
# -----------------------------------------------------------------------------


class QwKind(StrEnum):
    POINT = "pt"
    Q2 = "q2"
    Q1Q1 = "q1q1"
    M11 = "m11"


@dataclass(frozen=True)
class QwIndex:
    kind: QwKind
    k: int = -1
    m: int = -1

    def label(self, convention: BasisConvention = K3_CONVENTION) -> str:
        g = convention.label
        if self.kind is QwKind.POINT:
            return "q1(1)q1(x)|0>"
        if self.kind is QwKind.Q2:
            return f"q2({g(self.k)})|0>"
        if self.kind is QwKind.Q1Q1:
            return f"q1({g(self.k)})q1({g(self.m)})|0>"
        return f"m11({g(self.k)})|0>"


def qw_basis(n: int) -> tuple[QwIndex, ...]:
    """The ``1 + n + n(n−1)/2 + n`` basis elements in their fixed order."""
    out = [QwIndex(QwKind.POINT)]
    out += [QwIndex(QwKind.Q2, k) for k in range(n)]
    out += [QwIndex(QwKind.Q1Q1, k, m) for k, m in itertools.combinations(range(n), 2)]
    out += [QwIndex(QwKind.M11, k) for k in range(n)]
    return tuple(out)


class H4Type(StrEnum):
    """Orbit types of the involution on the basis."""

    A = "a"  # fixed, built from fixed H² classes
    B = "b"  # exchanged, mixing a fixed and a moved class
    C = "c"  # exchanged, within one moved block
    D = "d"  # fixed product of a class with its image
    E = "e"  # exchanged, across the moved blocks
    F = "f"  # the point class


FIXED_TYPES = frozenset({H4Type.A, H4Type.D, H4Type.F})
HALVED_TYPES = frozenset({H4Type.B, H4Type.C, H4Type.E})
TYPE_ORDER = (H4Type.A, H4Type.B, H4Type.C, H4Type.D, H4Type.E, H4Type.F)


# -----------------------------------------------------------------------------
# Fujiki form and surface models
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class FujikiForm:
    """Beauville–Bogomolov Gram of the Hilbert square and its Fujiki constant."""

    bb_gram: IntMatrix
    fujiki_constant: Fraction = Fraction(3)

    def quadruple(
        self, a: Sequence[Number], b: Sequence[Number], c: Sequence[Number], d: Sequence[Number]
    ) -> Number:
        """Polarised quartic form ``(C/3)·(B(a,b)B(c,d) + B(a,c)B(b,d) + B(a,d)B(b,c))``."""
        g = self.bb_gram
        total = (
            pairing(g, a, b) * pairing(g, c, d)
            + pairing(g, a, c) * pairing(g, b, d)
            + pairing(g, a, d) * pairing(g, b, c)
        )
        return _num(self.fujiki_constant * Fraction(total) / 3)

    def on_basis(self, a: int, b: int, c: int, d: int) -> Number:
        e = self.bb_gram.entries
        total = e[a][b] * e[c][d] + e[a][c] * e[b][d] + e[a][d] * e[b][c]
        if self.fujiki_constant == 3:
            return total
        return _num(self.fujiki_constant * total / 3)


@dataclass(frozen=True)
class SurfaceModel:
    """
    An even unimodular surface lattice with an involution in a fixed layout.

    The Hilbert-square H² is the surface lattice plus δ (square −2) at
    position ``n``.
    """

    name: str
    surface: Lattice
    involution: Isometry
    convention: BasisConvention

    def __post_init__(self) -> None:
        n = self.surface.rank
        if n != self.convention.surface_rank or self.convention.delta != n:
            raise DimensionError(f"{self.name}: rank {n} does not fit the basis convention")
        expected = IntMatrix.permutation(self.convention.surface_permutation())
        if self.involution.matrix != expected:
            raise DimensionError(f"{self.name}: involution does not match the basis convention")
        if abs(self.surface.det) != 1 or not is_even(self.surface):
            raise DimensionError(f"{self.name}: surface lattice must be even unimodular")

    @property
    def n(self) -> int:
        return self.surface.rank

    @property
    def delta(self) -> int:
        return self.convention.delta

    @cached_property
    def basis(self) -> tuple[QwIndex, ...]:
        return qw_basis(self.n)

    @cached_property
    def position(self) -> dict[QwIndex, int]:
        return {e: i for i, e in enumerate(self.basis)}

    @cached_property
    def b(self) -> tuple[tuple[int, ...], ...]:
        return self.surface.gram.entries

    @cached_property
    def fujiki(self) -> FujikiForm:
        return FujikiForm(IntMatrix.block_diagonal(self.surface.gram, IntMatrix.diagonal([-2])))

    def index(self, kind: QwKind, k: int = -1, m: int = -1) -> int:
        if kind is QwKind.Q1Q1 and k > m:
            k, m = m, k
        return self.position[QwIndex(kind, k, m)]

    @property
    def size(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=None)
def k3_model() -> SurfaceModel:
    lattice, swap = make_k3()
    return SurfaceModel("K3", lattice, swap, K3_CONVENTION)


@lru_cache(maxsize=None)
def truncation_model() -> SurfaceModel:
    lattice, swap = make_hyperbolic_swap_truncation()
    return SurfaceModel("U+U", lattice, swap, TRUNCATION_CONVENTION)


def _model(model: SurfaceModel | None) -> SurfaceModel:
    return model if model is not None else k3_model()


def fujiki_quadruple(
    a: Sequence[Number],
    b: Sequence[Number],
    c: Sequence[Number],
    d: Sequence[Number],
    model: SurfaceModel | None = None,
) -> Number:
    """4-fold cup product of H² classes of the Hilbert square (length n+1 vectors)."""
    return _model(model).fujiki.quadruple(a, b, c, d)


# -----------------------------------------------------------------------------
# Monomials
# -----------------------------------------------------------------------------


class MonoKind(StrEnum):
    PT = "pt"
    GG = "gg"  # γ_k·γ_m, k <= m
    DG = "dg"  # δ·γ_k
    DD = "dd"  # δ·δ


@dataclass(frozen=True, order=True)
class Monomial:
    kind: MonoKind
    k: int = -1
    m: int = -1

    @classmethod
    def gg(cls, k: int, m: int) -> Monomial:
        return cls(MonoKind.GG, min(k, m), max(k, m))

    @classmethod
    def dg(cls, k: int) -> Monomial:
        return cls(MonoKind.DG, k)


PT = Monomial(MonoKind.PT)
DD = Monomial(MonoKind.DD)


@dataclass(frozen=True)
class MonomialCombo:
    """Formal rational combination of monomials; zero terms are dropped."""

    terms: tuple[tuple[Monomial, Fraction], ...] = ()

    @classmethod
    def of(
        cls, items: Mapping[Monomial, Number] | Iterable[tuple[Monomial, Number]]
    ) -> MonomialCombo:
        acc: dict[Monomial, Fraction] = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for mono, c in pairs:
            acc[mono] = acc.get(mono, Fraction(0)) + Fraction(c)
        return cls(tuple(sorted((m, c) for m, c in acc.items() if c)))

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.terms)

    def __add__(self, other: MonomialCombo) -> MonomialCombo:
        return MonomialCombo.of(self.terms + other.terms)

    def scaled(self, c: Number) -> MonomialCombo:
        return MonomialCombo.of((m, c * v) for m, v in self.terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return next((c for m, c in self.terms if m == mono), Fraction(0))


def element_monomials(index: QwIndex, model: SurfaceModel | None = None) -> MonomialCombo:
    """Monomial expansion of a basis element."""
    b = _model(model).b
    k, m = index.k, index.m
    if index.kind is QwKind.POINT:
        return MonomialCombo.of({PT: 1})
    if index.kind is QwKind.Q2:
        return MonomialCombo.of({Monomial.dg(k): 1})
    if index.kind is QwKind.Q1Q1:
        return MonomialCombo.of({Monomial.gg(k, m): 1, PT: -b[k][m]})
    return MonomialCombo.of(
        {
            Monomial.gg(k, k): Fraction(1, 2),
            Monomial.dg(k): Fraction(-1, 2),
            PT: Fraction(-b[k][k], 2),
        }
    )


def _factors(mono: Monomial, delta: int) -> tuple[int, int]:
    if mono.kind is MonoKind.GG:
        return mono.k, mono.m
    if mono.kind is MonoKind.DG:
        return delta, mono.k
    return delta, delta


def _pair_monomials(p: Monomial, q: Monomial, model: SurfaceModel, d: int | None) -> Number:
    if p.kind is MonoKind.PT or q.kind is MonoKind.PT:
        other = q if p.kind is MonoKind.PT else p
        if other.kind is MonoKind.PT:
            return 1
        if other.kind is MonoKind.DG:
            return 0
        if other.kind is MonoKind.GG:
            return model.b[other.k][other.m]
        if d is None:
            raise UnresolvedConstantError("pt·δδ is unknown until δ² has been resolved")
        return d
    a, b = _factors(p, model.delta)
    c, e = _factors(q, model.delta)
    return model.fujiki.on_basis(a, b, c, e)


def monomial_pairing(
    x: MonomialCombo, y: MonomialCombo, model: SurfaceModel | None = None, d: int | None = None
) -> Fraction:
    """
    Cup product of two monomial combinations.

    Raises
    ------
    UnresolvedConstantError : a pt·δδ term occurs and ``d`` is None.
    """
    mdl = _model(model)
    total = Fraction(0)
    for p, cp in x:
        for q, cq in y:
            total += cp * cq * _pair_monomials(p, q, mdl, d)
    return total


def h2_product(
    x: Sequence[Number], y: Sequence[Number], model: SurfaceModel | None = None
) -> MonomialCombo:
    """Cup product of two H² classes (length n+1, δ last) as monomials."""
    mdl = _model(model)
    delta = mdl.delta
    terms: list[tuple[Monomial, Number]] = []
    for a, xa in enumerate(x):
        if not xa:
            continue
        for b, yb in enumerate(y):
            if not yb:
                continue
            if a == delta and b == delta:
                mono = DD
            elif a == delta or b == delta:
                mono = Monomial.dg(b if a == delta else a)
            else:
                mono = Monomial.gg(a, b)
            terms.append((mono, xa * yb))
    return MonomialCombo.of(terms)


# -----------------------------------------------------------------------------
# Gram
# -----------------------------------------------------------------------------


def _doubled_expansion(index: QwIndex, model: SurfaceModel) -> list[tuple[Monomial, int]]:
    # Twice each expansion is integral.
    return [(m, int(2 * c)) for m, c in element_monomials(index, model)]


@lru_cache(maxsize=None)
def _h4_gram(model: SurfaceModel) -> IntMatrix:
    size = model.size
    logger.info("assembling the %dx%d degree-4 Gram for %s", size, size, model.name)
    expansions = [_doubled_expansion(e, model) for e in model.basis]
    rows = [[0] * size for _ in range(size)]
    bad: list[tuple[int, int, str]] = []
    for i in range(size):
        ei = expansions[i]
        for j in range(i, size):
            total = 0
            for p, cp in ei:
                for q, cq in expansions[j]:
                    total += cp * cq * _pair_monomials(p, q, model, None)
            if total % 4:
                bad.append((i, j, str(Fraction(total, 4))))
            rows[i][j] = rows[j][i] = total // 4
    if bad:
        raise RuleConsistencyError(
            f"{len(bad)} non-integral entries in the degree-4 Gram", {"entries": bad[:20]}
        )
    gram = IntMatrix.from_rows(rows, size)
    det = det_exact(gram)
    if abs(det) != 1:
        raise RuleConsistencyError(f"degree-4 Gram has determinant {det}", {"det": det})
    logger.info("degree-4 Gram for %s is unimodular (det %d)", model.name, det)
    return gram


def h4_gram(model: SurfaceModel | None = None) -> IntMatrix:
    """
    Gram of the integral degree-4 basis.

    Raises
    ------
    RuleConsistencyError : an entry is non-integral or ``|det| ≠ 1``.
    """
    return _h4_gram(_model(model))


def h4_pairing(
    x: Sequence[Number], y: Sequence[Number], model: SurfaceModel | None = None
) -> Number:
    return pairing(h4_gram(model), x, y)


def mu_matrix(model: SurfaceModel | None = None) -> IntMatrix:
    """``μ = G⁻¹`` for the surface Gram; integral with even diagonal."""
    mdl = _model(model)
    mu = inverse_unimodular(mdl.surface.gram)
    odd = [k for k in range(mdl.n) if mu[k, k] % 2]
    if odd:
        raise RuleConsistencyError("inverse surface Gram has odd diagonal", {"positions": odd})
    return mu


def diagonal_square(model: SurfaceModel | None = None) -> int:
    """Self-intersection of the diagonal in S×S: ``tr(μGμG) + 2``."""
    mdl = _model(model)
    g = mdl.surface.gram
    mu = mu_matrix(mdl)
    prod = mu @ g @ mu @ g
    return sum(prod[i, i] for i in range(mdl.n)) + 2


# -----------------------------------------------------------------------------
# δ² and Σ
# -----------------------------------------------------------------------------


def sigma_pairing_vector(model: SurfaceModel | None = None) -> tuple[Fraction, ...]:
    """
    Cup products of Σ with each basis element.

    Σ·pt = 1, Σ·q2(k) = 0, Σ·q1q1(k, m) = B(γ_k, i*γ_m) and, by linearity,
    Σ·m11(k) = B(γ_k, i*γ_k)/2.
    """
    mdl = _model(model)
    b, swap = mdl.b, mdl.convention.swap
    out: list[Fraction] = []
    for e in mdl.basis:
        if e.kind is QwKind.POINT:
            out.append(Fraction(1))
        elif e.kind is QwKind.Q2:
            out.append(Fraction(0))
        elif e.kind is QwKind.Q1Q1:
            out.append(Fraction(b[e.k][swap(e.m)]))
        else:
            out.append(Fraction(b[e.k][swap(e.k)], 2))
    return tuple(out)


@dataclass(frozen=True)
class _Solutions:
    v0: tuple[Fraction, ...]
    w: tuple[Fraction, ...]
    x0: tuple[Fraction, ...]
    xw: tuple[Fraction, ...]
    sigma: tuple[Fraction, ...]


@lru_cache(maxsize=None)
def _solutions(model: SurfaceModel) -> _Solutions:
    # δ²'s pairing vector is v0 + d·w, with w the pt-coefficients of the basis.
    gram = _h4_gram(model)
    dd = MonomialCombo.of({DD: 1})
    expansions = [element_monomials(e, model) for e in model.basis]
    v0 = tuple(monomial_pairing(dd, ex, model, d=0) for ex in expansions)
    w = tuple(ex.coefficient(PT) for ex in expansions)
    logger.info("solving the degree-4 system for δ² and Σ on %s", model.name)
    x0, xw, xs = solve_rational_columns(gram, [v0, w, sigma_pairing_vector(model)])
    return _Solutions(v0, w, x0, xw, xs)


@dataclass(frozen=True)
class H4Class:
    """A degree-4 class by its coordinates in the integral basis."""

    name: str
    coords: tuple[int, ...]

    def support(self, model: SurfaceModel | None = None) -> list[tuple[str, int]]:
        mdl = _model(model)
        return [
            (mdl.basis[i].label(mdl.convention), c) for i, c in enumerate(self.coords) if c
        ]


@dataclass(frozen=True)
class DeltaResolution:
    """
    The resolved value of pt·δδ.

    ``scan`` lists ``(d, integral, self_pairing)`` for every candidate; a
    candidate is admissible when the solved vector is integral and squares
    to the Fujiki value of δ⁴.
    """

    constant: int
    coords: tuple[int, ...]
    target: int
    scan: tuple[tuple[int, bool, Fraction], ...]


@lru_cache(maxsize=None)
def _resolve_delta(model: SurfaceModel, radius: int) -> DeltaResolution:
    sol = _solutions(model)
    delta = model.delta
    target = int(model.fujiki.on_basis(delta, delta, delta, delta))
    scan: list[tuple[int, bool, Fraction]] = []
    hits: list[tuple[int, tuple[int, ...]]] = []
    for d in range(-radius, radius + 1):
        x = tuple(a + d * b for a, b in zip(sol.x0, sol.xw))
        ix = as_integral(x)
        square = sum((xi * (a + d * b) for xi, a, b in zip(x, sol.v0, sol.w)), start=Fraction(0))
        logger.debug("pt.dd = %d: integral=%s, square=%s", d, ix is not None, square)
        scan.append((d, ix is not None, square))
        if ix is not None and square == target:
            hits.append((d, ix))
    if len(hits) != 1:
        raise RuleConsistencyError(
            f"{len(hits)} admissible values of pt·δδ in [-{radius}, {radius}] for {model.name}",
            {"scan": [(d, ok, str(sq)) for d, ok, sq in scan], "target": target},
        )
    d, coords = hits[0]
    logger.info("pt·δδ resolved to %d on %s", d, model.name)
    return DeltaResolution(d, coords, target, tuple(scan))


def resolve_delta_point_constant(
    model: SurfaceModel | None = None, radius: int = DELTA_SCAN_RADIUS
) -> DeltaResolution:
    """
    Pin down pt·δδ by scanning ``|d| ≤ radius``.

    The Gram is unimodular, so every integer d gives an integral solution;
    a value is accepted when the solution also squares to δ⁴ = 3·B(δ,δ)².

    Raises
    ------
    RuleConsistencyError : zero or several admissible values.
    """
    return _resolve_delta(_model(model), radius)


def delta_squared_coords(model: SurfaceModel | None = None) -> H4Class:
    return H4Class("delta2", resolve_delta_point_constant(model).coords)


@dataclass(frozen=True)
class PrintedComparison:
    """
    Solved δ² against the μ-expansion with pt-coefficient +1.

    ``sign`` is +1 or −1 when the two agree up to that global sign, else None
    and ``mismatches`` lists the differing positions.
    """

    printed: tuple[Fraction, ...]
    sign: int | None
    mismatches: tuple[int, ...]


def printed_delta_comparison(model: SurfaceModel | None = None) -> PrintedComparison:
    mdl = _model(model)
    mu = mu_matrix(mdl)
    printed = [Fraction(0)] * mdl.size
    printed[mdl.index(QwKind.POINT)] = Fraction(1)
    for i, j in itertools.combinations(range(mdl.n), 2):
        printed[mdl.index(QwKind.Q1Q1, i, j)] = Fraction(mu[i, j])
    for i in range(mdl.n):
        # ½μ_ii·q1(α_i)² = μ_ii·m11(α_i) + ½μ_ii·q2(α_i)
        printed[mdl.index(QwKind.M11, i)] = Fraction(mu[i, i])
        printed[mdl.index(QwKind.Q2, i)] = Fraction(mu[i, i], 2)
    solved = delta_squared_coords(mdl).coords
    for sign in (1, -1):
        if all(sign * p == s for p, s in zip(printed, solved)):
            if sign == -1:
                logger.warning("solved δ² is −1 times the printed expansion on %s", mdl.name)
            return PrintedComparison(tuple(printed), sign, ())
    diff = tuple(i for i, (p, s) in enumerate(zip(printed, solved)) if p != s)
    logger.warning("solved δ² disagrees with the printed expansion at %d positions", len(diff))
    return PrintedComparison(tuple(printed), None, diff)


def sigma_coords(model: SurfaceModel | None = None) -> H4Class:
    """
    Coordinates of Σ from its pairings.

    Raises
    ------
    RuleConsistencyError : the solution is non-integral, not fixed by the
                           involution, or divisible.
    """
    mdl = _model(model)
    coords = as_integral(_solutions(mdl).sigma)
    if coords is None:
        raise RuleConsistencyError("Σ has non-integral coordinates", {"model": mdl.name})
    image = iota_on_h4(mdl).matrix.apply(coords)
    if image != coords:
        raise RuleConsistencyError("Σ is not fixed by the involution", {"model": mdl.name})
    if math.gcd(*coords) != 1:
        raise RuleConsistencyError("Σ is divisible", {"gcd": math.gcd(*coords)})
    return H4Class("sigma", coords)


# -----------------------------------------------------------------------------
# Involution and invariant sublattice
# -----------------------------------------------------------------------------


def _iota_index(index: QwIndex, convention: BasisConvention) -> QwIndex:
    s = convention.swap
    if index.kind is QwKind.POINT:
        return index
    if index.kind is QwKind.Q1Q1:
        k, m = sorted((s(index.k), s(index.m)))
        return QwIndex(QwKind.Q1Q1, k, m)
    return QwIndex(index.kind, s(index.k))


@lru_cache(maxsize=None)
def _iota(model: SurfaceModel) -> Isometry:
    perm = [model.position[_iota_index(e, model.convention)] for e in model.basis]
    h4 = Lattice(_h4_gram(model), f"H4({model.name})")
    return Isometry(h4, IntMatrix.permutation(perm))


def iota_on_h4(model: SurfaceModel | None = None) -> Isometry:
    """The involution on degree-4 classes, a permutation of the basis."""
    return _iota(_model(model))


def classify_h4_index(index: QwIndex, model: SurfaceModel | None = None) -> H4Type:
    conv = _model(model).convention
    if index.kind is QwKind.POINT:
        return H4Type.F
    if index.kind is QwKind.Q2:
        return H4Type.A if conv.is_fixed(index.k) else H4Type.B
    if index.kind is QwKind.M11:
        return H4Type.A if conv.is_fixed(index.k) else H4Type.C
    k, m = index.k, index.m
    fixed_k, fixed_m = conv.is_fixed(k), conv.is_fixed(m)
    if fixed_k and fixed_m:
        return H4Type.A
    if fixed_k or fixed_m:
        return H4Type.B
    if conv.swap(k) == m:
        return H4Type.D
    if conv.same_block(k, m):
        return H4Type.C
    return H4Type.E


@dataclass(frozen=True)
class InvariantH4:
    """
    Invariant degree-4 classes with the orbit-sum basis.

    ``orbits[i]`` lists the basis positions summed in the i-th basis vector;
    ``types[i]`` is the orbit's type.
    """

    sublattice: Sublattice
    orbits: tuple[tuple[int, ...], ...]
    types: tuple[H4Type, ...]

    @property
    def census(self) -> tuple[int, ...]:
        return tuple(self.types.count(t) for t in TYPE_ORDER)

    def coordinates(self, coords: Sequence[Number]) -> tuple[Number, ...]:
        """
        Orbit-basis coordinates of an invariant class.

        Raises
        ------
        LatticeError : ``coords`` is not invariant.
        """
        out = []
        for orbit in self.orbits:
            values = {coords[i] for i in orbit}
            if len(values) != 1:
                raise LatticeError("class is not fixed by the involution")
            out.append(coords[orbit[0]])
        return tuple(out)


@lru_cache(maxsize=None)
def _invariant(model: SurfaceModel) -> InvariantH4:
    iota = _iota(model)
    size = model.size
    image = [iota.matrix.column(j).index(1) for j in range(size)]
    orbits: list[tuple[int, ...]] = []
    types: list[H4Type] = []
    for j in range(size):
        if image[j] < j:
            continue
        orbit = (j,) if image[j] == j else (j, image[j])
        kinds = {classify_h4_index(model.basis[i], model) for i in orbit}
        if len(kinds) != 1:
            raise RuleConsistencyError("orbit mixes types", {"orbit": orbit})
        orbits.append(orbit)
        types.append(kinds.pop())
    cols = [tuple(1 if i in orbit else 0 for i in range(size)) for orbit in orbits]
    sub = Sublattice(iota.lattice, IntMatrix.from_columns(cols, size))
    logger.info("invariant degree-4 lattice of %s has rank %d", model.name, sub.rank)
    return InvariantH4(sub, tuple(orbits), tuple(types))


def invariant_h4(model: SurfaceModel | None = None) -> InvariantH4:
    return _invariant(_model(model))


@lru_cache(maxsize=None)
def _k_tilde(model: SurfaceModel) -> Overlattice:
    inv = _invariant(model)
    k = rescale(inv.sublattice.as_lattice(), 2, label="K")
    halves = [
        tuple(Fraction(1, 2) if i == j else Fraction(0) for i in range(k.rank))
        for j, t in enumerate(inv.types)
        if t in HALVED_TYPES
    ]
    return adjoin_glue_vectors(k, halves, label="K~")


def k_tilde(model: SurfaceModel | None = None) -> Overlattice:
    """
    The overlattice of ``K`` (invariant classes with doubled form) obtained
    by halving every orbit sum of type b, c or e.  ``parent`` is ``K``.
    """
    return _k_tilde(_model(model))


# -----------------------------------------------------------------------------
# Certificates
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ParityCheck:
    passes: bool
    odd_positions: tuple[int, ...]


def adf_parity(coords: Sequence[int], model: SurfaceModel | None = None) -> ParityCheck:
    """Evenness of ``coords`` on every fixed basis element (types a, d, f)."""
    inv = invariant_h4(model)
    odd = tuple(
        orbit[0]
        for orbit, t in zip(inv.orbits, inv.types)
        if t in FIXED_TYPES and coords[orbit[0]] % 2
    )
    return ParityCheck(not odd, odd)


def adf_parity_check(model: SurfaceModel | None = None) -> ParityCheck:
    """Parity of δ² − Σ on the fixed basis elements."""
    delta2 = delta_squared_coords(model).coords
    sigma = sigma_coords(model).coords
    return adf_parity(tuple(a - b for a, b in zip(delta2, sigma)), model)


def monomials_to_h4(
    combo: MonomialCombo, model: SurfaceModel | None = None
) -> tuple[Fraction, ...]:
    """
    Coordinates of a monomial combination in the integral basis.

    δ·δ uses the resolved δ² coordinates.
    """
    mdl = _model(model)
    b = mdl.b
    out = [Fraction(0)] * mdl.size
    pt = mdl.index(QwKind.POINT)
    for mono, c in combo:
        if mono.kind is MonoKind.PT:
            out[pt] += c
        elif mono.kind is MonoKind.DG:
            out[mdl.index(QwKind.Q2, mono.k)] += c
        elif mono.kind is MonoKind.GG and mono.k != mono.m:
            out[mdl.index(QwKind.Q1Q1, mono.k, mono.m)] += c
            out[pt] += c * b[mono.k][mono.m]
        elif mono.kind is MonoKind.GG:
            # γ² = 2·m11 + q2 + B(γ,γ)·pt
            out[mdl.index(QwKind.M11, mono.k)] += 2 * c
            out[mdl.index(QwKind.Q2, mono.k)] += c
            out[pt] += c * b[mono.k][mono.k]
        else:
            for i, x in enumerate(delta_squared_coords(mdl).coords):
                if x:
                    out[i] += c * x
    return tuple(out)


def selectable_h2_classes(model: SurfaceModel | None = None) -> tuple[int, ...]:
    """H² positions a half-vector selection ranges over: the fixed classes, then δ."""
    mdl = _model(model)
    return tuple(mdl.convention.fixed) + (mdl.delta,)


def h2_half_vector_membership(selection: int, model: SurfaceModel | None = None) -> bool:
    """
    Whether half the square of the selected sum lies in ``K̃``.

    ``selection`` is a bit mask over ``selectable_h2_classes`` (bit i selects
    the i-th class).  The square is taken in degree 4, mapped to the
    invariant lattice and halved; only ``selection == 0`` should succeed.
    """
    mdl = _model(model)
    positions = selectable_h2_classes(mdl)
    if not 0 <= selection < 2 ** len(positions):
        raise ValueError(f"selection {selection} out of range for {len(positions)} classes")
    vec = [0] * (mdl.n + 1)
    for bit, pos in enumerate(positions):
        if selection >> bit & 1:
            vec[pos] = 1
    square = monomials_to_h4(h2_product(vec, vec, mdl), mdl)
    if as_integral(square) is None:
        raise RuleConsistencyError("square of an integral H² class is not integral", {})
    inv_coords = invariant_h4(mdl).coordinates(square)
    half = tuple(Fraction(c) / 2 for c in inv_coords)
    return k_tilde(mdl).contains(half)
