"""
bblab/catalog.py
-----------------------------------------------------------------------------
Named lattices and involutions, in the basis conventions every other module
relies on.

The E8 lattice is realised from an explicit half-integral 8×8 column matrix
(columns ``2e1``, ``e_{i+1} − e_i`` and the half-sum) rather than a Cartan
matrix, so that positions 7–14 and 15–22 of the K3 basis carry exactly these
vectors.  Its Gram is ``Mᵀ·M``: the first vector squares to 4.

Basis convention (0-based internally, 1-based in labels ``g1 … g22``)
----------------------------------------------------------------------
    0–5    U³, pairs (u_{k,1}, u_{k,2})             fixed by the involution
    6–13   first E8(−1)                             swapped with 14–21
    14–21  second E8(−1)
    22     δ with square −2 (Hilbert square only)   fixed

``BasisConvention`` is the only place these ranges are written down.

Exports
-------
BasisConvention, K3_CONVENTION, TRUNCATION_CONVENTION
NikulinPresentation, nikulin_presentation
make_U, make_E8, make_rank1, make_nikulin
make_k3, make_hilb2, make_torus, make_hyperbolic_swap_truncation
names, lattice_by_name
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from bblab.exact_linalg import IntMatrix, as_integral
from bblab.lattice_core import (
    Isometry,
    Lattice,
    Overlattice,
    RationalVector,
    Sublattice,
    adjoin_glue_vectors,
    direct_sum,
    rescale,
)

logger = logging.getLogger(__name__)

_H = Fraction(1, 2)

# Basis vectors of E8 in R^8, doubled to stay integral.
_E8_DOUBLED_COLUMNS = (
    (4, 0, 0, 0, 0, 0, 0, 0),
    (-2, 2, 0, 0, 0, 0, 0, 0),
    (0, -2, 2, 0, 0, 0, 0, 0),
    (0, 0, -2, 2, 0, 0, 0, 0),
    (0, 0, 0, -2, 2, 0, 0, 0),
    (0, 0, 0, 0, -2, 2, 0, 0),
    (0, 0, 0, 0, 0, -2, 2, 0),
    (1, 1, 1, 1, 1, 1, 1, 1),
)

E8_COLUMNS: tuple[RationalVector, ...] = tuple(
    tuple(Fraction(x, 2) for x in col) for col in _E8_DOUBLED_COLUMNS
)


# -----------------------------------------------------------------------------
# Basis conventions
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisConvention:
    """
    Index layout of a surface lattice with an involution swapping two blocks.

    ``first`` and ``second`` have equal length; the involution sends
    ``first[i]`` to ``second[i]`` and back, and fixes ``fixed`` and ``delta``.
    """

    fixed: range
    first: range
    second: range
    delta: int

    def __post_init__(self) -> None:
        if len(self.first) != len(self.second):
            raise ValueError("swapped blocks must have equal length")

    @property
    def surface_rank(self) -> int:
        return len(self.fixed) + len(self.first) + len(self.second)

    def is_fixed(self, k: int) -> bool:
        return k in self.fixed

    def swap(self, k: int) -> int:
        if k in self.first:
            return self.second[k - self.first.start]
        if k in self.second:
            return self.first[k - self.second.start]
        return k

    def same_block(self, k: int, m: int) -> bool:
        return (k in self.first and m in self.first) or (k in self.second and m in self.second)

    def surface_permutation(self) -> tuple[int, ...]:
        return tuple(self.swap(k) for k in range(self.surface_rank))

    def hilbert_permutation(self) -> tuple[int, ...]:
        return self.surface_permutation() + (self.delta,)

    def label(self, k: int) -> str:
        return "delta" if k == self.delta else f"g{k + 1}"


K3_CONVENTION = BasisConvention(range(0, 6), range(6, 14), range(14, 22), delta=22)

# U ⊕ U with the two planes exchanged.
TRUNCATION_CONVENTION = BasisConvention(range(0, 0), range(0, 2), range(2, 4), delta=4)


# -----------------------------------------------------------------------------
# Building blocks
# -----------------------------------------------------------------------------


def make_U() -> Lattice:
    """The hyperbolic plane."""
    return Lattice(IntMatrix.from_rows([[0, 1], [1, 0]]), "U")


@lru_cache(maxsize=None)
def _e8_euclidean_gram() -> IntMatrix:
    doubled = IntMatrix.from_columns(_E8_DOUBLED_COLUMNS, 8)
    quadrupled = doubled.T @ doubled
    return IntMatrix.from_rows(([x // 4 for x in row] for row in quadrupled.entries), 8)


def make_E8(sign: int = 1) -> Lattice:
    """E8 (``sign=1``) or E8(−1) from the half-integral column matrix."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be ±1, got {sign}")
    gram = _e8_euclidean_gram()
    return Lattice(gram.scaled(sign), "E8" if sign == 1 else "E8(-1)")


def make_rank1(n: int) -> Lattice:
    return Lattice(IntMatrix.from_rows([[n]]), f"<{n}>")


# -----------------------------------------------------------------------------
# Nikulin lattice
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class NikulinPresentation:
    """
    ``⟨−2⟩⁸`` glued by the half-sum of its basis.

    ``generators`` are N₁ … N₈, N̂ in ``⟨−2⟩⁸ ⊗ Q`` coordinates;
    ``nodes`` is the sublattice spanned by N₁ … N₈ inside the glued lattice.
    """

    overlattice: Overlattice
    generators: tuple[RationalVector, ...]
    nodes: Sublattice

    @property
    def lattice(self) -> Lattice:
        return self.overlattice.lattice


@lru_cache(maxsize=None)
def nikulin_presentation() -> NikulinPresentation:
    minus_two = Lattice(IntMatrix.diagonal([-2] * 8), "<-2>^8")
    half_sum = tuple(_H for _ in range(8))
    over = adjoin_glue_vectors(minus_two, [half_sum], even=True, label="Nikulin")
    units = [tuple(Fraction(int(i == j)) for i in range(8)) for j in range(8)]
    node_cols = []
    for u in units:
        coords = as_integral(over.coordinates(u))
        assert coords is not None
        node_cols.append(coords)
    nodes = Sublattice(over.lattice, IntMatrix.from_columns(node_cols, 8))
    return NikulinPresentation(over, tuple(units) + (half_sum,), nodes)


def make_nikulin() -> Lattice:
    return nikulin_presentation().lattice


# -----------------------------------------------------------------------------
# Surfaces with involutions
# -----------------------------------------------------------------------------


def make_k3() -> tuple[Lattice, Isometry]:
    """``U³ ⊕ E8(−1)²`` with the involution exchanging the two E8(−1) blocks."""
    u, e8 = make_U(), make_E8(-1)
    gram = IntMatrix.block_diagonal(u.gram, u.gram, u.gram, e8.gram, e8.gram)
    lattice = Lattice(gram, "K3")
    swap = IntMatrix.permutation(K3_CONVENTION.surface_permutation())
    return lattice, Isometry(lattice, swap)


def make_hilb2() -> tuple[Lattice, Isometry]:
    """``U³ ⊕ E8(−1)² ⊕ ⟨−2⟩`` with δ last and fixed by the involution."""
    k3, _ = make_k3()
    lattice = direct_sum(k3, make_rank1(-2), label="K3Hilb2")
    swap = IntMatrix.permutation(K3_CONVENTION.hilbert_permutation())
    return lattice, Isometry(lattice, swap)


def make_torus() -> tuple[Lattice, Isometry]:
    """``H²`` of a complex 2-torus, ``U³``, with the identity involution."""
    u = make_U()
    lattice = Lattice(IntMatrix.block_diagonal(u.gram, u.gram, u.gram), "T4")
    return lattice, Isometry(lattice, IntMatrix.identity(6))


def make_hyperbolic_swap_truncation() -> tuple[Lattice, Isometry]:
    """
    ``U ⊕ U`` with the two hyperbolic planes exchanged.

    Rank-4 even unimodular stand-in for the K3 lattice, laid out by
    ``TRUNCATION_CONVENTION``.
    """
    u = make_U()
    lattice = Lattice(IntMatrix.block_diagonal(u.gram, u.gram), "U+U")
    swap = IntMatrix.permutation(TRUNCATION_CONVENTION.surface_permutation())
    return lattice, Isometry(lattice, swap)


# -----------------------------------------------------------------------------
# Name lookup
# -----------------------------------------------------------------------------


def _u2_cubed_e8() -> Lattice:
    u2 = rescale(make_U(), 2)
    gram = IntMatrix.block_diagonal(u2.gram, u2.gram, u2.gram, make_E8(-1).gram)
    return Lattice(gram, "U(2)^3+E8(-1)")


_BUILDERS = {
    "U": make_U,
    "E8": lambda: make_E8(1),
    "E8(-1)": lambda: make_E8(-1),
    "Nikulin": make_nikulin,
    "K3": lambda: make_k3()[0],
    "K3Hilb2": lambda: make_hilb2()[0],
    "T4": lambda: make_torus()[0],
    "U(2)^3+E8(-1)": _u2_cubed_e8,
}


def names() -> list[str]:
    return list(_BUILDERS)


def lattice_by_name(name: str) -> Lattice:
    """
    Raises
    ------
    KeyError : ``name`` is not in the catalog.
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown lattice {name!r}; known: {', '.join(_BUILDERS)}") from None
    return builder()
