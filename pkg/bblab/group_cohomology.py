"""
bblab/group_cohomology.py
-----------------------------------------------------------------------------
Cohomology of the group of order two with coefficients in a free module
carrying an involution ``g``.

With the periodic free resolution of Z over Z[Z/2] the groups are

    H⁰       = ker(g − 1)                         (free)
    H^odd    = ker(g + 1) / im(g − 1)
    H^even>0 = ker(g − 1) / im(g + 1)

Each quotient is computed by Smith normal form of the relation matrix written
in a basis of the (saturated) kernel.  Generators come back in ambient
coordinates so callers can match torsion classes with explicit half-sums.

Exports
-------
InvolutionModule, AbelianGroup
quotient_group(sub, relations) -> AbelianGroup
cohomology_z2(m, p) -> AbelianGroup
z2_cohomology_table(m, max_degree) -> list[AbelianGroup]
torsion_balance(lattice, g) -> tuple[int, int]
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from bblab.errors import DimensionError, LatticeError, NotAnIsometryError
from bblab.exact_linalg import (
    IntMatrix,
    as_integral,
    inverse_unimodular,
    kernel_basis,
    smith_normal_form,
    solve_rational_columns,
)
from bblab.lattice_core import (
    Isometry,
    Lattice,
    anti_invariant_sublattice,
    invariant_sublattice,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvolutionModule:
    """Z^rank with an integer action squaring to the identity."""

    action: IntMatrix
    label: str = ""

    def __post_init__(self) -> None:
        if not self.action.is_square:
            raise DimensionError(f"action of shape {self.action.shape} is not square")
        if self.action @ self.action != IntMatrix.identity(self.rank):
            raise NotAnIsometryError(f"action on {self.label or 'module'} is not an involution")

    @property
    def rank(self) -> int:
        return self.action.nrows

    @classmethod
    def from_isometry(cls, g: Isometry) -> InvolutionModule:
        return cls(g.matrix, g.lattice.label)

    @classmethod
    def trivial(cls, rank: int = 1) -> InvolutionModule:
        return cls(IntMatrix.identity(rank), "trivial")

    @classmethod
    def regular(cls) -> InvolutionModule:
        return cls(IntMatrix.permutation((1, 0)), "regular")


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^free_rank ⊕ ⊕ Z/torsion[i]`` with generators in ambient coordinates."""

    free_rank: int
    torsion: tuple[int, ...] = ()
    generators: tuple[tuple[int, ...], ...] = ()

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        """Group order, or None for an infinite group."""
        return None if self.free_rank else math.prod(self.torsion)

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        parts = [f"Z^{self.free_rank}" if self.free_rank > 1 else "Z"] if self.free_rank else []
        for d in sorted(set(self.torsion)):
            count = self.torsion.count(d)
            parts.append(f"(Z/{d})^{count}" if count > 1 else f"Z/{d}")
        return " + ".join(parts)


def quotient_group(sub: IntMatrix, relations: IntMatrix) -> AbelianGroup:
    """
    ``span(sub) / span(relations)`` for relation columns lying in ``span(sub)``.

    Parameters
    ----------
    sub       : n×k basis matrix (columns) of a saturated sublattice of Z^n.
    relations : n×r matrix whose columns lie in the span of ``sub``.

    Raises
    ------
    LatticeError : a relation column is not an integral combination of ``sub``.
    """
    n, k = sub.shape
    if relations.nrows != n:
        raise DimensionError(f"relations have {relations.nrows} rows, expected {n}")
    if k == 0:
        return AbelianGroup(0)
    nonzero = [c for c in relations.columns() if any(c)]
    if not nonzero:
        return AbelianGroup(k, (), tuple(sub.columns()))

    # Coordinates of each relation in the basis of ``sub`` (normal equations).
    coords = solve_rational_columns(sub.T @ sub, [sub.T.apply(c) for c in nonzero])
    int_coords = []
    for c, rel in zip(coords, nonzero):
        ic = as_integral(c)
        if ic is None or sub.apply(ic) != rel:
            raise LatticeError("relation does not lie in the lattice spanned by the kernel basis")
        int_coords.append(ic)
    r = IntMatrix.from_columns(int_coords, k)

    snf = smith_normal_form(r)
    assert snf.u is not None
    back = sub @ inverse_unimodular(snf.u)
    torsion: list[int] = []
    gens: list[tuple[int, ...]] = []
    free = 0
    for i in range(k):
        d = snf.d[i] if i < len(snf.d) else 0
        if d == 1:
            continue
        if d == 0:
            free += 1
        else:
            torsion.append(d)
        gens.append(back.column(i))
    return AbelianGroup(free, tuple(torsion), tuple(gens))


def cohomology_z2(m: InvolutionModule, p: int) -> AbelianGroup:
    """
    ``H^p(Z/2; m)``.

    Raises
    ------
    ValueError : ``p < 0``.
    """
    if p < 0:
        raise ValueError(f"cohomological degree must be non-negative, got {p}")
    one = IntMatrix.identity(m.rank)
    minus = m.action - one
    plus = m.action + one
    if p == 0:
        fixed = kernel_basis(minus)
        return AbelianGroup(fixed.ncols, (), tuple(fixed.columns()))
    if p % 2:
        group = quotient_group(kernel_basis(plus), minus)
    else:
        group = quotient_group(kernel_basis(minus), plus)
    logger.debug("H^%d(Z/2; %s) = %s", p, m.label or "module", group)
    return group


def z2_cohomology_table(m: InvolutionModule, max_degree: int) -> list[AbelianGroup]:
    """``[H^0, …, H^max_degree]``; degrees above 2 repeat by periodicity."""
    table = [cohomology_z2(m, p) for p in range(min(max_degree, 2) + 1)]
    for p in range(3, max_degree + 1):
        table.append(table[2 - p % 2])
    return table


def torsion_balance(lattice: Lattice, g: Isometry) -> tuple[int, int]:
    """
    Both sides of ``log₂|H²| + log₂|H¹| = rank − 2a`` for an involution of
    a nondegenerate lattice, where ``2^{2a} = |det I|·|det A| / |det L|`` with
    I, A the invariant and anti-invariant sublattices.
    """
    module = InvolutionModule.from_isometry(g)
    h1, h2 = cohomology_z2(module, 1), cohomology_z2(module, 2)
    lhs = sum(int(math.log2(d)) for d in h1.torsion + h2.torsion)
    inv = invariant_sublattice(g).as_lattice()
    anti = anti_invariant_sublattice(g).as_lattice()
    ratio = abs(inv.det * anti.det) // abs(lattice.det)
    return lhs, lattice.rank - int(math.log2(ratio))
