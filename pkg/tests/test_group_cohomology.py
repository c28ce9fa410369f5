"""
Tests for bblab/group_cohomology.py: Z/2 group cohomology of integer
involution modules and the torsion balance identity.
"""

from __future__ import annotations

import pytest

from bblab.errors import LatticeError, NotAnIsometryError
from bblab.exact_linalg import IntMatrix
from bblab.group_cohomology import (
    AbelianGroup,
    InvolutionModule,
    cohomology_z2,
    quotient_group,
    torsion_balance,
    z2_cohomology_table,
)
from bblab.lattice_core import Isometry, Lattice

# ── AbelianGroup ────────────────────────────────────────────────────────────


class TestAbelianGroup:
    @pytest.mark.parametrize(
        "group, text",
        [
            (AbelianGroup(0), "0"),
            (AbelianGroup(1), "Z"),
            (AbelianGroup(3), "Z^3"),
            (AbelianGroup(0, (2,)), "Z/2"),
            (AbelianGroup(0, (2, 2, 2)), "(Z/2)^3"),
            (AbelianGroup(1, (2, 4)), "Z + Z/2 + Z/4"),
        ],
    )
    def test_str(self, group: AbelianGroup, text: str) -> None:
        assert str(group) == text

    def test_order(self) -> None:
        assert AbelianGroup(0, (2, 2)).order == 4
        assert AbelianGroup(1).order is None
        assert AbelianGroup(0).is_trivial


# ── quotient_group ──────────────────────────────────────────────────────────


class TestQuotientGroup:
    def test_z_mod_2z(self) -> None:
        sub = IntMatrix.from_columns([(1,)], 1)
        rel = IntMatrix.from_columns([(2,)], 1)
        assert str(quotient_group(sub, rel)) == "Z/2"

    def test_no_relations(self) -> None:
        sub = IntMatrix.identity(2)
        assert str(quotient_group(sub, IntMatrix.zeros(2, 1))) == "Z^2"

    def test_relation_outside_the_span(self) -> None:
        sub = IntMatrix.from_columns([(2, 0)], 2)
        rel = IntMatrix.from_columns([(1, 0)], 2)
        with pytest.raises(LatticeError):
            quotient_group(sub, rel)


# ── cohomology_z2 ───────────────────────────────────────────────────────────


class TestCohomologyZ2:
    """Known answers for the three indecomposable Z[Z/2]-lattices and H²(K3)."""

    def test_trivial_module(self) -> None:
        m = InvolutionModule.trivial()
        assert str(cohomology_z2(m, 0)) == "Z"
        assert str(cohomology_z2(m, 1)) == "0"
        assert str(cohomology_z2(m, 2)) == "Z/2"

    def test_sign_module(self) -> None:
        m = InvolutionModule(IntMatrix.from_rows([[-1]]), "sign")
        assert str(cohomology_z2(m, 0)) == "0"
        assert str(cohomology_z2(m, 1)) == "Z/2"
        assert str(cohomology_z2(m, 2)) == "0"

    def test_regular_module_is_acyclic(self) -> None:
        m = InvolutionModule.regular()
        assert str(cohomology_z2(m, 0)) == "Z"
        assert cohomology_z2(m, 1).is_trivial
        assert cohomology_z2(m, 2).is_trivial

    def test_negative_degree(self) -> None:
        with pytest.raises(ValueError):
            cohomology_z2(InvolutionModule.trivial(), -1)

    def test_rejects_non_involution(self) -> None:
        with pytest.raises(NotAnIsometryError):
            InvolutionModule(IntMatrix.from_rows([[0, -1], [1, 0]]))

    def test_k3_module(self, k3_swap: tuple[Lattice, Isometry]) -> None:
        m = InvolutionModule.from_isometry(k3_swap[1])
        assert str(cohomology_z2(m, 1)) == "0"
        assert str(cohomology_z2(m, 2)) == "(Z/2)^6"

    def test_hilbert_square_module(self, hilb_swap: tuple[Lattice, Isometry]) -> None:
        m = InvolutionModule.from_isometry(hilb_swap[1])
        assert str(cohomology_z2(m, 1)) == "0"
        assert str(cohomology_z2(m, 2)) == "(Z/2)^7"

    def test_periodicity(self, hilb_swap: tuple[Lattice, Isometry]) -> None:
        table = z2_cohomology_table(InvolutionModule.from_isometry(hilb_swap[1]), 6)
        assert len(table) == 7
        assert [str(g) for g in table[1:]] == ["0", "(Z/2)^7"] * 3


# ── torsion_balance ─────────────────────────────────────────────────────────


class TestTorsionBalance:
    def test_k3(self, k3_swap: tuple[Lattice, Isometry]) -> None:
        assert torsion_balance(*k3_swap) == (6, 6)

    def test_hilbert_square(self, hilb_swap: tuple[Lattice, Isometry]) -> None:
        assert torsion_balance(*hilb_swap) == (7, 7)

    def test_swap_of_two_planes(self) -> None:
        """U ⊕ U with the planes exchanged is a sum of regular modules."""
        gram = IntMatrix.block_diagonal(*[IntMatrix.from_rows([[0, 1], [1, 0]])] * 2)
        lattice = Lattice(gram)
        g = Isometry(lattice, IntMatrix.permutation((2, 3, 0, 1)))
        assert torsion_balance(lattice, g) == (0, 0)
