"""
Tests for bblab/lattice_core.py: lattices, sublattices, discriminant data,
invariant sublattices, overlattices and the unimodular glue search.

Small hand-checkable lattices (U, ⟨±2⟩, U ⊕ U with its swap) carry most of
the weight here.  The K3-sized lattices appear only in the discriminant and
determinant laws; the full constructions are exercised through
``tests/test_pipeline.py``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bblab.catalog import make_E8, make_hilb2, make_k3, make_rank1, make_torus, make_U
from bblab.errors import (
    DegenerateLatticeError,
    DimensionError,
    GlueError,
    LatticeError,
    NotAnIsometryError,
)
from bblab.exact_linalg import IntMatrix, rank
from bblab.lattice_core import (
    GlueSearchStatus,
    Isometry,
    Lattice,
    Parity,
    Sublattice,
    adjoin_glue_vectors,
    anti_invariant_sublattice,
    direct_sum,
    discriminant_form_values,
    discriminant_group,
    discriminant_profile,
    dual_generators,
    glue_unimodular_search,
    invariant_sublattice,
    is_even,
    is_primitive,
    norm_overlattice,
    orthogonal_complement,
    profile_equal,
    rescale,
    saturation,
    saturation_index,
    signature,
)

_H = Fraction(1, 2)


def _u_plus_u_swap() -> tuple[Lattice, Isometry]:
    u = make_U()
    l = direct_sum(u, u)
    return l, Isometry(l, IntMatrix.permutation((2, 3, 0, 1)))


# ── Lattice and Isometry ────────────────────────────────────────────────────


class TestLattice:
    def test_rejects_non_symmetric_gram(self) -> None:
        with pytest.raises(DimensionError):
            Lattice(IntMatrix.from_rows([[0, 1], [2, 0]]))

    def test_rejects_non_square_gram(self) -> None:
        with pytest.raises(DimensionError):
            Lattice(IntMatrix.zeros(2, 3))

    def test_det_and_pairing(self, hyperbolic_plane: Lattice) -> None:
        assert hyperbolic_plane.det == -1
        assert hyperbolic_plane.pair((1, 1), (1, 1)) == 2
        assert hyperbolic_plane.pair((_H, 0), (0, 1)) == _H

    def test_direct_sum_label(self, hyperbolic_plane: Lattice) -> None:
        assert direct_sum(hyperbolic_plane, hyperbolic_plane).label == "U+U"

    def test_rescale(self, hyperbolic_plane: Lattice) -> None:
        u2 = rescale(hyperbolic_plane, 2)
        assert u2.label == "U(2)"
        assert u2.gram.to_lists() == [[0, 2], [2, 0]]

    def test_rescale_by_zero(self, hyperbolic_plane: Lattice) -> None:
        with pytest.raises(LatticeError):
            rescale(hyperbolic_plane, 0)

    def test_parity(self, hyperbolic_plane: Lattice) -> None:
        assert is_even(hyperbolic_plane)
        assert not is_even(make_rank1(1))


class TestIsometry:
    def test_swap_of_u_is_an_involution(self, hyperbolic_plane: Lattice) -> None:
        g = Isometry(hyperbolic_plane, IntMatrix.permutation((1, 0)))
        assert g.is_involution

    def test_rejects_non_isometry(self, hyperbolic_plane: Lattice) -> None:
        with pytest.raises(NotAnIsometryError):
            Isometry(hyperbolic_plane, IntMatrix.diagonal([2, 1]))

    def test_rejects_wrong_shape(self, hyperbolic_plane: Lattice) -> None:
        with pytest.raises(DimensionError):
            Isometry(hyperbolic_plane, IntMatrix.identity(3))

    def test_order_four_isometry_is_not_an_involution(self) -> None:
        l, _ = _u_plus_u_swap()
        cols = [(0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0)]
        g = Isometry(l, IntMatrix.from_columns(cols, 4))
        assert not g.is_involution
        with pytest.raises(NotAnIsometryError):
            g.require_involution()


# ── signature ───────────────────────────────────────────────────────────────


class TestSignature:
    @pytest.mark.parametrize(
        "rows, expected",
        [
            ([[0, 1], [1, 0]], (1, 1)),
            ([[2, 1], [1, 2]], (2, 0)),
            ([[-2]], (0, 1)),
            ([[0, 0], [0, 1]], (1, 0)),
            ([[0, 0], [0, 0]], (0, 0)),
        ],
    )
    def test_small_forms(self, rows: list[list[int]], expected: tuple[int, int]) -> None:
        assert signature(IntMatrix.from_rows(rows)) == expected

    def test_e8(self) -> None:
        assert signature(make_E8().gram) == (8, 0)
        assert signature(make_E8(-1).gram) == (0, 8)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(min_value=-5, max_value=5).filter(bool), min_size=1, max_size=5))
    def test_diagonal_forms(self, values: list[int]) -> None:
        pos = sum(1 for v in values if v > 0)
        assert signature(IntMatrix.diagonal(values)) == (pos, len(values) - pos)


# ── discriminant data ───────────────────────────────────────────────────────


class TestDiscriminant:
    """Discriminant groups, form values and the comparison profile."""

    def test_unimodular_has_trivial_group(self, hyperbolic_plane: Lattice) -> None:
        group = discriminant_group(hyperbolic_plane)
        assert group.orders == ()
        assert group.order == 1

    def test_rank_one(self) -> None:
        orders, gens = dual_generators(make_rank1(2))
        assert orders == (2,)
        assert gens == ((_H,),)
        values, complete = discriminant_form_values(make_rank1(2))
        assert values == (0, _H)
        assert complete

    def test_u2_form_values(self, hyperbolic_plane: Lattice) -> None:
        u2 = rescale(hyperbolic_plane, 2)
        values, complete = discriminant_form_values(u2)
        assert discriminant_group(u2).orders == (2, 2)
        assert values == (0, 0, 0, 1)
        assert complete

    def test_bilinear_form_is_symmetric(self, hyperbolic_plane: Lattice) -> None:
        group = discriminant_group(rescale(hyperbolic_plane, 2))
        for x in group.elements():
            for y in group.elements():
                assert group.bilinear(x, y) == group.bilinear(y, x)

    def test_large_group_records_generators_only(self) -> None:
        big = Lattice(IntMatrix.diagonal([2] * 13), "<2>^13")
        values, complete = discriminant_form_values(big)
        assert not complete
        assert len(values) == 13

    def test_degenerate(self) -> None:
        with pytest.raises(DegenerateLatticeError):
            discriminant_group(Lattice(IntMatrix.from_rows([[0, 0], [0, 2]])))

    def test_profile(self) -> None:
        p = discriminant_profile(make_rank1(-2))
        assert p.rank == 1
        assert p.signature == (0, 1)
        assert p.parity is Parity.EVEN
        assert p.invariant_factors == (2,)
        assert p.determinant == -2
        assert p.discriminant_order == 2

    def test_profile_equal_separates_parity(self, hyperbolic_plane: Lattice) -> None:
        odd = Lattice(IntMatrix.diagonal([1, -1]), "I(1,1)")
        assert not profile_equal(hyperbolic_plane, odd)

    def test_profile_equal_on_isometric_lattices(self) -> None:
        a = Lattice(IntMatrix.from_rows([[2, 1], [1, 2]]), "A2")
        b = Lattice(IntMatrix.from_rows([[2, -1], [-1, 2]]), "A2'")
        assert profile_equal(a, b)

    def test_profile_equal_separates_form_values(self) -> None:
        """⟨2⟩ ⊕ ⟨−2⟩ and U(2) share rank, signature, parity and group."""
        a = direct_sum(make_rank1(2), make_rank1(-2))
        assert not profile_equal(a, rescale(make_U(), 2))


# ── sublattices ─────────────────────────────────────────────────────────────


class TestSublattices:
    def test_dependent_basis(self, hyperbolic_plane: Lattice) -> None:
        with pytest.raises(DimensionError):
            Sublattice(hyperbolic_plane, IntMatrix.from_columns([(1, 0), (2, 0)], 2))

    def test_orthogonal_complement_of_a_summand(self) -> None:
        l, _ = _u_plus_u_swap()
        first = Sublattice(l, IntMatrix.from_columns([(1, 0, 0, 0), (0, 1, 0, 0)], 4))
        perp = orthogonal_complement(first)
        assert perp.rank == 2
        assert abs(perp.as_lattice().det) == 1
        for col in perp.basis.columns():
            assert col[0] == col[1] == 0

    def test_saturation(self, hyperbolic_plane: Lattice) -> None:
        doubled = Sublattice(hyperbolic_plane, IntMatrix.from_columns([(2, 0)], 2))
        assert saturation_index(doubled) == 2
        assert not is_primitive(doubled)
        sat = saturation(doubled)
        assert sat.basis.column(0) in ((1, 0), (-1, 0))
        assert is_primitive(sat)

    def test_saturation_index_is_product_of_factors(self) -> None:
        l = Lattice(IntMatrix.identity(3))
        s = Sublattice(l, IntMatrix.from_columns([(2, 0, 0), (0, 6, 0)], 3))
        assert saturation_index(s) == 12

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(-9, 9), min_size=6, max_size=6))
    def test_saturation_index_is_gcd_of_minors(self, entries: list[int]) -> None:
        cols = [tuple(entries[:3]), tuple(entries[3:])]
        (a, b, c), (d, e, f) = cols
        minors = (a * e - b * d, a * f - c * d, b * f - c * e)
        assume(any(minors))
        s = Sublattice(Lattice(IntMatrix.identity(3)), IntMatrix.from_columns(cols, 3))
        assert saturation_index(s) == math.gcd(*minors)
        assert is_primitive(saturation(s))

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.lists(st.integers(-3, 3), min_size=22, max_size=22), min_size=1, max_size=3)
    )
    def test_primitive_and_complement_discriminants_agree(self, cols: list[list[int]]) -> None:
        """In the unimodular K3 lattice a primitive S and its complement have |disc| equal."""
        k3, _ = make_k3()
        basis = IntMatrix.from_columns(cols, 22)
        assume(rank(basis) == len(cols))
        sat = saturation(Sublattice(k3, basis))
        det = sat.as_lattice().det
        assume(det != 0)
        perp = orthogonal_complement(sat)
        assert perp.rank == 22 - len(cols)
        assert abs(perp.as_lattice().det) == abs(det)

    def test_invariant_and_anti_invariant(self) -> None:
        _, g = _u_plus_u_swap()
        inv, anti = invariant_sublattice(g), anti_invariant_sublattice(g)
        u2 = [[0, 2], [2, 0]]
        assert inv.rank == anti.rank == 2
        assert discriminant_profile(inv.as_lattice()).invariant_factors == (2, 2)
        assert profile_equal(inv.as_lattice(), Lattice(IntMatrix.from_rows(u2)))
        assert profile_equal(anti.as_lattice(), Lattice(IntMatrix.from_rows(u2)))


# ── overlattices ────────────────────────────────────────────────────────────


class TestAdjoinGlue:
    def test_half_sum_of_eight_nodes(self) -> None:
        base = Lattice(IntMatrix.diagonal([-2] * 8), "<-2>^8")
        over = adjoin_glue_vectors(base, [(_H,) * 8], even=True)
        assert over.index == 2
        assert abs(over.lattice.det) == 64
        assert is_even(over.lattice)
        assert over.contains((_H,) * 8)
        assert not over.contains((_H,) + (0,) * 7)

    def test_non_integral_self_pairing(self) -> None:
        base = Lattice(IntMatrix.diagonal([-2] * 8))
        with pytest.raises(GlueError) as info:
            adjoin_glue_vectors(base, [(_H,) + (0,) * 7])
        assert info.value.vector[0] == _H

    def test_odd_glue_rejected_when_even(self) -> None:
        with pytest.raises(GlueError):
            adjoin_glue_vectors(make_rank1(4), [(_H,)], even=True)

    def test_odd_glue_allowed(self) -> None:
        over = adjoin_glue_vectors(make_rank1(4), [(_H,)])
        assert over.lattice.gram.to_lists() == [[1]]
        assert over.index == 2

    def test_non_integral_pairing_with_lattice(self) -> None:
        with pytest.raises(GlueError):
            adjoin_glue_vectors(make_rank1(3), [(_H,)])

    def test_no_glue(self, hyperbolic_plane: Lattice) -> None:
        over = adjoin_glue_vectors(hyperbolic_plane, [])
        assert over.index == 1
        assert over.lattice.gram == hyperbolic_plane.gram

    def test_coordinates(self) -> None:
        over = adjoin_glue_vectors(make_rank1(4), [(_H,)])
        assert over.coordinates((1,)) in ((2,), (-2,))


class TestNormOverlattice:
    def test_swap_of_two_planes(self) -> None:
        """(1 + g)·e lies in the invariant lattice, so the pushforward of U ⊕ U is U."""
        l, g = _u_plus_u_swap()
        over = norm_overlattice(l, g)
        assert over.lattice.rank == 2
        assert abs(over.lattice.det) == 1
        assert is_even(over.lattice)
        assert over.index == 4

    def test_identity_doubles_the_form(self, hyperbolic_plane: Lattice) -> None:
        g = Isometry(hyperbolic_plane, IntMatrix.identity(2))
        over = norm_overlattice(hyperbolic_plane, g)
        assert over.lattice.gram.to_lists() == [[0, 2], [2, 0]]
        assert over.index == 1

    @pytest.mark.parametrize(
        "builder, rank_, det, index, factors",
        [
            (make_torus, 6, 64, 1, [2] * 6),
            (make_k3, 14, 64, 2**8, [2] * 6),
            (make_hilb2, 15, 256, 2**8, [2] * 6 + [4]),
        ],
    )
    def test_determinant_law(
        self,
        builder: Callable[[], tuple[Lattice, Isometry]],
        rank_: int,
        det: int,
        index: int,
        factors: list[int],
    ) -> None:
        """det(over)·index² = det of the doubled invariant lattice."""
        l, g = builder()
        over = norm_overlattice(l, g)
        inv = invariant_sublattice(g).as_lattice()
        assert over.lattice.rank == rank_
        assert abs(over.lattice.det) == det
        assert over.index == index
        assert abs(over.lattice.det) * over.index**2 == abs(inv.det) * 2**rank_
        invariant_factors = discriminant_profile(over.lattice).invariant_factors
        assert sorted(invariant_factors) == factors
        assert math.prod(invariant_factors) == det

    def test_requires_involution(self) -> None:
        l, _ = _u_plus_u_swap()
        cols = [(0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0)]
        with pytest.raises(NotAnIsometryError):
            norm_overlattice(l, Isometry(l, IntMatrix.from_columns(cols, 4)))


# ── glue_unimodular_search ──────────────────────────────────────────────────


class TestGlueSearch:
    def test_plus_two_with_minus_two(self) -> None:
        result = glue_unimodular_search(make_rank1(2), make_rank1(-2), 100)
        assert result.found
        assert result.status is GlueSearchStatus.FOUND
        assert result.overlattice is not None
        assert abs(result.overlattice.lattice.det) == 1
        assert is_even(result.overlattice.lattice)

    def test_no_anti_isometry(self) -> None:
        result = glue_unimodular_search(make_rank1(2), make_rank1(2), 100)
        assert result.status is GlueSearchStatus.ENUMERATION_EXHAUSTED
        assert not result.found

    def test_bound_reached(self) -> None:
        result = glue_unimodular_search(make_rank1(2), make_rank1(-2), 0)
        assert result.status is GlueSearchStatus.BOUND_EXHAUSTED

    def test_unimodular_inputs(self, hyperbolic_plane: Lattice) -> None:
        result = glue_unimodular_search(hyperbolic_plane, hyperbolic_plane, 10)
        assert result.found
        assert result.candidates == 0

    def test_odd_lattices_rejected(self) -> None:
        with pytest.raises(LatticeError):
            glue_unimodular_search(make_rank1(1), make_rank1(-1), 10)

    def test_signature_mismatch(self) -> None:
        with pytest.raises(LatticeError):
            glue_unimodular_search(make_rank1(2), make_rank1(-2), 10, target_signature=(2, 0))

    def test_discriminant_mismatch(self) -> None:
        with pytest.raises(LatticeError):
            glue_unimodular_search(make_rank1(2), make_rank1(-4), 10)
