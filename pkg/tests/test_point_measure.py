"""Ranked point measures: examples and algebraic properties."""

import math

import pytest
from hypothesis import given, strategies as st

from branchlevy.point_measure import (
    EMPTY,
    NEG_INF,
    RankedPointMeasure,
    Theta,
    superpose,
    translate,
    truncate,
    weighted_integral,
)

finite_atoms = st.lists(
    st.floats(min_value=-50, max_value=50, allow_nan=False), max_size=8
)


class TestConstruction:
    def test_ranks_non_increasing(self):
        m = RankedPointMeasure([1.0, 3.0, -2.0, 3.0])
        assert m.atoms == (3.0, 3.0, 1.0, -2.0)

    def test_neg_inf_discarded(self):
        assert RankedPointMeasure([0.0, NEG_INF]).atoms == (0.0,)

    def test_rejects_nan_and_pos_inf(self):
        with pytest.raises(ValueError):
            RankedPointMeasure([math.nan])
        with pytest.raises(ValueError):
            RankedPointMeasure([math.inf])

    def test_atom_beyond_length_is_cemetery(self):
        m = RankedPointMeasure([1.0])
        assert m.atom(0) == 1.0
        assert m.atom(5) == NEG_INF

    def test_tail_count(self):
        m = RankedPointMeasure([2.0, 1.0, -1.0])
        assert m.tail_count(0.0) == 2
        assert m.tail_count(1.0) == 1
        assert m.tail_count(-5.0) == 3

    @given(finite_atoms)
    def test_ranking_idempotent_over_permutations(self, atoms):
        m1 = RankedPointMeasure(atoms)
        m2 = RankedPointMeasure(sorted(atoms))
        assert m1 == m2


class TestTranslate:
    def test_identity_shift(self):
        m = RankedPointMeasure([0.0, -1.0])
        assert translate(m, 0.0) == m

    def test_arithmetic_shift(self):
        assert translate(RankedPointMeasure([0.0, -1.0]), 1.0).atoms == (1.0, 0.0)

    def test_shift_to_cemetery_empties(self):
        assert translate(RankedPointMeasure([0.0, -1.0]), NEG_INF) == EMPTY

    @given(
        finite_atoms,
        st.floats(min_value=-20, max_value=20, allow_nan=False),
        st.floats(min_value=-20, max_value=20, allow_nan=False),
    )
    def test_homomorphism(self, atoms, y1, y2):
        m = RankedPointMeasure(atoms)
        lhs = translate(translate(m, y1), y2)
        rhs = translate(m, y1 + y2)
        assert all(
            a == pytest.approx(b, abs=1e-12) for a, b in zip(lhs.atoms, rhs.atoms)
        )
        assert len(lhs) == len(rhs)


class TestWeightedIntegral:
    def test_single_atom_at_origin(self):
        assert weighted_integral(RankedPointMeasure([0.0]), Theta(0.7), lambda x: 1.0) == 1.0

    def test_empty_measure_is_zero(self):
        assert weighted_integral(EMPTY, Theta(2.0), lambda x: 42.0) == 0.0

    def test_atom_multiplicity(self):
        m = RankedPointMeasure([0.0, 0.0])
        assert weighted_integral(m, Theta(0.0), lambda x: 1.0) == 2.0

    def test_overflow_raises(self):
        m = RankedPointMeasure([400.0])
        with pytest.raises(OverflowError):
            weighted_integral(m, Theta(2.0), lambda x: 1.0)

    @given(finite_atoms, finite_atoms, st.floats(min_value=0, max_value=1.0))
    def test_additive_under_superpose(self, a1, a2, th):
        m1, m2 = RankedPointMeasure(a1), RankedPointMeasure(a2)
        f = lambda x: math.cos(x)
        both = weighted_integral(superpose([m1, m2]), th, f)
        split = weighted_integral(m1, th, f) + weighted_integral(m2, th, f)
        assert both == pytest.approx(split, rel=1e-9, abs=1e-9)


class TestTruncate:
    def test_direct(self):
        m = RankedPointMeasure([0.0, -1.0, -3.0])
        assert truncate(m, 2.0).atoms == (0.0, -1.0)

    def test_boundary_atom_kept(self):
        m = RankedPointMeasure([0.0, -2.0])
        assert truncate(m, 2.0).atoms == (0.0, -2.0)

    def test_compatibility_example(self):
        m = RankedPointMeasure([1.0, -1.5, -4.0])
        assert truncate(truncate(m, 3.0), 1.0) == truncate(m, 1.0)
        assert truncate(m, 1.0).atoms == (1.0,)

    def test_requires_positive_level(self):
        with pytest.raises(ValueError):
            truncate(EMPTY, 0.0)

    @given(
        finite_atoms,
        st.floats(min_value=0.1, max_value=30),
        st.floats(min_value=0.1, max_value=30),
    )
    def test_compatibility_property(self, atoms, n1, n2):
        n, np_ = min(n1, n2), max(n1, n2)
        m = RankedPointMeasure(atoms)
        assert truncate(truncate(m, np_), n) == truncate(m, n)


class TestSuperpose:
    def test_empties(self):
        assert superpose([EMPTY, EMPTY]) == EMPTY

    def test_merge(self):
        out = superpose([RankedPointMeasure([0.0]), RankedPointMeasure([1.0, -1.0])])
        assert out.atoms == (1.0, 0.0, -1.0)

    def test_single_identity(self):
        m = RankedPointMeasure([0.0, 0.0])
        assert superpose([m]) == m


class TestSerialization:
    def test_round_trip(self):
        m = RankedPointMeasure([1.5, -0.25])
        assert RankedPointMeasure.from_line(m.to_line()) == m

    def test_empty_line(self):
        assert EMPTY.to_line() == ""
        assert RankedPointMeasure.from_line("") == EMPTY


class TestTheta:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Theta(-0.1)

    def test_weight_at_cemetery_is_zero(self):
        assert Theta(1.0).weight(NEG_INF) == 0.0
