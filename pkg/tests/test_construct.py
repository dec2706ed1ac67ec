"""Family constructors and the scale-rule engine."""

from fractions import Fraction

import pytest

from qfractal import (
    Amplitude,
    BasisSlot,
    Coefficient,
    FractalParams,
    GuardExceededError,
    NamedSlot,
    Predecessor,
    ScaleRule,
    ScaleRuleError,
    SparseState,
    apply_scale_rule,
    build_bell_pair,
    build_bitflip_state,
    build_cantor,
    build_cluster,
    build_gem_sequence,
    build_gem_step,
    build_initial,
    build_representative,
    gem_rule,
    representative_rule,
)


def third():
    return Amplitude.inv_sqrt(3)


class TestFractalParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            FractalParams(1, 3)
        with pytest.raises(ValueError):
            FractalParams(2, 0)
        with pytest.raises(ValueError):
            FractalParams(2, 3, -1)

    def test_dimension_property(self):
        assert FractalParams(2, 2).dimension == 1.0
        assert abs(FractalParams(3, 1).dimension - 1.584962500721156) < 1e-12


class TestScaleRuleType:
    def test_coefficient_count_must_equal_s(self):
        with pytest.raises(ScaleRuleError):
            ScaleRule(
                FractalParams(2, 2),
                ({0: Predecessor()}, {0: BasisSlot((0,))}),
                (Coefficient((0, 0)),),
            )

    def test_indices_validated(self):
        params = FractalParams(2, 2)
        tables = ({0: Predecessor(), 1: Predecessor()}, {0: BasisSlot((0,)), 1: BasisSlot((1,))})
        with pytest.raises(ScaleRuleError):
            ScaleRule(params, tables, (Coefficient((0,)), Coefficient((1, 1))))
        with pytest.raises(ScaleRuleError):
            ScaleRule(params, tables, (Coefficient((0, 2)), Coefficient((1, 1))))
        with pytest.raises(ScaleRuleError):
            ScaleRule(params, tables, (Coefficient((0, 0)), Coefficient((0, 0))))

    def test_table_count_must_equal_c(self):
        with pytest.raises(ScaleRuleError):
            ScaleRule(FractalParams(2, 1), ({0: Predecessor()},), (Coefficient((0, 0)),))

    def test_resolution_errors(self):
        rule = representative_rule(2, 3, 0, 3)
        prev = build_initial(3)
        with pytest.raises(ScaleRuleError):
            rule.resolve(0, 5, prev)
        with pytest.raises(ScaleRuleError):
            rule.resolve(1, 0, build_initial(3).tensor(build_initial(3)))


class TestApplyScaleRule:
    def test_cantor_step_reproduces_the_nine_term_state(self):
        prev = build_cantor(1)
        out = apply_scale_rule(prev, representative_rule(2, 3, 1, 3))
        assert out == build_cantor(2)
        assert out.provenance.n == 2

    def test_gem_step_from_the_minus_pair(self):
        plus, minus = build_bell_pair(+1), build_bell_pair(-1)
        out = apply_scale_rule(minus, gem_rule(plus, +1))
        expect_plus, _ = build_gem_sequence(2)
        assert out == expect_plus

    def test_repetition_step_from_a_single_qubit(self):
        out = apply_scale_rule(build_initial(2), representative_rule(3, 1, 0, 2))
        assert out == SparseState.basis_state(2, (0, 0, 0))

    def test_qudit_count_multiplies_by_c(self):
        prev = build_cantor(2)
        out = apply_scale_rule(prev, representative_rule(2, 3, 2, 3))
        assert out.num_qudits == 2 * prev.num_qudits
        assert out.norm_squared() == 1

    def test_predecessor_must_be_referenced(self):
        # both slots resolve to |1>, never to prev = |0>
        rule = ScaleRule(
            FractalParams(2, 1),
            ({0: BasisSlot((1,))}, {0: BasisSlot((1,))}),
            (Coefficient((0, 0)),),
        )
        with pytest.raises(ScaleRuleError):
            apply_scale_rule(build_initial(2), rule)

    def test_a_basis_slot_equal_to_prev_counts_as_the_predecessor(self):
        rule = ScaleRule(
            FractalParams(2, 1),
            ({0: BasisSlot((0,))}, {0: BasisSlot((1,))}),
            (Coefficient((0, 0)),),
        )
        out = apply_scale_rule(build_initial(2), rule)
        assert out == SparseState.basis_state(2, (0, 1))

    def test_non_orthogonal_slots_rejected(self):
        plus, _ = build_gem_sequence(1)
        skewed = ScaleRule(
            FractalParams(2, 2),
            (
                {0: NamedSlot(plus), 1: Predecessor()},
                {0: NamedSlot(plus), 1: Predecessor()},
            ),
            (Coefficient((0, 1)), Coefficient((1, 0))),
        )
        with pytest.raises(ScaleRuleError):
            apply_scale_rule(plus, skewed)

    def test_validation_can_be_skipped(self):
        rule = ScaleRule(
            FractalParams(2, 1),
            ({0: BasisSlot((0,))}, {0: BasisSlot((1,))}),
            (Coefficient((0, 0)),),
        )
        out = apply_scale_rule(build_initial(2), rule, validate=False)
        assert out == SparseState.basis_state(2, (0, 1))


class TestRepresentative:
    @pytest.mark.parametrize("c", [2, 3])
    @pytest.mark.parametrize("s", [1, 2, 3])
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_support_and_probability(self, c, s, n):
        state = build_representative(c, s, n, local_dim=max(2, s))
        assert len(state.entries) == s**n
        assert state.norm_squared() == 1
        for key in state.support():
            assert state.outcome_probability(key) == Fraction(1, s**n)

    def test_prefix_cut_is_a_product(self):
        state = build_cantor(2)
        assert state.schmidt_rank(2) == 1

    def test_flat_family_collapses_to_one_string(self):
        assert build_representative(3, 1, 2, 2) == SparseState.basis_state(2, (0,) * 9)

    def test_local_dim_must_cover_s(self):
        with pytest.raises(ValueError):
            build_representative(2, 3, 1, local_dim=2)

    def test_guards(self):
        with pytest.raises(GuardExceededError):
            build_representative(2, 2, 14, local_dim=2)
        with pytest.raises(GuardExceededError):
            build_representative(2, 3, 13, local_dim=3)

    def test_initial_state_validation(self):
        with pytest.raises(ValueError):
            build_initial(1)


class TestCantor:
    def test_first_three_scales(self):
        assert build_cantor(0) == SparseState.basis_state(3, (0,))
        one = build_cantor(1)
        assert one.support() == ((0, 0), (0, 1), (0, 2))
        assert all(one.entries[key] == third() for key in one.support())
        two = build_cantor(2)
        assert len(two.entries) == 9
        assert two.entries[(0, 0, 1, 1)] == Amplitude(0, ((3, 2),))

    def test_provenance(self):
        tag = build_cantor(2).provenance
        assert (tag.family, tag.c, tag.s, tag.n) == ("cantor", 2, 3, 2)


class TestGems:
    def test_bell_pairs(self):
        plus = build_bell_pair(+1)
        assert plus.entries[(0, 1)] == Amplitude.inv_sqrt(2)
        assert plus.entries[(1, 0)] == Amplitude.inv_sqrt(2)
        minus = build_bell_pair(-1)
        assert minus.entries[(1, 0)] == Amplitude(4, ((2, 1),))
        assert plus.norm_squared() == minus.norm_squared() == 1

    def test_step_recovers_the_bell_pair_base_case(self):
        zero = SparseState.basis_state(2, (0,))
        one = SparseState.basis_state(2, (1,))
        assert build_gem_step(zero, one, -1) == build_bell_pair(-1)

    def test_step_reproduces_the_four_qubit_pair(self):
        plus, minus = build_bell_pair(+1), build_bell_pair(-1)
        up = build_gem_step(plus, minus, +1)
        assert up.support() == ((0, 1, 0, 1), (1, 0, 1, 0))
        assert up.entries[(1, 0, 1, 0)] == Amplitude(4, ((2, 1),))
        down = build_gem_step(plus, minus, -1)
        assert down.support() == ((0, 1, 1, 0), (1, 0, 0, 1))
        assert down.entries[(1, 0, 0, 1)] == Amplitude.inv_sqrt(2)
        assert down.entries[(0, 1, 1, 0)] == Amplitude(4, ((2, 1),))

    def test_step_rejects_bad_inputs(self):
        plus, minus = build_bell_pair(+1), build_bell_pair(-1)
        with pytest.raises(ValueError):
            build_gem_step(plus, plus, +1)
        with pytest.raises(ValueError):
            build_gem_step(plus, minus.tensor(minus), +1)
        skew = SparseState.basis_state(2, (0, 1))
        with pytest.raises(ValueError):
            build_gem_step(plus, skew, +1)

    @pytest.mark.parametrize("levels,support", [(1, 2), (2, 2), (3, 8), (4, 32)])
    def test_sequence_sizes(self, levels, support):
        plus, minus = build_gem_sequence(levels)
        assert len(plus.entries) == len(minus.entries) == support
        assert plus.num_qudits == 2**levels
        assert plus.norm_squared() == minus.norm_squared() == 1
        assert abs(plus.inner_product(minus)) < 1e-9

    def test_sequence_amplitudes_share_one_magnitude(self):
        plus, _ = build_gem_sequence(3)
        magnitudes = {amp.squared_magnitude() for amp in plus.entries.values()}
        assert magnitudes == {Fraction(1, 8)}


class TestBitFlipFamily:
    def test_members(self):
        assert build_bitflip_state(0, 0) == SparseState.basis_state(2, (0,))
        assert build_bitflip_state(1, 0) == SparseState.basis_state(2, (0, 0, 0))
        assert build_bitflip_state(2, 1) == SparseState.basis_state(2, (1,) * 9)

    def test_validation(self):
        with pytest.raises(ValueError):
            build_bitflip_state(1, 2)
        with pytest.raises(GuardExceededError):
            build_bitflip_state(9, 0)


class TestCluster:
    def test_two_qubit_signs(self):
        state = build_cluster(2)
        quarter = Amplitude(0, ((2, 2),))
        assert state.entries[(0, 0)] == quarter
        assert state.entries[(0, 1)] == Amplitude(4, ((2, 2),))
        assert state.entries[(1, 0)] == quarter
        assert state.entries[(1, 1)] == quarter

    def test_single_qubit_is_the_plus_state(self):
        state = build_cluster(1)
        assert state.support() == ((0,), (1,))
        assert state.entries[(0,)] == state.entries[(1,)] == Amplitude.inv_sqrt(2)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_full_support_with_half_turn_phases_only(self, n):
        state = build_cluster(n)
        assert len(state.entries) == 2**n
        assert state.norm_squared() == 1
        for amp in state.entries.values():
            assert amp.phase_index in (0, 4)
            assert amp.squared_magnitude() == Fraction(1, 2**n)

    def test_size_guard(self):
        with pytest.raises(GuardExceededError):
            build_cluster(15)
        with pytest.raises(GuardExceededError):
            build_cluster(0)
