"""Dimension formula, step verification, scaling reports, and the Clifford
equivalence search."""

import math
from fractions import Fraction

import numpy as np
import pytest

from qfractal import (
    Amplitude,
    AnalysisError,
    GuardExceededError,
    SparseState,
    build_bell_pair,
    build_bitflip_state,
    build_cantor,
    build_cluster,
    build_gem_sequence,
    build_initial,
    build_representative,
    fractal_dimension,
    gem_rule,
    lu_equivalent_by_local_clifford,
    probability_scaling_ratio,
    product_cut_report,
    representative_rule,
    rule_basis_probabilities,
    single_qubit_cliffords,
    verify_scale_step,
)


def negate_first(state):
    key = state.support()[0]
    entries = dict(state.entries)
    amp = entries[key]
    half = state.phase_order // 2
    entries[key] = Amplitude((amp.phase_index + half) % state.phase_order, amp.mag_exponents)
    return SparseState(state.local_dim, state.num_qudits, state.phase_order, entries)


class TestDimension:
    def test_paper_values(self):
        assert abs(fractal_dimension(2, 3) - math.log(2) / math.log(3)) < 1e-12
        assert fractal_dimension(2, 2) == 1.0
        assert abs(fractal_dimension(3, 1) - math.log2(3)) < 1e-12

    def test_equal_parameters_give_one(self):
        for c in range(2, 8):
            assert fractal_dimension(c, c) == 1.0

    def test_monotone_in_c(self):
        for s in (2, 3, 5):
            values = [fractal_dimension(c, s) for c in range(2, 8)]
            assert values == sorted(values)
            assert len(set(values)) == len(values)

    def test_validation(self):
        with pytest.raises(ValueError):
            fractal_dimension(1, 3)
        with pytest.raises(ValueError):
            fractal_dimension(2, 0)


class TestVerifyScaleStep:
    def test_cantor_step_is_valid(self):
        report = verify_scale_step(build_cantor(1), build_cantor(2), representative_rule(2, 3, 1, 3))
        assert report.valid
        assert report.extracted_s == 3
        assert [check.passed for check in report.checks] == [True] * 6

    def test_gem_step_is_valid(self):
        plus, minus = build_bell_pair(+1), build_bell_pair(-1)
        next_plus, _ = build_gem_sequence(2)
        report = verify_scale_step(minus, next_plus, gem_rule(plus, +1))
        assert report.valid
        assert report.extracted_s == 2

    def test_negated_amplitude_fails_reconstruction(self):
        report = verify_scale_step(
            build_cantor(1), negate_first(build_cantor(2)), representative_rule(2, 3, 1, 3)
        )
        assert not report.valid
        assert report.extracted_s is None
        by_name = {check.name: check.passed for check in report.checks}
        assert by_name["reconstruction"] is False
        assert by_name["norm"] is True

    def test_mismatched_prev_fails_without_raising(self):
        report = verify_scale_step(build_cantor(2), build_cantor(2), representative_rule(2, 3, 1, 3))
        assert not report.valid
        by_name = {check.name: check.passed for check in report.checks}
        assert by_name["slot_orthonormality"] is False or by_name["predecessor_present"] is False


class TestRuleBasisProbabilities:
    def test_cantor_first_step(self):
        probs = rule_basis_probabilities(build_cantor(1), representative_rule(2, 3, 0, 3), build_cantor(0))
        assert probs == [Fraction(1, 3)] * 3

    def test_repetition_step_is_certain(self):
        probs = rule_basis_probabilities(
            build_bitflip_state(1, 0), representative_rule(3, 1, 0, 2), build_initial(2)
        )
        assert probs == [Fraction(1, 1)]

    @pytest.mark.parametrize("level", [2, 3])
    def test_gem_levels_split_evenly(self, level):
        plus_prev, minus_prev = build_gem_sequence(level - 1)
        plus, minus = build_gem_sequence(level)
        assert rule_basis_probabilities(plus, gem_rule(plus_prev, +1), minus_prev) == [
            Fraction(1, 2),
            Fraction(1, 2),
        ]
        assert rule_basis_probabilities(minus, gem_rule(plus_prev, -1), minus_prev) == [
            Fraction(1, 2),
            Fraction(1, 2),
        ]

    def test_snapped_values_sum_to_one(self):
        for n in (1, 2, 3):
            probs = rule_basis_probabilities(
                build_cantor(n), representative_rule(2, 3, n - 1, 3), build_cantor(n - 1)
            )
            assert sum(probs) == 1

    def test_unsnappable_probability_is_an_error(self):
        half = Amplitude.inv_sqrt(2)
        skew = SparseState(3, 2, 8, {(0, 0): half, (0, 1): half})
        with pytest.raises(AnalysisError):
            rule_basis_probabilities(skew, representative_rule(2, 3, 0, 3), build_cantor(0))


class TestScalingRatio:
    def test_cantor_sequence(self):
        report = probability_scaling_ratio([build_cantor(n) for n in range(3)])
        assert report.probabilities == (Fraction(1), Fraction(1, 3), Fraction(1, 9))
        assert report.ratios == (Fraction(3), Fraction(3))

    def test_flat_sequence(self):
        report = probability_scaling_ratio([build_bitflip_state(n, 0) for n in range(3)])
        assert report.ratios == (Fraction(1), Fraction(1))

    def test_cluster_computational_ratio_is_four(self):
        # the computational-basis ratio, distinct from the rule-basis s = 2
        report = probability_scaling_ratio([build_cluster(2), build_cluster(4)])
        assert report.probabilities == (Fraction(1, 4), Fraction(1, 16))
        assert report.ratios == (Fraction(4),)

    def test_non_uniform_state_rejected(self):
        lopsided = SparseState(2, 1, 8, {(0,): Amplitude(0, ((2, 2),)), (1,): Amplitude(0, ((2, 1),))})
        with pytest.raises(AnalysisError):
            probability_scaling_ratio([lopsided])

    def test_empty_input_rejected(self):
        with pytest.raises(AnalysisError):
            probability_scaling_ratio([])
        with pytest.raises(AnalysisError):
            probability_scaling_ratio([SparseState(2, 1, 8, {})])


class TestProductCutReport:
    def test_default_cuts(self):
        report = product_cut_report(SparseState.basis_state(2, (1,) * 9))
        assert report == tuple((cut, 1) for cut in range(1, 9))

    def test_selected_cuts(self):
        plus, _ = build_gem_sequence(2)
        assert product_cut_report(plus, [2]) == ((2, 2),)
        assert product_cut_report(build_cantor(2), [2]) == ((2, 1),)


class TestCliffordTable:
    def test_twenty_four_distinct_unitaries(self):
        words, gates = single_qubit_cliffords()
        assert len(words) == 24
        assert words[0] == "I"
        for gate in gates:
            assert np.allclose(gate @ gate.conj().T, np.eye(2), atol=1e-12)
        # pairwise distinct up to global phase
        for i in range(24):
            for j in range(i + 1, 24):
                overlap = abs(np.trace(gates[i].conj().T @ gates[j])) / 2
                assert overlap < 1 - 1e-6


class TestLocalCliffordSearch:
    def test_identity_on_equal_states(self):
        plus, _ = build_gem_sequence(2)
        match = lu_equivalent_by_local_clifford(plus, plus)
        assert match.indices == (0, 0, 0, 0)
        assert match.words == ("I", "I", "I", "I")
        assert match.fidelity > 1 - 1e-9

    def test_single_qubit_flip(self):
        zero = SparseState.basis_state(2, (0,))
        one = SparseState.basis_state(2, (1,))
        match = lu_equivalent_by_local_clifford(zero, one)
        assert match is not None
        assert match.fidelity > 1 - 1e-9

    def test_rank_obstruction_gives_no_match(self):
        product = SparseState.basis_state(2, (0, 0))
        assert lu_equivalent_by_local_clifford(product, build_bell_pair(-1)) is None

    def test_match_preserves_schmidt_ranks(self):
        target = SparseState(
            2,
            4,
            8,
            {
                (0, 0, 0, 0): Amplitude(0, ((2, 2),)),
                (0, 0, 1, 1): Amplitude(0, ((2, 2),)),
                (1, 1, 0, 0): Amplitude(0, ((2, 2),)),
                (1, 1, 1, 1): Amplitude(4, ((2, 2),)),
            },
        )
        cluster = build_cluster(4)
        match = lu_equivalent_by_local_clifford(cluster, target)
        assert match is not None
        for cut in range(1, 4):
            assert cluster.schmidt_rank(cut) == target.schmidt_rank(cut)

    def test_deterministic_result(self):
        a = build_cluster(3)
        b = build_cluster(3).apply_sigma_z(1)
        first = lu_equivalent_by_local_clifford(a, b)
        second = lu_equivalent_by_local_clifford(a, b)
        assert first == second
        assert first is not None

    def test_guards_and_validation(self):
        wide = SparseState.basis_state(2, (0,) * 6)
        with pytest.raises(GuardExceededError):
            lu_equivalent_by_local_clifford(wide, wide)
        with pytest.raises(ValueError):
            lu_equivalent_by_local_clifford(build_cantor(1), build_cantor(1))
        with pytest.raises(ValueError):
            lu_equivalent_by_local_clifford(
                SparseState.basis_state(2, (0,)), SparseState.basis_state(2, (0, 0))
            )
