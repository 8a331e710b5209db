"""Confidence ensemble and calibration: providers, scoring, ECE, weight
learning, and the compiled/fallback kernel equivalence."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factgate.claims.model import Claim, DateValue, EntityKind, EntityRef, Span
from factgate.confidence import (
    ConstantProvider,
    SampleAgreementProvider,
    SuppliedConfidenceProvider,
    WeightsOffSimplex,
    apply_temperature,
    coherence_score,
    combine_confidence,
    expected_calibration_error,
    external_confidence,
    fit_temperature,
    learn_weights,
    safe_intrinsic,
    simplex_grid,
)
from factgate.confidence.backend import get_kernels
from factgate.confidence.calibration import EmptyInput
from factgate.fusion import ConsistencyReport
from factgate.sources import Evidence, Stance


def _claim(year=1905, subject_id="Q937"):
    text = f"Einstein published relativity in {year}"
    return Claim(
        id="c1",
        subject=EntityRef(subject_id, "Einstein", EntityKind.PERSON, 1.0),
        predicate="published",
        object=DateValue(year),
        span=Span(0, len(text)),
        raw_text=text,
    )


def _report(consistency, strength, posterior=None):
    return ConsistencyReport(
        claim_id="c1",
        consistency=consistency,
        strength=strength,
        fused_posterior=posterior or {},
        contradiction=consistency < 0.5,
        contributing_sources=["kg"],
    )


class TestProviders:
    def test_constant(self):
        provider = ConstantProvider(0.9)
        assert provider.score(_claim()) == 0.9

    def test_sample_agreement_three_of_four(self):
        alternatives = [
            "Einstein published relativity in 1905.",
            "Einstein published relativity in 1905.",
            "Einstein published special relativity in 1905.",
            "Einstein published relativity in 1911.",
        ]
        provider = SampleAgreementProvider(alternatives)
        assert provider.score(_claim(1905)) == 0.75

    def test_sample_agreement_zero_alternatives(self):
        assert SampleAgreementProvider([]).score(_claim()) == 0.5

    def test_supplied_by_text_and_by_index(self):
        provider = SuppliedConfidenceProvider()
        claim = _claim()
        context = {"intrinsic_confidences": {claim.raw_text: 0.8}}
        assert provider.score(claim, context) == 0.8
        context = {"intrinsic_confidences": {"0": 0.65}, "claim_index": {"c1": 0}}
        assert provider.score(claim, context) == 0.65

    def test_provider_failure_falls_back_to_half(self):
        provider = SuppliedConfidenceProvider()
        value, fell_back = safe_intrinsic(provider, _claim(), {})
        assert value == 0.5 and fell_back


class TestScoring:
    def test_external_refuted_zero(self):
        assert external_confidence(_report(0.0, 0.9)) == 0.0

    def test_external_maximal(self):
        assert external_confidence(_report(1.0, 1.0)) == 1.0

    def test_external_product(self):
        assert external_confidence(_report(0.857, 0.8575)) == pytest.approx(
            0.857 * 0.8575, abs=1e-12
        )

    def test_coherence_identical_text(self):
        claim = _claim()
        evidence = [Evidence("kg", "c1", Stance.SUPPORTS, {DateValue(1905): 1.0},
                             reliability=0.9, snippet=claim.raw_text)]
        assert coherence_score(claim, evidence) == pytest.approx(1.0)

    def test_coherence_disjoint_vocabulary(self):
        claim = _claim()
        evidence = [Evidence("kg", "c1", Stance.SUPPORTS, {DateValue(1905): 1.0},
                             reliability=0.9, snippet="zebra quartz umbrella")]
        assert coherence_score(claim, evidence) == 0.0

    def test_coherence_no_snippets_uninformative(self):
        claim = _claim()
        assert coherence_score(claim, []) == 0.5
        assert coherence_score(claim, [Evidence.insufficient("kg", "c1")]) == 0.5

    def test_coherence_hand_computed_tf_cosine(self):
        # claim: {einstein, published, relativity, 1920}
        # snippet: {einstein, published, theory, special, relativity, 1905}
        # dot = 3, |a| = 2, |b| = sqrt(6)
        claim = _claim(1920)
        snippet = "Einstein published the theory of special relativity in 1905"
        evidence = [Evidence("kg", "c1", Stance.REFUTES, {DateValue(1905): 1.0},
                             reliability=0.9, snippet=snippet)]
        assert coherence_score(claim, evidence) == pytest.approx(3 / (2 * math.sqrt(6)))

    def test_combine_constant_components(self):
        for weights in [(0.3, 0.5, 0.2), (1.0, 0.0, 0.0), (0.2, 0.2, 0.6)]:
            assert combine_confidence(0.5, 0.5, 0.5, weights) == pytest.approx(0.5)

    def test_combine_vertex(self):
        assert combine_confidence(1.0, 0.0, 0.0, (1.0, 0.0, 0.0)) == 1.0

    def test_combine_refuted_claim_below_gate(self):
        combined = combine_confidence(0.75, 0.0, 0.31, (0.3, 0.5, 0.2))
        assert combined == pytest.approx(0.287, abs=1e-12)
        assert combined < 0.7

    def test_combine_rejects_off_simplex(self):
        with pytest.raises(WeightsOffSimplex):
            combine_confidence(0.5, 0.5, 0.5, (0.5, 0.5, 0.5))
        with pytest.raises(WeightsOffSimplex):
            combine_confidence(0.5, 0.5, 0.5, (-0.2, 0.6, 0.6))

    def test_combine_monotone_in_each_component(self):
        base = combine_confidence(0.4, 0.5, 0.6, (0.3, 0.5, 0.2))
        assert combine_confidence(0.5, 0.5, 0.6, (0.3, 0.5, 0.2)) >= base
        assert combine_confidence(0.4, 0.6, 0.6, (0.3, 0.5, 0.2)) >= base
        assert combine_confidence(0.4, 0.5, 0.7, (0.3, 0.5, 0.2)) >= base


GOLDEN_PREDICTIONS = [
    (0.05, False), (0.05, True), (0.32, True), (0.34, False), (0.52, True),
    (0.55, True), (0.55, False), (0.83, True), (0.86, True), (0.99, True),
]
# hand-computed with 15 equal-width bins:
#   bin 0:  {0.05 F, 0.05 T}            |0.10 - 1| = 0.90
#   bin 4:  {0.32 T}                    |0.32 - 1| = 0.68
#   bin 5:  {0.34 F}                    |0.34 - 0| = 0.34
#   bin 7:  {0.52 T}                    |0.52 - 1| = 0.48
#   bin 8:  {0.55 T, 0.55 F}            |1.10 - 1| = 0.10
#   bin 12: {0.83 T, 0.86 T}            |1.69 - 2| = 0.31
#   bin 14: {0.99 T}                    |0.99 - 1| = 0.01
# ECE = 2.82 / 10 = 0.282
GOLDEN_ECE = 0.282


class TestECE:
    def test_golden_ten_sample_case(self):
        report = expected_calibration_error(GOLDEN_PREDICTIONS, bins=15)
        assert report.ece == pytest.approx(GOLDEN_ECE, abs=1e-12)
        assert sum(report.counts) == 10
        assert report.counts[0] == 2 and report.counts[8] == 2 and report.counts[12] == 2

    def test_perfectly_confident_and_correct(self):
        report = expected_calibration_error([(1.0, True)] * 50, bins=15)
        assert report.ece == 0.0
        assert report.counts[14] == 50  # right-closed last bin

    def test_single_bin_collapse(self):
        predictions = [(0.9, True), (0.6, False), (0.3, True)]
        report = expected_calibration_error(predictions, bins=1)
        mean_conf = (0.9 + 0.6 + 0.3) / 3
        assert report.ece == pytest.approx(abs(mean_conf - 2 / 3))

    def test_permutation_invariance(self):
        rng = random.Random(3)
        predictions = [(rng.random(), rng.random() < 0.5) for _ in range(500)]
        base = expected_calibration_error(predictions, bins=15).ece
        for _ in range(5):
            rng.shuffle(predictions)
            shuffled = expected_calibration_error(predictions, bins=15).ece
            assert shuffled == pytest.approx(base, abs=1e-12)

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyInput):
            expected_calibration_error([], bins=15)

    def test_calibrated_generator_identity(self):
        rng = np.random.default_rng(77)
        p = rng.random(100_000)
        correct = rng.random(100_000) < p
        predictions = list(zip(p.tolist(), correct.tolist()))
        assert expected_calibration_error(predictions, bins=15).ece < 0.02

    def test_reliability_csv_shape(self):
        report = expected_calibration_error(GOLDEN_PREDICTIONS, bins=5)
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "bin_mid,mean_conf,accuracy,count"
        assert len(lines) == 6


class TestLearnWeights:
    def test_grid_enumeration_step_half(self):
        assert simplex_grid(0.5) == [
            (0.0, 0.0, 1.0), (0.0, 0.5, 0.5), (0.0, 1.0, 0.0),
            (0.5, 0.0, 0.5), (0.5, 0.5, 0.0), (1.0, 0.0, 0.0),
        ]

    def test_grid_point_count_default_step(self):
        assert len(simplex_grid(0.05)) == 231

    def test_degenerate_tie_returns_lexicographic_smallest(self):
        weights = learn_weights([((1.0, 1.0, 1.0), True)], grid_step=0.5)
        assert weights == (0.0, 0.0, 1.0)

    def test_external_signal_wins_beta(self):
        # external carries hard verification outcomes (0 refuted, 1 supported);
        # correctness equals (external > 0.5); other components are noise
        rng = random.Random(11)
        samples = []
        for _ in range(400):
            external = float(rng.random() < 0.5)
            samples.append(
                ((rng.random(), external, rng.random()), external > 0.5)
            )
        alpha, beta, gamma = learn_weights(samples, grid_step=0.05)
        assert beta >= max(alpha, gamma)
        assert alpha + beta + gamma == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_across_runs_and_backends(self):
        rng = random.Random(5)
        samples = [
            ((rng.random(), rng.random(), rng.random()), rng.random() < 0.5)
            for _ in range(200)
        ]
        first = learn_weights(samples, grid_step=0.05)
        assert learn_weights(samples, grid_step=0.05) == first
        assert learn_weights(samples, grid_step=0.05, backend="python") == first
        assert learn_weights(samples, grid_step=0.05, backend="cython") == first

    def test_output_on_simplex(self):
        rng = random.Random(13)
        for trial in range(20):
            samples = [
                ((rng.random(), rng.random(), rng.random()), rng.random() < 0.5)
                for _ in range(50)
            ]
            weights = learn_weights(samples, grid_step=0.1)
            assert all(w >= 0 for w in weights)
            assert sum(weights) == pytest.approx(1.0, abs=1e-12)

    def test_bad_grid_step_rejected(self):
        with pytest.raises(ValueError):
            learn_weights([((0.5, 0.5, 0.5), True)], grid_step=0.3)

    def test_empty_validation_set_rejected(self):
        with pytest.raises(EmptyInput):
            learn_weights([], grid_step=0.5)


class TestKernelBackends:
    def test_bin_stats_bitwise_equal(self):
        rng = np.random.default_rng(0)
        conf = rng.random(5000)
        correct = (rng.random(5000) < conf).astype(np.float64)
        for bins in (1, 5, 15):
            cython_out = get_kernels("cython").bin_stats(conf, correct, bins)
            python_out = get_kernels("python").bin_stats(conf, correct, bins)
            for a, b in zip(cython_out, python_out):
                assert np.array_equal(a, b)

    def test_grid_scores_bitwise_equal(self):
        rng = np.random.default_rng(1)
        intrinsic, external, coherence = rng.random((3, 2000))
        correct = (rng.random(2000) < external).astype(np.float64)
        ece_c, acc_c = get_kernels("cython").grid_scores(
            intrinsic, external, coherence, correct, 20, 15, 0.7
        )
        ece_p, acc_p = get_kernels("python").grid_scores(
            intrinsic, external, coherence, correct, 20, 15, 0.7
        )
        assert np.array_equal(ece_c, ece_p)
        assert np.array_equal(acc_c, acc_p)


class TestTemperature:
    def test_fit_reduces_nll_of_overconfident_scores(self):
        rng = np.random.default_rng(3)
        true_p = rng.random(5000) * 0.5 + 0.25
        correct = rng.random(5000) < true_p
        overconfident = np.clip(true_p * 1.6 - 0.3, 0.01, 0.99)
        predictions = list(zip(overconfident.tolist(), correct.tolist()))
        temperature = fit_temperature(predictions)
        assert temperature > 0
        before = expected_calibration_error(predictions, bins=15).ece
        rescaled = [(apply_temperature(c, temperature), ok) for c, ok in predictions]
        after = expected_calibration_error(rescaled, bins=15).ece
        assert after <= before + 0.02

    def test_identity_near_one_for_calibrated_input(self):
        rng = np.random.default_rng(4)
        p = rng.random(20000) * 0.9 + 0.05
        correct = rng.random(20000) < p
        temperature = fit_temperature(list(zip(p.tolist(), correct.tolist())))
        assert 0.8 < temperature < 1.25


@given(st.floats(min_value=0.01, max_value=1.0))
@settings(max_examples=50, deadline=None)
def test_combined_ordering_invariant_under_common_rescale(scale):
    weights = (0.3, 0.5, 0.2)
    components = [(0.9, 0.1, 0.4), (0.2, 0.8, 0.5), (0.5, 0.5, 0.5), (0.1, 0.2, 0.3)]
    base = [combine_confidence(*c, weights) for c in components]
    scaled = [
        combine_confidence(c[0] * scale, c[1] * scale, c[2] * scale, weights)
        for c in components
    ]
    base_order = sorted(range(len(base)), key=lambda i: base[i])
    scaled_order = sorted(range(len(scaled)), key=lambda i: scaled[i])
    assert base_order == scaled_order
