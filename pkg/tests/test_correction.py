"""Correction engine: strategy selection, template application, locality."""

from __future__ import annotations

import random

import pytest

from factgate.claims import ExtractorConfig, extract_claims
from factgate.claims.model import Claim, DateValue, EntityKind, EntityRef, NumberValue, Span
from factgate.confidence.scoring import ConfidenceBreakdown
from factgate.correction import (
    CorrectionConfig,
    CorrectionStrategy,
    NotFlagged,
    SpanMismatch,
    apply_correction,
    apply_corrections,
    build_correction,
    select_strategy,
)
from factgate.fusion import ConsistencyReport


def _breakdown(combined=0.3):
    return ConfidenceBreakdown(0.5, 0.1, 0.4, combined, (0.3, 0.5, 0.2))


def _report(posterior, labels=None, consistency=0.0, strength=0.8):
    return ConsistencyReport(
        claim_id="c1",
        consistency=consistency,
        strength=strength,
        fused_posterior=posterior,
        contradiction=consistency < 0.5,
        contributing_sources=["kg-main"],
        value_labels=labels or {},
    )


def _extract_one(text, config=None):
    claims = extract_claims(text, config or ExtractorConfig.default())
    assert len(claims) == 1
    return claims[0]


EINSTEIN_POSTERIOR = {DateValue(1905): 0.5875, DateValue(1915): 0.4125}
EINSTEIN_LABELS = {DateValue(1905): "special relativity", DateValue(1915): "general relativity"}


class TestSelectStrategy:
    def test_multi_value_substitution_for_published(self):
        claim = _extract_one("Einstein published relativity in 1920")
        decision = select_strategy(
            claim, _report(EINSTEIN_POSTERIOR), _breakdown(),
            CorrectionConfig(), tau_confidence=0.7, multi_valued=True,
        )
        assert decision.strategy is CorrectionStrategy.SUBSTITUTE
        assert [v.year for v in decision.values] == [1905, 1915]
        assert decision.posterior_mass == pytest.approx(1.0)

    def test_empty_posterior_hedges(self):
        claim = _extract_one("Einstein published relativity in 1920")
        decision = select_strategy(
            claim, _report({}, consistency=0.5, strength=0.0), _breakdown(),
            CorrectionConfig(), tau_confidence=0.7,
        )
        assert decision.strategy is CorrectionStrategy.HEDGE

    def test_diffuse_posterior_attributes(self):
        claim = _extract_one("Omar Telles founded the institute in 1900.")
        posterior = {DateValue(1900): 0.4, DateValue(1905): 0.35, DateValue(1910): 0.25}
        decision = select_strategy(
            claim, _report(posterior), _breakdown(),
            CorrectionConfig(), tau_confidence=0.7, multi_valued=False,
        )
        # functional predicate: cluster strictly within 0.05 of the top is
        # just the argmax (0.4), mass 0.4 < 0.6 -> ATTRIBUTE
        assert decision.strategy is CorrectionStrategy.ATTRIBUTE

    def test_supported_but_unsure_claim_attributes_instead_of_noop(self):
        claim = _extract_one("Einstein published relativity in 1905.")
        posterior = {DateValue(1905): 0.9, DateValue(1915): 0.1}
        decision = select_strategy(
            claim, _report(posterior, consistency=1.0), _breakdown(0.4),
            CorrectionConfig(), tau_confidence=0.7, multi_valued=False,
        )
        assert decision.strategy is CorrectionStrategy.ATTRIBUTE

    def test_passing_claim_raises(self):
        claim = _extract_one("Einstein published relativity in 1905.")
        with pytest.raises(NotFlagged):
            select_strategy(
                claim, _report(EINSTEIN_POSTERIOR, consistency=1.0), _breakdown(0.95),
                CorrectionConfig(), tau_confidence=0.7,
            )


class TestApplyCorrection:
    def test_labeled_multi_value_substitution_matches_worked_example(self):
        text = "Einstein published relativity in 1920"
        claim = _extract_one(text)
        report = _report(EINSTEIN_POSTERIOR, EINSTEIN_LABELS)
        decision = select_strategy(
            claim, report, _breakdown(), CorrectionConfig(), 0.7, multi_valued=True
        )
        correction = build_correction(claim, report, decision, CorrectionConfig())
        corrected = apply_correction(text, claim, correction)
        assert corrected == (
            "Einstein published special relativity in 1905 and general relativity in 1915"
        )

    def test_unlabeled_substitution_lists_values(self):
        text = "Einstein published relativity in 1920"
        claim = _extract_one(text)
        report = _report(EINSTEIN_POSTERIOR)
        decision = select_strategy(
            claim, report, _breakdown(), CorrectionConfig(), 0.7, multi_valued=True
        )
        correction = build_correction(claim, report, decision, CorrectionConfig())
        assert apply_correction(text, claim, correction) == (
            "Einstein published relativity in 1905 and 1915"
        )

    def test_number_substitution_touches_only_object_slot(self):
        text = "The Veylan Tower is 500 meters tall."
        claim = _extract_one(text)
        report = _report({NumberValue(312.0, "meters"): 1.0}, consistency=0.0)
        decision = select_strategy(claim, report, _breakdown(), CorrectionConfig(), 0.7)
        correction = build_correction(claim, report, decision, CorrectionConfig())
        assert apply_correction(text, claim, correction) == "The Veylan Tower is 312 meters tall."

    def test_hedge_prefixes_and_lowercases(self):
        text = "The drug cures X."
        claim = Claim(
            id="c1",
            subject=EntityRef.unlinked("drug"),
            predicate="related_to",
            object=DateValue(2000),
            span=Span(0, len(text)),
            raw_text=text,
        )
        report = _report({}, consistency=0.5, strength=0.0)
        decision = select_strategy(claim, report, _breakdown(), CorrectionConfig(), 0.7)
        correction = build_correction(claim, report, decision, CorrectionConfig())
        assert apply_correction(text, claim, correction) == (
            "It is uncertain whether the drug cures X."
        )

    def test_attribute_appends_source_label(self):
        text = "Einstein published relativity in 1905."
        claim = _extract_one(text)
        posterior = {DateValue(1905): 0.4, DateValue(1885): 0.35, DateValue(1875): 0.25}
        report = _report(posterior, consistency=0.6)
        config = CorrectionConfig(attribution_labels={"kg-main": "kg-main"})
        decision = select_strategy(claim, report, _breakdown(0.4), config, 0.7)
        correction = build_correction(claim, report, decision, config)
        corrected = apply_correction(text, claim, correction)
        assert corrected == "Einstein published relativity in 1905 (according to kg-main)."
        assert correction.cited_sources == ("kg-main",)

    def test_span_mismatch_detected(self):
        text = "Einstein published relativity in 1920"
        claim = _extract_one(text)
        report = _report(EINSTEIN_POSTERIOR)
        decision = select_strategy(claim, report, _breakdown(), CorrectionConfig(), 0.7, True)
        correction = build_correction(claim, report, decision, CorrectionConfig())
        with pytest.raises(SpanMismatch):
            apply_correction("mutated " + text, claim, correction)

    def test_determinism(self):
        text = "Einstein published relativity in 1920"
        claim = _extract_one(text)
        report = _report(EINSTEIN_POSTERIOR, EINSTEIN_LABELS)
        outputs = set()
        for _ in range(5):
            decision = select_strategy(claim, report, _breakdown(), CorrectionConfig(), 0.7, True)
            correction = build_correction(claim, report, decision, CorrectionConfig())
            outputs.add(apply_correction(text, claim, correction))
        assert len(outputs) == 1


NAMES = ["Ada Varen", "Rosa Quill", "Omar Telles", "Ivy Marek", "Hugo Ferrant"]
THEMES = ["the ledger", "a comet", "The Long Meridian", "the archive"]


class TestLocalityProperty:
    def test_bytes_outside_span_unchanged_over_randomized_corrections(self):
        rng = random.Random(99)
        config = ExtractorConfig.default()
        correction_config = CorrectionConfig()
        checked = 0
        for _ in range(250):
            sentences = [
                f"{rng.choice(NAMES)} published {rng.choice(THEMES)} in {rng.randrange(1800, 2000)}."
                for _ in range(rng.randrange(1, 5))
            ]
            text = " ".join(sentences)
            claims = extract_claims(text, config)
            if not claims:
                continue
            pairs = []
            for claim in claims:
                if rng.random() < 0.5:
                    continue
                strategy = rng.choice(
                    [CorrectionStrategy.SUBSTITUTE, CorrectionStrategy.HEDGE,
                     CorrectionStrategy.ATTRIBUTE]
                )
                if strategy is CorrectionStrategy.SUBSTITUTE:
                    posterior = {DateValue(rng.randrange(1800, 2000)): 1.0}
                    report = _report(posterior)
                elif strategy is CorrectionStrategy.HEDGE:
                    report = _report({}, consistency=0.5, strength=0.0)
                else:
                    report = _report({claim.object: 0.4, DateValue(1700): 0.35,
                                      DateValue(1701): 0.25}, consistency=0.6)
                decision = select_strategy(
                    claim, report, _breakdown(), correction_config, 0.7, multi_valued=False
                )
                pairs.append((claim, build_correction(claim, report, decision, correction_config)))
            if not pairs:
                continue
            corrected = apply_corrections(text, pairs)
            # bytes outside every replaced span are unchanged
            cursor_original = 0
            cursor_corrected = 0
            for claim, correction in sorted(pairs, key=lambda p: p[1].original_span.start):
                span = correction.original_span
                assert (
                    corrected[cursor_corrected : cursor_corrected + (span.start - cursor_original)]
                    == text[cursor_original : span.start]
                )
                cursor_corrected += span.start - cursor_original
                cursor_corrected += len(correction.replacement_text)
                cursor_original = span.end
            assert corrected[cursor_corrected:] == text[cursor_original:]
            checked += 1
        assert checked >= 100

    def test_duplicate_corrections_rejected(self):
        text = "Einstein published relativity in 1920"
        claim = _extract_one(text)
        report = _report(EINSTEIN_POSTERIOR)
        decision = select_strategy(claim, report, _breakdown(), CorrectionConfig(), 0.7, True)
        correction = build_correction(claim, report, decision, CorrectionConfig())
        with pytest.raises(ValueError):
            apply_corrections(text, [(claim, correction), (claim, correction)])
