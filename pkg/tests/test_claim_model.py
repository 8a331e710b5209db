"""Claim model: extraction grammar, entity linking, span properties."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factgate.claims import (
    AliasTable,
    DateValue,
    EntityKind,
    EntityRef,
    ExtractorConfig,
    NumberValue,
    Span,
    extract_claims,
    link_entity,
)
from factgate.claims.model import Claim, EntityValue, TextValue


@pytest.fixture()
def config():
    return ExtractorConfig.default()


@pytest.fixture()
def einstein_aliases():
    table = AliasTable()
    table.add("Q937", EntityKind.PERSON, "Albert Einstein")
    table.add("Q937", EntityKind.PERSON, "Einstein")
    return table


class TestExtraction:
    def test_einstein_sentence_yields_one_claim(self, config):
        text = "Einstein published relativity in 1920"
        claims = extract_claims(text, config)
        assert len(claims) == 1
        claim = claims[0]
        assert claim.subject.surface_form == "Einstein"
        assert claim.predicate == "published"
        assert claim.object == DateValue(1920)
        assert claim.raw_text == text

    def test_empty_input(self, config):
        assert extract_claims("", config) == []

    def test_measure_claim_and_opinion_sentence(self, config):
        text = "The Eiffel Tower is 300 meters tall. It is nice."
        claims = extract_claims(text, config)
        assert len(claims) == 1
        assert claims[0].object == NumberValue(300.0, "meters")
        assert claims[0].raw_text == "The Eiffel Tower is 300 meters tall."

    def test_coordinated_dates_yield_two_claims(self, config):
        text = "Einstein published special relativity in 1905 and general relativity in 1915."
        claims = extract_claims(text, config)
        assert [c.object for c in claims] == [DateValue(1905), DateValue(1915)]
        assert claims[0].theme_span.slice(text) == "special relativity"
        assert claims[1].theme_span.slice(text) == "general relativity"

    def test_bare_year_coordination(self, config):
        claims = extract_claims("Einstein published relativity in 1905 and 1915.", config)
        assert [c.object.year for c in claims] == [1905, 1915]

    def test_location_and_copular(self, config):
        claims = extract_claims("The Veylan Tower is in Port Sorel.", config)
        assert claims[0].predicate == "located_in"
        assert isinstance(claims[0].object, EntityValue)
        claims = extract_claims("Paris is the capital of France.", config)
        assert claims[0].predicate == "is"
        assert claims[0].object == TextValue("the capital of France")

    def test_unknown_verb_maps_to_related_to(self, config):
        claims = extract_claims("Marie Curie investigated polonium in 1898.", config)
        assert len(claims) == 1
        assert claims[0].predicate == "related_to"

    def test_no_pattern_no_claim(self, config):
        assert extract_claims("Hello there!", config) == []
        assert extract_claims("What a wonderful day for science.", config) == []

    def test_subject_linked_through_alias_table(self, einstein_aliases):
        config = ExtractorConfig.default(alias_table=einstein_aliases)
        claims = extract_claims("Einstein published relativity in 1920", config)
        assert claims[0].subject.canonical_id == "Q937"
        assert claims[0].subject.link_score == 1.0


class TestLinking:
    def test_exact_alias_links_with_score_one(self, einstein_aliases):
        ref = link_entity("Einstein", einstein_aliases)
        assert ref.canonical_id == "Q937"
        assert ref.link_score == 1.0
        assert ref.kind is EntityKind.PERSON

    def test_typo_links_by_trigram_jaccard(self, einstein_aliases):
        # independent oracle: trigram sets built by hand
        def trigrams(s):
            return {s[i : i + 3] for i in range(len(s) - 2)}

        expected = len(trigrams("einsten") & trigrams("einstein")) / len(
            trigrams("einsten") | trigrams("einstein")
        )
        assert expected >= 0.6
        ref = link_entity("Einsten", einstein_aliases)
        assert ref.canonical_id == "Q937"
        assert ref.link_score == pytest.approx(expected)

    def test_unknown_surface_stays_unlinked(self):
        ref = link_entity("Zzyzx Unknown Person", AliasTable())
        assert ref.canonical_id == ""
        assert ref.link_score == 0.0

    def test_below_threshold_stays_unlinked(self, einstein_aliases):
        ref = link_entity("Zzyzx Unknown Person", einstein_aliases)
        assert not ref.linked

    def test_linking_idempotent_on_canonical_alias(self, einstein_aliases):
        for alias in ("Albert Einstein", "Einstein"):
            assert link_entity(alias, einstein_aliases).link_score == 1.0


class TestModelInvariants:
    def test_entity_ref_id_iff_score(self):
        with pytest.raises(ValueError):
            EntityRef("", "x", EntityKind.OTHER, 0.5)
        with pytest.raises(ValueError):
            EntityRef("q1", "x", EntityKind.OTHER, 0.0)

    def test_date_range_and_number_finite(self):
        with pytest.raises(ValueError):
            DateValue(10000)
        with pytest.raises(ValueError):
            NumberValue(float("inf"))

    def test_span_validation(self):
        with pytest.raises(ValueError):
            Span(3, 3)
        with pytest.raises(ValueError):
            Span(-1, 2)

    def test_claim_span_matches_raw_text(self, config):
        text = "Rosa Vance published The Long Meridian in 1952. The spire is 80 meters tall."
        for claim in extract_claims(text, config):
            assert claim.span.slice(text) == claim.raw_text


_names = st.sampled_from(["Ada Varen", "Einstein", "Rosa Quill", "The Veylan Tower", "Omar Telles"])
_verbs = st.sampled_from(["published", "discovered", "won", "founded"])
_themes = st.sampled_from(["relativity", "the prize", "The Long Meridian", "a comet"])
_years = st.integers(min_value=1800, max_value=2024)


@st.composite
def _sentences(draw):
    kind = draw(st.integers(0, 2))
    if kind == 0:
        return f"{draw(_names)} {draw(_verbs)} {draw(_themes)} in {draw(_years)}."
    if kind == 1:
        return f"{draw(_names)} is {draw(st.integers(1, 900))} meters tall."
    return draw(st.sampled_from(["It is nice.", "Hello there!", "What a day."]))


@st.composite
def _texts(draw):
    return " ".join(draw(st.lists(_sentences(), min_size=0, max_size=5)))


class TestProperties:
    @given(_texts())
    @settings(max_examples=150, deadline=None)
    def test_determinism(self, text):
        config = ExtractorConfig.default()
        first = extract_claims(text, config)
        second = extract_claims(text, config)
        assert first == second

    @given(_texts())
    @settings(max_examples=150, deadline=None)
    def test_span_fidelity_and_order(self, text):
        claims = extract_claims(text, ExtractorConfig.default())
        previous_end = 0
        for claim in claims:
            assert 0 <= claim.span.start < claim.span.end <= len(text)
            assert text[claim.span.start : claim.span.end] == claim.raw_text
            assert claim.span.start >= previous_end  # span order, no overlap
            previous_end = claim.span.end

    @given(_texts(), _sentences())
    @settings(max_examples=150, deadline=None)
    def test_monotonic_grammar(self, text, extra):
        config = ExtractorConfig.default()
        base = extract_claims(text, config)
        extended = extract_claims(text + " " + extra if text else extra, config)
        assert len(extended) >= len(base)
        for before, after in zip(base, extended):
            assert before.raw_text == after.raw_text
            assert before.predicate == after.predicate
            assert before.object == after.object

    @given(_texts())
    @settings(max_examples=100, deadline=None)
    def test_ids_unique(self, text):
        claims = extract_claims(text, ExtractorConfig.default())
        ids = [c.id for c in claims]
        assert len(set(ids)) == len(ids)
