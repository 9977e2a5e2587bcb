"""Date, place, and term extraction, each checked against a brute-force oracle."""

from __future__ import annotations

import random

import pytest

from archeodb.extraction import (
    DEFAULT_TERM_PATTERNS,
    ExtractionError,
    Gazetteer,
    InvalidPatternError,
    Mention,
    PeriodTable,
    TermOccurrence,
    TimeRange,
    aggregate_terms,
    century_range,
    default_period_table,
    extract_dates,
    extract_places,
    extract_terms,
    load_gazetteer,
    load_patterns,
    load_period_table,
    match_key,
    parse_patterns,
    roman_to_int,
    score_terms,
    select_term_mentions,
    year_range,
)
from archeodb.lingproc import Token, tokenize

# --- independent helpers ----------------------------------------------

_ROMAN_PAIRS = (
    (1000, "m"), (900, "cm"), (500, "d"), (400, "cd"), (100, "c"),
    (90, "xc"), (50, "l"), (40, "xl"), (10, "x"), (9, "ix"),
    (5, "v"), (4, "iv"), (1, "i"),
)


def int_to_roman(n: int) -> str:
    out = []
    for value, symbol in _ROMAN_PAIRS:
        while n >= value:
            out.append(symbol)
            n -= value
    return "".join(out)


def century_of_year(year: int) -> tuple[int, str]:
    """Which century a signed year belongs to, counted from year 1/-1."""
    assert year != 0
    if year > 0:
        return (year - 1) // 100 + 1, "AD"
    return (-year - 1) // 100 + 1, "BC"


# --- TimeRange ---------------------------------------------------------


def test_time_range_rejects_year_zero_and_inversion():
    with pytest.raises(ValueError):
        TimeRange(0, 10)
    with pytest.raises(ValueError):
        TimeRange(-5, 0)
    with pytest.raises(ValueError):
        TimeRange(10, 5)


def test_time_range_overlaps_inclusive():
    a = TimeRange(-100, -1)
    assert a.overlaps(TimeRange(-1, 50))
    assert a.overlaps(TimeRange(-200, -100))
    assert not a.overlaps(TimeRange(1, 50))


def test_century_range_closed_form():
    assert century_range(1, "AD") == TimeRange(1, 100)
    assert century_range(1, "BC") == TimeRange(-100, -1)
    assert century_range(2, "BC") == TimeRange(-200, -101)
    assert century_range(11, "AD") == TimeRange(1001, 1100)


def test_century_range_matches_year_counting():
    # Every year must land in exactly the century whose range contains it.
    for century in range(1, 22):
        for era in ("BC", "AD"):
            r = century_range(century, era)
            assert r.to_year - r.from_year == 99, "every century spans 100 years"
            for year in range(r.from_year, r.to_year + 1):
                assert century_of_year(year) == (century, era)


def test_centuries_tile_the_timeline():
    covered = set()
    for century in range(1, 22):
        for era in ("BC", "AD"):
            r = century_range(century, era)
            years = set(range(r.from_year, r.to_year + 1))
            assert not (covered & years), "centuries never overlap"
            covered |= years
    assert covered == set(range(-2100, 2101)) - {0}


def test_century_and_year_range_reject_bad_input():
    with pytest.raises(ValueError):
        century_range(0, "AD")
    with pytest.raises(ValueError):
        century_range(1, "CE")
    with pytest.raises(ValueError):
        year_range(0, "BC")
    assert year_range(52, "BC") == TimeRange(-52, -52)
    assert year_range(381, "AD") == TimeRange(381, 381)


# --- roman numerals ----------------------------------------------------


def test_roman_round_trip_full_range():
    for n in range(1, 4000):
        assert roman_to_int(int_to_roman(n)) == n


def test_roman_rejects_non_canonical_forms():
    valid = {int_to_roman(n) for n in range(1, 4000)}
    for bad in ("iix", "vv", "iiii", "xm", "llll", "ic", "", "xvx"):
        assert bad not in valid
        assert roman_to_int(bad) is None
    alphabet = "mdclxvi"
    rng = random.Random(7)
    for _ in range(500):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
        expect = None
        if s in valid:
            expect = next(n for n in range(1, 4000) if int_to_roman(n) == s)
        assert roman_to_int(s) == expect, s


# --- match_key and PeriodTable -----------------------------------------


def test_match_key_folds_and_normalizes_spacing():
    assert match_key("Âge   du  Fer") == "age du fer"
    assert match_key("J.-C.") == "j . - c ."
    assert match_key("La Tène") == "la tene"


def test_period_table_build_and_width():
    table = PeriodTable.build([("âge du Fer", -800, -50), ("La Tène", -450, -50)])
    assert table.entries["age du fer"] == TimeRange(-800, -50)
    assert table.max_key_tokens == 3
    assert table.display["la tene"] == "La Tène"


def test_default_periods_include_iron_age_start():
    table = default_period_table()
    assert table.entries["age du fer"].from_year == -800
    assert table.entries["iron age"].from_year == -800
    assert table.entries["eisenzeit"].from_year == -800


# --- Mention invariants ------------------------------------------------


def test_mention_time_only_for_dates():
    with pytest.raises(ValueError):
        Mention("n#1:term:0-3", "n#1", "term", 0, 3, "mur", "mur",
                time=TimeRange(1, 2))
    with pytest.raises(ValueError):
        Mention("n#1:date:0-3", "n#1", "date", 0, 3, "52", "52..52")
    with pytest.raises(ValueError):
        Mention("n#1:term:0-3", "n#1", "term", 0, 3, "mur", "")


# --- extract_dates -----------------------------------------------------


def dates(text, language, warnings=None, doc_id="d"):
    return extract_dates(
        tokenize(text), text, default_period_table(), language,
        "d#1", warnings, doc_id,
    )


def test_dates_french_century_bc():
    text = "Occupation au IIe siècle av. J.-C. ici."
    (m,) = dates(text, "fr")
    assert m.surface == "IIe siècle av. J.-C."
    assert m.time == TimeRange(-200, -101)
    assert m.normalized == "-200..-101"
    assert m.kind == "date"
    assert text[m.start : m.end] == m.surface
    assert m.mention_id == f"d#1:date:{m.start}-{m.end}"


def test_dates_century_era_defaults_to_ad():
    (m,) = dates("Un mur du XIe siècle subsiste.", "fr")
    assert m.time == TimeRange(1001, 1100)
    assert m.surface == "XIe siècle"


def test_dates_german_century_with_dot():
    (m,) = dates("Mauer des V. Jahrhunderts n. Chr. hier.", "de")
    assert m.surface == "V. Jahrhunderts n. Chr."
    assert m.time == TimeRange(401, 500)
    (m,) = dates("Keramik des I. Jahrhunderts v. Chr. dort.", "de")
    assert m.time == TimeRange(-100, -1)


def test_dates_english_century_with_ordinal():
    (m,) = dates("a wall of the IInd century AD stands", "en")
    assert m.time == TimeRange(101, 200)
    (m,) = dates("the Ist century BC layer", "en")
    assert m.time == TimeRange(-100, -1)


def test_dates_year_with_era():
    (m,) = dates("Détruit en 52 av. J.-C. selon César.", "fr")
    assert m.surface == "52 av. J.-C."
    assert m.time == TimeRange(-52, -52)
    (m,) = dates("Zerstört 260 n. Chr. durch Brand.", "de")
    assert m.time == TimeRange(260, 260)
    (m,) = dates("burned in 410 AD by raiders", "en")
    assert m.time == TimeRange(410, 410)


def test_dates_english_fused_year():
    (m,) = dates("a hoard buried 800BC under the floor", "en")
    assert m.surface == "800BC"
    assert m.time == TimeRange(-800, -800)
    assert dates("un trésor de 800BC ici", "fr") == [], "fused form is English only"


def test_dates_bare_year_is_not_a_date():
    assert dates("Fouillé en 1911 par Viollier.", "fr") == []


def test_dates_named_period_and_longest_match():
    table = PeriodTable.build([("âge", -800, -50), ("âge du Fer", -800, -50)])
    text = "Habitat de l'âge du Fer au sommet."
    (m,) = extract_dates(tokenize(text), text, table, "fr", "d#1")
    assert m.surface == "âge du Fer", "longest period key wins"
    assert m.time == TimeRange(-800, -50)


def test_dates_period_from_default_table():
    (m,) = dates("Nécropole de La Tène au bord.", "fr")
    assert m.time == TimeRange(-450, -50)


def test_dates_unparseable_roman_warns():
    warnings: list[str] = []
    text = "Un mur du IIXe siècle environ."
    assert dates(text, "fr", warnings) == []
    start = text.index("IIXe")
    assert warnings == [
        f"d@{start}: unparseable Roman numeral 'IIXe'; date skipped"
    ]


def test_dates_function_words_skip_silently():
    # "du"/"le"/"ce" strip to Roman letters d/l/c; none may warn or match.
    warnings: list[str] = []
    assert dates("Vers le siècle dernier du canton.", "fr", warnings) == []
    assert dates("Ce siècle encore.", "fr", warnings) == []
    assert warnings == []


def test_dates_century_beyond_max_skips_silently():
    warnings: list[str] = []
    assert dates("au XXIIe siècle peut-être", "fr", warnings) == []
    assert warnings == []


def test_dates_year_zero_warns():
    warnings: list[str] = []
    assert dates("en 0 av. J.-C. jamais", "fr", warnings) == []
    assert warnings == ["d@3: year 0 has no era representation; date skipped"]


def test_dates_greedy_no_overlap():
    text = "Du IIe siècle av. J.-C. au Ier siècle ap. J.-C. sans rupture."
    ms = dates(text, "fr")
    assert [m.time for m in ms] == [TimeRange(-200, -101), TimeRange(1, 100)]
    for a, b in zip(ms, ms[1:]):
        assert a.end <= b.start, "date mentions never overlap"


# --- gazetteer and places ----------------------------------------------


def make_gazetteer():
    return Gazetteer.build(
        [
            ("Sion", "L001", "Sion"),
            ("Augusta Raurica", "L030", "Augst"),
            ("Augst", "L030", "Augst"),
            ("Saint Léonard du Lac", "L099", "Saint-Léonard"),
        ]
    )


def test_gazetteer_conflicting_ids_rejected():
    with pytest.raises(ExtractionError, match="maps to both"):
        Gazetteer.build([("Sion", "L001", "Sion"), ("SION", "L002", "Sion")])


def test_gazetteer_agreeing_duplicate_ok():
    g = Gazetteer.build([("Sion", "L001", "Sion"), ("SION", "L001", "Sion")])
    assert g.entries == {"sion": "L001"}


def test_places_longest_match_and_folding():
    text = "De sion à AUGUSTA RAURICA puis Augst."
    ms = extract_places(tokenize(text), text, make_gazetteer(), "d#1")
    assert [(m.surface, m.concept_id) for m in ms] == [
        ("sion", "L001"),
        ("AUGUSTA RAURICA", "L030"),
        ("Augst", "L030"),
    ]
    assert all(m.kind == "place" for m in ms)
    assert ms[1].normalized == "augusta raurica"


def test_places_four_token_name():
    text = "Près de Saint Léonard du Lac enfin."
    ms = extract_places(tokenize(text), text, make_gazetteer(), "d#1")
    assert [m.concept_id for m in ms] == ["L099"]
    assert ms[0].surface == "Saint Léonard du Lac"


def test_places_person_kind():
    g = Gazetteer.build([("Viollier", "P001", "Viollier")])
    text = "Fouilles de Viollier en 1911."
    ms = extract_places(tokenize(text), text, g, "d#1", kind="person")
    assert ms[0].kind == "person"
    assert ms[0].mention_id.startswith("d#1:person:")


# --- term candidates ---------------------------------------------------


def tok(surfaces_tags):
    """Build tagged tokens at synthetic spans (3 scalars apart)."""
    tokens = []
    pos = 0
    for surface, tag in surfaces_tags:
        tokens.append(Token(pos, pos + len(surface), surface, tag))
        pos += len(surface) + 1
    return tokens


def test_parse_patterns_validates_tags():
    assert parse_patterns(["N", "N P N"]) == [("N",), ("N", "P", "N")]
    with pytest.raises(InvalidPatternError):
        parse_patterns(["N Q"])
    with pytest.raises(InvalidPatternError):
        parse_patterns([""])


def test_terms_simple_patterns_and_head_index():
    tokens = tok([("villa", "N"), ("romaine", "A")])
    (occ,) = extract_terms(tokens, DEFAULT_TERM_PATTERNS, "d#1")
    assert occ.normalized == "villa romaine"
    assert occ.pattern == "N A"
    assert occ.head_index == 0
    tokens = tok([("grande", "A"), ("villa", "N")])
    (occ,) = extract_terms(tokens, DEFAULT_TERM_PATTERNS, "d#1")
    assert occ.pattern == "A N" and occ.head_index == 1


def test_terms_containment_drops_inner_matches():
    tokens = tok([("mosaics", "N"), ("of", "P"), ("Isurium", "N")])
    occs = extract_terms(tokens, DEFAULT_TERM_PATTERNS, "d#1")
    assert [o.normalized for o in occs] == ["mosaics of isurium"]
    assert occs[0].head_index == 0


def test_terms_overlapping_maximal_matches_both_kept():
    tokens = tok([("silver", "N"), ("coin", "N"), ("hoard", "N")])
    occs = extract_terms(tokens, DEFAULT_TERM_PATTERNS, "d#1")
    assert [o.normalized for o in occs] == ["silver coin", "coin hoard"]


def test_terms_oracle_random_tag_sequences():
    """Definition check: emit exactly the pattern windows not properly
    contained in another pattern window, at any window width."""
    patterns = parse_patterns(DEFAULT_TERM_PATTERNS)
    pattern_set = set(patterns)
    tags_pool = ["N", "A", "P", "V", "D", "NUM", "PUNCT", "X"]
    rng = random.Random(20)
    for _ in range(300):
        n = rng.randint(0, 14)
        tags = [rng.choice(tags_pool) for _ in range(n)]
        tokens = tok([(f"w{i}", t) for i, t in enumerate(tags)])

        windows = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n + 1)
            if tuple(tags[i:j]) in pattern_set
        ]
        expected = sorted(
            (i, j)
            for (i, j) in windows
            if not any(
                i2 <= i and j <= j2 and (i2, j2) != (i, j)
                for (i2, j2) in windows
            )
        )
        got = [
            (o.token_start, o.token_end)
            for o in extract_terms(tokens, DEFAULT_TERM_PATTERNS, "d#1")
        ]
        assert got == expected, (tags, got, expected)


def test_select_term_mentions_leftmost_longest():
    text = "a silver coin hoard"
    tokens = [
        Token(2, 8, "silver", "N"),
        Token(9, 13, "coin", "N"),
        Token(14, 19, "hoard", "N"),
    ]
    occs = extract_terms(tokens, DEFAULT_TERM_PATTERNS, "d#1")
    mentions = select_term_mentions(occs, text)
    assert [m.surface for m in mentions] == ["silver coin"]
    assert mentions[0].normalized == "silver coin"


def test_select_term_mentions_prefers_longer_at_same_start():
    mk = lambda s, e, norm: TermOccurrence(  # noqa: E731
        "d#1", s, e, 0, 0, norm, "N", 0
    )
    text = "abcdefghij"
    occs = [mk(0, 3, "abc"), mk(0, 5, "abcde"), mk(4, 8, "efgh")]
    mentions = select_term_mentions(occs, text)
    assert [m.span for m in mentions] == [(0, 5)], "longer wins, overlap dropped"


def test_aggregate_terms_counts_and_order_independence():
    def occ(notice, start, norm):
        return TermOccurrence(notice, start, start + 3, 0, 1, norm, "N", 0)

    occs = [
        occ("a#1", 0, "mur"),
        occ("a#1", 10, "mur"),
        occ("b#1", 5, "mur"),
        occ("b#1", 9, "tombe"),
    ]
    rng = random.Random(3)
    baseline = aggregate_terms(occs)
    by_form = {c.normalized: c for c in baseline}
    assert by_form["mur"].freq == 3
    assert by_form["mur"].doc_freq == 2
    assert by_form["tombe"].freq == 1
    for _ in range(5):
        shuffled = occs[:]
        rng.shuffle(shuffled)
        assert aggregate_terms(shuffled) == baseline


def test_score_terms_ranking():
    candidates = aggregate_terms(
        [
            TermOccurrence("a#1", 0, 3, 0, 1, "b", "N", 0),
            TermOccurrence("a#1", 4, 7, 0, 1, "a", "N", 0),
            TermOccurrence("b#1", 0, 3, 0, 1, "a", "N", 0),
            TermOccurrence("a#1", 8, 11, 0, 1, "c", "N", 0),
        ]
    )
    ranked = score_terms(candidates)
    assert [c.normalized for c in ranked] == ["a", "b", "c"]
    assert ranked[0].freq == 2


# --- file loaders ------------------------------------------------------


def test_load_gazetteer_rejects_bad_columns(tmp_path):
    path = tmp_path / "gaz.tsv"
    path.write_text("Sion\tL001\n", encoding="utf-8")
    with pytest.raises(ExtractionError, match="expected 3 columns"):
        load_gazetteer(path)


def test_load_period_table_rejects_bad_year(tmp_path):
    path = tmp_path / "periods.tsv"
    path.write_text("âge du Fer\t-800\tfifty\n", encoding="utf-8")
    with pytest.raises(ExtractionError, match="bad year"):
        load_period_table(path)


def test_load_patterns_validates(tmp_path):
    path = tmp_path / "patterns.txt"
    path.write_text("# comment\nN A\nN\n", encoding="utf-8")
    assert load_patterns(path) == ["N A", "N"]
    path.write_text("N Q\n", encoding="utf-8")
    with pytest.raises(InvalidPatternError):
        load_patterns(path)
