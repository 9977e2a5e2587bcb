"""Typed mention extraction: normalized dates, gazetteer places, POS-pattern terms.

Years are stored signed with 1 BC = -1 and no year 0; century c BC maps to
[-(100c), -(100(c-1)+1)] and century c AD to [100(c-1)+1, 100c], so every
century is exactly 100 years and the two eras never meet. All matching is
case- and diacritic-insensitive via the shared folding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .lingproc import POS_TAGS, Token, fold_text, tokenize


class ExtractionError(Exception):
    """Base class for extraction failures."""


class InvalidPatternError(ExtractionError):
    """A term pattern uses an unknown pos tag."""


@dataclass(frozen=True, order=True)
class TimeRange:
    """Inclusive signed-year interval; 1 BC is -1 and year 0 does not exist."""

    from_year: int
    to_year: int

    def __post_init__(self):
        if self.from_year > self.to_year:
            raise ValueError(f"empty range [{self.from_year}, {self.to_year}]")
        if self.from_year == 0 or self.to_year == 0:
            raise ValueError("year 0 is not representable")

    def overlaps(self, other: "TimeRange") -> bool:
        return self.from_year <= other.to_year and other.from_year <= self.to_year


def century_range(century: int, era: str) -> TimeRange:
    """Closed-form year range of the c-th century BC or AD."""
    if century < 1:
        raise ValueError(f"century must be >= 1, got {century}")
    if era == "BC":
        return TimeRange(-100 * century, -(100 * (century - 1) + 1))
    if era == "AD":
        return TimeRange(100 * (century - 1) + 1, 100 * century)
    raise ValueError(f"era must be BC or AD, got {era!r}")


def year_range(year: int, era: str) -> TimeRange:
    """Single-year range; year is the positive count written in the text."""
    if year < 1:
        raise ValueError(f"year must be >= 1, got {year}")
    if era == "BC":
        return TimeRange(-year, -year)
    if era == "AD":
        return TimeRange(year, year)
    raise ValueError(f"era must be BC or AD, got {era!r}")


def match_key(s: str) -> str:
    """Canonical lookup key: folded token surfaces joined by single spaces.

    Applied to gazetteer names, period names and text n-grams alike, so
    both sides of a lookup agree on punctuation and spacing.
    """
    return " ".join(fold_text(t.surface) for t in tokenize(s))


@dataclass(frozen=True)
class PeriodTable:
    """Named historical periods mapped to signed year ranges.

    Keys are canonical match keys; display names are kept for reporting.
    """

    entries: dict[str, TimeRange]
    display: dict[str, str] = field(default_factory=dict)

    @classmethod
    def build(cls, rows: Sequence[tuple[str, int, int]]) -> "PeriodTable":
        entries: dict[str, TimeRange] = {}
        display: dict[str, str] = {}
        for name, from_year, to_year in rows:
            key = match_key(name)
            entries[key] = TimeRange(from_year, to_year)
            display[key] = name
        return cls(entries=entries, display=display)

    @property
    def max_key_tokens(self) -> int:
        return max((key.count(" ") + 1 for key in self.entries), default=0)


# Default bounds are editable configuration, not ground truth; the Iron Age
# start of -800 anchors the earliest covered material.
DEFAULT_PERIODS: tuple[tuple[str, int, int], ...] = (
    ("âge du Bronze", -2200, -801),
    ("âge du Fer", -800, -50),
    ("La Tène", -450, -50),
    ("époque gauloise", -800, -50),
    ("époque romaine", -50, 476),
    ("Antiquité tardive", 250, 476),
    ("haut Moyen Âge", 476, 800),
    ("Bronzezeit", -2200, -801),
    ("Eisenzeit", -800, -50),
    ("Latènezeit", -450, -50),
    ("römische Kaiserzeit", -50, 476),
    ("Frühmittelalter", 476, 800),
    ("Bronze Age", -2200, -801),
    ("Iron Age", -800, -50),
    ("Roman period", -50, 476),
    ("early Middle Ages", 476, 800),
)


def default_period_table() -> PeriodTable:
    return PeriodTable.build(DEFAULT_PERIODS)


@dataclass(frozen=True)
class Mention:
    """A typed, located extraction with its normalized form and optional link."""

    mention_id: str
    notice_id: str
    kind: str  # place | date | term | person
    start: int
    end: int
    surface: str
    normalized: str
    time: Optional[TimeRange] = None
    concept_id: Optional[str] = None

    def __post_init__(self):
        if (self.time is not None) != (self.kind == "date"):
            raise ValueError("time must be set exactly when kind is 'date'")
        if not self.normalized:
            raise ValueError("normalized form must be non-empty")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def _mention_id(notice_id: str, kind: str, start: int, end: int) -> str:
    return f"{notice_id}:{kind}:{start}-{end}"


# ---------------------------------------------------------------------------
# Dates

_ROMAN_VALUES = {"i": 1, "v": 5, "x": 10, "l": 50, "c": 100, "d": 500, "m": 1000}
_ROMAN_RE = re.compile(
    r"m{0,3}(cm|cd|d?c{0,3})(xc|xl|l?x{0,3})(ix|iv|v?i{0,3})", re.ASCII
)
_ORDINAL_SUFFIXES = ("er", "ere", "eme", "e", "nd", "st", "rd", "th")

# Guards against ordinary words that happen to strip down to a Roman
# letter ("le" -> "l" = 50, "ce" -> "c" = 100): no plausible century in a
# historical corpus exceeds the 21st.
MAX_CENTURY = 21

_CENTURY_WORDS = {
    "fr": ("siecle", "siecles"),
    "en": ("century", "centuries"),
    "de": ("jahrhundert", "jahrhunderts", "jahrhunderte"),
}

# Era markers as folded token sequences (the tokenizer splits each
# punctuation scalar into its own token).
_ERA_MARKERS = {
    "fr": (
        (("av", ".", "j", ".", "-", "c", "."), "BC"),
        (("ap", ".", "j", ".", "-", "c", "."), "AD"),
    ),
    "en": ((("bc",), "BC"), (("ad",), "AD")),
    "de": (
        (("v", ".", "chr", "."), "BC"),
        (("n", ".", "chr", "."), "AD"),
    ),
}

_FUSED_YEAR_RE = re.compile(r"(\d+)(bc|ad)", re.ASCII)


def roman_to_int(s: str) -> Optional[int]:
    """Parse a strict-form Roman numeral (folded, lowercase); None if invalid."""
    if not s or not _ROMAN_RE.fullmatch(s):
        return None
    total = 0
    prev = 0
    for c in reversed(s):
        value = _ROMAN_VALUES[c]
        total += value if value >= prev else -value
        prev = max(prev, value)
    return total


def _roman_body(folded: str) -> Optional[str]:
    """Strip one ordinal suffix ("iie" -> "ii"); None unless all-Roman letters."""
    body = folded
    for suffix in _ORDINAL_SUFFIXES:
        if body.endswith(suffix) and len(body) > len(suffix):
            trimmed = body[: -len(suffix)]
            if all(c in _ROMAN_VALUES for c in trimmed):
                body = trimmed
                break
    if body and all(c in _ROMAN_VALUES for c in body):
        return body
    return None


def _split_century_token(folded: str) -> Optional[int]:
    """Parse "ii", "iie", "ier", "iind"... to a century number; None if not one."""
    body = _roman_body(folded)
    if body is None:
        return None
    century = roman_to_int(body)
    if century is None or century > MAX_CENTURY:
        return None
    return century


def _match_era(folded: Sequence[str], i: int, language: str) -> Optional[tuple[int, str]]:
    """Era marker starting at token i; returns (token_count, era) or None."""
    for marker, era in _ERA_MARKERS[language]:
        if tuple(folded[i : i + len(marker)]) == marker:
            return len(marker), era
    return None


def extract_dates(
    tokens: Sequence[Token],
    text: str,
    periods: PeriodTable,
    language: str,
    notice_id: str,
    warnings: Optional[list[str]] = None,
    doc_id: str = "",
) -> list[Mention]:
    """Recognize years with era markers, centuries, and named periods.

    Matching is greedy left-to-right, longest match first, so date
    mentions never overlap. Unparseable dates (e.g. the Roman numeral
    "IIX") are skipped, with a warning appended to the sink when given.
    """
    folded = [fold_text(t.surface) for t in tokens]
    mentions: list[Mention] = []
    n = len(tokens)
    i = 0
    while i < n:
        best: Optional[tuple[int, TimeRange, str]] = None  # (token_count, range, norm)

        century = _try_century(tokens, folded, i, language, warnings, doc_id)
        if century is not None:
            best = century
        if best is None:
            year = _try_year(tokens, folded, i, language, warnings, doc_id)
            if year is not None:
                best = year
        if best is None:
            period = _try_period(folded, i, periods)
            if period is not None:
                best = period

        if best is None:
            i += 1
            continue
        count, time, normalized = best
        start = tokens[i].start
        end = tokens[i + count - 1].end
        mentions.append(
            Mention(
                mention_id=_mention_id(notice_id, "date", start, end),
                notice_id=notice_id,
                kind="date",
                start=start,
                end=end,
                surface=text[start:end],
                normalized=normalized,
                time=time,
            )
        )
        i += count
    return mentions


def _range_norm(time: TimeRange) -> str:
    return f"{time.from_year}..{time.to_year}"


def _try_century(tokens, folded, i, language, warnings, doc_id):
    n = len(tokens)
    if not folded[i] or tokens[i].pos in ("NUM", "PUNCT"):
        return None
    j = i + 1
    if j < n and folded[j] == ".":
        j += 1
    if j >= n or folded[j] not in _CENTURY_WORDS[language]:
        return None
    century = _split_century_token(folded[i])
    if century is None:
        body = _roman_body(folded[i])
        if body is not None and roman_to_int(body) is None and warnings is not None:
            warnings.append(
                f"{doc_id}@{tokens[i].start}: unparseable Roman numeral "
                f"{tokens[i].surface!r}; date skipped"
            )
        return None
    j += 1
    era = "AD"
    if j < n:
        matched = _match_era(folded, j, language)
        if matched is not None:
            j += matched[0]
            era = matched[1]
    time = century_range(century, era)
    return j - i, time, _range_norm(time)


def _try_year(tokens, folded, i, language, warnings, doc_id):
    n = len(tokens)
    if tokens[i].pos == "NUM":
        matched = _match_era(folded, i + 1, language) if i + 1 < n else None
        if matched is None:
            return None
        year = int(folded[i])
        if year < 1:
            if warnings is not None:
                warnings.append(
                    f"{doc_id}@{tokens[i].start}: year {year} has no era "
                    f"representation; date skipped"
                )
            return None
        time = year_range(year, matched[1])
        return 1 + matched[0], time, _range_norm(time)
    if language == "en":
        fused = _FUSED_YEAR_RE.fullmatch(folded[i])
        if fused and int(fused.group(1)) >= 1:
            time = year_range(int(fused.group(1)), fused.group(2).upper())
            return 1, time, _range_norm(time)
    return None


def _try_period(folded, i, periods):
    max_n = min(periods.max_key_tokens, len(folded) - i)
    for count in range(max_n, 0, -1):
        key = " ".join(folded[i : i + count])
        time = periods.entries.get(key)
        if time is not None:
            return count, time, _range_norm(time)
    return None


# ---------------------------------------------------------------------------
# Places and persons

MAX_PLACE_TOKENS = 4


@dataclass(frozen=True)
class Gazetteer:
    """Known place (or person) names mapped to stable ids.

    Keys are canonical match keys; each entry keeps its display name.
    """

    entries: dict[str, str]
    display: dict[str, str] = field(default_factory=dict)

    @classmethod
    def build(cls, rows: Sequence[tuple[str, str, str]]) -> "Gazetteer":
        """rows: (name, entry_id, display_name); names are canonicalized."""
        entries: dict[str, str] = {}
        display: dict[str, str] = {}
        for name, entry_id, display_name in rows:
            key = match_key(name)
            if key in entries and entries[key] != entry_id:
                raise ExtractionError(
                    f"gazetteer name {name!r} maps to both "
                    f"{entries[key]} and {entry_id}"
                )
            entries[key] = entry_id
            display[key] = display_name
        return cls(entries=entries, display=display)


def extract_places(
    tokens: Sequence[Token],
    text: str,
    gazetteer: Gazetteer,
    notice_id: str,
    kind: str = "place",
) -> list[Mention]:
    """Greedy longest-first matching of token n-grams (n <= 4) against names.

    Matching is case- and diacritic-insensitive; a longer match suppresses
    any shorter match it overlaps.
    """
    folded = [fold_text(t.surface) for t in tokens]
    mentions: list[Mention] = []
    n = len(tokens)
    i = 0
    while i < n:
        hit = None
        for count in range(min(MAX_PLACE_TOKENS, n - i), 0, -1):
            key = " ".join(folded[i : i + count])
            entry_id = gazetteer.entries.get(key)
            if entry_id is not None:
                hit = (count, key, entry_id)
                break
        if hit is None:
            i += 1
            continue
        count, key, entry_id = hit
        start = tokens[i].start
        end = tokens[i + count - 1].end
        mentions.append(
            Mention(
                mention_id=_mention_id(notice_id, kind, start, end),
                notice_id=notice_id,
                kind=kind,
                start=start,
                end=end,
                surface=text[start:end],
                normalized=key,
                concept_id=entry_id,
            )
        )
        i += count
    return mentions


# ---------------------------------------------------------------------------
# Term candidates

DEFAULT_TERM_PATTERNS = ("N", "N A", "A N", "N N", "N P N")


def parse_patterns(patterns: Sequence[str]) -> list[tuple[str, ...]]:
    """Validate and split patterns like "N A" into tag tuples."""
    parsed = []
    for pattern in patterns:
        tags = tuple(pattern.split())
        if not tags:
            raise InvalidPatternError(f"empty pattern {pattern!r}")
        for tag in tags:
            if tag not in POS_TAGS:
                raise InvalidPatternError(f"unknown tag {tag!r} in pattern {pattern!r}")
        parsed.append(tags)
    return parsed


@dataclass(frozen=True)
class TermOccurrence:
    """One maximal pattern match inside one notice."""

    notice_id: str
    start: int
    end: int
    token_start: int
    token_end: int
    normalized: str
    pattern: str
    head_index: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass
class TermCandidate:
    """A normalized multiword-term hypothesis aggregated over the corpus."""

    normalized: str
    pattern: str
    head_index: int
    occurrences: list[tuple[str, tuple[int, int]]]
    freq: int
    doc_freq: int


def _head_index(tags: tuple[str, ...]) -> int:
    """Head is the first N of the pattern (the N itself for A N)."""
    for i, tag in enumerate(tags):
        if tag == "N":
            return i
    return 0


def extract_terms(
    tagged: Sequence[Token],
    patterns: Sequence[str],
    notice_id: str,
) -> list[TermOccurrence]:
    """Emit maximal (non-extendable) contiguous tag-sequence matches.

    A match is dropped when another pattern match properly contains its
    token range. The candidate's normalized form is the folded surfaces
    joined by single spaces.
    """
    parsed = parse_patterns(patterns)
    tags = [t.pos or "X" for t in tagged]
    n = len(tags)

    matches: dict[tuple[int, int], tuple[str, ...]] = {}
    for pattern_tags in parsed:
        width = len(pattern_tags)
        for i in range(n - width + 1):
            if tuple(tags[i : i + width]) == pattern_tags:
                matches[(i, i + width)] = pattern_tags

    occurrences = []
    spans = sorted(matches)
    for (i, j) in spans:
        contained = any(
            (i2 <= i and j <= j2) and (i2, j2) != (i, j) for (i2, j2) in spans
        )
        if contained:
            continue
        pattern_tags = matches[(i, j)]
        occurrences.append(
            TermOccurrence(
                notice_id=notice_id,
                start=tagged[i].start,
                end=tagged[j - 1].end,
                token_start=i,
                token_end=j,
                normalized=" ".join(fold_text(t.surface) for t in tagged[i:j]),
                pattern=" ".join(pattern_tags),
                head_index=_head_index(pattern_tags),
            )
        )
    return occurrences


def aggregate_terms(occurrences: Sequence[TermOccurrence]) -> list[TermCandidate]:
    """Merge occurrences into per-normalized-form candidates.

    The result is order-independent: occurrences are sorted by
    (notice_id, span) and the representative pattern comes from the first
    one. freq counts occurrences, doc_freq distinct notices.
    """
    by_form: dict[str, list[TermOccurrence]] = {}
    for occ in occurrences:
        by_form.setdefault(occ.normalized, []).append(occ)
    candidates = []
    for normalized in sorted(by_form):
        occs = sorted(by_form[normalized], key=lambda o: (o.notice_id, o.start, o.end))
        candidates.append(
            TermCandidate(
                normalized=normalized,
                pattern=occs[0].pattern,
                head_index=occs[0].head_index,
                occurrences=[(o.notice_id, o.span) for o in occs],
                freq=len(occs),
                doc_freq=len({o.notice_id for o in occs}),
            )
        )
    return candidates


def score_terms(candidates: Sequence[TermCandidate]) -> list[TermCandidate]:
    """Rank candidates by freq desc, doc_freq desc, then normalized asc."""
    return sorted(
        candidates, key=lambda c: (-c.freq, -c.doc_freq, c.normalized)
    )


def select_term_mentions(
    occurrences: Sequence[TermOccurrence], text: str
) -> list[Mention]:
    """Materialize non-overlapping term mentions, leftmost-longest first.

    Maximal matches can still overlap each other (tag chains); mentions of
    one kind must not, so overlaps resolve deterministically to the
    earlier-starting, then longer, match.
    """
    chosen: list[TermOccurrence] = []
    last_end = -1
    for occ in sorted(occurrences, key=lambda o: (o.start, -(o.end - o.start))):
        if occ.start >= last_end:
            chosen.append(occ)
            last_end = occ.end
    return [
        Mention(
            mention_id=_mention_id(occ.notice_id, "term", occ.start, occ.end),
            notice_id=occ.notice_id,
            kind="term",
            start=occ.start,
            end=occ.end,
            surface=text[occ.start : occ.end],
            normalized=occ.normalized,
        )
        for occ in chosen
    ]


# ---------------------------------------------------------------------------
# Config file loaders

def load_gazetteer(path: str | Path) -> Gazetteer:
    """TSV columns: normalized_name, entry_id, display_name."""
    rows = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 3:
            raise ExtractionError(f"{path}:{lineno}: expected 3 columns")
        rows.append((cells[0], cells[1], cells[2]))
    return Gazetteer.build(rows)


def load_period_table(path: str | Path) -> PeriodTable:
    """TSV columns: name, from_year, to_year."""
    rows = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 3:
            raise ExtractionError(f"{path}:{lineno}: expected 3 columns")
        try:
            rows.append((cells[0], int(cells[1]), int(cells[2])))
        except ValueError as exc:
            raise ExtractionError(f"{path}:{lineno}: bad year: {exc}") from exc
    return PeriodTable.build(rows)


def load_patterns(path: str | Path) -> list[str]:
    """One pattern per line, tags space-separated; validated on load."""
    patterns = [
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    parse_patterns(patterns)
    return patterns
