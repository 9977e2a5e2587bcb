"""Segment documents into per-municipality notices and typed zones.

The segmentation grammar is data, not code: source volumes never encode
their structure formally and conventions drift between volumes, so the
header line shape and the zone boundary rules are both configurable.
Structural oddities produce warnings, never failures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .corpus import Document

RESERVED_ZONE_LABELS = ("header", "body")

# <digits> <dash> <rest-of-line>, dash being hyphen, en or em dash.
DEFAULT_HEADER_PATTERN = r"\s*(\d+)\s*[-–—]\s*(.+?)\s*"


class GrammarError(Exception):
    """Invalid segmentation grammar."""


@dataclass(frozen=True)
class NoticeGrammar:
    """Header line pattern plus ordered zone boundary rules.

    ``header_pattern`` is matched against whole lines (implicitly
    anchored at both ends) and must expose two groups: the notice number
    (digits) and the municipality (rest of line). Each zone rule is
    (label, start_pattern); start_pattern is matched at line start.
    """

    header_pattern: str = DEFAULT_HEADER_PATTERN
    zone_rules: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        try:
            compiled = re.compile(self.header_pattern)
        except re.error as exc:
            raise GrammarError(f"bad header_pattern: {exc}") from exc
        if compiled.groups < 2:
            raise GrammarError("header_pattern needs two capture groups")
        labels = [label for label, _ in self.zone_rules]
        if len(labels) != len(set(labels)):
            raise GrammarError("zone labels must be unique")
        for label, pattern in self.zone_rules:
            if not label:
                raise GrammarError("empty zone label")
            if label in RESERVED_ZONE_LABELS:
                raise GrammarError(f"zone label {label!r} is reserved")
            try:
                re.compile(pattern)
            except re.error as exc:
                raise GrammarError(f"bad pattern for zone {label!r}: {exc}") from exc


@dataclass(frozen=True)
class Zone:
    """A contiguous labeled region inside a notice."""

    label: str
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Notice:
    """One municipality entry: its span in the document plus its zones."""

    notice_id: str
    number: int
    municipality: str
    start: int
    end: int
    zones: tuple[Zone, ...] = ()

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def _iter_lines(text: str, start: int = 0, end: int | None = None):
    """Yield (line_start, content_end, line_end) offsets; line_end includes the LF."""
    if end is None:
        end = len(text)
    pos = start
    while pos < end:
        nl = text.find("\n", pos, end)
        if nl < 0:
            yield pos, end, end
            break
        yield pos, nl, nl + 1
        pos = nl + 1


def segment_notices(
    doc: Document, grammar: NoticeGrammar
) -> tuple[tuple[int, int], list[Notice], list[str]]:
    """Split a document at header lines into preamble + notices.

    Each line fully matching the header pattern opens a notice running to
    the line before the next header (or end of text). Text before the
    first header is the preamble. Non-monotonic or duplicated notice
    numbers yield warnings; a document with no headers yields zero notices
    and a whole-text preamble.
    """
    header_re = re.compile(grammar.header_pattern)
    text = doc.text
    doc_id = doc.meta.doc_id

    headers: list[tuple[int, int, str]] = []  # (line_start, number, municipality)
    for line_start, content_end, _ in _iter_lines(text):
        m = header_re.fullmatch(text[line_start:content_end])
        if m is not None:
            headers.append((line_start, int(m.group(1)), m.group(2)))

    warnings: list[str] = []
    if not headers:
        return (0, len(text)), [], warnings

    preamble = (0, headers[0][0])
    notices: list[Notice] = []
    id_counts: dict[str, int] = {}
    prev_number: int | None = None
    for idx, (start, number, municipality) in enumerate(headers):
        end = headers[idx + 1][0] if idx + 1 < len(headers) else len(text)
        if prev_number is not None and number <= prev_number:
            warnings.append(
                f"{doc_id}@{start}: non-monotonic notice number "
                f"{number} after {prev_number}"
            )
        prev_number = number
        notice_id = f"{doc_id}#{number}"
        id_counts[notice_id] = id_counts.get(notice_id, 0) + 1
        if id_counts[notice_id] > 1:
            warnings.append(
                f"{doc_id}@{start}: duplicate notice number {number}; "
                f"id disambiguated"
            )
            notice_id = f"{notice_id}-{id_counts[notice_id]}"
        notices.append(
            Notice(
                notice_id=notice_id,
                number=number,
                municipality=municipality,
                start=start,
                end=end,
            )
        )
    return preamble, notices, warnings


def detect_zones(notice: Notice, doc: Document, grammar: NoticeGrammar) -> list[Zone]:
    """Partition a notice: header line, rule-bounded zones, body for the rest.

    The first line is always the "header" zone. Rules fire in rule order,
    each searching from the previous match onward; a matched rule's zone
    runs to the next matched rule (or notice end). Unclaimed text between
    the header and the first matched rule is the "body" zone. The returned
    zones tile the notice span exactly.
    """
    text = doc.text
    lines = list(_iter_lines(text, notice.start, notice.end))
    if not lines:
        return []
    header_end = lines[0][2]

    boundaries: list[tuple[int, str]] = []
    search_from = header_end
    for label, pattern in grammar.zone_rules:
        rule_re = re.compile(pattern)
        for line_start, content_end, line_end in _iter_lines(
            text, search_from, notice.end
        ):
            if rule_re.match(text[line_start:content_end]):
                boundaries.append((line_start, label))
                search_from = line_end
                break

    zones = [Zone("header", notice.start, header_end)]
    if header_end < notice.end:
        cuts = [(header_end, "body")] + boundaries
        for i, (start, label) in enumerate(cuts):
            end = cuts[i + 1][0] if i + 1 < len(cuts) else notice.end
            if end > start:
                zones.append(Zone(label, start, end))
    return zones


@dataclass(frozen=True)
class PartitionReport:
    """Outcome of the tiling check; an empty violation list means valid."""

    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_partition(
    doc: Document,
    preamble: tuple[int, int],
    notices: Sequence[Notice],
) -> PartitionReport:
    """Check that preamble + notices tile the text and zones tile notices.

    Every scalar offset of the document must be covered exactly once by
    the preamble or a notice span, and every notice's zone set must cover
    its span exactly once. Violations name the offset range concerned.
    """
    n = len(doc.text)
    coverage = [0] * n
    spans = [("preamble", preamble[0], preamble[1])]
    spans += [(nt.notice_id, nt.start, nt.end) for nt in notices]
    violations: list[str] = []
    for name, start, end in spans:
        if start < 0 or end > n or start > end:
            violations.append(f"{name}: span ({start}, {end}) outside [0, {n})")
            continue
        for i in range(start, end):
            coverage[i] += 1
    violations.extend(_sweep(coverage, "document"))

    for nt in notices:
        if not nt.zones:
            continue
        width = nt.end - nt.start
        zone_cov = [0] * width
        for z in nt.zones:
            if z.start < nt.start or z.end > nt.end or z.start > z.end:
                violations.append(
                    f"{nt.notice_id}/{z.label}: span ({z.start}, {z.end}) "
                    f"outside notice ({nt.start}, {nt.end})"
                )
                continue
            for i in range(z.start - nt.start, z.end - nt.start):
                zone_cov[i] += 1
        violations.extend(_sweep(zone_cov, nt.notice_id, offset=nt.start))
    return PartitionReport(violations=tuple(violations))


def _sweep(coverage: list[int], scope: str, offset: int = 0) -> list[str]:
    """Report maximal runs of uncovered (gap) or multiply covered (overlap) offsets."""
    violations = []
    i = 0
    n = len(coverage)
    while i < n:
        if coverage[i] == 1:
            i += 1
            continue
        kind = "gap" if coverage[i] == 0 else "overlap"
        j = i
        while j < n and (coverage[j] == 0) == (kind == "gap") and coverage[j] != 1:
            j += 1
        violations.append(f"{scope}: {kind} at [{offset + i}, {offset + j})")
        i = j
    return violations
