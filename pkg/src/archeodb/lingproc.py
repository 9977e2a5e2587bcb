"""Tokenization, sentence splitting and lexicon-based part-of-speech tagging.

The coarse 8-tag inventory (N A P V D NUM PUNCT X) is all the term
patterns downstream need. ``fold_text`` is the single definition of
case/diacritic folding shared by tagging, extraction, linking and the
full-text index.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

POS_TAGS = ("N", "A", "P", "V", "D", "NUM", "PUNCT", "X")

# Straight and typographic apostrophes both mark French elision.
_APOSTROPHES = ("'", "’")


class LexiconError(Exception):
    """Malformed lexicon or suffix-rule file."""


def fold_text(s: str) -> str:
    """Case-fold then strip combining marks after canonical decomposition.

    Folding case first keeps the function idempotent: case folding may
    itself introduce combining marks (e.g. U+0130) which the NFD pass then
    removes.
    """
    decomposed = unicodedata.normalize("NFD", s.casefold())
    return "".join(c for c in decomposed if not unicodedata.combining(c))


@dataclass(frozen=True)
class Token:
    """One token: span into the source text, its surface, optional tag."""

    start: int
    end: int
    surface: str
    pos: Optional[str] = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def tokenize(text: str) -> list[Token]:
    """Split text into word, number and punctuation tokens.

    Maximal runs of letters/digits form one token; every other
    non-whitespace scalar is its own PUNCT token. An apostrophe closes the
    current token and is included in it ("l'âge" -> "l'", "âge"). Pure
    digit runs are tagged NUM immediately.
    """
    tokens: list[Token] = []
    run_start = -1

    def close_run(end: int) -> None:
        nonlocal run_start
        if run_start >= 0:
            surface = text[run_start:end]
            pos = "NUM" if surface.isdigit() else None
            tokens.append(Token(run_start, end, surface, pos))
            run_start = -1

    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isalpha() or c.isdigit():
            if run_start < 0:
                run_start = i
            i += 1
        elif c in _APOSTROPHES and run_start >= 0:
            # Elision: apostrophe ends the token and belongs to it.
            surface = text[run_start : i + 1]
            tokens.append(Token(run_start, i + 1, surface, None))
            run_start = -1
            i += 1
        elif c.isspace():
            close_run(i)
            i += 1
        else:
            close_run(i)
            tokens.append(Token(i, i + 1, c, "PUNCT"))
            i += 1
    close_run(n)
    return tokens


_SENTENCE_ENDERS = {".", "!", "?"}


def split_sentences(tokens: Sequence[Token]) -> list[tuple[int, int]]:
    """Return (start_idx, end_idx) token-index ranges, one per sentence.

    A boundary falls after each ".", "!" or "?" token; trailing tokens form
    a final sentence.
    """
    sentences: list[tuple[int, int]] = []
    start = 0
    for i, tok in enumerate(tokens):
        if tok.surface in _SENTENCE_ENDERS:
            sentences.append((start, i + 1))
            start = i + 1
    if start < len(tokens):
        sentences.append((start, len(tokens)))
    return sentences


@dataclass(frozen=True)
class PosLexicon:
    """Folded surface -> tag entries, ordered suffix fallbacks, default tag.

    Lookup precedence is entries > first matching suffix rule > default_pos.
    Entry keys and rule suffixes are stored folded; ``build`` folds them.
    """

    entries: dict[str, str]
    suffix_rules: tuple[tuple[str, str], ...]
    default_pos: str = "N"

    @classmethod
    def build(
        cls,
        entries: dict[str, str],
        suffix_rules: Sequence[tuple[str, str]] = (),
        default_pos: str = "N",
    ) -> "PosLexicon":
        folded: dict[str, str] = {}
        for surface, pos in entries.items():
            _check_tag(pos, surface)
            key = fold_text(surface)
            if key in folded and folded[key] != pos:
                raise LexiconError(
                    f"conflicting tags for {key!r}: {folded[key]} vs {pos}"
                )
            folded[key] = pos
        rules = []
        for suffix, pos in suffix_rules:
            if not suffix:
                raise LexiconError("empty suffix in suffix rules")
            _check_tag(pos, suffix)
            rules.append((fold_text(suffix), pos))
        _check_tag(default_pos, "default_pos")
        return cls(entries=folded, suffix_rules=tuple(rules), default_pos=default_pos)

    def lookup(self, surface: str) -> str:
        key = fold_text(surface)
        pos = self.entries.get(key)
        if pos is not None:
            return pos
        for suffix, rule_pos in self.suffix_rules:
            if key.endswith(suffix):
                return rule_pos
        return self.default_pos


def _check_tag(pos: str, context: str) -> None:
    if pos not in POS_TAGS:
        raise LexiconError(f"unknown pos tag {pos!r} for {context!r}")


def pos_tag(tokens: Sequence[Token], lexicon: PosLexicon) -> list[Token]:
    """Assign a tag to every token that is not already NUM or PUNCT.

    Spans and surfaces are never changed; a new token list is returned.
    """
    return [
        tok if tok.pos in ("NUM", "PUNCT") else replace(tok, pos=lexicon.lookup(tok.surface))
        for tok in tokens
    ]


def load_lexicon(
    entries_path: str | Path,
    suffix_path: str | Path | None = None,
    default_pos: str = "N",
) -> PosLexicon:
    """Load a lexicon TSV (surface, pos) plus optional suffix TSV (suffix, pos).

    Suffix rule order in the file is significant.
    """
    entries: dict[str, str] = {}
    for lineno, line in enumerate(
        Path(entries_path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 2:
            raise LexiconError(f"{entries_path}:{lineno}: expected 2 columns")
        entries[cells[0]] = cells[1]
    rules: list[tuple[str, str]] = []
    if suffix_path is not None:
        for lineno, line in enumerate(
            Path(suffix_path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line.strip() or line.startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 2:
                raise LexiconError(f"{suffix_path}:{lineno}: expected 2 columns")
            rules.append((cells[0], cells[1]))
    return PosLexicon.build(entries, rules, default_pos)
