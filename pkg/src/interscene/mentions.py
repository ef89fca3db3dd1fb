"""Longest-match scanning for graph vocabulary inside free text.

Used for marking question-mentioned entities, resolving answer text back to
graph items, and the reward components. Matching is case-insensitive, on word
boundaries, and prefers the longest phrase at each position ("player in
black" wins over "player").
"""

from __future__ import annotations

import re

_WS = re.compile(r"\s+")


def normalize_phrase(text: str) -> str:
    """Lowercase and collapse whitespace runs to single spaces."""
    return _WS.sub(" ", text.strip().lower())


class VocabScanner:
    """Compiled scanner over a fixed set of phrases."""

    def __init__(self, phrases):
        normalized = {normalize_phrase(p) for p in phrases if normalize_phrase(p)}
        # Longest alternative first: re alternation takes the first branch
        # that matches, which yields longest-match semantics at a position.
        ordered = sorted(normalized, key=lambda p: (-len(p), p))
        self.phrases = ordered
        if ordered:
            body = "|".join(re.escape(p) for p in ordered)
            self._pattern = re.compile(r"\b(?:" + body + r")\b")
        else:
            self._pattern = None

    def scan(self, text: str) -> list[str]:
        """Return matched phrases in reading order (non-overlapping)."""
        if self._pattern is None or not text:
            return []
        return self._pattern.findall(normalize_phrase(text))

    def contains(self, text: str) -> bool:
        return bool(self.scan(text))


def scan_phrases(text: str, phrases) -> list[str]:
    return VocabScanner(phrases).scan(text)
