"""Parsers for raw backend text: relationship triples and QA pairs.

Model output is messy; these parsers are tolerant by design. Malformed
triple lines produce warnings and are skipped, never raised. QA parsing is
stricter about pairing ("Q:" with no following "A:" is an error) because a
dangling question cannot be turned into a record.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidBbox, UnpairedQuestion
from .graph import Bbox, validate_bbox
from .mentions import normalize_phrase


@dataclass(frozen=True)
class ParseWarning:
    line: int  # 1-based source line; 0 when about the whole text
    code: str
    detail: str

    def to_payload(self) -> dict:
        return {"line": self.line, "code": self.code, "detail": self.detail}


@dataclass(frozen=True)
class RawTriple:
    subject: str
    predicate: str
    object: str
    source_line: int

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class RawQAPair:
    question: str
    answer: str
    bbox_mentions: tuple[tuple[str, Bbox], ...] = ()
    flags: tuple[str, ...] = ()


_BULLET = re.compile(r"^(?:[-*•]\s+|\d+[.)]\s+)")
_Q_LINE = re.compile(r"^\s*(?:\d+[.)]\s*)?Q\s*:\s*(.*)$", re.IGNORECASE)
_A_LINE = re.compile(r"^\s*(?:\d+[.)]\s*)?A\s*:\s*(.*)$", re.IGNORECASE)
_BBOX_SPAN = re.compile(
    r"([A-Za-z][A-Za-z0-9'\- ]*?)\s*\[\s*([0-9.eE+\-]+)\s*,\s*([0-9.eE+\-]+)\s*,"
    r"\s*([0-9.eE+\-]+)\s*,\s*([0-9.eE+\-]+)\s*\]"
)

# Closed-class words that sit between a sentence's scaffolding and the
# entity phrase right before a bracketed box. Spatial prepositions like
# "in"/"on" are deliberately absent: they occur inside display names
# ("player in black").
_PHRASE_STOPS = frozenset(
    "a an the and or what who where when which how does do is are was were"
    " will would that this these those have has had between with by to from"
    " than for of".split()
)


def _mention_phrase(run: str) -> str:
    """Best-effort entity phrase from the text run preceding a bbox.

    Cuts at the rightmost closed-class word, then caps the tail length;
    graph-aware resolution happens downstream, this only has to be stable.
    """
    words = normalize_phrase(run).split(" ")
    for i in range(len(words) - 1, -1, -1):
        if words[i] in _PHRASE_STOPS:
            words = words[i + 1 :]
            break
    return " ".join(words[-5:])


def format_triple(subject: str, predicate: str, object: str) -> str:
    """Render a triple the way the prompt examples show them."""
    return f"<{subject}, {predicate}, {object}>"


def parse_triples(text: str) -> tuple[list[RawTriple], list[ParseWarning]]:
    """Extract relationship triples from backend output, line by line.

    Accepted line shapes: "<a, b, c>", "- <a, b, c>", "(a, b, c)", and bare
    "a, b, c". A line with more than two commas is split at the first and
    last comma, the middle becoming the predicate, and flagged as a
    suspicious predicate. Lines that do not look like triples at all are
    ignored; bracketed lines that fail to yield three non-empty fields warn.
    """
    triples: list[RawTriple] = []
    warnings: list[ParseWarning] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = _BULLET.sub("", raw_line.strip())
        if not line:
            continue
        candidate = None
        if len(line) >= 2 and line[0] == "<" and line[-1] == ">":
            candidate = line[1:-1]
        elif len(line) >= 2 and line[0] == "(" and line[-1] == ")":
            candidate = line[1:-1]
        elif line.count(",") >= 2:
            candidate = line
        if candidate is None:
            continue
        parts = candidate.split(",")
        if len(parts) < 3:
            warnings.append(
                ParseWarning(lineno, "too_few_fields", f"expected 3 fields in {line!r}")
            )
            continue
        if len(parts) > 3:
            subject = parts[0]
            predicate = ",".join(parts[1:-1])
            obj = parts[-1]
            warnings.append(
                ParseWarning(
                    lineno,
                    "suspicious_predicate",
                    f"predicate {predicate.strip()!r} contains a comma",
                )
            )
        else:
            subject, predicate, obj = parts
        subject = normalize_phrase(subject)
        predicate = normalize_phrase(predicate)
        obj = normalize_phrase(obj)
        if not (subject and predicate and obj):
            warnings.append(
                ParseWarning(lineno, "empty_field", f"blank field in {line!r}")
            )
            continue
        triples.append(RawTriple(subject, predicate, obj, lineno))
    if not triples and not warnings:
        warnings.append(ParseWarning(0, "empty_output", "no triples found in output"))
    return triples, warnings


def extract_bbox_mentions(
    text: str, image_size: tuple[int, int] | None = None
) -> tuple[list[tuple[str, Bbox]], list[str]]:
    """Find "name[x1,y1,x2,y2]" spans in text.

    Coordinate values above 1 are treated as pixels and divided by the
    declared image size; with no size declared the mention is dropped from
    the result and flagged instead. Boxes that are invalid even after
    normalization are flagged the same way.
    """
    mentions: list[tuple[str, Bbox]] = []
    flags: list[str] = []
    for match in _BBOX_SPAN.finditer(text):
        phrase = _mention_phrase(match.group(1))
        if not phrase:
            continue
        try:
            values = [float(match.group(i)) for i in range(2, 6)]
        except ValueError:
            continue
        if any(v > 1.0 for v in values):
            if image_size is None:
                flags.append(f"unnormalized_bbox:{phrase}")
                continue
            w, h = image_size
            if w <= 0 or h <= 0:
                flags.append(f"unnormalized_bbox:{phrase}")
                continue
            values = [values[0] / w, values[1] / h, values[2] / w, values[3] / h]
        try:
            box = validate_bbox(values)
        except InvalidBbox:
            flags.append(f"invalid_bbox:{phrase}")
            continue
        mentions.append((phrase, box))
    return mentions, flags


def parse_qa_pairs(
    text: str, image_size: tuple[int, int] | None = None
) -> list[RawQAPair]:
    """Parse "Q:"/"A:" blocks (numbered variants included) into pairs.

    Lines between markers continue the current question or answer. A
    question with no following answer raises UnpairedQuestion. Per pair,
    bbox spans are extracted from both the question and the answer.
    """
    pairs: list[RawQAPair] = []
    question: str | None = None
    answer: str | None = None

    def flush():
        nonlocal question, answer
        if question is None:
            return
        if answer is None:
            raise UnpairedQuestion(f"question has no answer: {question.strip()!r}")
        q, a = question.strip(), answer.strip()
        question, answer = None, None
        if not q or not a:
            return
        mentions, flags = extract_bbox_mentions(q + "\n" + a, image_size)
        pairs.append(RawQAPair(q, a, tuple(mentions), tuple(flags)))

    for raw_line in text.splitlines():
        qm = _Q_LINE.match(raw_line)
        am = _A_LINE.match(raw_line)
        if qm:
            flush()
            question = qm.group(1)
            answer = None
        elif am:
            if question is None:
                continue  # stray answer with no question; skip
            if answer is None:
                answer = am.group(1)
            else:
                answer += " " + am.group(1)
        else:
            stripped = raw_line.strip()
            if not stripped:
                continue
            if answer is not None:
                answer += " " + stripped
            elif question is not None:
                question += " " + stripped
    flush()
    return pairs
