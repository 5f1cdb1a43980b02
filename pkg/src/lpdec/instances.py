"""Instance text format v1.

Line-oriented, UTF-8, ``#`` starts a comment, fields are whitespace-separated::

    omega <N>
    dom <M>
    g <N reals> | <price>     (M lines)
    set <K>
    f <N reals>               (K lines)

Writers emit floats with ``repr`` (shortest round-trip form), so files are
byte-identical for identical inputs.
"""
from __future__ import annotations

import hashlib
import math
import os

from .core import Gamble, GambleSet, LowerPrevision, PossibilitySpace
from .errors import ParseError


def instance_text(prevision: LowerPrevision, gambles: GambleSet) -> str:
    if prevision.space != gambles.space:
        raise ParseError("prevision and gamble set live on different spaces")
    lines = ["# lpdec instance v1"]
    lines.append(f"omega {prevision.space.size}")
    lines.append(f"dom {prevision.dom_size}")
    for g, price in prevision.entries:
        payoffs = " ".join(repr(v) for v in g.payoffs.tolist())
        lines.append(f"g {payoffs} | {price!r}")
    lines.append(f"set {gambles.k}")
    for f in gambles.members:
        payoffs = " ".join(repr(v) for v in f.payoffs.tolist())
        lines.append(f"f {payoffs}")
    return "\n".join(lines) + "\n"


def write_instance(path, prevision: LowerPrevision, gambles: GambleSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(instance_text(prevision, gambles))


def instance_digest(text: str) -> str:
    """Stable 16-hex identifier of an instance's canonical text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class _Lines:
    """Comment/blank-line-stripping reader that tracks positions."""

    def __init__(self, text: str, where: str):
        self.where = where
        self.rows = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.rows.append((lineno, body))
        self.pos = 0

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.rows):
            raise ParseError(f"{self.where}: unexpected end of file, expected {what}")
        row = self.rows[self.pos]
        self.pos += 1
        return row

    def fail(self, lineno: int, message: str):
        raise ParseError(f"{self.where}:{lineno}: {message}")


def _parse_count(lines: _Lines, keyword: str) -> int:
    lineno, body = lines.next(f"'{keyword} <count>'")
    parts = body.split()
    if len(parts) != 2 or parts[0] != keyword:
        lines.fail(lineno, f"expected '{keyword} <count>', got {body!r}")
    try:
        value = int(parts[1])
    except ValueError:
        lines.fail(lineno, f"{keyword} count is not an integer: {parts[1]!r}")
    if value < 1:
        lines.fail(lineno, f"{keyword} count must be >= 1, got {value}")
    return value


def _parse_reals(lines: _Lines, lineno: int, fields: list[str], n: int, what: str):
    if len(fields) != n:
        lines.fail(lineno, f"{what}: expected {n} values, got {len(fields)}")
    values = []
    for field in fields:
        try:
            v = float(field)
        except ValueError:
            lines.fail(lineno, f"{what}: not a number: {field!r}")
        if not math.isfinite(v):
            lines.fail(lineno, f"{what}: non-finite value: {field!r}")
        values.append(v)
    return values


def parse_instance(text: str, where: str = "<string>") -> tuple[LowerPrevision, GambleSet]:
    lines = _Lines(text, where)
    n = _parse_count(lines, "omega")
    space = PossibilitySpace(n)

    m = _parse_count(lines, "dom")
    entries = []
    for i in range(m):
        lineno, body = lines.next(f"domain gamble {i + 1}")
        parts = body.split()
        if not parts or parts[0] != "g":
            lines.fail(lineno, f"expected 'g <{n} reals> | <price>', got {body!r}")
        if "|" not in parts:
            lines.fail(lineno, "missing '|' price separator")
        sep = parts.index("|")
        payoffs = _parse_reals(lines, lineno, parts[1:sep], n, f"domain gamble {i + 1}")
        price = _parse_reals(lines, lineno, parts[sep + 1:], 1, f"price {i + 1}")[0]
        entries.append((Gamble(space, payoffs), price))
    prevision = LowerPrevision(space, tuple(entries))

    k = _parse_count(lines, "set")
    members = []
    for i in range(k):
        lineno, body = lines.next(f"gamble {i + 1}")
        parts = body.split()
        if not parts or parts[0] != "f":
            lines.fail(lineno, f"expected 'f <{n} reals>', got {body!r}")
        payoffs = _parse_reals(lines, lineno, parts[1:], n, f"gamble {i + 1}")
        members.append(Gamble(space, payoffs))
    gambles = GambleSet(space, tuple(members))

    if lines.pos != len(lines.rows):
        lineno, body = lines.rows[lines.pos]
        lines.fail(lineno, f"trailing content: {body!r}")
    return prevision, gambles


def read_instance(path) -> tuple[LowerPrevision, GambleSet]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_instance(text, where=os.fspath(path))
