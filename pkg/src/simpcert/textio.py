"""Line-oriented text formats for elements, words and documents.

Elements::

    plmap q=3            vmap m=2 d=2
    0 -> 0               0 -> 1
    2/3^1 -> 2           1 -> 0
    1 -> 1

Documents (certificates, word files, generator lists) start with
``simpcert v1``, then ``key value`` header lines, then blocks::

    begin <label...>
    <element text>
    end
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .cantor import ClopenSet, PrefixMap, TreeShape, format_word, parse_word
from .errors import CantorError, ParseError, PLError
from .plmap import PLMap, pl_validate
from .qadic import QRational, parse_qrational

MAGIC = "simpcert v1"
MAX_EXPONENT = 4096
MAX_DIGITS = 4096
MAX_WORD = 4096
MAX_BASE = 10**6
MAX_ARITY = 256

Element = Union[PLMap, PrefixMap]

_PL_HEADER = re.compile(r"^plmap q=(\d{1,7})$")
_V_HEADER = re.compile(r"^vmap m=(\d{1,4}) d=(\d{1,4})$")


@dataclass(frozen=True)
class Carrier:
    kind: str  # "plmap" or "vmap"
    q: int = 0
    m: int = 0
    d: int = 0

    @classmethod
    def pl(cls, q: int) -> "Carrier":
        return cls("plmap", q=q)

    @classmethod
    def v(cls, shape: TreeShape) -> "Carrier":
        return cls("vmap", m=shape.m, d=shape.d)

    @classmethod
    def of(cls, x: Element) -> "Carrier":
        return cls.pl(x.q) if isinstance(x, PLMap) else cls.v(x.shape)

    @property
    def shape(self) -> TreeShape:
        return TreeShape(self.m, self.d)

    def identity(self) -> Element:
        return PLMap(self.q) if self.kind == "plmap" else PrefixMap.identity(self.shape)

    def header(self) -> str:
        return f"plmap q={self.q}" if self.kind == "plmap" else f"vmap m={self.m} d={self.d}"


def parse_carrier(text: str, line: int = None) -> Carrier:
    text = text.strip()
    mo = _PL_HEADER.match(text)
    if mo:
        q = int(mo.group(1))
        if not 2 <= q <= MAX_BASE:
            raise ParseError(f"base q must be in [2, {MAX_BASE}], got {q}", line=line)
        return Carrier.pl(q)
    mo = _V_HEADER.match(text)
    if mo:
        m, d = int(mo.group(1)), int(mo.group(2))
        if not (2 <= m <= MAX_ARITY and 2 <= d <= MAX_ARITY):
            raise ParseError(f"shape needs 2 <= m, d <= {MAX_ARITY}, got m={m} d={d}", line=line)
        return Carrier("vmap", m=m, d=d)
    raise ParseError(f"unknown carrier header {text!r}", line=line)


# -- elements ---------------------------------------------------------------

def serialize_element(x: Element) -> str:
    lines = [Carrier.of(x).header()]
    if isinstance(x, PLMap):
        lines += [f"{a} -> {b}" for a, b in x.table]
    else:
        lines += [f"{format_word(u)} -> {format_word(v)}" for u, v in x.pairs]
    return "\n".join(lines) + "\n"


def _check_literal(tok: str, line: int) -> None:
    if len(tok) > MAX_DIGITS:
        raise ParseError("numeric literal too long", line=line)
    mo = re.search(r"\^\s*(\d+)\s*$", tok)
    if mo and (len(mo.group(1)) > 6 or int(mo.group(1)) > MAX_EXPONENT):
        raise ParseError(f"exponent exceeds {MAX_EXPONENT}", line=line)


def _split_arrow(raw: str, line: int):
    if raw.count("->") != 1:
        raise ParseError("expected '<lhs> -> <rhs>'", line=line, column=1)
    lhs, rhs = raw.split("->")
    return lhs.strip(), rhs.strip()


def parse_element(text: str, first_line: int = 1) -> Element:
    lines = [(i + first_line, l.strip()) for i, l in enumerate(text.splitlines())]
    lines = [(i, l) for i, l in lines if l and not l.startswith("#")]
    if not lines:
        raise ParseError("empty element", line=first_line)
    carrier = parse_carrier(lines[0][1], line=lines[0][0])
    body = lines[1:]
    if carrier.kind == "plmap":
        table = []
        for ln, raw in body:
            lhs, rhs = _split_arrow(raw, ln)
            for tok in (lhs, rhs):
                _check_literal(tok, ln)
            try:
                table.append((parse_qrational(lhs, carrier.q), parse_qrational(rhs, carrier.q)))
            except ValueError as e:
                raise ParseError(str(e), line=ln) from None
        try:
            return pl_validate(table, carrier.q)
        except PLError as e:
            raise ParseError(f"invalid PL table: {e}", line=lines[0][0]) from None
    shape = carrier.shape
    if not body:
        raise ParseError("vmap table needs at least one entry", line=lines[0][0])
    pairs = []
    for ln, raw in body:
        lhs, rhs = _split_arrow(raw, ln)
        if len(lhs) > MAX_WORD or len(rhs) > MAX_WORD:
            raise ParseError("word too long", line=ln)
        try:
            pairs.append((parse_word(lhs), parse_word(rhs)))
        except CantorError as e:
            raise ParseError(str(e), line=ln) from None
    try:
        return PrefixMap(shape, pairs)
    except CantorError as e:
        raise ParseError(f"invalid prefix table: {e}", line=lines[0][0]) from None


def serialize_clopen(A: ClopenSet) -> str:
    return str(A)


def parse_clopen(text: str, shape: TreeShape) -> ClopenSet:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"clopen set must look like {{u1,u2,...}}, got {text!r}")
    inner = text[1:-1].strip()
    words = [parse_word(t) for t in inner.split(",")] if inner else []
    for w in words:
        shape.check_word(w)
    return ClopenSet(shape, words)


# -- documents --------------------------------------------------------------

@dataclass
class Document:
    header: list = field(default_factory=list)  # [(key, value)]
    blocks: list = field(default_factory=list)  # [(label tokens, element)]

    def get(self, key: str, default=None):
        for k, v in self.header:
            if k == key:
                return v
        return default

    def all(self, key: str) -> list:
        return [v for k, v in self.header if k == key]

    def to_text(self) -> str:
        out = [MAGIC]
        out += [f"{k} {v}" for k, v in self.header]
        for label, x in self.blocks:
            out.append("begin " + " ".join(str(t) for t in label))
            out.append(serialize_element(x).rstrip("\n"))
            out.append("end")
        return "\n".join(out) + "\n"


def parse_document(text: str) -> Document:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ParseError(f"missing '{MAGIC}' header", line=1, column=1)
    doc = Document()
    i = 1
    while i < len(lines):
        raw = lines[i].strip()
        ln = i + 1
        if not raw or raw.startswith("#"):
            i += 1
            continue
        if raw.startswith("begin"):
            label = raw.split()[1:]
            if not label:
                raise ParseError("block without a label", line=ln)
            j = i + 1
            while j < len(lines) and lines[j].strip() != "end":
                if lines[j].strip().startswith("begin"):
                    raise ParseError("nested block", line=j + 1)
                j += 1
            if j == len(lines):
                raise ParseError("unterminated block", line=ln)
            elem = parse_element("\n".join(lines[i + 1:j]), first_line=i + 2)
            doc.blocks.append((label, elem))
            i = j + 1
            continue
        if doc.blocks:
            raise ParseError("header line after first block", line=ln)
        parts = raw.split(None, 1)
        doc.header.append((parts[0], parts[1] if len(parts) > 1 else ""))
        i += 1
    return doc


def word_document(word, carrier: Carrier, kind: str = "word") -> Document:
    doc = Document([("kind", kind), ("carrier", carrier.header())])
    for j, (a, b) in enumerate(word.pairs, 1):
        doc.blocks.append((["pair", j, "a"], a))
        doc.blocks.append((["pair", j, "b"], b))
    return doc


def pairs_from_blocks(blocks, prefix: list) -> list:
    """Collect ``prefix + [j, a|b]`` blocks into an ordered list of pairs."""
    n = len(prefix)
    found = {}
    for label, x in blocks:
        if label[:n] != prefix or len(label) != n + 2:
            continue
        try:
            j = int(label[n])
        except ValueError:
            raise ParseError(f"bad pair index in block 'begin {' '.join(label)}'") from None
        side = label[n + 1]
        if side not in ("a", "b") or (j, side) in found:
            raise ParseError(f"bad or duplicate block 'begin {' '.join(label)}'")
        found[(j, side)] = x
    count = len(found) // 2
    pairs = []
    for j in range(1, count + 1):
        if (j, "a") not in found or (j, "b") not in found:
            raise ParseError(f"pair {j} of {' '.join(prefix)} is incomplete")
        pairs.append((found[(j, "a")], found[(j, "b")]))
    if len(found) != 2 * count:
        raise ParseError(f"pairs of {' '.join(prefix)} are not numbered 1..n")
    return pairs


def parse_word_document(text: str):
    from .bip import CommutatorWord

    doc = parse_document(text)
    carrier = parse_carrier(doc.get("carrier", ""))
    pairs = pairs_from_blocks(doc.blocks, ["pair"])
    for a, b in pairs:
        for x in (a, b):
            if Carrier.of(x) != carrier:
                raise ParseError("element carrier does not match the document header")
    return CommutatorWord(pairs, carrier.identity()), carrier


def parse_generator_document(text: str) -> list:
    doc = parse_document(text)
    gens = [x for label, x in doc.blocks if label[0] == "gen"]
    if not gens:
        raise ParseError("generator file has no 'begin gen' blocks")
    return gens


def generator_document(gens) -> Document:
    return Document([("kind", "generators")], [(["gen", i], g) for i, g in enumerate(gens, 1)])
