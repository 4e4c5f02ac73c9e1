"""Certificates and their independent verifier.

A certificate is a :class:`~simpcert.textio.Document` with header keys
``kind``, ``carrier``, ``bound`` and any number of ``meta <key> <value>``
lines. Blocks:

* ``target`` - the element being decomposed;
* conjugate factorizations: ``g``, then ``factor <i> <+1|-1>`` holding the
  conjugator w_i, optionally ``witness <i> <j> <a|b>`` certifying w_i as a
  product of commutators, and ``g-witness <j> <a|b>``;
* commutator words: ``pair <j> <a|b>``.

The verifier only uses the carrier algebra (composition, inverse, equality);
it recomputes every product from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, SimpcertError
from .textio import Carrier, Document, pairs_from_blocks, parse_carrier, parse_document

FACTORIZATION = "conjugate-factorization"
WORD = "commutator-word"
KINDS = (FACTORIZATION, WORD)


@dataclass
class Certificate:
    kind: str
    carrier: Carrier
    bound: int
    target: object
    g: object = None
    factors: list = field(default_factory=list)  # [(w, eps)]
    witnesses: dict = field(default_factory=dict)  # factor index -> [(a, b)]
    g_witness: Optional[list] = None
    pairs: list = field(default_factory=list)
    meta: list = field(default_factory=list)  # [(key, value)]

    def count(self) -> int:
        return len(self.factors) if self.kind == FACTORIZATION else len(self.pairs)

    def to_document(self) -> Document:
        header = [("kind", self.kind), ("carrier", self.carrier.header()), ("bound", str(self.bound))]
        header += [("meta", f"{k} {v}") for k, v in self.meta]
        blocks = [(["target"], self.target)]
        if self.kind == FACTORIZATION:
            blocks.append((["g"], self.g))
            if self.g_witness is not None:
                for j, (a, b) in enumerate(self.g_witness, 1):
                    blocks += [(["g-witness", j, "a"], a), (["g-witness", j, "b"], b)]
            for i, (w, eps) in enumerate(self.factors, 1):
                blocks.append((["factor", i, "+1" if eps == 1 else "-1"], w))
                for j, (a, b) in enumerate(self.witnesses.get(i, []), 1):
                    blocks += [(["witness", i, j, "a"], a), (["witness", i, j, "b"], b)]
        else:
            for j, (a, b) in enumerate(self.pairs, 1):
                blocks += [(["pair", j, "a"], a), (["pair", j, "b"], b)]
        return Document(header, blocks)

    def to_text(self) -> str:
        return self.to_document().to_text()


def from_factorization(cf, target, bound: int, meta=(), g_witness=None) -> Certificate:
    carrier = Carrier.of(target)
    witnesses = {}
    for i, f in enumerate(cf.factors, 1):
        if f.witness is not None:
            witnesses[i] = list(f.witness.pairs)
    return Certificate(
        FACTORIZATION, carrier, bound, target, g=cf.g,
        factors=[(f.w, f.eps) for f in cf.factors],
        witnesses=witnesses,
        g_witness=list(g_witness.pairs) if g_witness is not None else None,
        meta=list(meta),
    )


def from_word(word, target, bound: int, meta=()) -> Certificate:
    return Certificate(WORD, Carrier.of(target), bound, target, pairs=list(word.pairs), meta=list(meta))


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be an integer, got {text!r}") from None


def parse_certificate(text: str) -> Certificate:
    doc = parse_document(text)
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ParseError(f"unknown certificate kind {kind!r}")
    carrier = parse_carrier(doc.get("carrier", ""))
    bound = _int(doc.get("bound"), "bound")
    if bound < 0:
        raise ParseError("bound must be nonnegative")
    meta = []
    for v in doc.all("meta"):
        parts = v.split(None, 1)
        meta.append((parts[0], parts[1] if len(parts) > 1 else ""))
    for label, x in doc.blocks:
        if Carrier.of(x) != carrier:
            raise ParseError(f"block 'begin {' '.join(label)}' has carrier {Carrier.of(x).header()}, expected {carrier.header()}")
    single = {}
    for label, x in doc.blocks:
        if len(label) == 1:
            if label[0] in single:
                raise ParseError(f"duplicate block '{label[0]}'")
            single[label[0]] = x
    if "target" not in single:
        raise ParseError("missing target block")
    cert = Certificate(kind, carrier, bound, single["target"], meta=meta)
    known = {"target", "g", "factor", "witness", "g-witness", "pair"}
    for label, _ in doc.blocks:
        if label[0] not in known:
            raise ParseError(f"unknown block 'begin {' '.join(label)}'")
    if kind == WORD:
        cert.pairs = pairs_from_blocks(doc.blocks, ["pair"])
        return cert
    if "g" not in single:
        raise ParseError("factorization certificate needs a g block")
    cert.g = single["g"]
    factors = {}
    for label, x in doc.blocks:
        if label[0] != "factor":
            continue
        if len(label) != 3 or label[2] not in ("+1", "-1"):
            raise ParseError(f"malformed factor block 'begin {' '.join(label)}'")
        i = _int(label[1], "factor index")
        if i in factors:
            raise ParseError(f"duplicate factor {i}")
        factors[i] = (x, 1 if label[2] == "+1" else -1)
    if sorted(factors) != list(range(1, len(factors) + 1)):
        raise ParseError("factors are not numbered 1..n")
    cert.factors = [factors[i] for i in range(1, len(factors) + 1)]
    for i in factors:
        wit = pairs_from_blocks(doc.blocks, ["witness", str(i)])
        if wit:
            cert.witnesses[i] = wit
    stray = {label[1] for label, _ in doc.blocks if label[0] == "witness"} - {str(i) for i in factors}
    if stray:
        raise ParseError(f"witness blocks for unknown factors {sorted(stray)}")
    gw = pairs_from_blocks(doc.blocks, ["g-witness"])
    cert.g_witness = gw or None
    return cert


@dataclass
class Verdict:
    accepted: bool
    reason: str = ""  # parse | mismatch | bound | witness
    detail: str = ""

    def __str__(self):
        if self.accepted:
            return "ACCEPT"
        return f"REJECT {self.reason}" + (f": {self.detail}" if self.detail else "")


def _commutator_product(pairs, one):
    out = one
    for a, b in pairs:
        out = out * a * b * a.inverse() * b.inverse()
    return out


def check_certificate(cert: Certificate) -> Verdict:
    one = cert.carrier.identity()
    if cert.kind == FACTORIZATION:
        if cert.g is None or cert.g.is_identity():
            return Verdict(False, "witness", "base element g is missing or trivial")
        if cert.g_witness is not None and _commutator_product(cert.g_witness, one) != cert.g:
            return Verdict(False, "witness", "g-witness does not evaluate to g")
        g, ginv = cert.g, cert.g.inverse()
        prod = one
        for w, eps in cert.factors:
            prod = prod * w * (g if eps == 1 else ginv) * w.inverse()
        if prod != cert.target:
            return Verdict(False, "mismatch", "product of conjugates differs from target")
        for i, pairs in sorted(cert.witnesses.items()):
            if _commutator_product(pairs, one) != cert.factors[i - 1][0]:
                return Verdict(False, "witness", f"witness of factor {i} does not evaluate to its conjugator")
    else:
        if _commutator_product(cert.pairs, one) != cert.target:
            return Verdict(False, "mismatch", "product of commutators differs from target")
    if cert.count() > cert.bound:
        return Verdict(False, "bound", f"{cert.count()} factors exceed claimed bound {cert.bound}")
    return Verdict(True)


def verify_certificate(text: str) -> Verdict:
    """Parse and check; never raises on hostile input."""
    try:
        cert = parse_certificate(text)
    except (SimpcertError, ValueError, RecursionError) as e:
        return Verdict(False, "parse", str(e))
    try:
        return check_certificate(cert)
    except (SimpcertError, ValueError) as e:
        return Verdict(False, "parse", str(e))
