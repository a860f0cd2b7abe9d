"""JSON documents for every value the command line accepts or emits.

A document is {"kind": ..., "formatVersion": 1, "payload": ...}; the
payload is validated by the owning module's constructor before any
command touches it.  Serialization is canonical (sorted keys, no
whitespace variation) so equal values produce identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import ParseError, ValidationError
from .injections import (
    OperadElement,
    PartialInjection,
    Piece,
    QuasiAffineInjection,
)
from .iset import ISetMorphism, TruncatedISet
from .mset import CanonicalTameMSet, MElement
from .opalg import Certificate, CertificateStep, CommMonoidPresentation
from .sigma import SigmaSet, point_key

FORMAT_VERSION = 1

KINDS = (
    "partial-injection",
    "qa-injection",
    "operad-element",
    "sigma-set",
    "mset",
    "iset",
    "morphism",
    "monoid",
    "certificate",
)


def canonical_json(value):
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


# -- encoding ---------------------------------------------------------------


def _frac_out(q):
    q = Fraction(q)
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"


def encode_partial(f: PartialInjection):
    return {"map": {str(k): v for k, v in sorted(f.mapping.items())}}


def encode_qa(f: QuasiAffineInjection):
    return {
        "pieces": [
            {
                "lo": p.lo,
                "hi": p.hi,
                "mod": p.mod,
                "res": p.res,
                "a": _frac_out(p.a),
                "b": _frac_out(p.b),
            }
            for p in f.pieces
        ]
    }


def encode_injection(f):
    if isinstance(f, PartialInjection):
        return encode_partial(f)
    return encode_qa(f)


def encode_operad(e: OperadElement):
    return {"arity": e.arity, "slots": [encode_injection(s) for s in e.slots]}


class PointNames:
    """Stable string identifiers for structured point objects."""

    def __init__(self, points):
        ordered = sorted(points, key=point_key)
        taken = {p for p in ordered if isinstance(p, str)}
        width = max(len(str(max(len(ordered) - 1, 0))), 1)
        self.to_name = {}
        self.from_name = {}
        for i, p in enumerate(ordered):
            if isinstance(p, str):
                name = p
            else:
                # fixed width keeps the name order aligned with the
                # point order, so orbit representatives survive a trip
                name = f"p{i:0{width}d}"
                while name in taken:
                    name = "p" + name
                taken.add(name)
            self.to_name[p] = name
            self.from_name[name] = p


def encode_sigma(ss: SigmaSet, names: PointNames = None):
    names = names or PointNames(ss.points)
    return {
        "m": ss.m,
        "points": sorted(names.to_name[p] for p in ss.points),
        "s": [
            {names.to_name[p]: names.to_name[q] for p, q in t.items()}
            for t in ss.transpositions
        ],
    }


def encode_mset(X: CanonicalTameMSet):
    out = {"levels": {}, "maxLevel": X.max_level}
    for m, ss in sorted(X.levels.items()):
        out["levels"][str(m)] = encode_sigma(ss)
    return out


def encode_element(x: MElement, names: PointNames = None):
    point = names.to_name[x.point] if names else (
        x.point if isinstance(x.point, str) else repr(x.point)
    )
    return {"level": x.level, "image": list(x.image), "point": point}


def encode_iset(X: TruncatedISet):
    layers = [PointNames(level) for level in X.levels]
    return {
        "N": X.N,
        "stableFrom": X.stable_from,
        "levels": [sorted(n.to_name.values()) for n in layers],
        "incl": [
            {layers[m].to_name[p]: layers[m + 1].to_name[q]
             for p, q in X.incl[m].items()}
            for m in range(X.N)
        ],
        "s": [
            [
                {layers[m].to_name[p]: layers[m].to_name[q]
                 for p, q in t.items()}
                for t in X.transp[m]
            ]
            for m in range(X.N + 1)
        ],
    }


def encode_iset_morphism(f: ISetMorphism):
    src = [PointNames(level) for level in f.source.levels]
    tgt = [PointNames(level) for level in f.target.levels]
    return {
        "morphism": "iset",
        "source": encode_iset(f.source),
        "target": encode_iset(f.target),
        "levels": [
            {src[m].to_name[p]: tgt[m].to_name[q]
             for p, q in f.maps[m].items()}
            for m in range(f.source.N + 1)
        ],
    }


def encode_monoid(P: CommMonoidPresentation):
    names = {m: PointNames(ss.points) for m, ss in P.carrier.levels.items()}
    sums = []
    for ((m, ra), (n, rb)), val in sorted(
        P.table.items(), key=lambda kv: repr(kv[0])
    ):
        sums.append(
            {
                "a": [m, names[m].to_name[ra]],
                "b": [n, names[n].to_name[rb]],
                "result": {
                    "level": val.level,
                    "image": list(val.image),
                    "point": names[val.level].to_name[val.point],
                },
            }
        )
    return {
        "carrier": encode_mset(P.carrier),
        "unit": names[0].to_name[P.unit_point],
        "levelCap": P.level_cap,
        "sums": sums,
    }


def encode_certificate(c: Certificate):
    return {
        "n": c.n,
        "A": [sorted(A) for A in c.constraints],
        "chain": [
            {
                "elem": encode_operad(s.element),
                "move": [encode_qa(f) for f in s.move],
                "dir": s.direction,
            }
            for s in c.steps
        ],
        "final": encode_operad(c.final),
    }


def wrap(kind, payload):
    return {"kind": kind, "formatVersion": FORMAT_VERSION, "payload": payload}


# -- decoding ---------------------------------------------------------------


def _frac_in(v):
    if isinstance(v, str):
        num, _, den = v.partition("/")
        return Fraction(int(num), int(den or 1))
    return Fraction(v)


def decode_partial(payload):
    try:
        return PartialInjection({int(k): int(v) for k, v in payload["map"].items()})
    except KeyError as e:
        raise ValidationError("partial-injection fields", str(e)) from None


def decode_qa(payload):
    pieces = []
    for raw in payload["pieces"]:
        pieces.append(
            Piece(
                int(raw["lo"]),
                None if raw.get("hi") is None else int(raw["hi"]),
                int(raw["mod"]),
                int(raw["res"]),
                _frac_in(raw["a"]),
                _frac_in(raw["b"]),
            )
        )
    return QuasiAffineInjection(pieces)


def decode_injection(payload):
    if "map" in payload:
        return decode_partial(payload)
    if "pieces" in payload:
        return decode_qa(payload)
    raise ValidationError("injection shape", "expected map or pieces")


def decode_operad(payload):
    slots = [decode_injection(raw) for raw in payload["slots"]]
    e = OperadElement(slots)
    if e.arity != int(payload["arity"]):
        raise ValidationError("arity", payload["arity"])
    return e


def decode_sigma(payload):
    m = int(payload["m"])
    points = list(payload["points"])
    tables = [dict(t) for t in payload["s"]]
    return SigmaSet(m, points, tables)


def decode_mset(payload):
    levels = {}
    for key, raw in payload.get("levels", {}).items():
        levels[int(key)] = decode_sigma(raw)
    return CanonicalTameMSet(levels)


def decode_element(payload, X: CanonicalTameMSet = None):
    level = int(payload["level"])
    image = tuple(int(v) for v in payload["image"])
    point = payload["point"]
    if len(set(image)) != len(image):
        raise ValidationError("distinct image entries", image)
    if any(v < 1 for v in image):
        raise ValidationError("positive image entries", image)
    if X is not None:
        # an unsorted image is fine on input: the carrier knows how to
        # push the sorting permutation into the point
        if X.levels.get(level) is None or point not in set(
            X.levels[level].points
        ):
            raise ValidationError("element of the carrier", payload)
        return X.canonical(level, image, point)
    if tuple(sorted(image)) != image:
        raise ValidationError("canonical image order", image)
    return MElement(level, image, point)


def decode_iset(payload):
    N = int(payload["N"])
    levels = [list(l) for l in payload["levels"]]
    incl = [dict(d) for d in payload["incl"]]
    transp = [[dict(t) for t in ts] for ts in payload["s"]]
    return TruncatedISet(N, levels, incl, transp, int(payload["stableFrom"]))


def decode_iset_morphism(payload):
    src = decode_iset(payload["source"])
    tgt = decode_iset(payload["target"])
    return ISetMorphism(src, tgt, [dict(d) for d in payload["levels"]])


def decode_monoid(payload):
    carrier = decode_mset(payload["carrier"])
    table = {}
    for raw in payload["sums"]:
        m, ra = int(raw["a"][0]), raw["a"][1]
        n, rb = int(raw["b"][0]), raw["b"][1]
        val = decode_element(raw["result"], carrier)
        table[((m, ra), (n, rb))] = val
    return CommMonoidPresentation(
        carrier, payload["unit"], table, payload.get("levelCap")
    )


def decode_certificate(payload):
    steps = []
    for raw in payload["chain"]:
        steps.append(
            CertificateStep(
                decode_operad(raw["elem"]),
                tuple(decode_qa(f) for f in raw["move"]),
                raw["dir"],
            )
        )
    return Certificate(
        int(payload["n"]),
        [frozenset(int(a) for a in A) for A in payload["A"]],
        steps,
        decode_operad(payload["final"]),
    )


DECODERS = {
    "partial-injection": decode_partial,
    "qa-injection": decode_qa,
    "operad-element": decode_operad,
    "sigma-set": decode_sigma,
    "mset": decode_mset,
    "iset": decode_iset,
    "monoid": decode_monoid,
    "certificate": decode_certificate,
}


class Document:
    def __init__(self, kind, payload, value, format_version=FORMAT_VERSION):
        self.kind = kind
        self.payload = payload
        self.value = value
        self.format_version = format_version


def parse_document(data) -> Document:
    """Decode and validate one document from bytes or text."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(str(e)) from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(str(e)) from None
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ParseError("document must be an object with a kind")
    kind = raw["kind"]
    payload = raw.get("payload")
    if kind == "morphism":
        if not isinstance(payload, dict) or payload.get("morphism") != "iset":
            raise ValidationError("morphism discriminator", kind)
        value = decode_iset_morphism(payload)
    elif kind in DECODERS:
        value = DECODERS[kind](payload)
    else:
        raise ParseError(f"unknown document kind {kind!r}")
    return Document(kind, payload, value, raw.get("formatVersion", 1))


def serialize_document(kind, value):
    if kind == "partial-injection":
        payload = encode_partial(value)
    elif kind == "qa-injection":
        payload = encode_qa(value)
    elif kind == "operad-element":
        payload = encode_operad(value)
    elif kind == "sigma-set":
        payload = encode_sigma(value)
    elif kind == "mset":
        payload = encode_mset(value)
    elif kind == "iset":
        payload = encode_iset(value)
    elif kind == "morphism":
        payload = encode_iset_morphism(value)
    elif kind == "monoid":
        payload = encode_monoid(value)
    elif kind == "certificate":
        payload = encode_certificate(value)
    else:
        raise ParseError(f"unknown document kind {kind!r}")
    return canonical_json(wrap(kind, payload))
