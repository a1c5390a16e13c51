"""Bit-exact JSON documents for schemes, variables, bundles and partitions.

Every rational is written as a string ``"p"`` or ``"p/q"``; tuple labels are
JSON arrays, and when a label is an object key it is written in the text form
``<a,b>``.  Document kinds::

    scheme     {"kind": "scheme", "outcomes": [...], "mass": {label: q}}
    rv         {"kind": "rv", "scheme": S, "values": {label: q}}
    rf         {"kind": "rf", "scheme": S, "values": {label: label}}
    bundle     {"kind": "bundle", "total": S, "base": S, "map": {label: label}}
    partition  {"kind": "partition", "scheme": S, "blocks": [[label, ...], ...]}
    pairs      [S, S, ...]                 (schemes over 2-tuples)

``S`` is an inline scheme object or a path to a scheme document, resolved
relative to the referring document.  Canonical output orders label-keyed
maps by the outcome order and puts the structural keys in the order above.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .algebras import Partition
from .bundles import Bundle
from .core import (
    RandomFunction,
    RandomVariable,
    Scheme,
    as_label,
    format_label,
    format_rational,
    parse_label,
    to_rational,
)
from .errors import DocumentSyntaxError, DuplicateLabel, ProbSchemeError, SemanticError

KINDS = ("scheme", "rv", "rf", "bundle", "partition", "pairs")


@dataclass(frozen=True)
class Document:
    kind: str
    value: Any


class _Float(str):
    """Marks a JSON number with a fraction or exponent part."""


def _pairs_hook(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise _DuplicateKey(k)
        out[k] = v
    return out


class _DuplicateKey(Exception):
    pass


def _loads(text: str):
    try:
        return json.loads(text, parse_float=_Float, object_pairs_hook=_pairs_hook)
    except json.JSONDecodeError as e:
        raise DocumentSyntaxError(e.msg, e.lineno, e.colno) from None
    except _DuplicateKey as e:
        raise SemanticError(f"duplicate key {e.args[0]!r}", "$", DuplicateLabel(str(e.args[0]))) from None


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------

class _Reader:
    def __init__(self, base_dir: Path | None):
        self.base_dir = base_dir

    def fail(self, loc, err):
        if isinstance(err, SemanticError):
            raise err
        raise SemanticError(str(err), loc, err) from None

    def obj(self, node, loc, keys):
        if not isinstance(node, dict):
            raise SemanticError(f"expected an object, got {type(node).__name__}", loc)
        extra = set(node) - set(keys) - {"kind"}
        if extra:
            raise SemanticError(f"unexpected key {sorted(extra)[0]!r}", loc)
        for k in keys:
            if k not in node:
                raise SemanticError(f"missing key {k!r}", loc)
        return node

    def label(self, node, loc):
        try:
            if isinstance(node, (str, list)):
                return as_label(node)
        except ProbSchemeError as e:
            self.fail(loc, e)
        raise SemanticError(f"a label must be a string or an array, got {node!r}", loc)

    def key(self, text, loc):
        try:
            return parse_label(text)
        except ProbSchemeError as e:
            self.fail(loc, e)

    def rational(self, node, loc):
        if isinstance(node, _Float):
            raise SemanticError(f"decimal number {node} is not exact; write it as \"p/q\"", loc)
        if isinstance(node, bool) or not isinstance(node, (int, str)):
            raise SemanticError(f"expected a rational, got {node!r}", loc)
        try:
            return to_rational(node)
        except ProbSchemeError as e:
            self.fail(loc, e)

    def keyed(self, node, loc, value_reader):
        if not isinstance(node, dict):
            raise SemanticError("expected an object keyed by outcome labels", loc)
        out = {}
        for k, v in node.items():
            kloc = f"{loc}[{json.dumps(k, ensure_ascii=False)}]"
            label = self.key(k, kloc)
            if label in out:
                raise SemanticError(f"label {k!r} given twice", kloc, DuplicateLabel(k))
            out[label] = value_reader(v, kloc)
        return out

    def scheme_ref(self, node, loc) -> Scheme:
        if isinstance(node, str):
            path = Path(node)
            if self.base_dir is not None and not path.is_absolute():
                path = self.base_dir / path
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as e:
                raise SemanticError(f"cannot read scheme file {node!r}: {e.strerror}", loc) from None
            doc = parse_document(text, base_dir=path.parent)
            if doc.kind != "scheme":
                raise SemanticError(f"{node!r} holds a {doc.kind} document, not a scheme", loc)
            return doc.value
        return self.scheme(node, loc)

    def scheme(self, node, loc) -> Scheme:
        node = self.obj(node, loc, ("outcomes", "mass"))
        if not isinstance(node["outcomes"], list):
            raise SemanticError("outcomes must be an array", f"{loc}.outcomes")
        outcomes = [self.label(x, f"{loc}.outcomes[{i}]") for i, x in enumerate(node["outcomes"])]
        mass = self.keyed(node["mass"], f"{loc}.mass", self.rational)
        seen = set()
        for i, x in enumerate(outcomes):
            if x in seen:
                raise SemanticError(f"outcome {format_label(x)!r} listed twice", f"{loc}.outcomes[{i}]",
                                    DuplicateLabel(format_label(x)))
            seen.add(x)
            if x not in mass:
                raise SemanticError(f"no mass given for {format_label(x)!r}", f"{loc}.mass")
        for x in mass:
            if x not in seen:
                raise SemanticError(f"mass given for {format_label(x)!r}, which is not listed in outcomes",
                                    f"{loc}.mass")
        try:
            return Scheme(outcomes, [mass[x] for x in outcomes])
        except ProbSchemeError as e:
            self.fail(f"{loc}.mass", e)

    def variable(self, node, loc, kind):
        node = self.obj(node, loc, ("scheme", "values"))
        scheme = self.scheme_ref(node["scheme"], f"{loc}.scheme")
        reader = self.rational if kind == "rv" else self.label
        values = self.keyed(node["values"], f"{loc}.values", reader)
        try:
            if kind == "rv":
                return RandomVariable(scheme, values)
            return RandomFunction(scheme, values)
        except ProbSchemeError as e:
            self.fail(f"{loc}.values", e)

    def bundle(self, node, loc):
        node = self.obj(node, loc, ("total", "base", "map"))
        total = self.scheme_ref(node["total"], f"{loc}.total")
        base = self.scheme_ref(node["base"], f"{loc}.base")
        mapping = self.keyed(node["map"], f"{loc}.map", self.label)
        try:
            return Bundle(total, base, mapping)
        except ProbSchemeError as e:
            self.fail(f"{loc}.map", e)

    def partition(self, node, loc):
        node = self.obj(node, loc, ("scheme", "blocks"))
        scheme = self.scheme_ref(node["scheme"], f"{loc}.scheme")
        blocks = node["blocks"]
        if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
            raise SemanticError("blocks must be an array of arrays", f"{loc}.blocks")
        parsed = [
            [self.label(x, f"{loc}.blocks[{i}][{j}]") for j, x in enumerate(b)]
            for i, b in enumerate(blocks)
        ]
        try:
            return Partition(scheme, parsed)
        except ProbSchemeError as e:
            self.fail(f"{loc}.blocks", e)

    def pairs(self, node, loc):
        schemes = [self.scheme_ref(s, f"{loc}[{i}]") for i, s in enumerate(node)]
        for i, s in enumerate(schemes):
            if any(not isinstance(x, tuple) or len(x) != 2 for x in s.outcomes):
                raise SemanticError("pair schemes must have 2-tuple outcomes", f"{loc}[{i}]")
        return schemes


def _infer_kind(node) -> str:
    if isinstance(node, list):
        return "pairs"
    if not isinstance(node, dict):
        raise SemanticError("a document must be an object or an array", "$")
    if "kind" in node:
        kind = node["kind"]
        if kind not in KINDS or kind == "pairs":
            raise SemanticError(f"unknown document kind {kind!r}", "$.kind")
        return kind
    keys = set(node)
    if keys == {"outcomes", "mass"}:
        return "scheme"
    if keys == {"total", "base", "map"}:
        return "bundle"
    if keys == {"scheme", "blocks"}:
        return "partition"
    if keys == {"scheme", "values"}:
        values = node["values"]
        if isinstance(values, dict) and all(isinstance(v, (int, str, _Float)) and not isinstance(v, bool)
                                            for v in values.values()):
            try:
                for v in values.values():
                    if not isinstance(v, _Float):
                        to_rational(v)
                return "rv"
            except ProbSchemeError:
                pass
        return "rf"
    raise SemanticError("cannot tell what kind of document this is; add a \"kind\" key", "$")


def parse_document(text: str, base_dir: str | Path | None = None) -> Document:
    """Parse document text into a :class:`Document`.

    Raises :class:`DocumentSyntaxError` for malformed JSON and
    :class:`SemanticError` (with a JSON-path location) for anything the
    engine rejects.
    """
    node = _loads(text)
    kind = _infer_kind(node)
    reader = _Reader(Path(base_dir) if base_dir is not None else None)
    if kind == "scheme":
        value = reader.scheme(node, "$")
    elif kind in ("rv", "rf"):
        value = reader.variable(node, "$", kind)
    elif kind == "bundle":
        value = reader.bundle(node, "$")
    elif kind == "partition":
        value = reader.partition(node, "$")
    else:
        value = reader.pairs(node, "$")
    return Document(kind, value)


def read_document(path: str | Path) -> Document:
    path = Path(path)
    return parse_document(path.read_text(encoding="utf-8"), base_dir=path.parent)


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

def label_json(label):
    if isinstance(label, tuple):
        return [label_json(x) for x in label]
    return label


def scheme_json(s: Scheme, with_kind=True) -> dict:
    out = {"kind": "scheme"} if with_kind else {}
    out["outcomes"] = [label_json(x) for x in s.outcomes]
    out["mass"] = {format_label(x): format_rational(m) for x, m in s.items()}
    return out


def to_json(value) -> Any:
    """JSON-ready form of any engine value."""
    if isinstance(value, Document):
        return to_json(value.value)
    if isinstance(value, Scheme):
        return scheme_json(value)
    if isinstance(value, RandomVariable):
        return {
            "kind": "rv",
            "scheme": scheme_json(value.domain, with_kind=False),
            "values": {format_label(x): format_rational(v) for x, v in value.items()},
        }
    if isinstance(value, RandomFunction):
        return {
            "kind": "rf",
            "scheme": scheme_json(value.domain, with_kind=False),
            "values": {format_label(x): label_json(v) for x, v in value.items()},
        }
    if isinstance(value, Bundle):
        return {
            "kind": "bundle",
            "total": scheme_json(value.total, with_kind=False),
            "base": scheme_json(value.base, with_kind=False),
            "map": {format_label(x): label_json(y) for x, y in value.as_dict().items()},
        }
    if isinstance(value, Partition):
        return {
            "kind": "partition",
            "scheme": scheme_json(value.domain, with_kind=False),
            "blocks": [[label_json(x) for x in b] for b in value.blocks],
        }
    if isinstance(value, list) and all(isinstance(s, Scheme) for s in value):
        return [scheme_json(s, with_kind=False) for s in value]
    return value


def dumps(obj, fmt: str = "canonical") -> str:
    if fmt == "canonical":
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"
    if fmt == "pretty":
        return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def serialize_document(value, fmt: str = "canonical") -> str:
    """Serialize an engine value (or :class:`Document`) as document text."""
    return dumps(to_json(value), fmt)
