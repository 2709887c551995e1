"""Exact JSON formats for spaces, families and reports.

Every rational is written as a "p/q" string. Output is deterministic:
the same object always yields the same bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import InputError
from .generators import canonical_kind, make_generator
from .lipschitz import FunctionFamily, LipschitzFunction
from .metric import FiniteMetricSpace
from .rational import format_rational, parse_rational


def _rat(text, where):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False)


# ---------------------------------------------------------------- spaces


def space_to_doc(space: FiniteMetricSpace, form: str = "explicit") -> dict:
    """Explicit document, or the generator recipe when the space came from one."""
    prov = space.provenance if isinstance(space.provenance, dict) else None
    if form == "generator":
        if not prov or "kind" not in prov or "truncate" not in prov:
            raise InputError("this space has no generator recipe; use the explicit form")
        return {"kind": prov["kind"], "params": prov.get("params", {}), "truncate": prov["truncate"]}
    if form != "explicit":
        raise InputError(f"unknown space form {form!r}")
    doc = {
        "kind": "explicit",
        "points": list(space.points),
        "base": space.base,
        "dist": [[format_rational(v) for v in row] for row in space.matrix()],
    }
    if prov is not None:
        doc["provenance"] = prov
    return doc


def dump_space(space: FiniteMetricSpace, form: str = "explicit") -> str:
    doc = space_to_doc(space, form)
    if doc["kind"] != "explicit":
        return _dumps(doc) + "\n"
    lines = ["{"]
    lines.append('  "kind": "explicit",')
    lines.append(f'  "points": {_dumps(doc["points"])},')
    lines.append(f'  "base": {_dumps(doc["base"])},')
    rows = ",\n".join("    " + _dumps(r) for r in doc["dist"])
    tail = "," if "provenance" in doc else ""
    lines.append('  "dist": [\n' + rows + "\n  ]" + tail)
    if "provenance" in doc:
        lines.append(f'  "provenance": {_dumps(doc["provenance"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def space_from_doc(doc, base_dir: Path | None = None) -> FiniteMetricSpace:
    if isinstance(doc, str):
        path = Path(doc) if base_dir is None else Path(base_dir) / doc
        return load_space(path)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError("a space document needs a 'kind'")
    kind = doc["kind"]
    if kind == "explicit":
        for key in ("points", "base", "dist"):
            if key not in doc:
                raise InputError(f"explicit space is missing {key!r}")
        rows = doc["dist"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise InputError("'dist' must be a list of rows")
        matrix = [[_rat(v, f"dist[{i}]") for v in r] for i, r in enumerate(rows)]
        return FiniteMetricSpace.from_matrix(
            doc["points"], doc["base"], matrix, provenance=doc.get("provenance")
        )
    kind = canonical_kind(kind)
    if "truncate" not in doc:
        raise InputError("a generator space needs 'truncate'")
    n = doc["truncate"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError("'truncate' must be an integer")
    return make_generator(kind, doc.get("params") or {}).truncate(n)


def parse_space(text: str, base_dir=None) -> FiniteMetricSpace:
    return space_from_doc(_loads(text), base_dir)


def load_space(path) -> FiniteMetricSpace:
    path = Path(path)
    return parse_space(_read(path), path.parent)


# ---------------------------------------------------------------- families


def family_to_doc(family: FunctionFamily, space_ref=None) -> dict:
    """Values list the base as "0/1" followed by the nonzero entries in point order."""
    space = family.space
    funcs = []
    for f, w in zip(family.members, family.witnesses):
        values = {space.base: "0/1"}
        for i, p in enumerate(space.points):
            v = f.value_at(i)
            if v != 0:
                values[p] = format_rational(v)
        entry = {"name": f.name, "values": values}
        if w is not None:
            entry["witness"] = list(w)
        funcs.append(entry)
    doc = {"space": space_ref if space_ref is not None else space_to_doc(space)}
    doc["functions"] = funcs
    if family.provenance is not None:
        doc["provenance"] = family.provenance
    return doc


def dump_family(family: FunctionFamily, space_ref=None) -> str:
    doc = family_to_doc(family, space_ref)
    space = doc["space"]
    if isinstance(space, dict) and space.get("kind") == "explicit":
        inner = dump_space(family.space).rstrip("\n").replace("\n", "\n  ")
    else:
        inner = _dumps(space)
    lines = ["{", f'  "space": {inner},', '  "functions": [']
    lines.append(",\n".join("    " + _dumps(f) for f in doc["functions"]))
    tail = "," if "provenance" in doc else ""
    lines.append("  ]" + tail)
    if "provenance" in doc:
        lines.append(f'  "provenance": {_dumps(doc["provenance"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def family_from_doc(doc, base_dir=None) -> FunctionFamily:
    if not isinstance(doc, dict) or "space" not in doc or "functions" not in doc:
        raise InputError("a family document needs 'space' and 'functions'")
    space = space_from_doc(doc["space"], base_dir)
    members, witnesses = [], []
    funcs = doc["functions"]
    if not isinstance(funcs, list) or not funcs:
        raise InputError("'functions' must be a nonempty list")
    for k, entry in enumerate(funcs):
        if not isinstance(entry, dict) or "values" not in entry:
            raise InputError(f"function {k + 1} needs 'values'")
        vals = entry["values"]
        if not isinstance(vals, dict):
            raise InputError(f"function {k + 1}: 'values' must map points to rationals")
        parsed = {p: _rat(v, f"function {k + 1}, point {p!r}") for p, v in vals.items()}
        members.append(LipschitzFunction.from_values(space, parsed, entry.get("name")))
        w = entry.get("witness")
        if w is not None and (not isinstance(w, list) or len(w) != 2):
            raise InputError(f"function {k + 1}: 'witness' must be a pair of points")
        witnesses.append(tuple(w) if w is not None else None)
    return FunctionFamily(members, witnesses, provenance=doc.get("provenance"))


def parse_family(text: str, base_dir=None) -> FunctionFamily:
    return family_from_doc(_loads(text), base_dir)


def load_family(path) -> FunctionFamily:
    path = Path(path)
    return parse_family(_read(path), path.parent)


# ---------------------------------------------------------------- reports


def decimal(q: Fraction, digits: int = 12) -> str:
    """Decimal annotation, truncated toward zero."""
    q = Fraction(q)
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole = q.numerator // q.denominator
    frac = q - whole
    scaled = frac.numerator * 10**digits // frac.denominator
    return f"{sign}{whole}.{scaled:0{digits}d}"


def certificate_report(result) -> dict:
    if result.verdict == "certified":
        return {
            "verdict": "certified",
            "members": len(result.family),
            "checked_pairs": result.checked_pairs,
            "attainment": [list(p) for p in result.attainment],
            "constancy": [
                {"member": result.family[i].name, "on": result.family[j].name, "value": format_rational(v)}
                for (i, j), v in sorted(result.constancy.items(), key=lambda t: (t[0][1], t[0][0]))
            ],
            "scope": result.scope,
        }
    return {
        "verdict": "violated",
        "pair": list(result.pair),
        "sign_vector": list(result.sign_vector),
        "excess": format_rational(result.excess),
        "distance": format_rational(result.distance),
        "quotient": format_rational(result.quotient),
        "quotient_decimal": decimal(result.quotient),
    }


def not_normalized_report(exc) -> dict:
    return {"verdict": "not-normalized", "member": exc.member, "norm": format_rational(exc.norm)}


def _opt(v):
    return None if v is None else format_rational(v)


def trace_report(result) -> dict:
    fam = result.family if hasattr(result, "family") else None
    if hasattr(result, "coefficients"):
        name = (lambda i: None if i is None else fam[i].name)
        return {
            "verdict": "refuted",
            "mode": result.mode,
            "color": result.color,
            "n0": name(result.n0),
            "m0": name(result.m0),
            "delta": result.delta,
            "coefficients": [format_rational(c) for c in result.coefficients],
            "pair": list(result.pair),
            "constant": _opt(result.constant),
            "margin": _opt(result.margin),
            "kstar": result.kstar,
            "quotient": format_rational(result.quotient),
            "quotient_decimal": decimal(result.quotient),
        }
    out = {
        "verdict": "inconclusive",
        "mode": result.mode,
        "color": result.color,
        "subset": list(result.subset),
        "reasons": [{"candidate": c, "failed": why} for c, why in result.reasons],
    }
    ce = result.counterexample
    if ce is not None:
        out["counterexample"] = {
            "member": ce.i,
            "on": ce.j,
            "pair": list(ce.pair),
            "values": [format_rational(v) for v in ce.values],
        }
    return out


def dump_report(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- helpers


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8")
