"""Command-line entry point.

Exit codes: 0 success or certified, 1 violation or refutation found,
2 input or precondition error, 3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from . import io
from .certify import certify_c0
from .constructions import (
    SpikeSpec,
    TentSpec,
    case1_select,
    gamma_compose,
    part_extremes,
    spike_family,
    tent_family,
)
from .errors import InternalConsistencyError, NotNormalizedError, SnalipError
from .generators import make_generator
from .lipschitz import lip_norm, sna_witnesses
from .metric import validate_metric
from .petr import discreteness_check, petr_extract
from .rational import format_rational, parse_rational
from .refuter import RefutationTrace, attack

OK, FOUND, BAD_INPUT, INTERNAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    space: str | None = None
    family: str | None = None
    out: str | None = None
    mode: str = "generic"
    n: int | None = None
    kind: str | None = None
    tau: Fraction = Fraction(1, 2)
    seed: int = 0
    levels: int | None = None
    count: int | None = None
    gap: Fraction | None = None
    closeness: Fraction | None = None
    pairs: list = field(default_factory=list)
    marks: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    form: str = "explicit"
    validate: bool = True
    only: list = field(default_factory=list)


# ---------------------------------------------------------------- argument parsing


def _rational(text):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pairs(text):
    out = []
    for item in text.split(","):
        a, sep, b = item.strip().partition(":")
        if not sep or not a or not b:
            raise argparse.ArgumentTypeError(f"pair {item!r} is not of the form x:y")
        out.append((a, b))
    return out


def _param(text):
    k, sep, v = text.partition("=")
    if not sep or not k:
        raise argparse.ArgumentTypeError(f"parameter {text!r} is not of the form key=value")
    return k, v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="snalip", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_, *flags):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", help="write the result here instead of stdout")
        for f in flags:
            f(p)
        return p

    def space(p, required=True):
        p.add_argument("--space", required=required, help="space file (or @name for a shipped example)")
        p.add_argument("--no-validate", dest="validate", action="store_false",
                       help="skip the exact metric-axiom check of the loaded space")

    def family(p):
        p.add_argument("--family", required=True, help="family file (or @name for a shipped example)")
        p.add_argument("--no-validate", dest="validate", action="store_false",
                       help="skip the exact metric-axiom check of the family's space")

    def kind(p, required=True, default=None):
        p.add_argument("--kind", required=required, default=default, help="generator kind (ud, proper, ...)")
        p.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE",
                       help="generator parameter, repeatable")
        p.add_argument("--gap", type=_rational, help="shorthand for --param gap=...")

    def levels(p, default=None):
        p.add_argument("--levels", type=int, default=default)

    def tau(p):
        p.add_argument("--tau", type=_rational, default=Fraction(1, 2))

    p = cmd("gen", "emit a truncated generator space", kind)
    p.add_argument("--n", type=int, required=True, help="number of points, base included")
    p.add_argument("--form", choices=("explicit", "generator"), default="explicit")

    cmd("lipnorm", "Lipschitz norm of every member", family)
    cmd("sna", "all attainment pairs of every member", family)
    cmd("certify", "exact c0 certificate or first violation", family)
    p = cmd("refute", "search for a combination of norm > 1", family)
    p.add_argument("--mode", choices=("ud", "proper", "generic"), default="generic")

    p = cmd("tent", "tent family on a space", space)
    p.add_argument("--pairs", type=_pairs, help="x:y,... (default: first and last point of each part)")

    p = cmd("spike", "spike family on a space or on the triple-cluster generator",
            lambda q: space(q, required=False), lambda q: kind(q, required=False), levels)
    p.add_argument("--pairs", type=_pairs, help="a:b,... spike pairs on --space")

    p = cmd("case1", "greedy case-1 tents on a shrinking-satellites generator",
            lambda q: kind(q, required=False, default="satellites"))
    p.add_argument("--count", type=int, required=True)

    p = cmd("gamma", "one tent per mark, paired within a closeness radius",
            space, lambda q: levels(q, 5), tau)
    p.add_argument("--closeness", type=_rational, required=True)
    p.add_argument("--marks", help="comma-separated marks (default: separated-net extraction on the space)")

    cmd("petr", "discrete subset through a hierarchy of separated nets",
        space, lambda q: levels(q, 5), tau)

    p = cmd("selftest", "run the acceptance criteria")
    p.add_argument("--seed", type=int, default=0, help="offset added to every criterion's seed")
    p.add_argument("--only", type=int, action="append", default=[], help="criterion number, repeatable")
    return ap


def config_from_args(ns) -> RunConfig:
    params = dict(getattr(ns, "param", []) or [])
    if getattr(ns, "gap", None) is not None:
        params["gap"] = format_rational(ns.gap)
    marks = [m.strip() for m in ns.marks.split(",")] if getattr(ns, "marks", None) else []
    return RunConfig(
        command=ns.command,
        space=getattr(ns, "space", None),
        family=getattr(ns, "family", None),
        out=ns.out if hasattr(ns, "out") else None,
        mode=getattr(ns, "mode", "generic"),
        n=getattr(ns, "n", None),
        kind=getattr(ns, "kind", None),
        tau=getattr(ns, "tau", Fraction(1, 2)),
        seed=getattr(ns, "seed", 0),
        levels=getattr(ns, "levels", None),
        count=getattr(ns, "count", None),
        gap=getattr(ns, "gap", None),
        closeness=getattr(ns, "closeness", None),
        pairs=getattr(ns, "pairs", None) or [],
        marks=marks,
        params=params,
        form=getattr(ns, "form", "explicit"),
        validate=getattr(ns, "validate", True),
        only=getattr(ns, "only", []),
    )


# ---------------------------------------------------------------- helpers


def _shipped(name: str) -> Path:
    path = resources.files("snalip") / "data" / f"{name}.json"
    if not path.is_file():
        raise SnalipError(f"no shipped example named {name!r}")
    return Path(str(path))


def _path(ref: str) -> Path:
    return _shipped(ref[1:]) if ref.startswith("@") else Path(ref)


def _check_space(space, cfg):
    if not cfg.validate:
        return
    rep = validate_metric(space)
    if not rep.ok:
        raise SnalipError(f"not a metric: {rep.violations[0]} ({len(rep.violations)} violation(s))")


def _load_space(cfg):
    space = io.load_space(_path(cfg.space))
    _check_space(space, cfg)
    return space


def _load_family(cfg):
    fam = io.load_family(_path(cfg.family))
    _check_space(fam.space, cfg)
    return fam


def _emit(text: str, cfg):
    if cfg.out:
        io.write_text(cfg.out, text)
    else:
        sys.stdout.write(text)


def _report(doc, cfg):
    _emit(io.dump_report(doc), cfg)


def _family_out(fam, cfg):
    _emit(io.dump_family(fam), cfg)


# ---------------------------------------------------------------- commands


def _gen(cfg):
    if cfg.n is None:
        raise SnalipError("--n is required")
    space = make_generator(cfg.kind, cfg.params).truncate(cfg.n)
    _emit(io.dump_space(space, cfg.form), cfg)
    return OK


def _lipnorm(cfg):
    fam = _load_family(cfg)
    _report({"members": [{"name": f.name, "norm": format_rational(lip_norm(f))} for f in fam]}, cfg)
    return OK


def _sna(cfg):
    fam = _load_family(cfg)
    doc = {"members": []}
    for f in fam:
        ws = sna_witnesses(f)
        doc["members"].append(
            {"name": f.name, "norm": format_rational(ws[0].ratio), "pairs": [[w.p, w.q] for w in ws]}
        )
    _report(doc, cfg)
    return OK


def _certify(cfg):
    fam = _load_family(cfg)
    try:
        res = certify_c0(fam)
    except NotNormalizedError as exc:
        _report(io.not_normalized_report(exc), cfg)
        return BAD_INPUT
    _report(io.certificate_report(res), cfg)
    return OK if res.verdict == "certified" else FOUND


def _refute(cfg):
    fam = _load_family(cfg)
    res = attack(fam, cfg.mode)
    _report(io.trace_report(res), cfg)
    return FOUND if isinstance(res, RefutationTrace) else OK


def _tent(cfg):
    space = _load_space(cfg)
    pairs = cfg.pairs or part_extremes(space)
    _family_out(tent_family(space, TentSpec(pairs)), cfg)
    return OK


def _spike(cfg):
    if cfg.space:
        space = _load_space(cfg)
        if not cfg.pairs:
            raise SnalipError("--pairs is required with --space")
        fam = spike_family(space, SpikeSpec.from_space(space, cfg.pairs))
    else:
        if cfg.kind not in (None, "triple", "triple_cluster"):
            raise SnalipError("spikes from a generator need --kind triple")
        gen = make_generator("triple", cfg.params)
        lv = cfg.levels or 8
        space = gen.truncate(1 + 3 * lv)
        pairs = cfg.pairs or [gen.pair(k) for k in range(1, lv + 1)]
        fam = spike_family(space, SpikeSpec.from_space(space, pairs, radii=gen))
    _family_out(fam, cfg)
    return OK


def _case1(cfg):
    gen = make_generator(cfg.kind or "satellites", cfg.params)
    sel = case1_select(gen, cfg.count)
    _family_out(sel.family, cfg)
    return OK


def _gamma(cfg):
    space = _load_space(cfg)
    marks = cfg.marks or petr_extract(space, cfg.levels or 5, cfg.tau)[0]
    _family_out(gamma_compose(space, marks, cfg.closeness), cfg)
    return OK


def _petr(cfg):
    space = _load_space(cfg)
    L, state = petr_extract(space, cfg.levels or 5, cfg.tau)
    rep = discreteness_check(L, state)
    doc = state.to_json()
    doc["discrete"] = rep.ok
    if rep.violation:
        p, q, d, need = rep.violation
        doc["violation"] = {"pair": [p, q], "distance": format_rational(d), "required": format_rational(need)}
    _report(doc, cfg)
    return OK if rep.ok else INTERNAL


def _selftest(cfg):
    from . import acceptance

    results = []
    for i, fn in enumerate(acceptance.CRITERIA, start=1):
        if cfg.only and i not in cfg.only:
            continue
        kwargs = {}
        if "seed" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
            kwargs["seed"] = fn.__defaults__[0] + cfg.seed
        try:
            r = fn(**kwargs)
        except Exception as exc:  # reported as a failing line
            r = acceptance.CriterionResult(i, fn.__name__, False, f"raised {type(exc).__name__}: {exc}", 0.0)
        results.append(r)
        print(r.line(), flush=True)
    if cfg.out:
        io.write_text(
            cfg.out,
            json.dumps([{"criterion": r.number, "ok": r.ok, "detail": r.detail} for r in results], indent=2)
            + "\n",
        )
    return OK if all(r.ok for r in results) else FOUND


COMMANDS = {
    "gen": _gen,
    "lipnorm": _lipnorm,
    "sna": _sna,
    "certify": _certify,
    "refute": _refute,
    "tent": _tent,
    "spike": _spike,
    "case1": _case1,
    "gamma": _gamma,
    "petr": _petr,
    "selftest": _selftest,
}


def run(cfg: RunConfig) -> int:
    try:
        return COMMANDS[cfg.command](cfg)
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return INTERNAL
    except (SnalipError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except Exception as exc:  # anything unplanned is a bug, not a verdict
        print(f"internal failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
