"""Command-line front end.

Output is JSON on stdout unless ``--text`` is given; diagnostics go to
stderr.  Exit status is 0 when every check passes, 1 on a verification
failure and 2 on a usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import acceptance
from .coeff_ring import is_prime
from .coop_algebra import (
    CoopAlgebra, additive_loop_height, derive_relations, kn_self_relation, pi, rw_check,
    unstable_height_bounds,
)
from .fgl import PRESETS, fgl_kn, load_law, make_law
from .power_series import Series
from .split_deloop import (
    IdempotentS, StableClass, deloop_component, destabilise, sigma_power, stable_equal,
    verify_idempotent,
)

LAWS = tuple(PRESETS) + ("file",)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    p: int
    n: int
    precision: int
    law: str
    output: str
    input_path: str | None = None
    h: int = 1
    seed: int = 0

    def validate(self):
        if not is_prime(self.p) or self.p == 2:
            raise UsageError(f"--p must be an odd prime, got {self.p}")
        if self.n < 1:
            raise UsageError(f"--n must be at least 1, got {self.n}")
        if self.precision < self.p**self.n:
            raise UsageError(f"--prec must be at least p^n = {self.p ** self.n}, got {self.precision}")
        if self.law not in LAWS:
            raise UsageError(f"--law must be one of {LAWS}")
        if self.law == "file" and not self.input_path:
            raise UsageError("--law file needs --file PATH")
        if self.h < 1:
            raise UsageError("--h must be positive")
        return self

    @classmethod
    def from_args(cls, args, default_law: str = "honda") -> "RunConfig":
        p, n = args.p, args.n
        prec = args.prec if args.prec is not None else p ** (n + 1)
        law = "file" if args.file and args.law is None else (args.law or default_law)
        out = "text" if args.text and not args.json else "json"
        return cls(p, n, prec, law, out, args.file, args.h, args.seed).validate()


def _law(cfg: RunConfig, check: bool = True):
    if cfg.law == "file":
        try:
            with open(cfg.input_path) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {cfg.input_path}: {exc}") from exc
        obj = obj.get("law", obj)
        return load_law(obj, check=check)
    return make_law(cfg.law, cfg.p, cfg.n, cfg.precision)


def _emit(cfg: RunConfig, payload: dict, text: str | list[str]):
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text if isinstance(text, str) else "\n".join(text))


# fgl ---------------------------------------------------------------------------

def cmd_fgl(cfg: RunConfig, args) -> int:
    what = args.what
    F = _law(cfg, check=what != "check")
    if what == "check":
        rep = F.check_axioms()
        payload = {"law": F.name, "precision": F.precision, "ok": rep.ok, **rep.to_json()}
        lines = [f"{k}: {'pass' if v['ok'] else 'fail at ' + v['where']}"
                 for k, v in rep.to_json().items() if k != "ok"]
        _emit(cfg, payload, lines)
        return 0 if rep.ok else 1
    if what == "nseries":
        s = F.n_series(args.m)
        _emit(cfg, {"m": args.m, "series": str(s)}, str(s))
        return 0
    if what == "tail":
        R1, R2 = F.tail_decompose()
        ok = _tail_ok(F, R1, R2)
        _emit(cfg, {"R1": str(R1), "R2": str(R2), "ok": ok}, [f"R1 = {R1}", f"R2 = {R2}"])
        return 0 if ok else 1
    try:
        data = F.extract_v()
    except ValueError as exc:
        print(f"v-extraction failed: {exc}", file=sys.stderr)
        return 1
    if what == "pseries":
        _emit(cfg, {"series": str(data.p_series)}, str(data.p_series))
        return 0
    if what == "vcoeffs":
        ok = F.reassemble(data) == data.p_series
        vs = {str(i): str(c) for i, c in sorted(data.v_coeffs.items())}
        _emit(cfg, {"v_coeffs": vs, "reassembles": ok}, [f"v{i} = {c}" for i, c in vs.items()])
        return 0 if ok else 1
    # height
    _emit(cfg, {"height": data.height_str, "search_bound": data.search_bound},
          f"height {data.height_str} (searched i <= {data.search_bound})")
    return 0


def _tail_ok(F, R1, R2) -> bool:
    v1, v2 = F.vars
    N = F.precision
    x1 = Series.var(F.base, F.vars, v1, N)
    x2 = Series.var(F.base, F.vars, v2, N)
    lift = lambda R: Series(F.base, F.vars, N, R.truncate(N - 1).terms)  # noqa: E731
    return x1 + x2 * lift(R1) == F.series and x2 + x1 * lift(R2) == F.series


# coop --------------------------------------------------------------------------

def cmd_coop(cfg: RunConfig, args) -> int:
    p, n, N = cfg.p, cfg.n, cfg.precision
    what = args.what
    if what == "bseries":
        alg = CoopAlgebra(fgl_kn(p, n, 1).base, p, "unstable")
        b = alg.b_series(N)
        _emit(cfg, {"realm": alg.realm, "series": str(b)}, str(b))
        return 0
    if what == "rwcheck":
        E = fgl_kn(p, n, N).extract_v()
        F = _law(cfg).extract_v()
        alg = CoopAlgebra(E.p_series.base, p, "additive")
        rep = rw_check(E, F, N, alg)
        _emit(cfg, rep, [f"{k}: {v}" for k, v in rep.items()])
        return 0 if rep["ok"] else 1
    if what == "derive":
        d = derive_relations(p, n, N)
        _emit(cfg, d.to_json(), d.relations.describe())
        return 0
    # height
    d = derive_relations(p, n, N)
    base = additive_loop_height(d.relations, None, p, n)
    bounds = unstable_height_bounds(base.h, p, n)
    selfh = additive_loop_height(d.relations, kn_self_relation(d.algebra, n), p, n)
    payload = {
        "additive_height": base.h, "bound": 2 * pi(p, n), "attains_bound": base.attains_bound,
        "unstable_bounds": [bounds.lo, bounds.hi], "global_unstable_bound": bounds.global_hi,
        "with_kn_relation": selfh.h, "certificate": base.certificate,
    }
    _emit(cfg, payload, [
        f"additive loop height (derived relations only): {base.h} (bound {2 * pi(p, n)})",
        f"unstable loop height in [{bounds.lo}, {bounds.hi}], global bound {bounds.global_hi}",
        f"with the K({n}) self relation: {selfh.h}",
    ])
    return 0 if base.h is not None else 1


# split -------------------------------------------------------------------------

def cmd_split(cfg: RunConfig, args) -> int:
    try:
        S = IdempotentS(cfg.p, cfg.n, cfg.h)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rel = S.height_relations()
    if args.what == "verify":
        rep = verify_idempotent(S, rel)
        lines = [f"{c.name}: {'pass' if c.ok else 'fail, residue ' + c.difference}" for c in rep.checks]
        _emit(cfg, rep.to_json(), lines)
        return 0 if rep.ok else 1
    alg = S.algebra
    t = args.t
    if t < 0:
        raise UsageError("--t must be non-negative")
    c = StableClass(t, alg.e(t))
    k = args.k if args.k is not None else 0
    d = destabilise(c, k, S, rel)
    back = stable_equal(StableClass(k, d.element), c, rel, S.h)
    image = sigma_power(d.preimage, d.preimage_level, S.h, rel) == d.element
    payload = {"class": f"e^{t} at level {t}", **d.to_json(),
               "stabilises_back": back, "in_sigma_h_image": image}
    _emit(cfg, payload, [f"delta = {d.element} at level {k}",
                         f"Sigma^{S.h} preimage {d.preimage}",
                         f"stabilises back: {back}, in image: {image}"])
    return 0 if back and image else 1


# deloop / verify-all -------------------------------------------------------------

def cmd_deloop(cfg: RunConfig, args) -> int:
    c = deloop_component(args.k, args.l, args.m, cfg.h, cfg.p, cfg.n)
    _emit(cfg, c.to_json(), f"i = {c.i}, j = {c.j}, sign = {c.sign:+d}")
    return 0 if c.valid() else 1


def cmd_verify_all(cfg: RunConfig, args) -> int:
    results = acceptance.run_all(cfg.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.ok for r in results)
    _emit(cfg, {"ok": ok, "criteria": [r.to_json() for r in results]}, [r.line() for r in results])
    return 0 if ok else 1


# parser --------------------------------------------------------------------------

def _common(sp):
    sp.add_argument("--p", type=int, default=3, help="odd prime")
    sp.add_argument("--n", type=int, default=1, help="height n >= 1")
    sp.add_argument("--prec", type=int, default=None, help="truncation order, default p^(n+1)")
    sp.add_argument("--h", type=int, default=1, help="loop height")
    sp.add_argument("--law", choices=LAWS, default=None, help="formal group law preset")
    sp.add_argument("--file", default=None, help="law JSON for --law file")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true", help="JSON output (the default)")
    sp.add_argument("--text", action="store_true", help="human-readable output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chromalg", description="Formal group laws, co-operations and delooping.")
    sub = ap.add_subparsers(dest="command", required=True)

    fgl = sub.add_parser("fgl", help="formal group law computations")
    fsub = fgl.add_subparsers(dest="what", required=True)
    for name in ("check", "nseries", "pseries", "vcoeffs", "height", "tail"):
        sp = fsub.add_parser(name)
        _common(sp)
        if name == "nseries":
            sp.add_argument("--m", type=int, required=True, help="multiplier in [m](x)")
        sp.set_defaults(func=cmd_fgl)

    coop = sub.add_parser("coop", help="co-operation relations")
    csub = coop.add_subparsers(dest="what", required=True)
    for name in ("bseries", "rwcheck", "derive", "height"):
        sp = csub.add_parser(name)
        _common(sp)
        sp.set_defaults(func=cmd_coop)

    split = sub.add_parser("split", help="idempotent splitting")
    ssub = split.add_subparsers(dest="what", required=True)
    sp = ssub.add_parser("verify")
    _common(sp)
    sp.set_defaults(func=cmd_split)
    sp = ssub.add_parser("destab")
    _common(sp)
    sp.add_argument("--t", type=int, default=0, help="destabilise the class of e^t")
    sp.add_argument("--k", type=int, default=None, help="target level")
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("deloop", help="components of a delooped operation")
    _common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.set_defaults(func=cmd_deloop)

    sp = sub.add_parser("verify-all", help="run the acceptance suite")
    _common(sp)
    sp.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args, "kn" if args.command == "coop" else "honda")
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
