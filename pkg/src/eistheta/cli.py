"""Command-line front end: special-cycle enumeration, lifts by both routes, verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 route disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DISAGREE = 0, 1, 2, 3
SUITES = ("arith", "cycles", "modsym", "theta", "routes", "all")
ROUTES = ("geometric", "spectral", "both")
OUTPUT_DIR_ENV = "EISTHETA_OUTPUT_DIR"


class UsageError(ValueError):
    """Invalid command-line or configuration input."""


@dataclass
class RunConfig:
    """Validated run parameters.  Defaults: precision 20, tolerance 1e-6, seed 0, JSON output."""

    command: str
    p: int | None = None
    N: int | None = None
    n: int | None = None
    precision: int = 20
    gamma: tuple[int, int, int, int] | None = None
    disc: int | None = None
    index: int = 0
    route: str = "both"
    suite: str = "all"
    tolerance: float = 1e-6
    output: str | None = None
    fmt: str = "json"
    seed: int = 0
    count_only: bool = False

    def validate(self) -> "RunConfig":
        if self.fmt not in ("json", "csv"):
            raise UsageError("output format must be json or csv")
        if self.precision < 1:
            raise UsageError("precision must be positive")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.command == "cycles":
            if self.n is None or self.n < 1:
                raise UsageError("cycles needs --n >= 1")
            if (self.N is None) == (self.p is None):
                raise UsageError("cycles needs exactly one of --N or --p")
            if self.N is not None and self.N < 1:
                raise UsageError("N must be positive")
        elif self.command == "lift":
            if self.p is None:
                raise UsageError("lift needs --p")
            if (self.gamma is None) == (self.disc is None):
                raise UsageError("lift needs exactly one of --gamma or --disc")
            if self.route not in ROUTES:
                raise UsageError(f"route must be one of {ROUTES}")
        elif self.command == "verify":
            if self.suite not in SUITES:
                raise UsageError(f"suite must be one of {SUITES}")
        if self.p is not None:
            from .core_arith import is_prime

            if not is_prime(self.p):
                raise UsageError("p must be prime")
        return self


# ---------------------------------------------------------------------------
# configuration file and argument parsing


def read_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment; keys mirror the long flag names."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _parse_gamma(text: str) -> tuple[int, int, int, int]:
    parts = [x for x in text.replace(";", ",").replace(" ", ",").split(",") if x]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("gamma needs four integers a,b,c,d")
    try:
        a, b, c, d = (int(x) for x in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return a, b, c, d


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


_CONFIG_TYPES: dict[str, Callable[[str], Any]] = {
    "p": int,
    "N": int,
    "n": int,
    "precision": int,
    "Q": int,
    "gamma": _parse_gamma,
    "disc": int,
    "index": int,
    "route": str,
    "suite": str,
    "tolerance": float,
    "output": str,
    "format": str,
    "seed": int,
    "count_only": _parse_bool,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit code 2 with a one-line message
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file whose keys mirror the long flags")
    common.add_argument("--output", "-o", help="write the report here (relative paths honour $%s)" % OUTPUT_DIR_ENV)
    sel = common.add_mutually_exclusive_group()
    sel.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    sel.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output")
    common.add_argument("--seed", type=int, help="seed for randomised checks (default 0)")
    common.add_argument("--tolerance", type=float, help="numeric tolerance (default 1e-6)")

    parser = _Parser(prog="eistheta", description="Eisenstein theta lift toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cycles", parents=[common], help="orbit representatives or special-cycle components")
    c.add_argument("--N", type=int, help="rank: list SL_N(Z) orbit representatives of B(v) = n")
    c.add_argument("--p", type=int, help="level: list the geodesic components of Z_n on Y_0(p)")
    c.add_argument("--n", type=int)
    c.add_argument("--count-only", action="store_true", default=None)

    lf = sub.add_parser("lift", parents=[common], help="q-expansion of the lift of a closed geodesic")
    lf.add_argument("--p", type=int)
    g = lf.add_mutually_exclusive_group()
    g.add_argument("--gamma", type=_parse_gamma, help="hyperbolic a,b,c,d in Gamma_0(p)")
    g.add_argument("--disc", type=int, help="discriminant; the cycle is the automorph of a level-p form")
    lf.add_argument("--index", type=int, help="which form of the given discriminant (default 0)")
    lf.add_argument("--Q", "--precision", dest="precision", type=int, help="q-expansion precision (default 20)")
    lf.add_argument("--route", choices=ROUTES)

    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("--suite", choices=SUITES)
    v.add_argument("--p", type=int, help="level for the routes suite (default 11)")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    args = build_parser().parse_args(list(argv))
    values = {k: v for k, v in vars(args).items() if v is not None}
    if args.config:
        try:
            file_values = read_config_file(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        for k, raw in file_values.items():
            if k not in _CONFIG_TYPES:
                raise UsageError(f"unknown config key {k!r}")
            key = {"Q": "precision"}.get(k, k)
            if key not in values:
                try:
                    values[key] = _CONFIG_TYPES[k](raw)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"bad value for {k}: {exc}") from None
    values.pop("config", None)
    if "format" in values:
        values["fmt"] = values.pop("format")
    cfg = RunConfig(**values)
    return cfg.validate()


# ---------------------------------------------------------------------------
# output


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def render(payload: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    buf = io.StringIO()
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(_jsonable(v)) if isinstance(v, (list, tuple, dict)) else _jsonable(v) for k, v in r.items()})
    return buf.getvalue().rstrip("\n")


def emit(cfg: RunConfig, payload: dict, rows: list[dict], out: Any) -> None:
    text = render(payload, rows, cfg.fmt)
    if cfg.output:
        path = cfg.output
        base = os.environ.get(OUTPUT_DIR_ENV)
        if base and not os.path.isabs(path):
            path = os.path.join(base, path)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=out)


# ---------------------------------------------------------------------------
# commands


def cmd_cycles(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    from . import lattice_cycles as lc

    assert cfg.n is not None
    if cfg.N is not None:
        reps = lc.orbit_representatives(cfg.N, cfg.n)
        rows = [{"N": cfg.N, "n": cfg.n, "D": r.D, "w1": r.w1, "r": list(r.r)} for r in reps]
    else:
        assert cfg.p is not None
        cyc = lc.special_cycle_components_n2(cfg.p, lc.make_test_function_gamma0(cfg.p, 2), cfg.n)
        rows = [
            {"p": cfg.p, "n": cfg.n, "d": d, "d_prime": dp, "b": b, "start": comp.start, "end": "oo"}
            for (d, dp, b), comp in zip(cyc.reps, cyc.components)
        ]
    if cfg.count_only:
        return {"count": len(rows)}, [{"count": len(rows)}], EXIT_OK
    return {"count": len(rows), "rows": rows}, rows, EXIT_OK


def _cycle(cfg: RunConfig):
    from . import lattice_cycles as lc

    assert cfg.p is not None
    if cfg.gamma is not None:
        return lc.ClosedGeodesic(cfg.gamma, cfg.p)
    assert cfg.disc is not None
    return lc.automorph(cfg.disc, cfg.p, cfg.index)


def cmd_lift(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    from .geometric_lift import geometric_qexpansion
    from .spectral_lift import spectral_basis, spectral_qexpansion

    assert cfg.p is not None
    basis = spectral_basis(cfg.p, max(cfg.precision, 20)) if cfg.route != "geometric" else None
    Z = _cycle(cfg)
    results = {}
    if cfg.route in ("geometric", "both"):
        results["geometric"] = geometric_qexpansion(Z, cfg.p, Q=cfg.precision)
    if basis is not None:
        results["spectral"] = spectral_qexpansion(Z, basis, cfg.precision)
    payload: dict[str, Any] = {"p": Z.p, "gamma": list(Z.gamma), "results": [r.to_dict() for r in results.values()]}
    rows = [
        {"route": name, "p": Z.p, "gamma": list(Z.gamma), "n": k, "coefficient": r.coeffs[k]}
        for name, r in results.items()
        for k in range(cfg.precision + 1)
    ]
    code = EXIT_OK
    if cfg.route == "both":
        equal = results["geometric"].coeffs == results["spectral"].coeffs
        payload["verdict"] = "EQUAL" if equal else "DIFFERENT"
        if not equal:
            code = EXIT_DISAGREE
    return payload, rows, code


# ---------------------------------------------------------------------------
# verification suites


@dataclass
class Check:
    suite: str
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)


def _suite_arith(cfg: RunConfig, rng: random.Random) -> list[Check]:
    from .core_arith import dedekind_sum, dedekind_sum_naive, hermite_eval, sigma1_p

    out = []
    bad = None
    for d in range(2, 9):
        for t in (rng.uniform(-2, 2) for _ in range(5)):
            lhs = hermite_eval(d, t)
            rhs = 2 * t * hermite_eval(d - 1, t) - 2 * (d - 1) * hermite_eval(d - 2, t)
            if abs(lhs - rhs) > cfg.tolerance * max(1.0, abs(lhs)):
                bad = bad or {"d": d, "t": t, "lhs": lhs, "rhs": rhs}
    out.append(Check("arith", "hermite three-term recurrence", bad is None, bad or {}))
    bad = None
    for c in range(1, 30):
        for d in range(1, 30):
            if math.gcd(c, d) != 1:
                continue
            if dedekind_sum(d, c) != dedekind_sum_naive(d, c):
                bad = bad or {"d": d, "c": c}
            if c > 1 and d > 1:
                recip = dedekind_sum(d, c) + dedekind_sum(c, d)
                expect = Fraction(-1, 4) + Fraction(c * c + d * d + 1, 12 * c * d)
                if recip != expect:
                    bad = bad or {"reciprocity": [c, d]}
    out.append(Check("arith", "dedekind sum: fast = naive, reciprocity", bad is None, bad or {}))
    bad = None
    for p in (3, 11):
        for m in range(1, 25):
            for n in range(1, 25):
                if math.gcd(m, n) == 1 and sigma1_p(m * n, p) != sigma1_p(m, p) * sigma1_p(n, p):
                    bad = bad or {"p": p, "m": m, "n": n}
        for k in range(1, 4):
            if sigma1_p(p**k, p) != 1:
                bad = bad or {"p": p, "power": k}
    out.append(Check("arith", "sigma1 prime to p: multiplicative, trivial on p-powers", bad is None, bad or {}))
    return out


def _suite_cycles(cfg: RunConfig, rng: random.Random) -> list[Check]:
    from .core_arith import divisors
    from .lattice_cycles import brute_force_orbits, orbit_representatives

    bad = None
    for N in (2, 3):
        for n in range(1, 6):
            reps = orbit_representatives(N, n)
            if set(reps) != brute_force_orbits(N, n):
                bad = bad or {"N": N, "n": n, "kind": "brute force"}
            if len(reps) != sum(d ** (N - 1) for d in divisors(n)):
                bad = bad or {"N": N, "n": n, "kind": "count"}
    return [Check("cycles", "orbit representatives vs brute force and divisor count", bad is None, bad or {})]


def _suite_modsym(cfg: RunConfig, rng: random.Random) -> list[Check]:
    from . import modsym as ms
    from .linalg import matmul

    out = []
    space = ms.build_space(11)
    forms = ms.supported_eigenforms(11, 10)
    expect = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2]
    got = [forms[0].a(n) for n in range(1, 11)] if forms else []
    out.append(Check("modsym", "level 11 eigenvalues", got == expect, {"got": got, "expected": expect}))
    T2, T3 = space.hecke_matrix(2), space.hecke_matrix(3)
    out.append(Check("modsym", "T2 T3 = T3 T2 at level 11", matmul(T2, T3) == matmul(T3, T2)))
    S = space.star_matrix()
    ident = [[Fraction(int(i == j)) for j in range(len(S))] for i in range(len(S))]
    out.append(Check("modsym", "star involution squares to 1", matmul(S, S) == ident))
    return out


def _suite_theta(cfg: RunConfig, rng: random.Random) -> list[Check]:
    from . import theta_numeric as tn
    from .lattice_cycles import make_point_test_function, make_test_function_gamma0

    out = []
    worst, wpt = 0.0, None
    for _ in range(10):
        z = tn.SymSpacePoint(2, math.exp(rng.uniform(-0.5, 0.5)), rng.uniform(-1, 1), math.exp(rng.uniform(-0.5, 0.5)))
        v = [rng.uniform(-1, 1) for _ in range(4)]
        r = max(tn.closedness_residual(z, v), tn.transgression_checks(z, v)["max"])
        if r > worst:
            worst, wpt = r, {"z": z.coords(), "v": v}
    out.append(Check("theta", "closedness and transgression (N=2)", worst <= cfg.tolerance, {"max_residual": worst, "point": wpt}))

    chi = make_point_test_function(3, (1,))
    spec = tn.TruncationSpec(eps=1e-10)
    for _ in range(2):
        z = tn.SymSpacePoint(1, math.exp(rng.uniform(-0.5, 0.5)))
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5))
        a, _ = tn.theta_sum(z, tau, chi, spec, variant="direct")
        b, _ = tn.theta_sum(z, tau, chi, spec, variant="dual")
        diff = a.max_abs_diff(b)
        out.append(
            Check("theta", "Poisson summation (N=1)", diff <= 2 * spec.eps, {"u": z.u, "tau": tau, "lhs": a.norm(), "rhs": b.norm(), "absdiff": diff})
        )

    for N, s, chi in ((1, 2.0, make_point_test_function(3, (1,))), (2, 4.0, make_test_function_gamma0(3, 2))):
        z = tn.SymSpacePoint(N, 1.0, 0.3, 1.2) if N == 2 else tn.SymSpacePoint(1, 1.0)
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.2))
        lhs, spec_used = tn.pushforward_u(z, tau, chi, s, tn.TruncationSpec(eps=1e-9))
        rhs = tn.eisenstein_eval(z, tau, s, chi)
        rel = lhs.rel_diff(rhs)
        out.append(
            Check(
                "theta",
                f"pushforward = Eisenstein form (N={N}, s={s:g})",
                rel <= cfg.tolerance,
                {"tau": tau, "lhs": lhs.norm(), "rhs": rhs.norm(), "reldiff": rel, "tail_bound": spec_used.tail_bound},
            )
        )
    return out


def _suite_routes(cfg: RunConfig, rng: random.Random) -> list[Check]:
    from .geometric_lift import geometric_qexpansion
    from .lattice_cycles import automorph
    from .spectral_lift import spectral_basis, spectral_qexpansion

    p = cfg.p or 11
    discs = {11: (12, 44, 45), 37: (120, 136)}.get(p)
    basis = spectral_basis(p, 20)
    cycles = [automorph(D, p) for D in discs] if discs else []
    if not cycles:
        D = 5
        while len(cycles) < 3 and D < 400:
            try:
                Z = automorph(D, p)
                if geometric_qexpansion(Z, p, Q=3).coeffs.is_zero():
                    raise ValueError
                cycles.append(Z)
            except ValueError:
                pass
            D += 1
    out = []
    for Z in cycles:
        g = geometric_qexpansion(Z, p, Q=cfg.precision)
        s = spectral_qexpansion(Z, basis, cfg.precision)
        out.append(Check("routes", f"two-route equality gamma={Z.gamma}", g.coeffs == s.coeffs, {"p": p, "gamma": Z.gamma}))
    return out


_SUITES: dict[str, Callable[[RunConfig, random.Random], list[Check]]] = {
    "arith": _suite_arith,
    "cycles": _suite_cycles,
    "modsym": _suite_modsym,
    "theta": _suite_theta,
    "routes": _suite_routes,
}


def cmd_verify(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    names = list(_SUITES) if cfg.suite == "all" else [cfg.suite]
    checks: list[Check] = []
    for name in names:
        checks.extend(_SUITES[name](cfg, random.Random(cfg.seed)))
    rows = [{"suite": c.suite, "check": c.name, "ok": c.ok, **{k: v for k, v in c.detail.items()}} for c in checks]
    failed = [c for c in checks if not c.ok]
    payload: dict[str, Any] = {"seed": cfg.seed, "passed": not failed, "checks": [asdict(c) for c in checks]}
    if failed:
        payload["first_failure"] = asdict(failed[0])
    return payload, rows, EXIT_FAIL if failed else EXIT_OK


_COMMANDS = {"cycles": cmd_cycles, "lift": cmd_lift, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None, out: Any = None, err: Any = None) -> int:
    from .core_arith import InvalidInputError
    from .lattice_cycles import EmptyCycleError, NotRepresentedError, UnsupportedError
    from .modsym import UnsupportedLevelError

    out = out or sys.stdout
    err = err or sys.stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        payload, rows, code = _COMMANDS[cfg.command](cfg)
    except (UsageError, InvalidInputError, UnsupportedLevelError, UnsupportedError, NotRepresentedError, EmptyCycleError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    emit(cfg, payload, rows, out)
    if code == EXIT_FAIL:
        first = payload.get("first_failure", {})
        print(f"verification failed: {first.get('name')} {json.dumps(_jsonable(first.get('detail', {})))}", file=err)
    elif code == EXIT_DISAGREE:
        print("routes disagree", file=err)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
