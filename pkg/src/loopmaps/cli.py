"""Command-line driver: `loopmaps <verb> [flags]`.

Every verb writes one CSV (one header line) or one JSON object carrying ``schema_version``.
Floats are printed with 17 significant digits so identical runs give identical bytes.
Exit status: 0 ok, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from fractions import Fraction

import numpy as np

from . import critline, gasket, mapcount, ringgen, twistline

SCHEMA_VERSION = 1
VERBS = (
    "rings",
    "enumerate",
    "fixed-point",
    "critical-line",
    "dilute-point",
    "density",
    "twist-line",
    "classify",
    "verify",
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: float | None = None
    b: float | None = None
    a: str | None = None
    h: str | None = None
    h1: str | None = None
    h2: str | None = None
    g: float | None = None
    family: str | None = None
    weights: str | None = None
    kmax: int = 6
    pmax: int = 6
    order: int = 6
    K: int = 40
    tol: float = 1e-10
    grid: int = 200
    param: float | None = None
    point: str = "dilute"
    model: str = "bending"
    cut: str | None = None
    v_max: float | None = None
    out: str | None = None
    json: bool = False

    def validate(self) -> None:
        if self.command not in VERBS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.n is not None and self.b is not None:
            raise UsageError("give n or b, not both")
        if self.tol <= 0:
            raise UsageError("tolerances must be positive")
        for name in ("kmax", "pmax", "order", "K", "grid"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be >= 1")


# -- formatting -------------------------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, complex):
        x = x.real
    x = float(x)
    if x == 0:
        return "0"
    return format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, complex):
        obj = obj.real
    return float(fmt(obj))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _json_text(obj: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **_jsonable(obj)}, indent=2) + "\n"


# -- parameter helpers ------------------------------------------------------------------------


def _exact(s):
    if s is None:
        return None
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {s!r}") from exc


def _n_bending(cfg: RunConfig) -> float:
    if cfg.n is None and cfg.b is None:
        raise UsageError("give n or b")
    n = cfg.n if cfg.n is not None else critline.n_of_b(cfg.b)
    if not 0 < n < 2:
        raise UsageError("the bending model needs 0 < n < 2 (0 < b < 1/2)")
    return n


def _n_twist(cfg: RunConfig) -> float:
    # twisting convention: pi b = arccos n
    if cfg.n is None and cfg.b is None:
        raise UsageError("give n or b")
    n = cfg.n if cfg.n is not None else twistline.n_twist(cfg.b)
    if not 0 < n < 1:
        raise UsageError("the twisting model needs 0 < n < 1 (0 < b < 1/2)")
    return n


def _need(cfg: RunConfig, *names):
    for nm in names:
        if getattr(cfg, nm) is None:
            raise UsageError(f"--{nm.replace('_', '-')} is required for {cfg.command}")


def _family(cfg: RunConfig, exact: bool = True):
    conv = _exact if exact else (lambda s: None if s is None else float(Fraction(str(s))))
    fam = (cfg.family or "").lower()
    try:
        if fam == "triangular":
            _need(cfg, "h")
            return ringgen.Triangular(conv(cfg.h))
        if fam == "quadrangular":
            _need(cfg, "h1", "h2")
            return ringgen.Quadrangular(conv(cfg.h1), conv(cfg.h2))
        if fam == "rigid":
            _need(cfg, "h1")
            return ringgen.Rigid(conv(cfg.h1))
        if fam == "twisting":
            _need(cfg, "h2")
            return ringgen.Twisting(conv(cfg.h2))
        if fam == "bending":
            _need(cfg, "a", "h")
            return ringgen.Bending(conv(cfg.a), conv(cfg.h))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError("--family must be one of triangular, quadrangular, rigid, twisting, bending")


def _weights(cfg: RunConfig) -> dict:
    """'3:0.05,4:1/12' -> {3: Fraction(1, 20), 4: Fraction(1, 12)}."""
    _need(cfg, "weights")
    out = {}
    for part in cfg.weights.split(","):
        try:
            k, v = part.split(":")
            k = int(k)
        except ValueError as exc:
            raise UsageError(f"bad weight entry {part!r}; expected k:value") from exc
        if k < 1:
            raise UsageError("face degrees start at 1")
        out[k] = _exact(v)
        if out[k] < 0:
            raise UsageError("face weights must be non-negative")
    return out


# -- verbs ------------------------------------------------------------------------------------


def cmd_rings(cfg: RunConfig):
    fam = _family(cfg)
    rows = []
    for k in range(1, cfg.kmax + 1):
        for kp in range(0, cfg.kmax + 1):
            c = Fraction(ringgen.ring_coeff(fam, k, kp))
            rows.append((k, kp, c.numerator, c.denominator))
    return "csv", (("k", "kp", "coefficient_num", "coefficient_den"), rows)


def cmd_enumerate(cfg: RunConfig):
    # g_k = c_k t, so the order counts faces
    w = {k: v for k, v in _weights(cfg).items() if v}
    prof = mapcount.WeightProfile.formal(w)
    rows = []
    for p in range(0, cfg.pmax + 1):
        ser = mapcount.disk_series(prof, p, cfg.order)
        for e in range(cfg.order + 1):
            c = Fraction(ser.coeff(e))
            rows.append((p, e, c.numerator, c.denominator))
    return "csv", (("p", "order", "coefficient_num", "coefficient_den"), rows)


def _loop_model(cfg: RunConfig):
    _need(cfg, "n")
    if cfg.n < 0:
        raise UsageError("n must be >= 0")
    w = {k: float(v) for k, v in _weights(cfg).items()}
    return gasket.LoopModel(cfg.n, mapcount.WeightProfile.numeric(w), _family(cfg, exact=False))


def cmd_fixed_point(cfg: RunConfig):
    m = _loop_model(cfg)
    ew = gasket.fixed_point_weights(m, K=cfg.K, tol=cfg.tol)
    cut = mapcount.cut_endpoints(ew.profile)
    return "json", {
        "command": "fixed-point",
        "n": m.n,
        "g": list(ew.g),
        "iterations": ew.iterations,
        "residual": ew.residual,
        "tail": ew.tail,
        "gamma_minus": cut.gamma_minus,
        "gamma_plus": cut.gamma_plus,
    }


def _bending_a(cfg: RunConfig) -> float:
    _need(cfg, "a")
    a = float(_exact(cfg.a))
    if a <= 0:
        raise UsageError("a must be positive")
    return a


def cmd_critical_line(cfg: RunConfig):
    a, n = _bending_a(cfg), _n_bending(cfg)
    if cfg.grid < 2:
        raise UsageError("grid must be >= 2")
    pts = critline.line_points(a, n, cfg.grid)
    rows = [(p, s.g, s.h, s.kappa_2mb, s.phase) for p, s in pts]
    return "csv", (("param", "g", "h", "kappa_2mb", "phase"), rows)


def _solution_dict(s) -> dict:
    return {
        "a": s.a,
        "n": s.n,
        "b": s.b,
        "g": s.g,
        "h": s.h,
        "gamma_minus": s.gamma_minus,
        "gamma_plus": s.gamma_plus,
        "kappa_b": s.kappa_b,
        "kappa_2mb": s.kappa_2mb,
        "phase": s.phase,
    }


def cmd_dilute_point(cfg: RunConfig):
    a, n = _bending_a(cfg), _n_bending(cfg)
    s = critline.dilute_point(a, n)
    return "json", {"command": "dilute-point", **_solution_dict(s)}


def _bending_point(cfg, a, n):
    if cfg.param is not None:
        return critline.solution_at(a, n, cfg.param)
    if cfg.point == "dilute":
        return critline.dilute_point(a, n)
    if cfg.point == "dense":
        pts = critline.line_points(a, n, 21)
        return pts[10][1]
    raise UsageError("--point must be dilute or dense")


def _twist_point(cfg, n):
    if cfg.h2 is not None:
        return twistline.twist_solution(n, float(_exact(cfg.h2)))
    line = twistline.twist_critical_line(n)
    if cfg.point == "dilute":
        return line[0]
    if cfg.point == "dense":
        return line[len(line) // 2]
    raise UsageError("--point must be dilute or dense")


def cmd_density(cfg: RunConfig):
    if cfg.model == "twist":
        s = _twist_point(cfg, _n_twist(cfg))
        v_max = cfg.v_max or 12.0
        vs = np.linspace(0, v_max, cfg.grid + 1)[1:]
        rows = [(v, *twistline.twist_density(s, v)) for v in vs]
    elif cfg.model == "bending":
        s = _bending_point(cfg, _bending_a(cfg), _n_bending(cfg))
        v_max = cfg.v_max or critline.density_v_max(s)
        vs = np.linspace(0, v_max, cfg.grid + 1)[1:]
        rows = [(v, *critline.density_on_line(s, v)) for v in vs]
    else:
        raise UsageError("--model must be bending or twist")
    return "csv", (("v", "x", "rho"), rows)


def cmd_twist_line(cfg: RunConfig):
    n = _n_twist(cfg)
    line = twistline.twist_critical_line(n, points=cfg.grid)
    rows = [(s.h2, s.g, s.kappa_2mb, s.phase) for s in line]
    return "csv", (("h2", "g", "kappa_2mb", "phase"), rows)


def cmd_classify(cfg: RunConfig):
    fam = _family(cfg, exact=False)
    try:
        s = ringgen.involution_of(fam)
    except ringgen.UnsupportedModelError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.cut is not None:
        try:
            lo, hi = (float(t) for t in cfg.cut.split(","))
        except ValueError as exc:
            raise UsageError("--cut expects lo,hi") from exc
    else:
        m = _loop_model(cfg)
        ew = gasket.fixed_point_weights(m, K=cfg.K, tol=cfg.tol)
        c = mapcount.cut_endpoints(ew.profile)
        lo, hi = c.gamma_minus, c.gamma_plus
    case = ringgen.classify_configuration(s, (lo, hi))
    return "json", {
        "command": "classify",
        "case": case.label,
        "decreasing": case.decreasing,
        "involution": {"alpha": s.alpha, "beta": s.beta, "delta": s.delta},
        "cut": [lo, hi],
    }


# -- verify -----------------------------------------------------------------------------------


def _check_rings():
    fams = [
        ringgen.Triangular(Fraction(1, 3)),
        ringgen.Quadrangular(Fraction(1, 2), Fraction(1, 5)),
        ringgen.Rigid(Fraction(2, 7)),
        ringgen.Twisting(Fraction(1, 4)),
        ringgen.Bending(Fraction(3, 2), Fraction(1, 5)),
    ]
    bad = sum(
        ringgen.ring_coeff(f, k, kp) != ringgen.ring_bruteforce(f, k, kp)
        for f in fams
        for k in range(1, 7)
        for kp in range(0, 7 - k)
    )
    return bad == 0, f"{bad} mismatches"


def _check_catalan():
    w = mapcount.WeightProfile.formal({})
    cats = [math.comb(2 * m, m) // (m + 1) for m in range(1, 7)]
    got = [mapcount.disk_series(w, 2 * m, 1).coeff(0) for m in range(1, 7)]
    return got == cats, " ".join(str(int(c)) for c in got)


def _check_quadrangulation():
    st = mapcount.solve_rs(mapcount.WeightProfile.numeric({4: 1 / 12}), 1.0)
    return abs(st.R - 2) <= 1e-6, f"R = {st.R!r}"


def _check_zeta():
    b = 0.3
    eps = 1e-5
    res = eps * critline.zeta(b, eps)
    shift = critline.zeta(b, 0.4 + 1j * math.pi + 0.2j) + critline.zeta(b, 0.4 - 1j * math.pi + 0.2j)
    shift -= 2 * math.cos(math.pi * b) * critline.zeta(b, 0.4 + 0.2j)
    ok = abs(res - 1) <= 1e-9 and abs(shift) <= 1e-12
    return ok, f"residue {abs(res - 1):.2g}, shift {abs(shift):.2g}"


def _check_a1_line():
    g, h = critline.critical_line_a1(1.0, 1.5)
    ref = 1 / (2 * math.sqrt(2) * 3**0.75)
    return max(abs(g - ref), abs(h - ref)) <= 1e-12, f"g = {g!r}, h = {h!r}"


def _check_ising():
    s = critline.dilute_point(1.0, 1.0)
    g_ref = math.sqrt(5) / (2 * math.sqrt(2) * 7**0.75)
    h_ref = math.sqrt(20 / math.sqrt(7) - 5) / 12
    return max(abs(s.g - g_ref), abs(s.h - h_ref)) <= 1e-8, f"g = {s.g!r}, h = {s.h!r}"


def _check_twist():
    s = twistline.twist_critical_line(1e-13)[0]
    ok = abs(s.g - 1 / 12) <= 1e-10 and abs(s.h2 - 1 / 16) <= 1e-10
    d = twistline.twist_critical_line(twistline.n_twist(0.3))[5]
    res = max(twistline.twist_cut_residual(d, X) for X in np.linspace(0, d.Gamma, 9)[1:-1])
    return ok and res <= 1e-8, f"dilute ({s.g!r}, {s.h2!r}), cut residual {res:.2g}"


def _check_gasket():
    m = gasket.LoopModel(
        1.0, mapcount.WeightProfile.numeric({3: 0.05}), ringgen.Bending(2.0, 0.05)
    )
    ew = gasket.fixed_point_weights(m)
    cut = mapcount.cut_endpoints(ew.profile)
    worst = max(
        gasket.one_pole_residual(m, ew, x)
        for x in np.linspace(cut.gamma_minus, cut.gamma_plus, 7)[1:-1]
    )
    return worst <= 1e-5, f"one-pole residual {worst:.2g}"


CHECKS = [
    ("ring coefficients match brute force", _check_rings),
    ("tree disks are Catalan numbers", _check_catalan),
    ("quadrangulation critical point R = 2", _check_quadrangulation),
    ("zeta residue and shift identity", _check_zeta),
    ("a = 1 line through the percolation point", _check_a1_line),
    ("Ising dilute point", _check_ising),
    ("twisting dilute point and cut equation", _check_twist),
    ("bending gasket one-pole residual", _check_gasket),
]


def cmd_verify(cfg: RunConfig):
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, never crash the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"check": name, "ok": bool(ok), "detail": detail})
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})", file=sys.stderr)
    out = {"command": "verify", "passed": all(r["ok"] for r in results), "results": results}
    if not out["passed"]:
        return "json-fail", out
    return "json", out


HANDLERS = {
    "rings": cmd_rings,
    "enumerate": cmd_enumerate,
    "fixed-point": cmd_fixed_point,
    "critical-line": cmd_critical_line,
    "dilute-point": cmd_dilute_point,
    "density": cmd_density,
    "twist-line": cmd_twist_line,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


# -- argument handling ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="loopmaps", description="O(n) loop model on random maps")
    p.add_argument("command", choices=VERBS)
    p.add_argument("--config", help="JSON file with the same keys as the flags; flags win")
    for name, typ in (("n", float), ("b", float), ("g", float), ("param", float),
                      ("tol", float), ("v-max", float)):
        p.add_argument(f"--{name}", type=typ, default=None)
    for name in ("a", "h", "h1", "h2", "family", "weights", "point", "model", "cut", "out"):
        p.add_argument(f"--{name}", default=None)
    for name in ("kmax", "pmax", "order", "K", "grid"):
        p.add_argument(f"--{name}", type=int, default=None)
    p.add_argument("--json", action="store_true", default=None)
    return p


def make_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        values.update({k.replace("-", "_"): v for k, v in data.items()})
    for k, v in vars(ns).items():
        if k in ("config", "command") or v is None:
            continue
        values[k] = v
    known = {f.name for f in fields(RunConfig)} - {"command"}
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for k in ("a", "h", "h1", "h2"):
        if k in values and values[k] is not None:
            values[k] = str(values[k])
    cfg = RunConfig(command=ns.command, **values)
    cfg.validate()
    return cfg


def run(cfg: RunConfig) -> tuple[int, str]:
    kind, payload = HANDLERS[cfg.command](cfg)
    if kind == "csv":
        return 0, _csv_text(*payload)
    return (1 if kind == "json-fail" else 0), _json_text(payload)


_NUMERIC = (
    critline.NoDilutePointError,
    twistline.EmptyLineError,
    gasket.BeyondCriticalError,
    gasket.TruncationError,
    ArithmeticError,
    RuntimeError,
    np.linalg.LinAlgError,
)


def main(argv=None) -> int:
    try:
        cfg = make_config(sys.argv[1:] if argv is None else argv)
        status, text = run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
