"""Command-line entry point: check suites, spectra and residual reports.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
Reports are JSON with sorted keys and 17 significant digits; they go to
``--out`` when given, otherwise JSON is printed to stdout.
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import __version__, _jsonio
from .errors import ConvergenceError, OscillatorResidualError, TruncationWarning, TwistMoyalError
from .grid import Grid
from .operators import (comparison_report, compare_operators, expand_left_star, h1_star_operator,
                        oracle_check, printed_h1_operator)
from .params import DeformationParams, parse_number
from .phase import VARIABLES, PhaseFunction
from .specfun import QuadratureSpec, psi1, psi2
from .spectrum import (EQUATIONS, assemble, convention_scan, default_grid, ode_residual1,
                       ode_residual2, residual_im, residual_real)
from .star import (associativity_residual, commutator, expected_commutator, jacobiator,
                   jacobiator_closed_form, left_action_rule, right_action_rule, star)
from .transform import (backward, e_of, forward, oscillator_hamiltonian, pullback,
                        pushforward_commutators, sector_commutator_check, split_hamiltonian,
                        tilde_commutator_table, transform_hamiltonian)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
GRID_NAMES = ("liouville", "ode1", "ode2", "spectrum_x", "spectrum_p")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    params: DeformationParams = field(default_factory=DeformationParams)
    order: int = 8
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    grids: dict = field(default_factory=lambda: {n: default_grid(n) for n in GRID_NAMES})
    out_dir: str | None = None
    fmt: str = "json"

    def header(self):
        return {
            "version": __version__,
            "params": self.params.as_dict(),
            "order": self.order,
            "quadrature": {"abs_tol": self.quad.abs_tol, "rel_tol": self.quad.rel_tol,
                           "max_levels": self.quad.max_levels},
        }


# -- configuration ---------------------------------------------------------------

def read_config_file(path: str) -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def build_config(args) -> RunConfig:
    file_cfg = read_config_file(args.config) if args.config else {}
    param_items = {}
    grids = {n: default_grid(n) for n in GRID_NAMES}
    settings = {}
    for k, v in file_cfg.items():
        if k == "params":
            param_items.update(_pairs(v))
        elif k.startswith("grid."):
            grids[_grid_name(k[5:])] = Grid.parse(v)
        elif k in ("order", "tol", "out", "format", "max_levels"):
            settings[k] = v
        else:
            param_items[k] = v
    if args.params:
        param_items.update(_pairs(args.params))
    for spec in args.grid or []:
        if "=" not in spec:
            raise UsageError(f"--grid expects name=spec, got {spec!r}")
        name, text = spec.split("=", 1)
        grids[_grid_name(name)] = Grid.parse(text)
    for key in ("order", "tol", "out", "format", "max_levels"):
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    params = DeformationParams.from_mapping(param_items)
    try:
        order = int(settings.get("order", 8))
        tol = float(parse_number(str(settings.get("tol", "1e-12"))))
        levels = int(settings.get("max_levels", 12))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad numeric setting: {exc}") from None
    if not 1 <= order <= 16:
        raise UsageError("--order must lie in [1, 16]")
    fmt = settings.get("format", "json")
    if fmt not in ("json", "csv", "both"):
        raise UsageError("--format must be json, csv or both")
    out = settings.get("out")
    if fmt != "json" and not out:
        raise UsageError("CSV output needs --out")
    if out:
        try:
            os.makedirs(out, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create output directory: {exc}") from None
        if not os.access(out, os.W_OK):
            raise UsageError(f"output directory {out!r} is not writable")
    return RunConfig(params, order, QuadratureSpec(tol, tol, levels), grids, out, fmt)


def _pairs(text):
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _grid_name(name):
    name = name.strip()
    if name not in GRID_NAMES:
        raise UsageError(f"unknown grid {name!r}; choose from {', '.join(GRID_NAMES)}")
    return name


# -- output --------------------------------------------------------------------------

def emit(cfg: RunConfig, name: str, report: dict, csvs: dict | None = None):
    text = _jsonio.dumps(report)
    if cfg.out_dir is None:
        sys.stdout.write(text)
        return
    if cfg.fmt in ("json", "both"):
        with open(os.path.join(cfg.out_dir, f"{name}.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if cfg.fmt in ("csv", "both"):
        for stem, body in sorted((csvs or {}).items()):
            with open(os.path.join(cfg.out_dir, f"{stem}.csv"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(body)


def _check(name, ok, **detail):
    return {"name": name, "ok": bool(ok), **detail}


def _expr(f):
    return str(f.to_sympy()) if f is not None else None


# -- algebra-verify ------------------------------------------------------------------

def _monomials(omega, max_degree):
    out = []
    for exps in itertools.product(range(max_degree + 1), repeat=4):
        if sum(exps) <= max_degree:
            out.append(PhaseFunction.monomial(exps, omega))
    return out


def cmd_algebra_verify(cfg: RunConfig, args) -> int:
    p = cfg.params
    omega = p.omega
    xs = {v: PhaseFunction.variable(v, omega) for v in VARIABLES}
    checks, diagnostics = [], {}

    for a, b in itertools.combinations(VARIABLES, 2):
        got = commutator(xs[a], xs[b], p, cfg.order)
        want = expected_commutator(a, b, p)
        checks.append(_check(f"commutator[{a},{b}]", got == want, computed=_expr(got), expected=_expr(want)))

    bad_left, bad_right, count = [], [], 0
    for f in _monomials(omega, 3):
        for v in VARIABLES:
            count += 1
            if star(xs[v], f, p, cfg.order) != left_action_rule(v, f, p):
                bad_left.append(f"{v}*{_expr(f)}")
            if star(f, xs[v], p, cfg.order) != right_action_rule(v, f, p):
                bad_right.append(f"{_expr(f)}*{v}")
    checks.append(_check("left_action_rules", not bad_left, cases=count, failures=bad_left))
    checks.append(_check("right_action_rules", not bad_right, cases=count, failures=bad_right))

    bad_conj = []
    for f, g in itertools.product(_monomials(omega, 2), repeat=2):
        if star(f, g, p, cfg.order) != star(g, f, p, cfg.order).conjugate():
            bad_conj.append(f"{_expr(f)},{_expr(g)}")
    checks.append(_check("conjugation_symmetry", not bad_conj, failures=bad_conj))

    assoc = []
    for mu, nu, rho in itertools.product((1, 2), repeat=3):
        jac = jacobiator(mu, nu, rho, p, cfg.order)
        closed = jacobiator_closed_form(mu, nu, rho, p)
        checks.append(_check(f"jacobiator({mu},{nu},{rho})", jac.is_zero() and jac == closed,
                             computed=_expr(jac), closed_form=_expr(closed)))
        a, b, c = (xs[f"x{i}"] for i in (mu, nu, rho))
        res = associativity_residual(a, b, c, p, cfg.order)
        assoc.append({"triple": [mu, nu, rho], "residual": _expr(res), "zero": res.is_zero()})
    diagnostics["associativity_on_coordinate_triples"] = {
        "rows": assoc,
        "note": "reported, not asserted: nonzero whenever omega != 0 and the left-action rules hold",
    }
    ok = all(c["ok"] for c in checks)
    emit(cfg, "algebra-verify", {**cfg.header(), "command": "algebra-verify", "ok": ok,
                                 "checks": checks, "diagnostics": diagnostics})
    return EXIT_OK if ok else EXIT_FAIL


# -- transform-verify ----------------------------------------------------------------

def _round_trip(p, samples=10_000, seed=0):
    rng = np.random.default_rng(seed)
    w1, w2 = p.real_value("omega1"), p.real_value("omega2")
    pts = []
    while sum(len(a) for a in pts) < samples:
        cand = rng.uniform(-5, 5, size=(4, samples))
        keep = 1 + w1 * cand[0] + w2 * cand[1] > 1e-3
        pts.append(cand[:, keep])
    q = np.concatenate(pts, axis=1)[:, :samples]
    back = backward(forward(q, p), p)
    err_x = float(np.max(np.abs(np.asarray(back) - q) / np.maximum(1.0, np.abs(q))))
    qt = np.stack([rng.uniform(-5, 5, samples), rng.uniform(-5, 5, samples),
                   rng.uniform(-5, 5, samples), rng.uniform(-5, 5, samples)])
    img = backward(qt, p)
    again = forward(img, p)
    err_t = float(np.max(np.abs(np.asarray(again) - qt) / np.maximum(1.0, np.abs(qt))))
    e_min = float(np.min(e_of(img, p)))
    return err_x, err_t, e_min


def cmd_transform_verify(cfg: RunConfig, args) -> int:
    p = cfg.params
    checks, notices = [], []
    err_x, err_t, e_min = _round_trip(p)
    checks.append(_check("round_trip_forward_backward", err_x < 1e-12, max_rel_error=err_x))
    checks.append(_check("round_trip_backward_forward", err_t < 1e-12, max_rel_error=err_t))
    checks.append(_check("image_positivity", e_min > 0, min_e=e_min))
    table = tilde_commutator_table(p)
    report = {**cfg.header(), "command": "transform-verify", "table": table.to_json()}
    if p.exact:
        report["pushforward"] = pushforward_commutators(p)
    if all(_is_zero(w) for w in (p.omega1,)):
        h1, h2 = transform_hamiltonian(p)
        s1, s2 = split_hamiltonian(p)
        residual = pullback(h1 + h2, p) - oscillator_hamiltonian(p)
        checks.append(_check("factorization_pullback", residual.is_zero(), residual=_expr(residual),
                             H1=_expr(h1), H2=_expr(h2)))
        checks.append(_check("factorization_closed_form", s1 == h1 and s2 == h2))
        table_ok = (table.hbar1.is_zero() and _is_zero(table.hbar2))
        checks.append(_check("omega1_zero_table", table_ok))
        for name, (val, done) in sector_commutator_check(p).items():
            checks.append(_check(f"block{name}", done and val.is_zero(), value=_expr(val)))
    else:
        notices.append("omega1 != 0: transformed table reported; factorization and spectral checks skipped")
    ok = all(c["ok"] for c in checks)
    report.update({"ok": ok, "checks": checks, "notices": notices})
    emit(cfg, "transform-verify", report)
    return EXIT_OK if ok else EXIT_FAIL


def _is_zero(v):
    from . import _coeff
    return _coeff.is_zero(v)


# -- hamiltonian-expand --------------------------------------------------------------

def parse_hamiltonian(text: str | None, params: DeformationParams) -> PhaseFunction:
    """Polynomial in x1, x2, p1, p2 with rational coefficients (default: the oscillator)."""
    if not text:
        return oscillator_hamiltonian(params)
    syms = sp.symbols("x1 x2 p1 p2", real=True)
    try:
        expr = sp.sympify(text, locals=dict(zip(VARIABLES, syms)), rational=True)
        poly = sp.Poly(expr, *syms)
    except (sp.SympifyError, sp.PolynomialError, TypeError, SyntaxError) as exc:
        raise UsageError(f"cannot parse Hamiltonian {text!r}: {exc}") from None
    if poly.free_symbols - set(syms):
        raise UsageError("the Hamiltonian may only depend on x1, x2, p1, p2")
    terms = {m + (0,): c for m, c in zip(poly.monoms(), poly.coeffs())}
    return PhaseFunction(terms, params.omega)


def cmd_hamiltonian_expand(cfg: RunConfig, args) -> int:
    p = cfg.params
    h = parse_hamiltonian(args.hamiltonian, p)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        split = expand_left_star(h, p, cfg.order)
    rows = oracle_check(h, p, cfg.order)
    ok = all(r["agree"] for r in rows)
    report = {
        **cfg.header(), "command": "hamiltonian-expand",
        "hamiltonian": _expr(h),
        "split": "H*psi = Hr(psi) + (i/2) Him(psi)",
        "Hr": split.hr.to_json(), "Him": split.him.to_json(),
        "terminated": split.terminated,
        "warnings": [str(w.message) for w in caught],
        "oracle": {"ok": ok, "rows": rows},
        "realness": {"Hr": split.hr.has_real_coefficients(), "Him": split.him.has_real_coefficients()},
    }
    if _is_zero(p.omega1) and not _is_zero(p.omega2) and _positive(p.theta):
        report["H1_star"] = h1_star_operator(p).to_json()
    if args.compare:
        preset = DeformationParams.unit_gamma_preset()
        report["comparison"] = {
            "oscillator": comparison_report(p, cfg.order) if args.hamiltonian is None else
            {"note": "the printed operators refer to the oscillator Hamiltonian only"},
            "H1_star_preset": compare_operators("H1*", h1_star_operator(preset), printed_h1_operator()),
        }
    report["ok"] = ok
    emit(cfg, "hamiltonian-expand", report)
    return EXIT_OK if ok else EXIT_FAIL


def _positive(v):
    from . import _coeff
    return _coeff.is_exact(v) and not v.free_symbols and v > 0 or (not _coeff.is_exact(v) and v.real > 0)


# -- spectrum ------------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig, args) -> int:
    sol = assemble(args.e1, args.n)
    gx, gp = cfg.grids["spectrum_x"], cfg.grids["spectrum_p"]
    x = gx.coordinates(("xt1",))[0] if gx.names == ("xt1",) else None
    pp = gp.coordinates(("pt1",))[0] if gp.names == ("pt1",) else None
    if x is None or pp is None:
        raise UsageError("spectrum grids must be one-dimensional in xt1 and pt1")
    v1 = psi1(sol.E1, x, cfg.quad)
    v2 = psi2(sol.n, pp)
    parity = (-1) ** sol.n
    sym = float(np.max(np.abs(psi2(sol.n, -pp) - parity * v2)))
    report = {
        **cfg.header(), "command": "spectrum", "solution": sol.to_json(),
        "psi1": {"grid": gx.to_json(), "values": v1.tolist()},
        "psi2": {"grid": gp.to_json(), "values": v2.tolist(), "parity": parity, "parity_defect": sym},
        "ok": True,
    }
    emit(cfg, "spectrum", report, {
        "psi1": _jsonio.csv_text(["xt1", "psi1"], zip(x, v1)),
        "psi2": _jsonio.csv_text(["pt1", "psi2"], zip(pp, v2)),
    })
    return EXIT_OK


# -- residuals ------------------------------------------------------------------------

def cmd_residuals(cfg: RunConfig, args) -> int:
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    unknown = set(which) - set(EQUATIONS)
    if not which or unknown:
        raise UsageError(f"--which takes a subset of {','.join(EQUATIONS)}")
    if not args.e1 > 0:
        raise UsageError("--e1 must be positive")
    reports, csvs, ok = {}, {}, True
    g = cfg.grids
    if "im" in which:
        r = residual_im(args.e1, g["liouville"], cfg.quad)
        reports["im"], csvs["residual_im"] = r.to_json(), r.to_csv()
    if "real" in which:
        r = residual_real(args.e1, g["liouville"], cfg.quad, form="real")
        reports["real"], csvs["residual_real"] = r.to_json(), r.to_csv()
    if "realnew" in which:
        r = residual_real(args.e1, g["liouville"], cfg.quad, form="realnew")
        reports["realnew"], csvs["residual_realnew"] = r.to_json(), r.to_csv()
    if "ode1" in which:
        r = ode_residual1(args.e1, g["ode1"], q=cfg.quad)
        reports["ode1"] = {**r.to_json(), "convention_scan": convention_scan(args.e1, g["ode1"], cfg.quad)}
        csvs["residual_ode1"] = r.to_csv()
    if "ode2" in which:
        rows = []
        for n in range(args.n_max + 1):
            r = ode_residual2(n, g["ode2"], check=False)
            passed = r.sup < 1e-6
            ok = ok and passed
            rows.append({**r.to_json(), "ok": passed})
            csvs[f"residual_ode2_n{n}"] = r.to_csv()
        reports["ode2"] = rows
    emit(cfg, "residuals", {**cfg.header(), "command": "residuals", "E1": args.e1, "which": which,
                            "reports": reports, "ok": ok,
                            "asserted": ["ode2"]}, csvs)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="deformation parameters, e.g. theta=1/2,omega2=2")
    common.add_argument("--order", type=int, help="truncation order of the theta series (1-16)")
    common.add_argument("--tol", help="quadrature tolerance (absolute and relative)")
    common.add_argument("--out", help="output directory (default: JSON to stdout)")
    common.add_argument("--format", choices=("json", "csv", "both"))
    common.add_argument("--config", help="flat key=value configuration file")
    common.add_argument("--grid", action="append", metavar="NAME=SPEC",
                        help="override a grid, e.g. liouville=xt1:-3:3:61,xt2:-2:2:41")

    parser = argparse.ArgumentParser(prog="twistmoyal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("algebra-verify", parents=[common], help="commutators, action rules, Jacobiator")
    sub.add_parser("transform-verify", parents=[common], help="change of variables and factorization")
    he = sub.add_parser("hamiltonian-expand", parents=[common], help="Hr/Him and H1 star operators")
    he.add_argument("--compare", action="store_true", help="add the comparison with the printed operators")
    he.add_argument("--hamiltonian", help="polynomial in x1, x2, p1, p2 (default: oscillator)")
    spc = sub.add_parser("spectrum", parents=[common], help="tabulate psi1, psi2 and E")
    spc.add_argument("--e1", type=float, required=True)
    spc.add_argument("--n", type=int, required=True)
    res = sub.add_parser("residuals", parents=[common], help="eigen-equation residual reports")
    res.add_argument("--which", default=",".join(EQUATIONS))
    res.add_argument("--e1", type=float, default=1.0)
    res.add_argument("--n-max", type=int, default=10)
    return parser


COMMANDS = {
    "algebra-verify": cmd_algebra_verify,
    "transform-verify": cmd_transform_verify,
    "hamiltonian-expand": cmd_hamiltonian_expand,
    "spectrum": cmd_spectrum,
    "residuals": cmd_residuals,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = build_config(args)
        if getattr(args, "n_max", 0) is not None and not 0 <= getattr(args, "n_max", 0) <= 40:
            raise UsageError("--n-max must lie in [0, 40]")
        return COMMANDS[args.command](cfg, args)
    except (ConvergenceError, OscillatorResidualError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, TwistMoyalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # never surface a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
