"""Acceptance criteria 1-14, one test each.

Every criterion prints a single ``ACCEPTANCE <k> PASS|FAIL: <detail>`` line
(collected again in the terminal summary).  Run directly with
``python tests/test_acceptance.py`` for the lines alone.
"""
from __future__ import annotations

import filecmp
import itertools
import json
import math
import pathlib
import tempfile
import warnings
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from twistmoyal import cli
from twistmoyal.grid import Grid
from twistmoyal.operators import (AnalyticFunction, DiffOperator, apply_numeric, comparison_report,
                                  oracle_check)
from twistmoyal.params import DeformationParams
from twistmoyal.phase import VARIABLES, PhaseFunction
from twistmoyal.specfun import bessel_k, liouville_order, psi1
from twistmoyal.spectrum import (assemble, default_grid, hermite_gram, ode_residual1, ode_residual2,
                                 residual_im, residual_real)
from twistmoyal.star import (associativity_residual, commutator, expected_commutator, jacobiator,
                             jacobiator_closed_form, left_action_rule, right_action_rule, star)
from twistmoyal.tilde import TildeFunction
from twistmoyal.transform import (backward, e_of, forward, oscillator_hamiltonian, pullback,
                                  pushforward_commutators, sector_commutator_check,
                                  tilde_commutator_table, transform_hamiltonian)

ORACLE = json.loads((pathlib.Path(__file__).parent / "data" / "oracle_values.json").read_text())
RESULTS: dict[int, tuple[bool, str]] = {}

PARAM_SETS = {
    "default": DeformationParams(),
    "preset": DeformationParams.unit_gamma_preset(),
    "general": DeformationParams(theta=Fraction(2, 3), thetabar=Fraction(-1, 2), hbar_eff=3,
                                 omega1=Fraction(1, 3), omega2=Fraction(-5, 4)),
    "symbolic": DeformationParams.symbolic(),
}


def _monomials(omega, max_degree):
    return [PhaseFunction.monomial(e, omega) for e in itertools.product(range(max_degree + 1), repeat=4)
            if sum(e) <= max_degree]


# -- criteria ------------------------------------------------------------------------

def criterion_1():
    bad = []
    for label, p in PARAM_SETS.items():
        xs = {v: PhaseFunction.variable(v, p.omega) for v in VARIABLES}
        for a, b in itertools.combinations(VARIABLES, 2):
            if commutator(xs[a], xs[b], p) != expected_commutator(a, b, p):
                bad.append(f"{label}:[{a},{b}]")
    return not bad, f"6 commutators x {len(PARAM_SETS)} parameter sets; failures={bad}"


def criterion_2():
    bad, n = [], 0
    for label, p in PARAM_SETS.items():
        xs = {v: PhaseFunction.variable(v, p.omega) for v in VARIABLES}
        for f in _monomials(p.omega, 3):
            for v in VARIABLES:
                n += 2
                if star(xs[v], f, p) != left_action_rule(v, f, p):
                    bad.append(f"{label}:{v}*{f!r}")
                if star(f, xs[v], p) != right_action_rule(v, f, p):
                    bad.append(f"{label}:{f!r}*{v}")
    return not bad, f"{n} exact comparisons (4 left + 4 right rules, degree <= 3); failures={len(bad)}"


def criterion_3():
    bad = []
    for label, p in PARAM_SETS.items():
        for t in itertools.product((1, 2), repeat=3):
            j = jacobiator(*t, p)
            if not (j.is_zero() and j == jacobiator_closed_form(*t, p)):
                bad.append(f"{label}:{t}")
    return not bad, f"8 triples x {len(PARAM_SETS)} parameter sets; failures={bad}"


def criterion_4():
    bad = []
    for label, p in PARAM_SETS.items():
        xs = {1: PhaseFunction.variable("x1", p.omega), 2: PhaseFunction.variable("x2", p.omega)}
        for t in itertools.product((1, 2), repeat=3):
            r = associativity_residual(*(xs[i] for i in t), p)
            if not r.is_zero():
                bad.append(f"{label}:{t}:{r.to_sympy()}")
    return not bad, f"nonzero residuals: {bad}"


def criterion_5():
    rng = np.random.default_rng(12345)
    worst_x = worst_t = 0.0
    e_min = math.inf
    for p in (DeformationParams(), DeformationParams.unit_gamma_preset(),
              DeformationParams(theta=0.7, omega1=1.3, omega2=-0.4)):
        w1, w2 = p.real_value("omega1"), p.real_value("omega2")
        q = rng.uniform(-5, 5, size=(4, 40_000))
        q = q[:, 1 + w1 * q[0] + w2 * q[1] > 1e-3][:, :10_000]
        assert q.shape[1] == 10_000
        back = np.asarray(backward(forward(q, p), p))
        worst_x = max(worst_x, float(np.max(np.abs(back - q) / np.maximum(1, np.abs(q)))))
        qt = rng.uniform(-5, 5, size=(4, 10_000))
        img = backward(qt, p)
        again = np.asarray(forward(img, p))
        worst_t = max(worst_t, float(np.max(np.abs(again - qt) / np.maximum(1, np.abs(qt)))))
        e_min = min(e_min, float(np.min(e_of(img, p))))
    ok = worst_x < 1e-12 and worst_t < 1e-12 and e_min > 0
    return ok, f"round trip {worst_x:.2e} / {worst_t:.2e}; min e(backward) = {e_min:.3e}"


def criterion_6():
    problems = []
    for p in (DeformationParams.unit_gamma_preset(), DeformationParams(omega2=3, theta=Fraction(1, 5)),
              DeformationParams.symbolic(omega1=0)):
        c = tilde_commutator_table(p).commutators()
        gamma = p.theta * sp.sqrt(p.omega2 ** 2)
        if not (c[("xt1", "pt1")].is_zero() and c[("xt2", "pt2")] == 0
                and sp.simplify(c[("xt1", "xt2")] - sp.I * gamma) == 0
                and sp.simplify(c[("pt1", "pt2")] - sp.I * p.thetabar) == 0):
            problems.append(f"omega1=0 table at {p.as_dict()}")
    s = DeformationParams.symbolic()
    t = tilde_commutator_table(s)
    w = s.omega1 ** 2 + s.omega2 ** 2
    x1, x2 = sp.symbols("x1 x2", real=True)
    e = 1 + s.omega1 * x1 + s.omega2 * x2
    xt1 = sp.log(e / (s.theta * w))
    hb1 = t.hbar1.to_sympy(sp.symbols("xt1 xt2 pt1 pt2", real=True)).subs(sp.Symbol("xt1", real=True), xt1)
    checks = {
        "gamma": sp.simplify(t.gamma - s.theta * sp.sqrt(w)),
        "hbar1": sp.simplify(hb1 - s.hbar_eff * s.omega1 / e),
        "hbar2": sp.simplify(t.hbar2 - s.omega1 * s.hbar_eff / (s.theta * w)),
        "thetabar": sp.simplify(t.thetabar - s.thetabar),
    }
    problems += [k for k, v in checks.items() if v != 0]
    # independent push-forward at the preset: every stated omega1 = 0 entry is reproduced
    rows = pushforward_commutators(DeformationParams.unit_gamma_preset())
    disagree = [r["pair"] for r in rows if not r["agree"]]
    return not problems, f"table problems={problems}; preset push-forward disagreements={disagree}"


def criterion_7():
    p = DeformationParams.unit_gamma_preset()
    h1, h2 = transform_hamiltonian(p)
    xt1, xt2 = TildeFunction.variable("xt1"), TildeFunction.variable("xt2")
    printed = (xt2 * xt2 + TildeFunction.exp_xt1(2) - TildeFunction.exp_xt1(1)
               + TildeFunction.constant(Fraction(1, 4))).scale(Fraction(1, 2))
    residual = pullback(h1 + h2, p) - oscillator_hamiltonian(p)
    val, done = sector_commutator_check(p)["[H1,H2]"]
    ok = residual.is_zero() and h1 == printed and done and val.is_zero()
    return ok, f"pullback residual={residual!r}; H1 matches printed={h1 == printed}; [H1,H2]={val!r}"


def criterion_8():
    bad = []
    for label in ("default", "preset", "general", "symbolic"):
        p = PARAM_SETS[label]
        rows = oracle_check(oscillator_hamiltonian(p), p)
        bad += [f"{label}:{r['psi']}" for r in rows if not r["agree"]]
    rep = comparison_report(PARAM_SETS["symbolic"])
    generated = bool(rep["rows"]) and "mismatches" in rep
    return not bad and generated, (f"oracle failures={bad}; comparison report rows={len(rep['rows'])}, "
                                   f"documented mismatches={rep['mismatches']}")


def criterion_9():
    x = TildeFunction.variable("xt2")
    cos_x2 = DiffOperator.trig("xt2", "cos", 1, TildeFunction.constant(1)).apply(x * x)
    exact_ok = cos_x2 == x * x - TildeFunction.constant(1)
    grid = Grid.from_mapping({"xt2": (-2.0, 2.0, 41)})
    one = TildeFunction.constant(1.0, exact=False)
    worst = 0.0
    for k in (0.5, 1.0, 2.0):
        f = AnalyticFunction(lambda a, b, c, d, k=k: np.exp(k * b) + 0 * a)
        ref = np.exp(k * grid.coordinates(("xt1", "xt2", "pt1", "pt2"))[1])
        for func, scale in (("cos", math.cos(k)), ("sin", math.sin(k))):
            got = apply_numeric(DiffOperator.trig("xt2", func, 1.0, one), f, grid)
            worst = max(worst, float(np.max(np.abs(got - scale * ref) / np.abs(scale * ref))))
    return exact_ok and worst < 1e-12, f"cos(d) x^2 -> {cos_x2!r}; worst relative error {worst:.2e}"


def criterion_10():
    closed = max(abs(bessel_k(0.5, z) - math.sqrt(math.pi / (2 * z)) * math.exp(-z)) for z in (0.1, 1.0, 10.0))
    worst = 0.0
    parts = (-3.0, -1.5, 0.0, 1.5, 3.0)
    for a, b in itertools.product(parts, parts):
        nu = complex(a, b)
        if abs(nu) > 5:
            continue
        zs = np.array([0.5, 1, 2, 5, 10, 20.0])
        k0, km, kp = bessel_k(nu, zs), bessel_k(nu - 1, zs), bessel_k(nu + 1, zs)
        r = np.abs(kp - km - 2 * nu / zs * k0) / np.maximum(1, np.abs(k0))
        worst = max(worst, float(np.max(r)))
    return closed < 1e-10 and worst < 1e-9, f"closed-form error {closed:.2e}; recurrence residual {worst:.2e}"


def criterion_11():
    grid = Grid.from_mapping({"pt1": (-6.0, 6.0, 241)})
    sups = [ode_residual2(n, grid).sup for n in range(11)]
    energies = all(assemble(Fraction(7, 3), n).E == Fraction(7, 3) + n + Fraction(1, 2) for n in range(11))
    e2 = all(ode_residual2(n, grid).extras["E2"] == n + 0.5 for n in range(11))
    return max(sups) < 1e-6 and energies and e2, f"max sup residual {max(sups):.2e}; E additivity exact={energies}"


def criterion_12():
    g = hermite_gram(10)
    dev = float(np.max(np.abs(g - np.eye(11))))
    return dev < 1e-8, f"max |G - I| = {dev:.2e}"


def criterion_13():
    notes = []
    xs = np.linspace(-4.0, 3.9, 80)
    k1 = bessel_k(liouville_order(1.0), np.exp(xs))
    k2 = bessel_k(liouville_order(1.0).conjugate(), np.exp(xs))
    imag = float(np.max(np.abs((k1 + k2).imag)))
    tail = psi1(1.0, np.linspace(1.0, 3.9, 30))
    decays = bool(np.all(np.diff(np.abs(tail)) < 0)) and abs(tail[-1]) < 1e-8
    notes.append(f"imag residue {imag:.1e}, decays={decays}")
    rim = residual_im(1.0, default_grid("liouville"))
    shift_zero = rim.extras["shift_terms_max_abs"] == 0.0
    linear = rim.extras["linear_fit_residual"] < 1e-8
    notes.append(f"im shift terms exactly 0={shift_zero}, linear fit {rim.extras['linear_fit_residual']:.1e}")

    def rel(a, b):
        return abs(a - b) / max(abs(b), 1e-300)

    pinned = []
    for name, rep in (("residual_real_E1_1", residual_real(1.0, default_grid("liouville"))),
                      ("residual_realnew_E1_1", residual_real(1.0, default_grid("liouville"), form="realnew")),
                      ("residual_im_E1_1", rim),
                      ("ode1_E1_1", ode_residual1(1.0, default_grid("ode1")))):
        pinned.append(max(rel(rep.l2, ORACLE[name]["l2"]), rel(rep.sup, ORACLE[name]["sup"])))
    pinned.append(rel(float(psi1(1.0, 0.0)), ORACLE["psi1_E1_1_at_0"]))
    kref = complex(*ORACLE["besselK_half_plus_i_at_2"])
    pinned.append(abs(bessel_k(complex(0.5, 1), 2.0) - kref) / abs(kref))
    again = [residual_real(1.0, default_grid("liouville")).to_json(),
             ode_residual1(1.0, default_grid("ode1")).to_json()]
    first = [residual_real(1.0, default_grid("liouville")).to_json(),
             ode_residual1(1.0, default_grid("ode1")).to_json()]
    deterministic = json.dumps(again, sort_keys=True) == json.dumps(first, sort_keys=True)
    notes.append(f"pinned max rel diff {max(pinned):.1e}, deterministic={deterministic}")
    ok = imag < 1e-12 and decays and shift_zero and linear and max(pinned) < 1e-8 and deterministic
    return ok, "; ".join(notes)


def _run_cli_suite(out):
    codes = []
    for argv in (["algebra-verify"], ["transform-verify", "--params", "theta=1/2,omega2=2"],
                 ["hamiltonian-expand", "--compare"], ["spectrum", "--e1", "1", "--n", "1"],
                 ["residuals"]):
        codes.append(cli.main(argv + ["--out", out, "--format", "both"]))
    return codes


def criterion_14():
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        ca, cb = _run_cli_suite(a), _run_cli_suite(b)
        names = sorted(p.name for p in pathlib.Path(a).iterdir())
        match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
        n_json = sum(n.endswith(".json") for n in names)
    ok = not mismatch and not errors and n_json == 5 and ca == cb
    return ok, f"{len(match)} files identical ({n_json} JSON); exit codes {ca}; differing={mismatch + errors}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 15)}


def run(k: int) -> tuple[bool, str]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ok, detail = CRITERIA[k]()
    RESULTS[k] = (bool(ok), detail)
    print(f"ACCEPTANCE {k:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    return ok, detail


@pytest.mark.parametrize("k", list(CRITERIA))
def test_acceptance(k, acceptance_log):
    ok, detail = run(k)
    acceptance_log[k] = (ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for k in CRITERIA:
        run(k)
