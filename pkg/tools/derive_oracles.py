"""Freeze reference values with an independent mpmath oracle.

Run once before the build; writes tests/data/oracle_values.json.  Nothing
here imports the package: Bessel values come from mpmath.besselk and second
derivatives from mpmath's numerical differentiation at 30 digits.
"""
import json
import pathlib

import mpmath as mp

mp.mp.dps = 30
E1 = mp.mpf(1)
KAPPA = mp.sqrt(E1)
PREF = mp.sqrt(mp.cosh(mp.pi * KAPPA) / (4 * mp.pi ** 2 * KAPPA))


def psi1(x):
    z = mp.e ** x
    return PREF * mp.e ** (x / 2) * mp.re(mp.besselk(mp.mpc(0.5, KAPPA), z) + mp.besselk(mp.mpc(0.5, -KAPPA), z))


def linspace(a, b, n):
    return [mp.mpf(a) + (mp.mpf(b) - mp.mpf(a)) * i / (n - 1) for i in range(n)]


def norms(values, cell):
    l2 = mp.sqrt(sum(abs(v) ** 2 for v in values) * cell)
    return float(l2), float(max(abs(v) for v in values))


def main():
    out = {}
    k = mp.besselk(mp.mpc(0.5, 1), 2)
    out["besselK_half_plus_i_at_2"] = [float(mp.re(k)), float(mp.im(k))]
    out["besselK_half_at_1"] = float(mp.besselk(0.5, 1))
    out["besselK_0_at_1"] = float(mp.besselk(0, 1))
    out["psi1_E1_1_at_0"] = float(psi1(0))
    out["dpsi1_E1_1_at_0"] = float(mp.diff(psi1, 0))

    # Liouville grid xt1 in [-3, 3] (61), xt2 in [-2, 2] (41)
    xs, ys = linspace(-3, 3, 61), linspace(-2, 2, 41)
    cell = (xs[1] - xs[0]) * (ys[1] - ys[0])
    col = {}
    for x in xs:
        col[x] = (psi1(x), mp.diff(psi1, x), mp.diff(psi1, x, 2))
    real, realnew, im = [], [], []
    for x in xs:
        p, dp, ddp = col[x]
        e1, e2 = mp.e ** x, mp.e ** (2 * x)
        for y in ys:
            real.append((y ** 2 + e2 - e1 + mp.mpf(1) / 4 - 2 * E1) * p - ddp / 4)
            im.append(y * dp)
            if y != 0:
                # psi does not depend on xt2: shifted differences vanish
                bracket = e2 / (4 * y ** 2) * (p - p + 2 * p)
                realnew.append((y ** 2 + mp.mpf(1) / 4 - 2 * E1) * p - bracket / 4 - e2 * p + e1 * p)
    out["liouville_grid"] = {"xt1": [-3, 3, 61], "xt2": [-2, 2, 41]}
    out["residual_real_E1_1"] = dict(zip(("l2", "sup"), norms(real, cell)))
    out["residual_realnew_E1_1"] = dict(zip(("l2", "sup"), norms(realnew, cell)))
    out["residual_im_E1_1"] = dict(zip(("l2", "sup"), norms(im, cell)))

    # ODE grid xt1 in [-4, 2] (121), convention (1/2, 1/2, -1/2, 1/8)
    xo = linspace(-4, 2, 121)
    ode = []
    for x in xo:
        p, ddp = psi1(x), mp.diff(psi1, x, 2)
        ode.append(-ddp / 2 + (mp.e ** (2 * x) / 2 - mp.e ** x / 2 + mp.mpf(1) / 8 - E1) * p)
    out["ode1_grid"] = [-4, 2, 121]
    out["ode1_E1_1"] = dict(zip(("l2", "sup"), norms(ode, xo[1] - xo[0])))

    path = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "oracle_values.json"
    path.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(path.read_text())


if __name__ == "__main__":
    main()
