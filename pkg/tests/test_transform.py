from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistmoyal import DeformationParams, DomainError, ParameterError, TildeFunction
from twistmoyal.transform import (backward, e_of, forward, oscillator_hamiltonian, pullback,
                                  pushforward_commutators, sector_commutator_check,
                                  tilde_commutator_table, transform_hamiltonian)

PRESET = DeformationParams.unit_gamma_preset()
coord = st.floats(-4, 4, allow_nan=False)


@given(coord, coord, coord, coord)
def test_round_trip(x1, x2, p1, p2):
    q = np.array([x1, x2, p1, p2])
    if e_of(q, PRESET) <= 1e-3:
        return
    back = np.asarray(backward(forward(q, PRESET), PRESET))
    assert np.allclose(back, q, rtol=1e-12, atol=1e-12)


def test_forward_rejects_nonpositive_e():
    with pytest.raises((DomainError, ParameterError)):
        forward(np.array([0.0, -1.0, 0.0, 0.0]), PRESET)


def test_table_at_preset():
    c = tilde_commutator_table(PRESET).commutators()
    assert c[("xt2", "pt2")] == 0
    assert c[("xt1", "pt1")].is_zero()


def test_pushforward_reports_rows():
    rows = pushforward_commutators(PRESET)
    assert {r["pair"] for r in rows} >= {"[xt1,xt2]", "[pt1,pt2]"}
    engine = [r for r in rows if "engine_agrees_with_computed" in r]
    assert engine and all(r["engine_agrees_with_computed"] for r in engine)
    # omitted mixed entries at omega2 != 0 are the documented disagreements
    assert {r["pair"] for r in rows if not r["agree"]} == {"[xt1,pt2]", "[xt2,pt1]"}


def test_factorisation():
    h1, h2 = transform_hamiltonian(PRESET)
    assert (pullback(h1 + h2, PRESET) - oscillator_hamiltonian(PRESET)).is_zero()
    assert not h1.depends_on("pt1") and not h2.depends_on("xt1")
    for name, (val, done) in sector_commutator_check(PRESET).items():
        assert done and val.is_zero(), name


def test_theta_zero_rejected():
    with pytest.raises(ParameterError):
        forward(np.zeros(4), DeformationParams(theta=0))
