import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from hyptrig.errors import OutsideP, PoleAtNonpositiveInteger
from hyptrig.special_functions import (
    F_bb_closed,
    F_bb_literal,
    F_closed,
    F_literal,
    SpectralParameter,
    beta_closed,
    beta_grid,
    beta_integral,
    beta_residual,
    duplication_residual,
    functional_equation_residual,
    gamma_complex,
    identity_suite,
    phi,
    psi,
    random_gamma_grid,
    rgamma_complex,
)

LN2 = math.log(2.0)


# --- Gamma ------------------------------------------------------------------

def test_gamma_spot_values():
    assert gamma_complex(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_complex(1) == pytest.approx(1.0, rel=1e-14)
    assert gamma_complex(5) == pytest.approx(24.0, rel=1e-14)


@pytest.mark.parametrize("z", [0, -1, -2, -7, complex(-3, 1e-13)])
def test_gamma_poles(z):
    with pytest.raises(PoleAtNonpositiveInteger):
        gamma_complex(z)


def test_rgamma_vanishes_at_poles():
    assert abs(rgamma_complex(0)) == 0.0
    assert abs(rgamma_complex(-3)) < 1e-15


def test_gamma_against_mpmath_on_disk():
    rng = np.random.default_rng(0)
    z = rng.uniform(-20, 20, 3000) + 1j * rng.uniform(-20, 20, 3000)
    z = z[(np.abs(z) <= 20) & (np.abs(z - np.round(z.real)) > 1e-3)]
    ref = np.array([complex(mpmath.gamma(complex(w))) for w in z])
    got = gamma_complex(z)
    assert np.max(np.abs(got - ref) / np.abs(ref)) <= 1e-12


def test_gamma_against_scipy_real_axis():
    x = np.linspace(-9.7, 15.3, 500)
    assert np.max(np.abs(gamma_complex(x).real / sp.gamma(x) - 1)) <= 1e-12


def test_rgamma_is_reciprocal():
    z = np.array([0.3 + 2j, -4.5 + 0.1j, 7 - 3j])
    assert np.allclose(rgamma_complex(z) * gamma_complex(z), 1.0, rtol=1e-13)


def test_functional_equation_grid():
    assert functional_equation_residual(random_gamma_grid()) <= 1e-10


def test_duplication_grid():
    assert duplication_residual(random_gamma_grid()) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.9, 4.0), st.floats(-0.9, 4.0))
def test_beta_identity_property(s1, s2):
    assert abs(beta_integral(s1, s2) - beta_closed(s1, s2)) <= 1e-8


def test_beta_grid():
    assert beta_residual(beta_grid()) <= 1e-8


def test_beta_known_value():
    # int_0^{pi/2} sin^2 = pi/4
    assert beta_integral(2.0, 0.0) == pytest.approx(math.pi / 4, abs=1e-14)
    assert beta_closed(2.0, 0.0) == pytest.approx(math.pi / 4, abs=1e-14)


# --- phi and psi ------------------------------------------------------------

def test_phi_psi_at_one():
    assert phi(1.0) == pytest.approx(LN2, rel=1e-15)
    assert psi(1.0) == pytest.approx(LN2 - 0.5, rel=1e-15)


@pytest.mark.parametrize("eps", [1e-2, 1e-3 * 0.999, 1e-4, 1e-7, -1e-5, 1j * 1e-4])
def test_phi_psi_continuous_near_one(eps):
    s = 1 + eps
    with mpmath.workdps(40):
        ms = mpmath.mpc(s)
        ref_phi = (1 - mpmath.power(2, 1 - ms)) / (ms - 1)
        ref_psi = (1 - (ms + 1) * mpmath.power(2, -ms)) / (ms - 1)
    assert abs(phi(s) - complex(ref_phi)) <= 1e-14
    assert abs(psi(s) - complex(ref_psi)) <= 1e-14


# --- closed forms -----------------------------------------------------------

def test_F_closed_spot_values():
    assert F_closed(0) == pytest.approx(math.pi, rel=1e-14)
    assert F_closed(2) == pytest.approx(math.pi / 4, rel=1e-14)
    assert F_closed(1) == pytest.approx(2 * LN2, rel=1e-14)


def test_F_bb_closed_spot_values():
    assert F_bb_closed(0) == 0
    assert F_bb_closed(2) == pytest.approx(math.pi / 2, rel=1e-14)
    assert F_bb_closed(1) == pytest.approx(4 * (LN2 - 0.5), rel=1e-14)


def test_closed_forms_vectorized():
    s = np.array([0.0, 1.0, 2.0 + 1j])
    assert F_closed(s).shape == (3,)
    assert F_closed(s)[2] == pytest.approx(F_closed(2.0 + 1j))


def test_outside_P():
    with pytest.raises(OutsideP):
        F_closed(-1.0)
    with pytest.raises(OutsideP):
        F_bb_closed(-2 + 3j)
    with pytest.raises(OutsideP):
        SpectralParameter(-1.5)
    assert SpectralParameter(-0.5).s == -0.5


def test_closed_forms_against_mpmath_literal():
    # the literal Gamma((s-1)/2) expressions evaluated in 30-digit arithmetic
    rng = np.random.default_rng(1)
    with mpmath.workdps(30):
        for _ in range(40):
            s = complex(rng.uniform(-0.9, 4), rng.uniform(-12, 12))
            if abs(s - 1) < 0.1 or abs(s) < 0.1:
                continue
            ms = mpmath.mpc(s)
            f1 = (1 - mpmath.power(2, 1 - ms)) / 2 * mpmath.sqrt(mpmath.pi) * mpmath.gamma((ms - 1) / 2) / mpmath.gamma(ms / 2 + 1)
            f2 = 2 * (1 - (ms + 1) * mpmath.power(2, -ms)) * mpmath.sqrt(mpmath.pi) * mpmath.gamma((ms - 1) / 2) / mpmath.gamma(ms / 2)
            assert abs(F_closed(s) - complex(f1)) <= 1e-12 * abs(complex(f1))
            assert abs(F_bb_closed(s) - complex(f2)) <= 1e-12 * abs(complex(f2))


def test_pole_free_agrees_with_literal():
    rng = np.random.default_rng(2)
    for _ in range(200):
        s = complex(rng.uniform(-0.9, 4), rng.uniform(-12, 12))
        if abs(s - 1) <= 0.1 or abs(s) <= 0.1:
            continue
        for a, b in ((F_closed(s), F_literal(s)), (F_bb_closed(s), F_bb_literal(s))):
            assert abs(a - b) <= 1e-10 * abs(a)


def test_factor_zero_of_F():
    # 2^(1-s) = 1 at s = 1 - 2 pi i / log 2, while psi = -1/2 there
    s = 1 - 2j * math.pi / LN2
    assert abs(F_closed(s)) < 1e-13
    assert psi(s) == pytest.approx(-0.5, abs=1e-14)
    assert abs(F_bb_closed(s)) > 1.0


def test_identity_suite_passes_and_detects_fault():
    rows = identity_suite()
    assert all(r["residual"] <= r["bound"] for r in rows)
    faulty = identity_suite(gamma=lambda z: gamma_complex(z) * (1 + 1e-6 * np.asarray(z)))
    assert any(r["residual"] > r["bound"] for r in faulty)
