import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from symcrit.errors import InputError
from symcrit.levy import (Atoms, DensityOnAnnulus, LevyTriplet, StableSymmetric, cutoff, jump_exponent,
                          levy_exponent, stable_constant)

from oracles import stable_constant_quadrature


def test_cutoff_is_open_unit_ball():
    assert cutoff(0.999) == 1.0 and cutoff(1.0) == 0.0 and cutoff(-0.5) == 1.0
    np.testing.assert_array_equal(cutoff([[0.6, 0.7], [0.6, 0.9]]), [1.0, 0.0])


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.9])
def test_stable_constant_matches_quadrature_oracle_1d(alpha):
    assert stable_constant(alpha, 1) == pytest.approx(stable_constant_quadrature(alpha, 1), rel=1e-6, abs=1e-6)


def test_stable_constant_alpha_one_is_minus_pi():
    assert abs(stable_constant(1.0, 1) + math.pi) < 1e-12


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.7])
def test_stable_constant_matches_quadrature_oracle_3d(alpha):
    assert stable_constant(alpha, 3) == pytest.approx(stable_constant_quadrature(alpha, 3), rel=1e-6)


@pytest.mark.parametrize("bad", [0.0, 2.0, -1.0, math.nan])
def test_stable_constant_rejects_index(bad):
    with pytest.raises(InputError):
        stable_constant(bad)


def test_brownian_exponent_is_half_square():
    assert levy_exponent(LevyTriplet.brownian(), 3.0) == pytest.approx(4.5)
    np.testing.assert_allclose(levy_exponent(LevyTriplet.brownian(2.0), np.array([1.0, -2.0])), [1.0, 4.0])


def test_drift_sign():
    assert levy_exponent(LevyTriplet.deterministic(2.0), 1.5) == pytest.approx(-3j)


def test_atoms_exponent_against_direct_sum():
    atoms = Atoms([-2.0, 0.5, 3.0], [1.0, 0.5, 2.0])
    xi = 0.7
    direct = -sum(r * (np.exp(1j * xi * y) - 1 - 1j * xi * y * (abs(y) < 1))
                  for y, r in zip([-2.0, 0.5, 3.0], [1.0, 0.5, 2.0]))
    assert levy_exponent(LevyTriplet(0.0, 0.0, atoms), xi) == pytest.approx(direct, abs=1e-14)


def test_atom_pair_value():
    # symmetric atoms at +-pi/2 with unit mass: psi(1) = 2 (1 - cos(pi/2)) = 2
    t = LevyTriplet(0.0, 0.0, Atoms([-math.pi / 2, math.pi / 2], [1.0, 1.0]))
    assert levy_exponent(t, 1.0) == pytest.approx(2.0)


def test_stable_exponent_is_scaled_power():
    t = LevyTriplet.stable(1.5, 1.0)
    assert levy_exponent(t, 2.0) == pytest.approx(2 ** 1.5)
    t2 = LevyTriplet.stable(0.8, 0.5, dim=2)
    assert levy_exponent(t2, np.array([3.0, 4.0])) == pytest.approx(0.5 * 5 ** 0.8)


def test_stable_levy_density_constant_reproduces_scale():
    # scale = k * (-c_alpha)
    s = StableSymmetric(1.2, 3.0)
    assert s.levy_density_constant * -stable_constant(1.2) == pytest.approx(3.0)


def test_annulus_exponent_against_scipy():
    dens = lambda y: math.exp(-abs(y))
    jumps = DensityOnAnnulus(dens, 0.1, 5.0)
    xi = 1.3
    re = integrate.quad(lambda y: (1 - math.cos(xi * y)) * dens(y), 0.1, 5.0, epsabs=1e-13)[0] * 2
    # odd part: the compensator only acts on |y| < 1 and the density is even, so it cancels
    psi = jump_exponent(jumps, np.array([[xi]]))[0]
    assert psi.real == pytest.approx(re, rel=1e-9)
    assert abs(psi.imag) < 1e-10


def test_annulus_small_jump_variance_enters_gaussian():
    jumps = DensityOnAnnulus(lambda y: 1.0, 0.5, 2.0, small_jump_variance=0.25)
    t = LevyTriplet(0.0, 1.0, jumps)
    np.testing.assert_allclose(t.effective_gaussian(), [[1.25]])


def test_annulus_compensator_drift_of_skewed_density():
    jumps = DensityOnAnnulus(lambda y: 1.0 if y > 0 else 0.0, 0.1, 2.0)
    assert jumps.compensator_drift() == pytest.approx((1.0 - 0.01) / 2, rel=1e-9)
    assert jumps.total_mass == pytest.approx(1.9, rel=1e-9)


@pytest.mark.parametrize("kwargs", [
    dict(drift=[0.0], gaussian=[[-1.0]]),
    dict(drift=[0.0, 0.0], gaussian=np.eye(3)),
    dict(drift=[math.inf], gaussian=[[1.0]]),
])
def test_invalid_triplets(kwargs):
    with pytest.raises(InputError):
        LevyTriplet(**kwargs)


def test_invalid_jump_measures():
    with pytest.raises(InputError):
        Atoms([0.0], [1.0])
    with pytest.raises(InputError):
        Atoms([1.0], [-1.0])
    with pytest.raises(InputError):
        DensityOnAnnulus(lambda y: 1.0, 2.0, 1.0)
    with pytest.raises(InputError):
        LevyTriplet([0.0, 0.0], np.eye(2), Atoms([1.0], [1.0]))


def _triplets():
    atoms = st.builds(lambda locs, masses: Atoms(locs, masses[:len(locs)]),
                      st.lists(st.floats(0.05, 4.0).flatmap(lambda a: st.sampled_from([a, -a])),
                               min_size=1, max_size=4),
                      st.lists(st.floats(0.01, 3.0), min_size=4, max_size=4))
    stable = st.builds(StableSymmetric, st.floats(0.1, 1.95), st.floats(0.1, 3.0))
    return st.builds(LevyTriplet, st.floats(-3, 3).map(lambda v: [v]), st.floats(0, 4).map(lambda v: [[v]]),
                     st.one_of(st.none(), atoms, stable))


@given(_triplets(), st.floats(-20, 20))
def test_exponent_is_negative_definite_shape(t, xi):
    psi = levy_exponent(t, xi)
    assert psi.real >= -1e-10
    assert levy_exponent(t, -xi) == pytest.approx(np.conj(psi), abs=1e-12, rel=1e-12)
    assert levy_exponent(t, 0.0) == 0


@given(_triplets(), st.floats(-5, 5), st.floats(-5, 5))
def test_batch_equals_pointwise(t, a, b):
    batch = levy_exponent(t, np.array([a, b]))
    assert batch[0] == pytest.approx(levy_exponent(t, a), abs=1e-13)
    assert batch[1] == pytest.approx(levy_exponent(t, b), abs=1e-13)
