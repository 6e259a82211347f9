import math

import numpy as np
import pytest

from conftest import random_function
from lpfio.grid import GridFunction, GridSpec, Spectrum, inverse_transform, lp_quasinorm
from lpfio.littlewood_paley import build_cutoffs
from lpfio.spaces import SpaceParams
from lpfio.wave import (
    CauchyData,
    besov_estimate_ratio,
    energy,
    half_wave,
    loss_exponent,
    mass_outside,
    solve_wave,
    wave_multipliers,
    wave_velocity,
)


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def _mode(spec, k):
    xi = spec.frequency_vectors()[k]
    return GridFunction(spec, np.exp(1j * spec.coordinates() @ xi)), float(np.linalg.norm(xi))


def test_half_wave():
    spec = GridSpec(2, 5.0, 32)
    f = random_function(spec, 1)
    assert np.array_equal(half_wave(f, 0.0).values, np.fft.ifftn(np.fft.fftn(f.values)))
    assert abs(lp_quasinorm(half_wave(f, 0.9), 2) / lp_quasinorm(f, 2) - 1) <= 1e-11
    a = half_wave(half_wave(f, 0.3), 0.45)
    assert _rel(a.values, half_wave(f, 0.75).values) <= 1e-10
    assert _rel(half_wave(half_wave(f, 0.6), 0.6, -1).values, f.values) <= 1e-12
    with pytest.raises(ValueError):
        half_wave(f, 1.0, 0)


def test_cauchy_data_grid_check():
    with pytest.raises(ValueError):
        CauchyData(GridFunction.zeros(GridSpec(1, 1.0, 16)), GridFunction.zeros(GridSpec(1, 2.0, 16)))


def test_multiplier_origin_limit():
    spec = GridSpec(1, 2.0, 16)
    c, s = wave_multipliers(spec, 0.7)
    assert c[0] == 1 and s[0] == 0.7


def test_solution_basics():
    spec = GridSpec(2, 2 * math.pi, 32)
    data = CauchyData(random_function(spec, 2), random_function(spec, 3))
    assert _rel(solve_wave(data, 0.0).values, data.f0.values) <= 1e-12
    f, r = _mode(spec, (3, -2))
    u = solve_wave(CauchyData.position_only(f), 1.7)
    assert _rel(u.values, math.cos(1.7 * r) * f.values) <= 1e-11
    g = solve_wave(CauchyData(GridFunction.zeros(spec), f), 1.7)
    assert _rel(g.values, math.sin(1.7 * r) / r * f.values) <= 1e-11


def test_time_reversal():
    spec = GridSpec(2, 4.0, 32)
    f0, f1 = random_function(spec, 4), random_function(spec, 5)
    a = solve_wave(CauchyData(f0, f1 * -1.0), 0.8)
    b = solve_wave(CauchyData(f0, f1), -0.8)
    assert _rel(a.values, b.values) <= 1e-11


def test_velocity_initial_condition():
    spec = GridSpec(1, 2 * math.pi, 64)
    F = (np.random.default_rng(6).standard_normal(64) + 0j) * (spec.xi_norm() <= 8)
    f0 = inverse_transform(Spectrum(spec, F))
    f1 = inverse_transform(Spectrum(spec, np.roll(F, 3)))
    data = CauchyData(f0, f1)
    errs = []
    for d in (1e-2, 5e-3):
        fd = (solve_wave(data, d).values - solve_wave(data, -d).values) / (2 * d)
        errs.append(np.max(np.abs(fd - f1.values)))
    assert 3.5 <= errs[0] / errs[1] <= 4.5
    assert _rel(wave_velocity(data, 0.0).values, f1.values) < 1e-12


def test_energy():
    spec = GridSpec(2, 5.0, 32)
    data = CauchyData(random_function(spec, 7), random_function(spec, 8))
    e0 = energy(data, 0.0)
    for t in (0.5, 1.0, 2.0):
        assert abs(energy(data, t) / e0 - 1) <= 1e-9
    f, r = _mode(spec, (2, 1))
    assert energy(CauchyData.position_only(f), 0.6) == pytest.approx(r * r * spec.L**2, rel=1e-12)
    zero = GridFunction.zeros(spec)
    assert energy(CauchyData(zero, zero), 1.0) == 0


def test_loss_exponent():
    assert loss_exponent(2, 2) == 0
    assert loss_exponent(math.inf, 2) == 0.5
    assert loss_exponent(1, 3) == 1
    assert loss_exponent(0.8, 1) == 0


def _band_limited(spec, seed, lo=1.0):
    r = spec.xi_norm()
    F = np.random.default_rng(seed).standard_normal(spec.shape) * ((r >= lo) & (r <= 2.0**spec.J))
    return inverse_transform(Spectrum(spec, F + 0j))


def test_ratio_one_dimensional_l2():
    spec = GridSpec(1, 2 * math.pi, 256)
    fam = build_cutoffs(spec)
    for seed in range(5):
        data = CauchyData(_band_limited(spec, seed), _band_limited(spec, seed + 50))
        for t in (0.5, 1.0):
            r = besov_estimate_ratio(data, t, SpaceParams("B", 0, 2, 2), fam)
            assert r.value <= 2 and r.loss == 0 and r.in_range


def test_ratio_at_time_zero():
    spec = GridSpec(2, 2 * math.pi, 64)
    fam = build_cutoffs(spec)
    data = CauchyData(_band_limited(spec, 9, lo=2.0), random_function(spec, 10))
    for kind, p, q in (("B", 1, 1), ("F", 4, 2), ("B", math.inf, 2)):
        r = besov_estimate_ratio(data, 0.0, SpaceParams(kind, 0.5, p, q), fam)
        assert r.value <= 1


def test_ratio_l2_two_dimensional():
    spec = GridSpec(2, 2 * math.pi, 64)
    fam = build_cutoffs(spec)
    vals = []
    for seed in range(20):
        data = CauchyData(_band_limited(spec, seed), _band_limited(spec, seed + 100))
        for t in (0.5, 1.0):
            vals.append(besov_estimate_ratio(data, t, SpaceParams("B", 1, 2, 2), fam).value)
    assert max(vals) <= 2


def test_ratio_flags_and_errors():
    spec = GridSpec(2, 2 * math.pi, 32)
    fam = build_cutoffs(spec)
    data = CauchyData.position_only(_band_limited(spec, 1))
    assert not besov_estimate_ratio(data, 1.0, SpaceParams("B", 0, 0.6, 1), fam).in_range
    zero = GridFunction.zeros(spec)
    with pytest.raises(ValueError):
        besov_estimate_ratio(CauchyData(zero, zero), 1.0, SpaceParams("B", 0, 2, 2), fam)


def test_finite_propagation_proxy():
    spec = GridSpec(2, 16.0, 256)
    x = spec.coordinates()
    bump = GridFunction(spec, np.exp(-np.sum(x * x, axis=-1) / (2 * 0.1**2)))
    u = solve_wave(CauchyData.position_only(bump), 1.0)
    frac = mass_outside(u, 1.0 + 0.5 + 1.0)
    assert 0 <= frac < 1e-2
    assert mass_outside(GridFunction.zeros(spec), 1.0) == 0
