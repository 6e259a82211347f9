import math

import numpy as np
import pytest

from conftest import random_function
from lpfio.expressions import parse_phase
from lpfio.fio import (
    Amplitude,
    FioOperator,
    amplitude_compact_x,
    amplitude_jap,
    amplitude_one,
    amplitude_seminorm_probe,
    apply_fio,
    apply_multiplier,
    apply_operator,
    hilbert_transform,
    homogeneity_defect,
    low_freq_kernel_decay,
    mixed_hessian,
    multiplier_symbol,
    named_amplitude,
    named_phase,
    oscillatory_sum,
    phase_anisotropic,
    phase_linear,
    phase_seminorm_probe,
    phase_wave,
    sharpness_operator_1d,
    snd_margin,
    split_low_high,
)
from lpfio.grid import GridFunction, GridSpec, Spectrum, inverse_transform, lp_quasinorm
from lpfio.littlewood_paley import ball_project, build_cutoffs
from lpfio.spaces import bessel_lift

SPHERE = np.stack([np.cos(np.linspace(0, 6, 9)), np.sin(np.linspace(0, 6, 9))], axis=-1)
XPROBES = np.array([[0.0, 0.0], [1.5, -0.7], [-3.0, 2.0]])


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def test_identity_and_translation():
    spec = GridSpec(2, 2 * math.pi, 16)
    f = random_function(spec, 1)
    out = apply_fio(FioOperator(amplitude_one(), phase_linear()), f)
    assert _rel(out.values, f.values) <= 1e-10
    v = 3 * spec.h
    shifted = apply_fio(FioOperator(amplitude_one(), parse_phase(f"(x1 + {v!r})*xi1 + x2*xi2", 2)), f)
    assert _rel(shifted.values, np.roll(f.values, -3, axis=0)) <= 1e-10


@pytest.mark.parametrize("n,N", [(1, 64), (2, 16)])
@pytest.mark.parametrize("window", ["all", "low", "high", "band"])
def test_direct_quadrature_matches_multiplier(n, N, window):
    spec = GridSpec(n, 2 * math.pi, N)
    fam = build_cutoffs(spec)
    op = FioOperator(amplitude_jap(-0.5), phase_wave(0.7), window, 2 if window == "band" else None)
    f = random_function(spec, 2)
    direct = apply_operator(op, f, fam, method="direct")
    fast = apply_operator(op, f, fam, method="multiplier")
    assert _rel(direct.values, fast.values) <= 1e-10


def test_direct_path_parallel_is_bitwise_identical():
    spec = GridSpec(2, 2 * math.pi, 16)
    f = random_function(spec, 3)
    op = FioOperator(amplitude_compact_x(0.0), phase_anisotropic())
    a = apply_fio(op, f, workers=1)
    b = apply_fio(op, f, workers=3)
    assert np.array_equal(a.values, b.values)


def test_linearity():
    spec = GridSpec(1, 2 * math.pi, 32)
    op = FioOperator(amplitude_compact_x(1.0), phase_anisotropic())
    f, g = random_function(spec, 4), random_function(spec, 5)
    lhs = apply_fio(op, f * 2.0 + g * (1 - 1j)).values
    rhs = 2.0 * apply_fio(op, f).values + (1 - 1j) * apply_fio(op, g).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_multiplier_paths():
    spec = GridSpec(2, 5.0, 32)
    f = random_function(spec, 6)
    assert _rel(apply_multiplier(np.ones(spec.shape), f).values, f.values) < 1e-14
    jap = (1 + spec.xi_norm() ** 2) ** 0.75
    assert _rel(apply_multiplier(jap, f).values, bessel_lift(f, 1.5).values) < 1e-14
    g = apply_multiplier(np.exp(1j * spec.xi_norm() ** 2), f)
    assert abs(lp_quasinorm(g, 2) / lp_quasinorm(f, 2) - 1) <= 1e-11


def test_split_low_high():
    spec = GridSpec(1, 4 * math.pi, 64)
    fam = build_cutoffs(spec)
    op = FioOperator(amplitude_compact_x(0.0), phase_anisotropic())
    low, high = split_low_high(op)
    f = random_function(spec, 7)
    total = apply_fio(low, f, fam).values + apply_fio(high, f, fam).values
    assert np.max(np.abs(total - apply_fio(op, f, fam).values)) <= 1e-11 * np.max(np.abs(total))
    with pytest.raises(ValueError):
        split_low_high(low)
    # spectrum where psi_0 = 1: nothing reaches the high part
    F = (np.random.default_rng(0).standard_normal(spec.shape) + 0j) * (spec.xi_norm() <= 1)
    g = inverse_transform(Spectrum(spec, F))
    assert np.max(np.abs(apply_fio(high, g, fam).values)) < 1e-12
    lin_low = FioOperator(amplitude_one(), phase_linear(), "low")
    assert _rel(apply_fio(lin_low, f, fam).values, ball_project(f, fam).values) < 1e-10


def test_band_window_includes_half_ball_factor():
    spec = GridSpec(1, 2 * math.pi, 64)
    fam = build_cutoffs(spec)
    op = FioOperator(amplitude_one(), phase_linear(), "band", 1)
    sym = multiplier_symbol(op, fam)
    assert np.allclose(sym, (1 - fam.rescaled(2.0)) * fam.psi(1))
    with pytest.raises(ValueError):
        FioOperator(amplitude_one(), phase_linear(), "band")
    with pytest.raises(ValueError):
        FioOperator(amplitude_one(), phase_linear(), "mid")


def test_non_finite_values_name_the_point():
    bad = Amplitude("bad", 0.0, lambda x, xi: np.where(np.abs(xi[..., 0]) > 2, np.nan, 1.0) + 0 * x[..., 0])
    spec = GridSpec(1, 2 * math.pi, 16)
    with pytest.raises(ValueError, match="xi"):
        apply_fio(FioOperator(bad, phase_linear()), random_function(spec))


def test_oscillatory_sum_phase_at_origin_is_zero():
    x = np.array([[0.3], [1.0]])
    xi = np.array([[0.0], [1.0]])
    out = oscillatory_sum(x, xi, np.array([2.0, 0.0]), amplitude_one(), phase_wave(5.0))
    assert np.allclose(out, 2.0)


def test_snd_margins():
    assert snd_margin(phase_linear(), XPROBES, SPHERE) == 1.0
    assert snd_margin(phase_wave(1.0), XPROBES, SPHERE) == 1.0
    assert snd_margin(phase_anisotropic((2.0, 0.5)), XPROBES, SPHERE) == pytest.approx(1.0, abs=1e-12)
    # finite-difference path through an expression without closed forms still agrees
    expr = parse_phase("2*x1*xi1 + 0.5*x2*xi2 + norm(xi1, xi2)", 2)
    assert snd_margin(expr, XPROBES, SPHERE) == pytest.approx(1.0, abs=1e-8)
    assert snd_margin(expr, XPROBES, 2 * SPHERE) == pytest.approx(snd_margin(expr, XPROBES, SPHERE), abs=1e-8)


def test_fd_mixed_hessian_of_curved_phase():
    ph = parse_phase("x1*xi1 + x2*xi2 + x1*x2*norm(xi1, xi2)", 2)
    plain = type(ph)("fd", ph.evaluate)
    x = np.array([[0.4, -0.3]])
    xi = np.array([[0.6, 0.8]])
    assert np.allclose(mixed_hessian(plain, x, xi), mixed_hessian(ph, x, xi), atol=1e-6)
    assert np.allclose(plain.gradient_xi(x, xi), ph.gradient_xi(x, xi), atol=1e-8)


def test_homogeneity_and_seminorm_probes():
    xis = 3.0 * SPHERE
    for ph in (phase_linear(), phase_wave(1.0), phase_anisotropic()):
        assert homogeneity_defect(ph, XPROBES, xis) <= 1e-9
    probe = phase_seminorm_probe(phase_wave(1.0), XPROBES[:1], xis[:3])
    assert set(probe) == {2, 3} and all(math.isfinite(v) for v in probe.values())
    c = amplitude_seminorm_probe(amplitude_jap(-1.0), XPROBES, xis)
    assert 0 < c < 10


def test_named_lookup():
    assert named_amplitude("one").order == 0
    assert named_amplitude("jap_m", 1.5).order == 1.5
    with pytest.raises(ValueError):
        named_amplitude("gauss")
    assert named_phase("wave", 2.0).frequency_part is not None
    assert named_phase("x1*xi1 + abs(xi1)", n=1).name


def test_hilbert_transform():
    spec = GridSpec(1, 2 * math.pi, 64)
    x = spec.axis()
    assert np.max(np.abs(hilbert_transform(GridFunction(spec, np.cos(3 * x))).values - np.sin(3 * x))) <= 1e-11
    f = GridFunction(spec, np.random.default_rng(1).standard_normal(64))
    # the unpaired Nyquist mode is dropped, so compare on band-limited data
    F = np.fft.fft(f.values)
    F[32] = 0
    f = GridFunction(spec, np.fft.ifft(F).real)
    hh = hilbert_transform(hilbert_transform(f)).values
    assert np.max(np.abs(hh - (-f.values + f.values.mean()))) < 1e-12
    g = GridFunction(spec, np.sin(x) + np.cos(5 * x))
    f0 = GridFunction(spec, f.values - f.values.mean())
    lhs = np.sum(hilbert_transform(f0).values * g.values)
    rhs = -np.sum(f0.values * hilbert_transform(g).values)
    assert abs(lhs - rhs) < 1e-10
    with pytest.raises(ValueError):
        hilbert_transform(random_function(GridSpec(2, 1.0, 8)))


def test_sharpness_operator_identity():
    spec = GridSpec(1, 16.0, 256)
    F = (np.random.default_rng(2).standard_normal(256) + 0j) * (spec.xi_norm() <= 20)
    f = inverse_transform(Spectrum(spec, F))
    shift = round(1 / spec.h)
    Hf = hilbert_transform(f).values
    want = (np.roll(f.values, -shift) + np.roll(f.values, shift)) / 2 + 1j * (np.roll(Hf, -shift) - np.roll(Hf, shift)) / 2
    assert np.max(np.abs(sharpness_operator_1d(f).values - want)) <= 1e-9


def _indicator(spec):
    x = spec.axis()
    v = (np.abs(x) < 1).astype(float)
    v[np.isclose(np.abs(x), 1.0)] = 0.5
    return GridFunction(spec, v)


def test_hilbert_of_indicator():
    spec = GridSpec(1, 256.0, 2**15)
    x = spec.axis()
    Hf = hilbert_transform(_indicator(spec)).values.real
    sel = np.minimum(np.abs(x - 1), np.abs(x + 1)) >= 0.25
    exact = np.log(np.abs((x[sel] + 1) / (x[sel] - 1))) / math.pi
    assert np.max(np.abs(Hf[sel] - exact)) <= 2e-2


def _tail_window(spec):
    x = spec.axis()
    return (np.abs(x) >= 10) & (np.abs(x) <= spec.L / 8)


def test_sharpness_tail_matches_periodized_closed_form():
    spec = GridSpec(1, 256.0, 2**15)
    x = spec.axis()
    sel = _tail_window(spec)
    im = sharpness_operator_1d(_indicator(spec)).values.imag[sel]
    images = sum(np.log(np.abs(1 - 4 / (x[sel] + m * spec.L) ** 2)) for m in range(-400, 401)) / (2 * math.pi)
    assert np.max(np.abs(im / images - 1)) <= 2e-2


@pytest.mark.xfail(strict=True, reason="on a torus of length 256 the periodized kernel shifts the tail by about 5%")
def test_sharpness_tail_matches_free_space_closed_form():
    spec = GridSpec(1, 256.0, 2**15)
    x = spec.axis()
    sel = _tail_window(spec)
    im = sharpness_operator_1d(_indicator(spec)).values.imag[sel]
    exact = np.log(np.abs(1 - 4 / x[sel] ** 2)) / (2 * math.pi)
    assert np.max(np.abs(im / exact - 1)) <= 2e-2


def test_low_frequency_kernel_decay_1d():
    spec = GridSpec(1, 1024.0, 2**14)
    fam = build_cutoffs(spec)
    lin = low_freq_kernel_decay(FioOperator(amplitude_one(), phase_linear(), "low"), [0.0], fam)
    assert lin.slope <= -(1 + 2)
    wave = low_freq_kernel_decay(FioOperator(amplitude_one(), phase_wave(1.0), "low"), [0.0], fam)
    assert math.isfinite(wave.weighted_sup) and wave.weight_exponent == 1.5
    assert wave.slope <= -1.4


def test_low_frequency_kernel_of_linear_phase_is_the_cutoff_kernel():
    spec = GridSpec(1, 64.0, 1024)
    fam = build_cutoffs(spec)
    d = low_freq_kernel_decay(FioOperator(amplitude_one(), phase_linear(), "low"), [0.0], fam)
    # K(y) = inverse transform of psi_0 evaluated at -y, which equals it at y by symmetry
    want = inverse_transform(Spectrum(spec, fam.psi(0) + 0j)).values
    assert np.max(np.abs(d.kernel.values - want)) < 1e-12


def test_low_frequency_kernel_errors():
    spec = GridSpec(1, 64.0, 1024)
    fam = build_cutoffs(spec)
    zero = Amplitude("zero", 0.0, lambda x, xi: np.zeros(np.broadcast_shapes(x.shape, xi.shape)[:-1]))
    with pytest.raises(ValueError, match="dynamic range"):
        low_freq_kernel_decay(FioOperator(zero, phase_linear(), "low"), [0.0], fam)
    with pytest.raises(ValueError):
        low_freq_kernel_decay(FioOperator(amplitude_one(), phase_linear(), "high"), [0.0], fam)
