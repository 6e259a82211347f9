"""Quick exactness checks: orthogonality, inversion, identity, translation and the like.

Each check returns ``(error, tolerance)``; :func:`run_selftest` runs them all.
"""

from __future__ import annotations

import math

import numpy as np

from .cones import build_directions, cone_cutoff
from .expressions import parse_phase
from .fio import FioOperator, amplitude_one, apply_fio, hilbert_transform, phase_linear, phase_wave, snd_margin
from .grid import GridFunction, GridSpec, Spectrum, apply_symbol, forward_transform, inverse_transform, lp_quasinorm
from .littlewood_paley import band_project, build_cutoffs
from .spaces import bessel_lift
from .wave import CauchyData, half_wave, solve_wave
from .experiments import critical_order

__all__ = ["CHECKS", "run_selftest"]


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def _random(spec: GridSpec, seed: int = 0) -> GridFunction:
    rng = np.random.default_rng(seed)
    return GridFunction(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))


def _mode(spec: GridSpec, k) -> GridFunction:
    xi = spec.frequency_vectors()
    idx = tuple(int(i) for i in k)
    return GridFunction(spec, np.exp(1j * spec.coordinates() @ xi[idx]))


def constant_coefficient():
    spec = GridSpec(2, 3.0, 16)
    F = forward_transform(GridFunction(spec, np.ones(spec.shape))).coefficients
    want = np.zeros(spec.shape, dtype=complex)
    want[0, 0] = spec.L**2
    return float(np.max(np.abs(F - want))), 1e-12


def single_mode():
    spec = GridSpec(1, 5.0, 32)
    F = forward_transform(_mode(spec, (3,))).coefficients
    want = np.zeros(spec.shape, dtype=complex)
    want[3] = spec.L
    return float(np.max(np.abs(F - want))), 1e-12


def round_trip():
    spec = GridSpec(2, 7.0, 32)
    f = _random(spec)
    return _rel(inverse_transform(forward_transform(f)).values, f.values), 1e-12


def parseval():
    spec = GridSpec(1, 4.0, 64)
    f = _random(spec, 1)
    F = forward_transform(f).coefficients
    return abs(lp_quasinorm(f, 2) / math.sqrt(spec.inverse_weight * np.sum(np.abs(F) ** 2)) - 1), 1e-12


def partition_of_unity():
    spec = GridSpec(2, 2 * math.pi, 128)
    fam = build_cutoffs(spec)
    inside = spec.xi_norm() <= 2.0**spec.J
    return float(np.max(np.abs(fam.partition_sum()[inside] - 1))), 1e-13


def band_sum():
    spec = GridSpec(1, 2 * math.pi, 256)
    fam = build_cutoffs(spec)
    rng = np.random.default_rng(2)
    F = (rng.standard_normal(spec.shape) + 0j) * (spec.xi_norm() <= 2.0**spec.J)
    f = inverse_transform(Spectrum(spec, F))
    total = sum(band_project(f, j, fam).values for j in fam.levels)
    return _rel(total, f.values), 1e-12


def bessel_round_trip():
    spec = GridSpec(2, 6.0, 32)
    f = _random(spec, 3)
    return _rel(bessel_lift(bessel_lift(f, 1.5), -1.5).values, f.values), 1e-11


def fio_identity():
    spec = GridSpec(1, 2 * math.pi, 32)
    f = _random(spec, 4)
    out = apply_fio(FioOperator(amplitude_one(), phase_linear()), f)
    return _rel(out.values, f.values), 1e-10


def fio_translation():
    spec = GridSpec(1, 2 * math.pi, 32)
    f = _random(spec, 5)
    v = 4 * spec.h
    out = apply_fio(FioOperator(amplitude_one(), parse_phase(f"(x1 + {v!r})*xi1", 1)), f)
    return _rel(out.values, np.roll(f.values, -4)), 1e-10


def hilbert_cosine():
    spec = GridSpec(1, 2 * math.pi, 64)
    x = spec.axis()
    out = hilbert_transform(GridFunction(spec, np.cos(5 * x)))
    return float(np.max(np.abs(out.values - np.sin(5 * x)))), 1e-11


def snd_identity():
    x = np.array([[0.3, -1.2], [2.0, 0.5]])
    ang = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    e = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    return max(abs(snd_margin(phase_linear(), x, e) - 1), abs(snd_margin(phase_wave(1.0), x, e) - 1)), 1e-6


def cone_count():
    return float(abs(build_directions(4, 2).count - 26)), 0.0


def cone_partition():
    cover = build_directions(5, 2)
    xi = np.random.default_rng(6).standard_normal((200, 2)) * 32
    return float(np.max(np.abs(sum(cone_cutoff(cover, nu, xi) for nu in range(cover.count)) - 1))), 1e-12


def half_wave_isometry():
    spec = GridSpec(2, 5.0, 32)
    f = _random(spec, 7)
    return abs(lp_quasinorm(half_wave(f, 0.7), 2) / lp_quasinorm(f, 2) - 1), 1e-11


def wave_eigenmode():
    spec = GridSpec(2, 2 * math.pi, 32)
    f = _mode(spec, (2, 3))
    u = solve_wave(CauchyData.position_only(f), 1.3)
    return _rel(u.values, math.cos(1.3 * math.sqrt(13)) * f.values), 1e-11


def critical_orders():
    return max(abs(critical_order(2, 3)), abs(critical_order(math.inf, 2) + 0.5), abs(critical_order(0.7, 1))), 0.0


def unimodular_l2():
    spec = GridSpec(1, 3.0, 64)
    f = _random(spec, 8)
    g = apply_symbol(f, np.exp(1j * spec.xi_norm() ** 1.5))
    return abs(lp_quasinorm(g, 2) / lp_quasinorm(f, 2) - 1), 1e-11


CHECKS = {
    "constant_coefficient": constant_coefficient,
    "single_mode": single_mode,
    "round_trip": round_trip,
    "parseval": parseval,
    "partition_of_unity": partition_of_unity,
    "band_sum": band_sum,
    "bessel_round_trip": bessel_round_trip,
    "fio_identity": fio_identity,
    "fio_translation": fio_translation,
    "hilbert_cosine": hilbert_cosine,
    "snd_identity": snd_identity,
    "cone_count": cone_count,
    "cone_partition": cone_partition,
    "half_wave_isometry": half_wave_isometry,
    "wave_eigenmode": wave_eigenmode,
    "critical_orders": critical_orders,
    "unimodular_l2": unimodular_l2,
}


def run_selftest() -> list[tuple[str, float, float, bool]]:
    out = []
    for name, check in CHECKS.items():
        err, tol = check()
        out.append((name, err, tol, err <= tol))
    return out
