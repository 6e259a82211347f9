"""Constant-coefficient wave equation ``u_tt = Laplacian u`` on the periodic grid.

``u^(t, xi) = cos(t|xi|) f0^(xi) + sin(t|xi|)/|xi| f1^(xi)``, with the ``xi = 0``
value of ``sin(t|xi|)/|xi|`` taken as its limit ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, GridSpec, apply_symbol, forward_transform
from .littlewood_paley import DyadicCutoffFamily
from .spaces import SpaceParams, space_norm

__all__ = [
    "CauchyData",
    "EstimateRatio",
    "half_wave",
    "wave_multipliers",
    "solve_wave",
    "wave_velocity",
    "energy",
    "loss_exponent",
    "besov_estimate_ratio",
    "mass_outside",
]


@dataclass(frozen=True)
class CauchyData:
    f0: GridFunction
    f1: GridFunction

    def __post_init__(self):
        if self.f0.spec != self.f1.spec:
            raise ValueError(f"position and velocity live on different grids: {self.f0.spec} vs {self.f1.spec}")

    @property
    def spec(self) -> GridSpec:
        return self.f0.spec

    @classmethod
    def position_only(cls, f0: GridFunction) -> "CauchyData":
        return cls(f0, GridFunction.zeros(f0.spec))


def half_wave(f: GridFunction, t: float, sign: int = 1) -> GridFunction:
    """Multiplier ``exp(+- i t |xi|)``."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return apply_symbol(f, np.exp(sign * 1j * t * f.spec.xi_norm()))


def wave_multipliers(spec: GridSpec, t: float) -> tuple[np.ndarray, np.ndarray]:
    """``cos(t|xi|)`` and ``sin(t|xi|)/|xi|`` on the lattice."""
    r = spec.xi_norm()
    c = np.cos(t * r)
    s = np.full(spec.shape, float(t))
    nz = r > 0
    s[nz] = np.sin(t * r[nz]) / r[nz]
    return c, s


def _spectra(data: CauchyData):
    return np.fft.fftn(data.f0.values), np.fft.fftn(data.f1.values)


def solve_wave(data: CauchyData, t: float) -> GridFunction:
    c, s = wave_multipliers(data.spec, t)
    F0, F1 = _spectra(data)
    return GridFunction(data.spec, np.fft.ifftn(c * F0 + s * F1))


def wave_velocity(data: CauchyData, t: float) -> GridFunction:
    """``u_t(t) = -|xi| sin(t|xi|) f0^ + cos(t|xi|) f1^``."""
    r = data.spec.xi_norm()
    F0, F1 = _spectra(data)
    return GridFunction(data.spec, np.fft.ifftn(-r * np.sin(t * r) * F0 + np.cos(t * r) * F1))


def energy(data: CauchyData, t: float = 0.0) -> float:
    """``||grad u(t)||_2^2 + ||u_t(t)||_2^2`` evaluated on the lattice (Parseval)."""
    spec = data.spec
    r = spec.xi_norm()
    c, s = wave_multipliers(spec, t)
    U = forward_transform(data.f0).coefficients * c + forward_transform(data.f1).coefficients * s
    Ut = -r * np.sin(t * r) * forward_transform(data.f0).coefficients + np.cos(t * r) * forward_transform(data.f1).coefficients
    return float(spec.inverse_weight * np.sum((r * r) * np.abs(U) ** 2 + np.abs(Ut) ** 2))


def loss_exponent(p: float, n: int) -> float:
    """``(n-1)|1/p - 1/2|``."""
    inv = 0.0 if math.isinf(p) else 1.0 / p
    return (n - 1) * abs(inv - 0.5)


@dataclass(frozen=True)
class EstimateRatio:
    value: float
    numerator: float
    denominator: float
    loss: float
    in_range: bool


def besov_estimate_ratio(data: CauchyData, t: float, params: SpaceParams, family: DyadicCutoffFamily,
                         bands: dict | None = None) -> EstimateRatio:
    """``||u(t)||_{X^s_{p,q}} / (||f0||_{X^(s+nu)_{p,q}} + ||f1||_{X^(s+nu-1)_{p,q}})``.

    ``in_range`` is False when ``p <= n/(n+1)``. ``bands`` may hold precomputed
    band stacks under the keys ``"u"``, ``"f0"``, ``"f1"``.
    """
    n = data.spec.n
    nu = loss_exponent(params.p, n)
    bands = bands or {}
    # with precomputed bands only the grid of the first argument is consulted
    u = data.f0 if "u" in bands else solve_wave(data, t)
    num = space_norm(u, params, family, bands.get("u"))
    p0 = SpaceParams(params.kind, params.s + nu, params.p, params.q)
    p1 = SpaceParams(params.kind, params.s + nu - 1, params.p, params.q)
    den = space_norm(data.f0, p0, family, bands.get("f0")) + space_norm(data.f1, p1, family, bands.get("f1"))
    if den == 0:
        raise ValueError("zero Cauchy data")
    return EstimateRatio(num / den, num, den, nu, params.p > n / (n + 1))


def mass_outside(u: GridFunction, radius: float, center=None) -> float:
    """Fraction of ``int |u|`` lying outside ``B(center, radius)``."""
    x = u.spec.coordinates()
    c = np.zeros(u.spec.n) if center is None else np.asarray(center, dtype=float)
    outside = np.linalg.norm(x - c, axis=-1) > radius
    a = np.abs(u.values)
    total = a.sum()
    return float(a[outside].sum() / total) if total > 0 else 0.0
