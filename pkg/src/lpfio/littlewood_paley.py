"""Dyadic Littlewood-Paley cutoffs on the frequency lattice.

``psi_0(xi) = sigma(|xi|)`` where ``sigma`` is a radial profile equal to 1 on
``[0, 1]`` and 0 on ``[2, inf)``. For ``j >= 1``::

    psi_j(xi) = psi_0(2^-j xi) - psi_0(2^-(j-1) xi)      supported in 2^(j-1) <= |xi| <= 2^(j+1)
    Psi_j     = psi_(j+1) + psi_j + psi_(j-1)             with psi_(-1) := 0

The family stores the scaled profiles ``phi_j = psi_0(2^-j .)`` so that every
``psi_j`` is an exact difference and ``Psi_j`` is an exact telescoped
difference, equal to 1 on ``supp psi_j`` without rounding.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .grid import GridFunction, GridSpec, apply_symbol

__all__ = [
    "BumpProfile",
    "MOLLIFIER",
    "SMOOTHSTEP",
    "DyadicCutoffFamily",
    "build_cutoffs",
    "band_project",
    "ball_project",
    "export_cutoffs_csv",
]

_GL_NODES = 160
_CHUNK = 1 << 15


@lru_cache(maxsize=1)
def _gauss_legendre():
    return np.polynomial.legendre.leggauss(_GL_NODES)


def _mollifier(v):
    out = np.zeros_like(v)
    inside = np.abs(v) < 1
    w = v[inside]
    out[inside] = np.exp(-1.0 / (1.0 - w * w))
    return out


def _mollifier_cdf_left(v: np.ndarray) -> np.ndarray:
    """``int_{-1}^{v} rho`` for ``v <= 0`` by Gauss-Legendre on ``[-1, v]``."""
    x, w = _gauss_legendre()
    out = np.empty_like(v)
    for s in range(0, v.size, _CHUNK):
        b = v[s : s + _CHUNK]
        half = (b + 1.0) / 2
        nodes = half[:, None] * (x[None, :] + 1.0) - 1.0
        out[s : s + _CHUNK] = (_mollifier(nodes) @ w) * half
    return out


@lru_cache(maxsize=1)
def _mollifier_half_mass() -> float:
    return float(_mollifier_cdf_left(np.array([0.0]))[0])


def _mollifier_transition(t: np.ndarray) -> np.ndarray:
    # u in (-1, 1) maps [1, 2] onto the mollifier's support; symmetric about u = 0
    u = 2.0 * t - 3.0
    half = _mollifier_half_mass()
    left = u <= 0
    out = np.empty_like(u)
    out[left] = 1.0 - _mollifier_cdf_left(u[left]) / (2 * half)
    out[~left] = _mollifier_cdf_left(-u[~left]) / (2 * half)
    return out


def _smoothstep_transition(t: np.ndarray) -> np.ndarray:
    a = 2.0 - t
    b = t - 1.0
    ga = np.exp(-1.0 / a)
    gb = np.exp(-1.0 / b)
    return ga / (ga + gb)


_TRANSITIONS = {
    "mollifier": _mollifier_transition,
    "smoothstep": _smoothstep_transition,
}


@dataclass(frozen=True)
class BumpProfile:
    """Radial profile ``sigma`` with ``sigma = 1`` on ``[0, 1]`` and ``sigma = 0`` on ``[2, inf)``.

    ``"mollifier"`` (the default family) integrates ``exp(-1/(1-u^2))`` and
    normalises; ``"smoothstep"`` is the ratio ``g(2-t) / (g(2-t) + g(t-1))`` with
    ``g(s) = exp(-1/s)``, kept as an alternative admissible choice.
    """

    kind: str = "mollifier"

    def __post_init__(self):
        if self.kind not in _TRANSITIONS:
            raise ValueError(f"unknown profile {self.kind!r}; choose from {sorted(_TRANSITIONS)}")

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        out = np.where(t <= 1.0, 1.0, 0.0)
        mid = (t > 1.0) & (t < 2.0)
        if np.any(mid):
            out[mid] = _TRANSITIONS[self.kind](t[mid])
        return out


MOLLIFIER = BumpProfile("mollifier")
SMOOTHSTEP = BumpProfile("smoothstep")


def _radial(profile: BumpProfile, r: np.ndarray) -> np.ndarray:
    # evaluate once per distinct radius; lattice radii repeat heavily
    flat = r.reshape(-1)
    uniq, inv = np.unique(flat, return_inverse=True)
    return profile(uniq)[inv].reshape(r.shape)


@dataclass(frozen=True, eq=False)
class DyadicCutoffFamily:
    """Samples of ``psi_j`` and ``Psi_j`` for ``j = 0..J`` on one grid."""

    spec: GridSpec
    profile: BumpProfile
    _levels: np.ndarray = field(repr=False)  # phi_j = psi_0(2^-j xi), j = 0..J+1

    @property
    def J(self) -> int:
        return self.spec.J

    @property
    def levels(self) -> range:
        return range(self.J + 1)

    def _check_level(self, j: int):
        if not 0 <= j <= self.J:
            raise ValueError(f"level {j} outside resolvable range 0..{self.J}")

    def scaled(self, j: int) -> np.ndarray:
        """``psi_0(2^-j xi)`` for ``0 <= j <= J + 1``."""
        return self._levels[j]

    def psi(self, j: int) -> np.ndarray:
        self._check_level(j)
        if j == 0:
            return self._levels[0]
        return self._levels[j] - self._levels[j - 1]

    def Psi(self, j: int) -> np.ndarray:
        self._check_level(j)
        if j <= 1:
            return self._levels[j + 1]
        return self._levels[j + 1] - self._levels[j - 2]

    def rescaled(self, c: float) -> np.ndarray:
        """``psi_0(c xi)`` on the lattice."""
        return _radial(self.profile, c * self.spec.xi_norm())

    def partition_sum(self) -> np.ndarray:
        return sum(self.psi(j) for j in self.levels)


def build_cutoffs(spec: GridSpec, profile: BumpProfile = MOLLIFIER) -> DyadicCutoffFamily:
    if spec.J < 1:
        raise ValueError(f"grid too coarse: J={spec.J}")
    r = spec.xi_norm()
    flat = r.reshape(-1)
    uniq, inv = np.unique(flat, return_inverse=True)
    levels = np.empty((spec.J + 2,) + spec.shape)
    for j in range(spec.J + 2):
        levels[j] = profile(uniq / 2.0**j)[inv].reshape(spec.shape)
    levels.flags.writeable = False
    return DyadicCutoffFamily(spec, profile, levels)


def band_project(f: GridFunction, j: int, family: DyadicCutoffFamily) -> GridFunction:
    """``psi_j(D) f``."""
    if f.spec != family.spec:
        raise ValueError(f"grid mismatch: {f.spec} vs {family.spec}")
    return apply_symbol(f, family.psi(j))


_BALL_MODES = ("psi0", "psi0_half", "high_half")


def ball_project(f: GridFunction, family: DyadicCutoffFamily, mode: str = "psi0") -> GridFunction:
    """Low-frequency multipliers: ``psi_0(D)``, ``psi_0(2D)`` or ``1 - psi_0(2D)``."""
    if f.spec != family.spec:
        raise ValueError(f"grid mismatch: {f.spec} vs {family.spec}")
    if mode == "psi0":
        sym = family.psi(0)
    elif mode == "psi0_half":
        sym = family.rescaled(2.0)
    elif mode == "high_half":
        sym = 1.0 - family.rescaled(2.0)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected one of {_BALL_MODES}")
    return apply_symbol(f, sym)


def export_cutoffs_csv(family: DyadicCutoffFamily, path, samples: int = 512) -> Path:
    """Radial table with columns ``|xi|, psi_0, ..., psi_J`` on ``[0, xi_max]``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    r = np.linspace(0.0, family.spec.xi_max, samples)
    phi = [family.profile(r / 2.0**j) for j in range(family.J + 1)]
    cols = [phi[0]] + [phi[j] - phi[j - 1] for j in range(1, family.J + 1)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi_abs"] + [f"psi_{j}" for j in range(family.J + 1)])
        for i, ri in enumerate(r):
            w.writerow([f"{ri:.17g}"] + [f"{c[i]:.17g}" for c in cols])
    return path
