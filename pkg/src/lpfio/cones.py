"""Second dyadic decomposition: direction sets, cone cutoffs and localized kernels.

At level ``j`` the unit circle carries ``ceil(2 pi 2^(j/2))`` equally spaced
directions ``xi_j^nu`` (in 1D the two directions ``+1, -1``). With a bump
profile ``phi``::

    eta_j^nu(xi)   = phi(2^(j/2) |xi/|xi| - xi_j^nu|)
    chi_j^nu       = eta_j^nu / sum_nu eta_j^nu              ("simple")
    chi~_j^nu      = eta_j^nu / (sum_nu (eta_j^nu)^2)^(1/2)  ("quadratic")
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fio import Amplitude, Phase, _lattice_order, oscillatory_sum
from .grid import GridFunction, GridSpec, Spectrum, inverse_transform
from .littlewood_paley import MOLLIFIER, BumpProfile, DyadicCutoffFamily

__all__ = [
    "ConeCover",
    "EnvelopeFit",
    "build_directions",
    "cone_cutoff",
    "cone_cutoff_lattice",
    "cone_kernel",
    "band_kernel",
    "envelope_weight",
    "envelope_fit",
    "cutoff_derivative_probe",
    "export_directions_csv",
    "write_envelope_rows",
]

_NORMALIZATIONS = ("simple", "quadratic")


@dataclass(frozen=True, eq=False)
class ConeCover:
    j: int
    n: int
    directions: np.ndarray = field(repr=False)
    profile: BumpProfile = MOLLIFIER
    normalization: str = "simple"

    def __post_init__(self):
        if self.normalization not in _NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}; expected {_NORMALIZATIONS}")
        self.directions.flags.writeable = False

    @property
    def count(self) -> int:
        return len(self.directions)

    @property
    def width(self) -> float:
        """Angular scale ``2^(-j/2)``."""
        return 2.0 ** (-self.j / 2)

    @property
    def spacing(self) -> float:
        """Arc distance between neighbouring directions (``pi`` in 1D)."""
        return math.pi if self.n == 1 else 2 * math.pi / self.count

    @property
    def count_constant(self) -> float:
        """``count / 2^(j(n-1)/2)``."""
        return self.count / 2.0 ** (self.j * (self.n - 1) / 2)

    def min_chord_separation(self) -> float:
        d = self.directions
        diff = np.linalg.norm(d[:, None, :] - d[None, :, :], axis=-1)
        diff[np.diag_indices(self.count)] = np.inf
        return float(diff.min())

    def covering_radius(self, samples: int = 20000) -> float:
        """Largest arc distance from a sampled unit vector to its nearest direction."""
        if self.n == 1:
            return 0.0
        theta = 2 * math.pi * (np.arange(samples) + 0.5) / samples
        ang = np.arctan2(self.directions[:, 1], self.directions[:, 0])
        d = np.abs((theta[:, None] - ang[None, :] + math.pi) % (2 * math.pi) - math.pi)
        return float(d.min(axis=1).max())

    def with_normalization(self, normalization: str) -> "ConeCover":
        return ConeCover(self.j, self.n, self.directions.copy(), self.profile, normalization)


def build_directions(j: int, n: int, profile: BumpProfile = MOLLIFIER, normalization: str = "simple") -> ConeCover:
    """Uniform angular grid of ``ceil(2 pi 2^(j/2))`` directions (``{+1, -1}`` when ``n = 1``)."""
    if j < 1:
        raise ValueError(f"level must be >= 1, got {j}")
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif n == 2:
        count = math.ceil(2 * math.pi * 2.0 ** (j / 2))
        ang = 2 * math.pi * np.arange(count) / count
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    else:
        raise ValueError(f"cone covers are implemented for n in (1, 2), got {n}")
    return ConeCover(j, n, dirs, profile, normalization)


def _unit(xi: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(xi, axis=-1, keepdims=True)
    return xi / r


def _etas(cover: ConeCover, u: np.ndarray) -> np.ndarray:
    """``eta_j^nu(u)`` for every direction; shape ``(count, *u.shape[:-1])``."""
    scale = 2.0 ** (cover.j / 2)
    out = np.empty((cover.count,) + u.shape[:-1])
    for nu, d in enumerate(cover.directions):
        out[nu] = cover.profile(scale * np.linalg.norm(u - d, axis=-1))
    return out


def _normalized(cover: ConeCover, nu: int, u: np.ndarray) -> np.ndarray:
    scale = 2.0 ** (cover.j / 2)
    eta = cover.profile(scale * np.linalg.norm(u - cover.directions[nu], axis=-1))
    out = np.zeros(eta.shape)
    live = eta > 0
    if not np.any(live):
        return out
    etas = _etas(cover, u[live])
    if cover.normalization == "simple":
        out[live] = eta[live] / etas.sum(axis=0)
    else:
        out[live] = eta[live] / np.sqrt((etas * etas).sum(axis=0))
    return out


def cone_cutoff(cover: ConeCover, nu: int, xi) -> np.ndarray:
    """``chi_j^nu(xi)`` (or ``chi~`` for the quadratic cover); ``xi`` has trailing axis ``n``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != cover.n:
        raise ValueError(f"frequency has dimension {xi.shape[-1]}, cover has {cover.n}")
    if not 0 <= nu < cover.count:
        raise ValueError(f"direction index {nu} outside 0..{cover.count - 1}")
    if np.any(np.all(xi == 0, axis=-1)):
        raise ValueError("cone cutoffs are undefined at xi = 0")
    return _normalized(cover, nu, _unit(xi))


def cone_cutoff_lattice(cover: ConeCover, nu: int, spec: GridSpec) -> np.ndarray:
    """Lattice table of the cone cutoff, set to 0 at ``xi = 0``."""
    if spec.n != cover.n:
        raise ValueError(f"grid dimension {spec.n} does not match cover dimension {cover.n}")
    xi = spec.frequency_vectors()
    r = spec.xi_norm()
    out = np.zeros(spec.shape)
    nz = r > 0
    out[nz] = _normalized(cover, nu, xi[nz] / r[nz][:, None])
    return out


def _kernel(amplitude, phase, weights, y_ref, family, method, workers):
    spec = family.spec
    y = np.zeros(spec.n) if y_ref is None else np.atleast_1d(np.asarray(y_ref, dtype=float))
    multiplier = amplitude.x_independent and phase.frequency_part is not None
    if method == "auto":
        method = "multiplier" if multiplier else "direct"
    if method == "multiplier":
        if not multiplier:
            raise ValueError("multiplier path needs an x-independent amplitude and phase x.xi + phi0(xi)")
        xi = spec.frequency_vectors()
        sym = weights * amplitude.symbol(xi) * np.exp(1j * (phase.frequency_part(xi) - xi @ y))
        return inverse_transform(Spectrum(spec, sym))
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    order = _lattice_order(spec, weights != 0)
    xi = spec.frequency_vectors().reshape(-1, spec.n)[order]
    coeff = weights.reshape(-1)[order] * spec.inverse_weight
    x = spec.coordinates().reshape(-1, spec.n)
    vals = oscillatory_sum(x, xi, coeff, amplitude, phase, shift=y, workers=workers)
    return GridFunction(spec, vals.reshape(spec.shape))


def cone_kernel(
    amplitude: Amplitude,
    phase: Phase,
    j: int,
    nu: int,
    y_ref,
    family: DyadicCutoffFamily,
    cover: ConeCover,
    method: str = "direct",
    workers: int = 1,
) -> GridFunction:
    """``K_j^nu(x, y_ref) = int exp(i(phi(x, xi) - y_ref.xi)) psi_j chi_j^nu a dxi-bar`` over the x-grid.

    ``method="direct"`` sums over the lattice points of the window's support in
    ascending ``|k|``; ``"multiplier"`` uses one inverse FFT and is only valid
    for x-independent amplitudes with phase ``x.xi + phi0(xi)``.
    """
    if cover.j != j:
        raise ValueError(f"cover is for level {cover.j}, kernel requested at level {j}")
    if not 1 <= j <= family.J:
        raise ValueError(f"level {j} outside resolvable range 1..{family.J}")
    w = family.psi(j) * cone_cutoff_lattice(cover, nu, family.spec)
    return _kernel(amplitude, phase, w, y_ref, family, method, workers)


def band_kernel(amplitude: Amplitude, phase: Phase, j: int, y_ref, family: DyadicCutoffFamily,
                method: str = "direct", workers: int = 1) -> GridFunction:
    """Kernel of the band piece without cone localization (the sum of all cone kernels)."""
    return _kernel(amplitude, phase, family.psi(j), y_ref, family, method, workers)


def envelope_weight(phase: Phase, j: int, direction, x: np.ndarray, y_ref, m: float, N_env: float) -> np.ndarray:
    """``2^(-j(m + (n+1)/2)) (1 + |2^j g_1|^2)^N (1 + |2^(j/2) g'|^2)^N`` with
    ``g = grad_xi phi(x, xi_j^nu) - y_ref`` split along and across ``xi_j^nu``."""
    x = np.asarray(x, dtype=float)
    e = np.asarray(direction, dtype=float)
    n = e.shape[-1]
    y = np.zeros(n) if y_ref is None else np.atleast_1d(np.asarray(y_ref, dtype=float))
    g = phase.gradient_xi(x, np.broadcast_to(e, x.shape)) - y
    g1 = g @ e
    gp2 = np.maximum(np.sum(g * g, axis=-1) - g1 * g1, 0.0)
    return (
        2.0 ** (-j * (m + (n + 1) / 2))
        * (1 + (2.0**j * g1) ** 2) ** N_env
        * (1 + 2.0**j * gp2) ** N_env
    )


@dataclass(frozen=True)
class EnvelopeFit:
    j: int
    nu: int
    m: float
    N_env: float
    C: float
    argmax: tuple
    on_boundary: bool


def envelope_fit(K: GridFunction, j: int, nu: int, phase: Phase, m: float, N_env: float, y_ref,
                 cover: ConeCover) -> EnvelopeFit:
    """Smallest ``C`` with ``|K| <= C * 2^(j(m+(n+1)/2)) / envelope`` at every grid point."""
    if N_env < 2:
        raise ValueError(f"N_env must be >= 2, got {N_env}")
    spec = K.spec
    x = spec.coordinates()
    w = envelope_weight(phase, j, cover.directions[nu], x, y_ref, m, N_env)
    vals = np.abs(K.values) * w
    idx = np.unravel_index(int(np.argmax(vals)), spec.shape)
    edge = any(i == 0 or i == spec.N - 1 for i in idx)
    return EnvelopeFit(j, nu, float(m), float(N_env), float(vals[idx]), tuple(float(v) for v in x[idx]), edge)


def cutoff_derivative_probe(cover: ConeCover, nu: int, alpha: tuple, samples: int = 400, seed: int = 0,
                            rel_step: float = 1e-4) -> float:
    """``sup |xi|^|alpha| 2^(-j|alpha|/2) |d^alpha chi_j^nu|`` over random points of the cone in shell ``j``.

    Derivatives are nested central differences with step ``rel_step * |xi|``.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != cover.n or sum(alpha) > 2 or min(alpha) < 0:
        raise ValueError(f"need a multi-index of length {cover.n} and order <= 2, got {alpha}")
    rng = np.random.default_rng(seed)
    e = cover.directions[nu]
    radius = 2.0 ** cover.j * rng.uniform(0.5, 2.0, samples)
    if cover.n == 1:
        pts = (radius * e[0])[:, None]
    else:
        base = math.atan2(e[1], e[0])
        ang = base + rng.uniform(-2, 2, samples) * cover.width
        pts = np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=-1)
    order = sum(alpha)
    h = rel_step * np.linalg.norm(pts, axis=-1, keepdims=True)

    def deriv(p, a):
        if not any(a):
            return cone_cutoff(cover, nu, p)
        a = list(a)
        k = next(i for i, v in enumerate(a) if v)
        a[k] -= 1
        d = np.zeros(cover.n)
        d[k] = 1.0
        return (deriv(p + h * d, a) - deriv(p - h * d, a)) / (2 * h[:, 0])

    vals = np.abs(deriv(pts, alpha))
    weight = np.linalg.norm(pts, axis=-1) ** order * 2.0 ** (-cover.j * order / 2)
    return float(np.max(vals * weight))


def export_directions_csv(cover: ConeCover, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "nu"] + [f"xi{k + 1}" for k in range(cover.n)])
        for nu, d in enumerate(cover.directions):
            w.writerow([cover.j, nu] + [f"{v:.17g}" for v in d])
    return path


def write_envelope_rows(fits, path, config_hash: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "nu", "m", "N_env", "C", "config_hash"])
        for f in fits:
            w.writerow([f.j, f.nu, f"{f.m:g}", f"{f.N_env:g}", f"{f.C:.17g}", config_hash])
    return path
