"""Besov and Triebel-Lizorkin quasi-norms, Bessel potentials and h^p atoms.

Both quasi-norms are truncated at the family's top level ``J``: nothing above
the grid's resolvable scale is extrapolated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .grid import GridFunction, GridSpec, apply_symbol, lp_norm_values
from .littlewood_paley import DyadicCutoffFamily

__all__ = [
    "SpaceParams",
    "Atom",
    "band_pieces",
    "besov_norm",
    "triebel_norm",
    "space_norm",
    "bessel_lift",
    "make_atom",
    "atom_moments",
    "write_norm_rows",
]

_KIND_ALIASES = {
    "B": "B",
    "besov": "B",
    "F": "F",
    "triebel": "F",
    "triebellizorkin": "F",
    "triebel-lizorkin": "F",
}


def _parse_exponent(v) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    return float(v)


@dataclass(frozen=True)
class SpaceParams:
    """``kind`` is ``"B"`` (Besov) or ``"F"`` (Triebel-Lizorkin); ``p``, ``q`` may be ``inf``."""

    kind: str
    s: float
    p: float
    q: float

    def __post_init__(self):
        key = str(self.kind).strip()
        kind = _KIND_ALIASES.get(key) or _KIND_ALIASES.get(key.lower())
        if kind is None:
            raise ValueError(f"unknown space kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        p, q = _parse_exponent(self.p), _parse_exponent(self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", float(self.s))
        if not (p > 0 and q > 0):
            raise ValueError(f"p and q must be positive, got p={p}, q={q}")
        if kind == "F" and math.isinf(p) and q != 2:
            raise ValueError("F^s_{inf,q} is only supported for q = 2")

    def label(self) -> str:
        fmt = lambda v: "inf" if math.isinf(v) else f"{v:g}"
        return f"{self.kind}^{self.s:g}_{{{fmt(self.p)},{fmt(self.q)}}}"


def band_pieces(f: GridFunction, family: DyadicCutoffFamily) -> np.ndarray:
    """Stack of ``psi_j(D) f`` for ``j = 0..J``; shape ``(J + 1, *grid.shape)``."""
    if f.spec != family.spec:
        raise ValueError(f"grid mismatch: {f.spec} vs {family.spec}")
    F = np.fft.fftn(f.values)
    out = np.empty((family.J + 1,) + f.spec.shape, dtype=np.complex128)
    for j in family.levels:
        out[j] = np.fft.ifftn(F * family.psi(j))
    return out


def _lq(terms: np.ndarray, q: float, axis=0) -> np.ndarray:
    """``l^q`` quasi-norm along ``axis`` with the max factored out."""
    m = np.max(terms, axis=axis)
    if math.isinf(q):
        return m
    safe = np.where(m > 0, m, 1.0)
    r = np.sum((terms / np.expand_dims(safe, axis)) ** q, axis=axis) ** (1.0 / q)
    return np.where(m > 0, m * r, 0.0)


def besov_norm(f: GridFunction, params: SpaceParams, family: DyadicCutoffFamily, bands=None) -> float:
    """``(sum_j 2^(jqs) ||psi_j(D) f||_p^q)^(1/q)`` over ``j = 0..J``."""
    if params.kind != "B":
        raise ValueError(f"besov_norm needs a Besov parameter set, got {params.label()}")
    bands = band_pieces(f, family) if bands is None else bands
    vol = f.spec.cell_volume
    terms = np.array(
        [2.0 ** (j * params.s) * lp_norm_values(bands[j], params.p, vol) for j in range(len(bands))]
    )
    return float(_lq(terms, params.q))


def triebel_norm(f: GridFunction, params: SpaceParams, family: DyadicCutoffFamily, bands=None) -> float:
    """``|| (sum_j 2^(jqs) |psi_j(D) f|^q)^(1/q) ||_p`` over ``j = 0..J``."""
    if params.kind != "F":
        raise ValueError(f"triebel_norm needs a Triebel-Lizorkin parameter set, got {params.label()}")
    bands = band_pieces(f, family) if bands is None else bands
    weights = 2.0 ** (params.s * np.arange(len(bands)))
    weights = weights.reshape((-1,) + (1,) * f.spec.n)
    g = _lq(np.abs(bands) * weights, params.q)
    return lp_norm_values(g, params.p, f.spec.cell_volume)


def space_norm(f: GridFunction, params: SpaceParams, family: DyadicCutoffFamily, bands=None) -> float:
    if params.kind == "B":
        return besov_norm(f, params, family, bands)
    return triebel_norm(f, params, family, bands)


def bessel_lift(f: GridFunction, s_prime: float) -> GridFunction:
    """``(1 - Laplacian)^(s'/2) f`` via the multiplier ``<xi>^s'``."""
    if s_prime == 0:
        return GridFunction(f.spec, f.values.copy())
    r = f.spec.xi_norm()
    return apply_symbol(f, (1.0 + r * r) ** (s_prime / 2.0))


def write_norm_rows(rows, path) -> Path:
    """CSV with header ``kind,s,p,q,J,value``; ``rows`` holds ``(SpaceParams, J, value)``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "s", "p", "q", "J", "value"])
        for params, J, value in rows:
            w.writerow([params.kind, f"{params.s:g}", f"{params.p:g}", f"{params.q:g}", J, f"{value:.17g}"])
    return path


# -- atoms -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Atom:
    center: tuple
    radius: float
    p: float
    M: int
    values: GridFunction

    @property
    def ball_volume(self) -> float:
        return _ball_volume(self.values.spec.n, self.radius)

    @property
    def sup_bound(self) -> float:
        return self.ball_volume ** (-1.0 / self.p)


def _ball_volume(n: int, r: float) -> float:
    return 2.0 * r if n == 1 else math.pi * r * r


def _multi_indices(n: int, order: int):
    return [a for a in product(range(order + 1), repeat=n) if sum(a) <= order]


def atom_moments(atom_values: GridFunction, order: int, center=None) -> dict:
    """``int x^alpha a(x) dx`` (Riemann sums) for ``|alpha| <= order``, optionally about ``center``."""
    spec = atom_values.spec
    pts = spec.points()
    c = (0.0,) * spec.n if center is None else tuple(center)
    out = {}
    for alpha in _multi_indices(spec.n, order):
        mono = np.ones(spec.shape)
        for ax, e in enumerate(alpha):
            mono = mono * (pts[ax] - c[ax]) ** e
        out[alpha] = complex(np.sum(mono * atom_values.values) * spec.cell_volume)
    return out


def make_atom(spec: GridSpec, center, radius: float, p: float, seed: int, poly_degree: int = 3) -> Atom:
    """Pseudorandom smooth h^p atom supported in ``B(center, radius)``.

    A random polynomial times the window ``exp(-1/(1-rho^2))`` (``rho`` the
    scaled distance to the centre) is built, moments up to
    ``M = floor(n(1/p - 1)_+)`` are projected out when ``radius <= 1``
    (two passes), and the result is scaled to ``sup|a| = |B|^(-1/p)``.
    """
    center = tuple(float(c) for c in np.atleast_1d(center))
    if len(center) != spec.n:
        raise ValueError(f"centre {center} does not match dimension {spec.n}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if not 0 < p <= 1:
        raise ValueError(f"atoms need 0 < p <= 1, got {p}")
    if any(abs(c) + 2 * radius > spec.L / 2 for c in center):
        raise ValueError(f"ball B({center}, {radius}) does not fit the torus with margin r")

    n = spec.n
    M = int(math.floor(n * max(1.0 / p - 1.0, 0.0)))
    pts = spec.points()
    u = [(pts[ax] - center[ax]) / radius for ax in range(n)]
    rho2 = sum(v * v for v in u)
    inside = rho2 < 1.0
    if np.count_nonzero(inside) < (M + 2) ** n:
        raise ValueError(f"radius {radius} is not resolved by grid spacing {spec.h}")
    window = np.zeros(spec.shape)
    window[inside] = np.exp(-1.0 / (1.0 - rho2[inside]))

    rng = np.random.default_rng(seed)
    poly = np.zeros(spec.shape)
    for beta in _multi_indices(n, poly_degree):
        term = np.full(spec.shape, rng.standard_normal())
        for ax, e in enumerate(beta):
            term = term * u[ax] ** e
        poly += term
    a = window * poly

    if radius <= 1.0:
        monos = []
        for alpha in _multi_indices(n, M):
            m = np.ones(spec.shape)
            for ax, e in enumerate(alpha):
                m = m * u[ax] ** e
            monos.append(np.where(inside, m, 0.0))
        basis = [m * window for m in monos]
        gram = np.array([[np.sum(mi * bj) for bj in basis] for mi in monos])
        for _ in range(2):
            rhs = np.array([np.sum(mi * a) for mi in monos])
            coef = np.linalg.solve(gram, rhs)
            a = a - sum(c * b for c, b in zip(coef, basis))

    peak = np.max(np.abs(a))
    if peak == 0:
        raise ValueError("degenerate atom draw")
    a = a * (_ball_volume(n, radius) ** (-1.0 / p) / peak)
    return Atom(center, float(radius), float(p), M, GridFunction(spec, a))
