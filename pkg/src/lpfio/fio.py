"""Fourier integral operators on the periodic grid.

``T f(x) = sum_k window(xi_k) a(x, xi_k) exp(i phi(x, xi_k)) f^(xi_k) L^-n`` is
evaluated by direct quadrature over the frequency lattice (cost ``O(N^(2n))``).
When the amplitude does not depend on ``x`` and the phase is ``x.xi + phi0(xi)``
the same operator is a Fourier multiplier and :func:`apply_multiplier` gives an
``O(N^n log N)`` path; the two are kept independent so that one checks the other.

Amplitude and phase evaluators are vectorised callables ``g(x, xi)`` taking
arrays whose trailing axis has length ``n`` and broadcasting over the rest.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .grid import GridFunction, GridSpec, apply_symbol, forward_transform
from .littlewood_paley import DyadicCutoffFamily, build_cutoffs

__all__ = [
    "Amplitude",
    "Phase",
    "FioOperator",
    "amplitude_one",
    "amplitude_jap",
    "amplitude_compact_x",
    "phase_linear",
    "phase_wave",
    "phase_anisotropic",
    "named_amplitude",
    "named_phase",
    "window_symbol",
    "multiplier_symbol",
    "oscillatory_sum",
    "apply_fio",
    "apply_multiplier",
    "apply_operator",
    "split_low_high",
    "snd_margin",
    "mixed_hessian",
    "homogeneity_defect",
    "phase_seminorm_probe",
    "amplitude_seminorm_probe",
    "hilbert_transform",
    "sharpness_operator_1d",
    "KernelDecay",
    "low_freq_kernel_decay",
]

XI_STEP_REL = 1e-5
X_STEP = 1e-5
_CHUNK_ELEMENTS = 1 << 21


def _dot(x, xi):
    return np.sum(x * xi, axis=-1)


def _norm(xi):
    return np.sqrt(np.sum(xi * xi, axis=-1))


def _jap(xi):
    return np.sqrt(1.0 + np.sum(xi * xi, axis=-1))


@dataclass(frozen=True)
class Amplitude:
    """Symbol ``a(x, xi)`` of order ``m``.

    ``symbol`` is set for x-independent amplitudes and then gives ``a(xi)``.
    """

    name: str
    order: float
    evaluate: Callable = field(repr=False, compare=False)
    symbol: Callable | None = field(default=None, repr=False, compare=False)

    @property
    def x_independent(self) -> bool:
        return self.symbol is not None

    def __call__(self, x, xi):
        return self.evaluate(x, xi)


@dataclass(frozen=True)
class Phase:
    """Phase ``phi(x, xi)``, positively homogeneous of degree 1 in ``xi``.

    Optional closed forms: ``grad_xi``, ``grad_x`` (arrays with trailing axis
    ``n``) and ``mixed_hessian`` (trailing ``(n, n)``, entry ``[j, k]`` is
    ``d^2 phi / dx_j dxi_k``). ``frequency_part`` is set when
    ``phi = x.xi + phi0(xi)`` and returns ``phi0``.
    """

    name: str
    evaluate: Callable = field(repr=False, compare=False)
    grad_xi: Callable | None = field(default=None, repr=False, compare=False)
    grad_x: Callable | None = field(default=None, repr=False, compare=False)
    mixed_hessian: Callable | None = field(default=None, repr=False, compare=False)
    frequency_part: Callable | None = field(default=None, repr=False, compare=False)

    def __call__(self, x, xi):
        return self.evaluate(x, xi)

    def gradient_xi(self, x, xi) -> np.ndarray:
        if self.grad_xi is not None:
            return np.broadcast_to(self.grad_xi(x, xi), np.broadcast_shapes(np.shape(x), np.shape(xi)))
        return _fd_gradient(self.evaluate, x, xi, wrt="xi")

    def gradient_x(self, x, xi) -> np.ndarray:
        if self.grad_x is not None:
            return np.broadcast_to(self.grad_x(x, xi), np.broadcast_shapes(np.shape(x), np.shape(xi)))
        return _fd_gradient(self.evaluate, x, xi, wrt="x")


def _fd_gradient(func, x, xi, wrt: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    shape = np.broadcast_shapes(x.shape, xi.shape)
    n = shape[-1]
    out = np.empty(shape)
    if wrt == "xi":
        step = XI_STEP_REL * np.maximum(_norm(xi), 1e-300)[..., None]
    else:
        step = np.full(x.shape[:-1] + (1,), X_STEP)
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        d = step * e
        if wrt == "xi":
            hi, lo = func(x, xi + d), func(x, xi - d)
        else:
            hi, lo = func(x + d, xi), func(x - d, xi)
        out[..., k] = (hi - lo) / (2 * step[..., 0])
    return out


def _fd_mixed_hessian(func, x, xi) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    shape = np.broadcast_shapes(x.shape, xi.shape)
    n = shape[-1]
    out = np.empty(shape + (n,))
    ex = X_STEP
    exi = XI_STEP_REL * np.maximum(_norm(xi), 1e-300)
    eye = np.eye(n)
    for j in range(n):
        for k in range(n):
            dx = ex * eye[j]
            dxi = exi[..., None] * eye[k]
            val = (
                func(x + dx, xi + dxi)
                - func(x + dx, xi - dxi)
                - func(x - dx, xi + dxi)
                + func(x - dx, xi - dxi)
            )
            out[..., j, k] = val / (4 * ex * exi)
    return out


def mixed_hessian(phase: Phase, x, xi) -> np.ndarray:
    """``d^2 phi / dx_j dxi_k`` with trailing shape ``(n, n)``."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if phase.mixed_hessian is not None:
        shape = np.broadcast_shapes(x.shape, xi.shape)
        return np.broadcast_to(phase.mixed_hessian(x, xi), shape + (shape[-1],))
    return _fd_mixed_hessian(phase.evaluate, x, xi)


# -- built-in amplitudes and phases --------------------------------------------


def amplitude_one() -> Amplitude:
    def sym(xi):
        return np.ones(np.shape(xi)[:-1])

    return Amplitude("one", 0.0, lambda x, xi: np.ones(np.broadcast_shapes(np.shape(x), np.shape(xi))[:-1]), sym)


def amplitude_jap(m: float) -> Amplitude:
    """``<xi>^m``."""

    def sym(xi):
        return _jap(np.asarray(xi, dtype=float)) ** m

    def ev(x, xi):
        return np.broadcast_to(sym(xi), np.broadcast_shapes(np.shape(x), np.shape(xi))[:-1])

    return Amplitude(f"jap_{m:g}", float(m), ev, sym)


def amplitude_compact_x(m: float, radius: float = 2.0, center=None) -> Amplitude:
    """``<xi>^m * w(x)`` with ``w`` the smooth bump ``exp(1 - 1/(1 - |x - c|^2/R^2))`` on ``B(c, R)``."""

    def window(x):
        x = np.asarray(x, dtype=float)
        c = 0.0 if center is None else np.asarray(center, dtype=float)
        rho2 = np.sum((x - c) ** 2, axis=-1) / radius**2
        out = np.zeros(rho2.shape)
        inside = rho2 < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
        return out

    def ev(x, xi):
        return window(x) * _jap(np.asarray(xi, dtype=float)) ** m

    return Amplitude(f"compact_x_{m:g}", float(m), ev)


def phase_linear() -> Phase:
    return Phase(
        "linear",
        lambda x, xi: _dot(x, xi),
        grad_xi=lambda x, xi: np.asarray(x, dtype=float) + 0 * xi,
        grad_x=lambda x, xi: np.asarray(xi, dtype=float) + 0 * x,
        mixed_hessian=lambda x, xi: np.eye(np.shape(xi)[-1]),
        frequency_part=lambda xi: np.zeros(np.shape(xi)[:-1]),
    )


def phase_wave(t: float = 1.0) -> Phase:
    """``x.xi + t |xi|``."""
    t = float(t)

    def grad_xi(x, xi):
        xi = np.asarray(xi, dtype=float)
        r = _norm(xi)[..., None]
        unit = np.divide(xi, r, out=np.zeros_like(xi), where=r > 0)
        return np.asarray(x, dtype=float) + t * unit

    return Phase(
        f"wave_{t:g}",
        lambda x, xi: _dot(x, xi) + t * _norm(xi),
        grad_xi=grad_xi,
        grad_x=lambda x, xi: np.asarray(xi, dtype=float) + 0 * x,
        mixed_hessian=lambda x, xi: np.eye(np.shape(xi)[-1]),
        frequency_part=lambda xi: t * _norm(np.asarray(xi, dtype=float)),
    )


def phase_anisotropic(diag=(2.0, 0.5), t: float = 1.0) -> Phase:
    """``x.(A xi) + t|xi|`` for diagonal ``A``; in 1D only ``diag[0]`` is used."""
    diag = np.asarray(diag, dtype=float)

    def A(n):
        return diag[:n]

    def ev(x, xi):
        xi = np.asarray(xi, dtype=float)
        return _dot(x, xi * A(xi.shape[-1])) + t * _norm(xi)

    def grad_xi(x, xi):
        xi = np.asarray(xi, dtype=float)
        r = _norm(xi)[..., None]
        unit = np.divide(xi, r, out=np.zeros_like(xi), where=r > 0)
        return np.asarray(x, dtype=float) * A(xi.shape[-1]) + t * unit

    return Phase(
        "anisotropic",
        ev,
        grad_xi=grad_xi,
        grad_x=lambda x, xi: np.asarray(xi, dtype=float) * A(np.shape(xi)[-1]) + 0 * x,
        mixed_hessian=lambda x, xi: np.diag(A(np.shape(xi)[-1])),
    )


def named_amplitude(name: str, m: float = 0.0) -> Amplitude:
    if name == "one":
        return amplitude_one()
    if name == "jap_m":
        return amplitude_jap(m)
    if name == "compact_x":
        return amplitude_compact_x(m)
    raise ValueError(f"unknown amplitude {name!r}; expected one, jap_m or compact_x")


def named_phase(name: str, t: float = 1.0, n: int = 2) -> Phase:
    """Built-in phase by name, otherwise an expression in ``x1, x2, xi1, xi2``."""
    if name == "linear":
        return phase_linear()
    if name == "wave":
        return phase_wave(t)
    if name == "anisotropic":
        return phase_anisotropic(t=t)
    from .expressions import parse_phase

    return parse_phase(name, n)


# -- operators ---------------------------------------------------------------

_WINDOWS = ("all", "low", "high", "band")


@dataclass(frozen=True)
class FioOperator:
    """``T_a^phi`` restricted by a frequency window.

    ``window`` is ``"all"``, ``"low"`` (``psi_0``), ``"high"`` (``1 - psi_0``) or
    ``"band"`` (``(1 - psi_0(2 xi)) psi_j(xi)`` with ``level = j``).
    """

    amplitude: Amplitude
    phase: Phase
    window: str = "all"
    level: int | None = None

    def __post_init__(self):
        if self.window not in _WINDOWS:
            raise ValueError(f"unknown window {self.window!r}; expected one of {_WINDOWS}")
        if self.window == "band" and self.level is None:
            raise ValueError("band window needs a level")

    def band(self, j: int) -> "FioOperator":
        return replace(self, window="band", level=j)

    @property
    def is_multiplier(self) -> bool:
        return self.amplitude.x_independent and self.phase.frequency_part is not None


def window_symbol(op: FioOperator, family: DyadicCutoffFamily) -> np.ndarray:
    if op.window == "all":
        return np.ones(family.spec.shape)
    if op.window == "low":
        return family.psi(0)
    if op.window == "high":
        return 1.0 - family.psi(0)
    return (1.0 - family.rescaled(2.0)) * family.psi(op.level)


def multiplier_symbol(op: FioOperator, family: DyadicCutoffFamily) -> np.ndarray:
    """Lattice table of ``window * a(xi) * exp(i phi0(xi))`` for multiplier-type operators."""
    if not op.is_multiplier:
        raise ValueError(f"operator ({op.amplitude.name}, {op.phase.name}) is not a Fourier multiplier")
    xi = family.spec.frequency_vectors()
    return window_symbol(op, family) * op.amplitude.symbol(xi) * np.exp(1j * op.phase.frequency_part(xi))


def _lattice_order(spec: GridSpec, mask: np.ndarray) -> np.ndarray:
    """Flat indices of ``mask`` sorted by ascending ``|k|`` then lexicographic ``k``."""
    idx = np.flatnonzero(mask.reshape(-1))
    k = np.stack(np.unravel_index(idx, spec.shape), axis=-1)
    k = np.where(k >= spec.N // 2, k - spec.N, k)
    r2 = np.sum(k * k, axis=-1)
    keys = [k[:, a] for a in range(spec.n - 1, -1, -1)] + [r2]
    return idx[np.lexsort(keys)]


def oscillatory_sum(
    x: np.ndarray,
    xi: np.ndarray,
    coeff: np.ndarray,
    amplitude: Amplitude,
    phase: Phase,
    shift: np.ndarray | None = None,
    workers: int = 1,
) -> np.ndarray:
    """``sum_k coeff_k a(x, xi_k) exp(i (phi(x, xi_k) - shift . xi_k))`` for each row of ``x``.

    ``x`` is ``(P, n)``, ``xi`` is ``(K, n)`` in the caller's summation order.
    The phase at ``xi = 0`` is taken to be 0. Each output point is an
    independent pairwise sum along ``k``, so results do not depend on ``workers``.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    coeff = np.asarray(coeff, dtype=np.complex128)
    P, K = x.shape[0], xi.shape[0]
    out = np.zeros(P, dtype=np.complex128)
    if K == 0 or P == 0:
        return out
    zero = np.all(xi == 0, axis=-1)
    lin = None if shift is None else xi @ np.asarray(shift, dtype=float)
    rows = max(1, _CHUNK_ELEMENTS // K)

    def run(s):
        xs = x[s : s + rows, None, :]
        ph = phase(xs, xi[None, :, :])
        ph = np.where(zero[None, :], 0.0, ph)
        if lin is not None:
            ph = ph - lin[None, :]
        am = amplitude(xs, xi[None, :, :])
        bad = ~(np.isfinite(ph) & np.isfinite(am))
        if np.any(bad):
            p_i, k_i = np.argwhere(bad)[0]
            raise ValueError(
                f"non-finite amplitude/phase at x={x[s + p_i].tolist()}, xi={xi[k_i].tolist()}"
            )
        out[s : s + rows] = np.sum(am * np.exp(1j * ph) * coeff[None, :], axis=1)

    starts = range(0, P, rows)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    return out


def apply_fio(
    op: FioOperator,
    f: GridFunction,
    family: DyadicCutoffFamily | None = None,
    workers: int = 1,
) -> GridFunction:
    """Direct lattice quadrature of ``T f`` at every grid point."""
    spec = f.spec
    if family is None:
        family = build_cutoffs(spec)
    elif family.spec != spec:
        raise ValueError(f"grid mismatch: {family.spec} vs {spec}")
    F = forward_transform(f).coefficients
    w = window_symbol(op, family)
    order = _lattice_order(spec, w != 0)
    xi = spec.frequency_vectors().reshape(-1, spec.n)[order]
    coeff = (w * F).reshape(-1)[order] * spec.inverse_weight
    x = spec.coordinates().reshape(-1, spec.n)
    vals = oscillatory_sum(x, xi, coeff, op.amplitude, op.phase, workers=workers)
    return GridFunction(spec, vals.reshape(spec.shape))


def apply_multiplier(symbol, f: GridFunction) -> GridFunction:
    """``inverse_transform(symbol * forward_transform(f))``."""
    return apply_symbol(f, symbol)


def apply_operator(op: FioOperator, f: GridFunction, family: DyadicCutoffFamily | None = None,
                   method: str = "auto", workers: int = 1) -> GridFunction:
    """Multiplier fast path when available (``method="auto"``), else direct quadrature."""
    if family is None:
        family = build_cutoffs(f.spec)
    if method == "multiplier" or (method == "auto" and op.is_multiplier):
        return apply_multiplier(multiplier_symbol(op, family), f)
    if method in ("auto", "direct"):
        return apply_fio(op, f, family, workers=workers)
    raise ValueError(f"unknown method {method!r}")


def split_low_high(op: FioOperator) -> tuple[FioOperator, FioOperator]:
    if op.window != "all":
        raise ValueError(f"operator already windowed ({op.window})")
    return replace(op, window="low"), replace(op, window="high")


# -- phase and amplitude diagnostics -----------------------------------------


def snd_margin(phase: Phase, x_probes, sphere_probes) -> float:
    """``min |det d^2 phi / dx dxi|`` over all probe pairs (sphere probes are unit vectors)."""
    x = np.atleast_2d(np.asarray(x_probes, dtype=float))
    xi = np.atleast_2d(np.asarray(sphere_probes, dtype=float))
    if x.size == 0 or xi.size == 0:
        raise ValueError("probe sets must be nonempty")
    H = mixed_hessian(phase, x[:, None, :], xi[None, :, :])
    if not np.all(np.isfinite(H)):
        raise ValueError("non-finite mixed Hessian entry")
    return float(np.min(np.abs(np.linalg.det(H))))


def homogeneity_defect(phase: Phase, x_probes, xi_probes, factors=(0.5, 2.0)) -> float:
    """``max |phi(x, l xi) - l phi(x, xi)| / (l |xi| max|phi|)`` over the probes."""
    x = np.atleast_2d(np.asarray(x_probes, dtype=float))[:, None, :]
    xi = np.atleast_2d(np.asarray(xi_probes, dtype=float))[None, :, :]
    base = phase(x, xi)
    scale = max(float(np.max(np.abs(base))), 1e-300)
    worst = 0.0
    for lam in factors:
        d = np.abs(phase(x, lam * xi) - lam * base) / (lam * _norm(xi) * scale)
        worst = max(worst, float(np.max(d)))
    return worst


def _fd_partial(func, x, xi, alpha, beta, hx=1e-3, hxi_rel=1e-3):
    """Mixed partial ``d_xi^alpha d_x^beta`` by nested central differences."""
    if not any(alpha) and not any(beta):
        return func(x, xi)
    alpha, beta = list(alpha), list(beta)
    for axis_list, var in ((alpha, "xi"), (beta, "x")):
        for k, e in enumerate(axis_list):
            if e:
                axis_list[k] -= 1
                n = np.shape(xi)[-1]
                d = np.zeros(n)
                if var == "xi":
                    step = hxi_rel * float(np.max(_norm(xi)))
                    d[k] = step
                    hi = _fd_partial(func, x, xi + d, alpha, beta, hx, hxi_rel)
                    lo = _fd_partial(func, x, xi - d, alpha, beta, hx, hxi_rel)
                else:
                    step = hx
                    d[k] = step
                    hi = _fd_partial(func, x + d, xi, alpha, beta, hx, hxi_rel)
                    lo = _fd_partial(func, x - d, xi, alpha, beta, hx, hxi_rel)
                return (hi - lo) / (2 * step)
    raise AssertionError("unreachable")


def phase_seminorm_probe(phase: Phase, x_probes, xi_probes, orders=(2, 3)) -> dict:
    """``max |xi|^(|alpha|-1) |d_xi^alpha d_x^beta phi|`` per total order (finite differences)."""
    from itertools import product

    x = np.atleast_2d(np.asarray(x_probes, dtype=float))
    xis = np.atleast_2d(np.asarray(xi_probes, dtype=float))
    n = x.shape[-1]
    out = {}
    for total in orders:
        worst = 0.0
        for idx in product(range(total + 1), repeat=2 * n):
            if sum(idx) != total:
                continue
            alpha, beta = idx[:n], idx[n:]
            for xi in xis:
                val = _fd_partial(phase.evaluate, x, xi[None, :], alpha, beta)
                w = np.linalg.norm(xi) ** (sum(alpha) - 1)
                worst = max(worst, float(np.max(np.abs(val)) * w))
        out[total] = worst
    return out


def amplitude_seminorm_probe(amplitude: Amplitude, x_probes, xi_probes, max_order: int = 2) -> float:
    """``max |d_xi^alpha a| / <xi>^(m - |alpha|)`` over ``|alpha| <= max_order`` (finite differences)."""
    from itertools import product

    x = np.atleast_2d(np.asarray(x_probes, dtype=float))
    xis = np.atleast_2d(np.asarray(xi_probes, dtype=float))
    n = x.shape[-1]
    worst = 0.0
    for alpha in product(range(max_order + 1), repeat=n):
        if sum(alpha) > max_order:
            continue
        for xi in xis:
            val = _fd_partial(lambda xx, kk: amplitude(xx, kk), x, xi[None, :], alpha, (0,) * n,
                              hxi_rel=1e-3)
            bound = (1 + xi @ xi) ** ((amplitude.order - sum(alpha)) / 2)
            worst = max(worst, float(np.max(np.abs(val)) / bound))
    if not math.isfinite(worst):
        raise ValueError("amplitude is not finite on the probe set")
    return worst


# -- one-dimensional operators -----------------------------------------------------


def hilbert_transform(f: GridFunction) -> GridFunction:
    """Multiplier ``-i sgn(xi)`` with ``sgn(0) = 0``; the unpaired Nyquist mode is dropped."""
    if f.spec.n != 1:
        raise ValueError("the Hilbert transform is implemented for n = 1 only")
    (xi,) = f.spec.frequencies()
    sym = -1j * np.sign(xi)
    sym[f.spec.nyquist_mask()] = 0.0
    return apply_symbol(f, sym)


def sharpness_operator_1d(f: GridFunction) -> GridFunction:
    """``T f = int f^(xi) exp(i|xi| + i x xi) dxi-bar`` as the multiplier ``exp(i|xi|)``."""
    if f.spec.n != 1:
        raise ValueError("the sharpness operator is one-dimensional")
    return apply_symbol(f, np.exp(1j * f.spec.xi_norm()))


# -- low-frequency kernels ---------------------------------------------------------


@dataclass(frozen=True)
class KernelDecay:
    slope: float
    intercept: float
    weighted_sup: float
    weight_exponent: float
    points: int
    kernel: GridFunction = field(repr=False, compare=False)


def low_freq_kernel_decay(
    op: FioOperator,
    x0,
    family: DyadicCutoffFamily,
    fit_range: tuple[float, float] | None = None,
    mu: float = 0.5,
    floor_rel: float = 1e-12,
    workers: int = 1,
) -> KernelDecay:
    """Decay of ``K(y) = int psi_0(xi) a(x0, xi) exp(i(phi(x0, xi) - x0.xi - y.xi)) dxi-bar``.

    Fits ``log|K|`` against ``log<y>`` on ``fit_range`` (default ``4 <= <y> <= L/4``)
    over the grid points where ``|K|`` sits above ``floor_rel * max|K|``, and
    reports ``sup <y>^(n + mu) |K|``.
    """
    if op.window != "low":
        raise ValueError("low_freq_kernel_decay needs a psi_0-windowed operator")
    spec = family.spec
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    w = window_symbol(op, family)
    order = _lattice_order(spec, w != 0)
    xi = spec.frequency_vectors().reshape(-1, spec.n)[order]
    coeff = w.reshape(-1)[order] * spec.inverse_weight
    y = spec.coordinates().reshape(-1, spec.n)

    # K(y) = sum coeff a(x0, xi) e^{i(phi(x0, xi) - x0.xi)} e^{-i y.xi}
    a0 = op.amplitude(x0[None, :], xi)
    ph0 = np.where(np.all(xi == 0, axis=-1), 0.0, op.phase(x0[None, :], xi)) - xi @ x0
    if not (np.all(np.isfinite(a0)) and np.all(np.isfinite(ph0))):
        raise ValueError("non-finite amplitude/phase in low-frequency kernel")
    c = coeff * a0 * np.exp(1j * ph0)
    K = oscillatory_sum(y, -xi, c, amplitude_one(), phase_linear(), workers=workers)

    absK = np.abs(K)
    if absK.max() < 1e-14:
        raise ValueError("insufficient dynamic range: |K| below 1e-14 everywhere")
    jy = np.sqrt(1.0 + np.sum(y * y, axis=-1))
    lo, hi = fit_range if fit_range is not None else (4.0, spec.L / 4)
    sel = (jy >= lo) & (jy <= hi) & (absK > floor_rel * absK.max())
    if np.count_nonzero(sel) < 3:
        raise ValueError("insufficient dynamic range in the fit window")
    slope, intercept = np.polyfit(np.log(jy[sel]), np.log(absK[sel]), 1)
    exponent = spec.n + mu
    return KernelDecay(
        float(slope),
        float(intercept),
        float(np.max(jy**exponent * absK)),
        exponent,
        int(np.count_nonzero(sel)),
        GridFunction(spec, K.reshape(spec.shape)),
    )
