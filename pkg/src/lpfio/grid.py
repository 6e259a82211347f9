"""Periodic sample grids, the scaled discrete Fourier transform and L^p quasi-norms.

A grid models the torus ``[-L/2, L/2)^n`` with ``N`` samples per axis. Samples
sit at ``x_i = -L/2 + i*h`` and the frequency lattice is ``xi_k = 2*pi*k/L`` for
``k`` in ``[-N/2, N/2)``. Spectra are stored in FFT order (``numpy.fft``
layout), so ``Spectrum.coefficients[k]`` pairs with ``GridSpec.frequencies()``.

Transform convention::

    F(xi_k) = h^n * sum_x f(x) exp(-i x.xi_k)
    f(x)    = L^-n * sum_k F(xi_k) exp(i x.xi_k)

which is the Riemann-sum discretisation of ``f^(xi) = int f e^{-ix.xi} dx`` and
``f(x) = int f^ e^{ix.xi} (2 pi)^-n dxi``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "GridSpec",
    "GridFunction",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "apply_symbol",
    "lp_quasinorm",
    "lp_norm_values",
    "pointwise_combine",
    "save_grid_function",
    "load_grid_function",
    "write_grid_csv",
    "read_grid_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Discretisation of the torus ``[-L/2, L/2)^n`` with ``N`` points per axis."""

    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"box length must be positive, got {self.L}")
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError(f"samples per axis must be a power of two >= 8, got {self.N}")
        if self.J < 1:
            raise ValueError(
                f"grid too coarse: max dyadic level J={self.J} < 1 "
                f"(xi_max={self.xi_max:.4g})"
            )

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def xi_max(self) -> float:
        return math.pi * self.N / self.L

    @property
    def J(self) -> int:
        # one dyadic step below Nyquist so that supp psi_J stays resolvable
        return int(math.floor(math.log2(self.xi_max))) - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def dxi(self) -> float:
        """Lattice spacing ``2 pi / L`` of the frequency grid."""
        return 2 * math.pi / self.L

    @property
    def inverse_weight(self) -> float:
        """Weight ``(2 pi)^-n (2 pi / L)^n = L^-n`` of one lattice point in ``dxi-bar``."""
        return self.L ** (-self.n)

    def axis(self) -> np.ndarray:
        return -self.L / 2 + self.h * np.arange(self.N)

    def axis_indices(self) -> np.ndarray:
        """Integer frequency indices along one axis in FFT order."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(np.int64)

    @cached_property
    def _points(self) -> tuple[np.ndarray, ...]:
        grids = np.meshgrid(*([self.axis()] * self.n), indexing="ij")
        for g in grids:
            g.flags.writeable = False
        return tuple(grids)

    @cached_property
    def _frequencies(self) -> tuple[np.ndarray, ...]:
        k = self.axis_indices() * self.dxi
        grids = np.meshgrid(*([k] * self.n), indexing="ij")
        for g in grids:
            g.flags.writeable = False
        return tuple(grids)

    @cached_property
    def _xi_norm(self) -> np.ndarray:
        r = np.sqrt(sum(g * g for g in self._frequencies))
        r.flags.writeable = False
        return r

    @cached_property
    def _sign(self) -> np.ndarray:
        s1 = np.where(self.axis_indices() % 2 == 0, 1.0, -1.0)
        s = s1
        for _ in range(self.n - 1):
            s = np.multiply.outer(s, s1)
        s.flags.writeable = False
        return s

    def points(self) -> tuple[np.ndarray, ...]:
        """Sample coordinates, one array of shape ``self.shape`` per axis."""
        return self._points

    def coordinates(self) -> np.ndarray:
        """Sample coordinates stacked on a trailing axis, shape ``(*shape, n)``."""
        return np.stack(self._points, axis=-1)

    def frequencies(self) -> tuple[np.ndarray, ...]:
        """Lattice frequencies in FFT order, one array per axis."""
        return self._frequencies

    def frequency_vectors(self) -> np.ndarray:
        return np.stack(self._frequencies, axis=-1)

    def xi_norm(self) -> np.ndarray:
        """``|xi_k|`` on the lattice, FFT order."""
        return self._xi_norm

    def nyquist_mask(self) -> np.ndarray:
        """True on lattice points with some index equal to ``-N/2``."""
        k = self.axis_indices() == -(self.N // 2)
        m = k
        for _ in range(self.n - 1):
            m = np.logical_or.outer(m, k)
        return m

    def to_dict(self) -> dict:
        return {"n": self.n, "L": self.L, "N": self.N}


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on a :class:`GridSpec`."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.size != self.spec.size:
            raise ValueError(
                f"expected {self.spec.size} values for {self.spec}, got {v.size}"
            )
        v = v.reshape(self.spec.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function has non-finite entries")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, spec: GridSpec, func) -> "GridFunction":
        return cls(spec, func(*spec.points()))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GridFunction":
        return cls(spec, np.zeros(spec.shape, dtype=np.complex128))

    def flat(self) -> np.ndarray:
        """Row-major flat view of the samples."""
        return self.values.reshape(-1)

    def __add__(self, other):
        return pointwise_combine(self, other, "add")

    def __sub__(self, other):
        return pointwise_combine(self, other, "sub")

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            return pointwise_combine(self, other, "mul")
        return GridFunction(self.spec, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.spec, -self.values)

    def conj(self) -> "GridFunction":
        return GridFunction(self.spec, np.conj(self.values))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Lattice samples of ``f^(xi_k)`` in FFT order."""

    spec: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.size != self.spec.size:
            raise ValueError(
                f"expected {self.spec.size} coefficients for {self.spec}, got {c.size}"
            )
        object.__setattr__(self, "coefficients", c.reshape(self.spec.shape))

    def at_index(self, k) -> complex:
        """Coefficient at integer lattice index ``k`` (tuple or int, may be negative)."""
        k = (k,) if np.isscalar(k) else tuple(k)
        if len(k) != self.spec.n:
            raise ValueError(f"index {k} does not match dimension {self.spec.n}")
        return complex(self.coefficients[tuple(int(i) % self.spec.N for i in k)])




def forward_transform(f: GridFunction) -> Spectrum:
    spec = f.spec
    if f.values.shape != spec.shape:
        raise ValueError(f"shape {f.values.shape} does not match {spec.shape}")
    F = np.fft.fftn(f.values)
    F *= spec._sign
    F *= spec.cell_volume
    return Spectrum(spec, F)


def inverse_transform(F: Spectrum) -> GridFunction:
    spec = F.spec
    if F.coefficients.shape != spec.shape:
        raise ValueError(f"shape {F.coefficients.shape} does not match {spec.shape}")
    f = np.fft.ifftn(F.coefficients * spec._sign)
    f /= spec.cell_volume
    return GridFunction(spec, f)


def apply_symbol(f: GridFunction, symbol) -> GridFunction:
    """``inverse_transform(symbol * forward_transform(f))`` for a lattice table in FFT order.

    Uses the raw FFT pair directly; the sign and volume factors cancel.
    """
    symbol = np.asarray(symbol)
    if symbol.shape not in ((), f.spec.shape):
        raise ValueError(f"symbol shape {symbol.shape} does not match {f.spec.shape}")
    if not np.all(np.isfinite(symbol)):
        raise ValueError("symbol has non-finite entries")
    return GridFunction(f.spec, np.fft.ifftn(np.fft.fftn(f.values) * symbol))


def lp_norm_values(values: np.ndarray, p: float, cell_volume: float) -> float:
    """``(cell_volume * sum |v|^p)^(1/p)``, or ``max |v|`` for ``p = inf``."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    a = np.abs(values)
    m = float(a.max()) if a.size else 0.0
    if m == 0.0:
        return 0.0
    if math.isinf(p):
        return m
    # factor out the max so that |lambda f| scales exactly for power-of-two lambda
    s = float(np.sum((a / m) ** p))
    return m * (cell_volume * s) ** (1.0 / p)


def lp_quasinorm(f: GridFunction, p: float) -> float:
    return lp_norm_values(f.values, p, f.spec.cell_volume)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def pointwise_combine(f: GridFunction, g: GridFunction, op: str, scalars=(1.0, 1.0)) -> GridFunction:
    """Elementwise ``(alpha*f) op (beta*g)``."""
    if f.spec != g.spec:
        raise ValueError(f"grid mismatch: {f.spec} vs {g.spec}")
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}; expected one of {sorted(_OPS)}") from None
    alpha, beta = scalars
    return GridFunction(f.spec, fn(alpha * f.values, beta * g.values))


# -- serialisation ---------------------------------------------------------


def _paths(path) -> tuple[Path, Path]:
    p = Path(path)
    if p.suffix in (".bin", ".json"):
        p = p.with_suffix("")
    return p.with_suffix(".bin"), p.with_suffix(".json")


def save_grid_function(f: GridFunction, path) -> tuple[Path, Path]:
    """Write ``<path>.bin`` (little-endian float64 re/im pairs, row-major) and a JSON sidecar."""
    bin_path, meta_path = _paths(path)
    bin_path.parent.mkdir(parents=True, exist_ok=True)
    f.flat().astype("<c16").tofile(bin_path)
    meta = {**f.spec.to_dict(), "dtype": "complex128-le", "layout": "row-major"}
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return bin_path, meta_path


def load_grid_function(path) -> GridFunction:
    bin_path, meta_path = _paths(path)
    if not meta_path.exists():
        raise FileNotFoundError(f"missing metadata sidecar {meta_path}")
    meta = json.loads(meta_path.read_text())
    spec = GridSpec(int(meta["n"]), float(meta["L"]), int(meta["N"]))
    values = np.fromfile(bin_path, dtype="<c16")
    return GridFunction(spec, values)


def write_grid_csv(f: GridFunction, path) -> Path:
    """Text fallback: header line with the grid, then ``index..., x..., re, im`` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    spec = f.spec
    idx = np.indices(spec.shape).reshape(spec.n, -1).T
    coords = spec.coordinates().reshape(-1, spec.n)
    vals = f.flat()
    names = ["i", "j"][: spec.n]
    with path.open("w", newline="") as fh:
        fh.write(f"# n={spec.n} L={spec.L!r} N={spec.N}\n")
        w = csv.writer(fh)
        w.writerow(names + [f"x{a + 1}" for a in range(spec.n)] + ["re", "im"])
        for ii, xx, v in zip(idx, coords, vals):
            w.writerow([*map(int, ii), *map(repr, map(float, xx)), repr(float(v.real)), repr(float(v.imag))])
    return path


def read_grid_csv(path) -> GridFunction:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().lstrip("#").split()
        meta = dict(item.split("=") for item in header)
        spec = GridSpec(int(meta["n"]), float(meta["L"]), int(meta["N"]))
        rows = list(csv.DictReader(fh))
    values = np.zeros(spec.shape, dtype=np.complex128)
    names = ["i", "j"][: spec.n]
    for r in rows:
        values[tuple(int(r[k]) for k in names)] = complex(float(r["re"]), float(r["im"]))
    return GridFunction(spec, values)
