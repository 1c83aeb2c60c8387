"""Linear absorption from the block-tridiagonal chain.

The k=0 block of the resolvent is obtained by backward Schur-complement
recursion (a matrix continued fraction)::

    S_kmax = (w - H_kmax + i G_kmax)^-1
    S_k    = (w - H_k + i G_k - v_k S_{k+1} v_k^T)^-1

and ``sigma(w) = -Im d^T S_0(w) d`` with ``d`` the dipole-excited state.
All frequency-dependent routines are vectorized over the frequency axis.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.signal import find_peaks

from .hamiltonian import AggregateConfig, BlockChain, build_chain
from .vibronic import MonomerModel, monomer_green


class SingularBlockError(ArithmeticError):
    """A shifted diagonal block could not be inverted."""


@dataclass(frozen=True)
class FrequencyGrid:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if not self.start < self.stop:
            raise ValueError(f"grid start ({self.start}) must be below stop ({self.stop})")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"grid count must be an integer >= 2, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def omega(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.count - 1)

    @classmethod
    def around(cls, center: float, vib_freq: float, below: float = 4, above: float = 4, count: int = 4001):
        """Window ``[center - below*vib_freq, center + above*vib_freq]``."""
        return cls(center - below * vib_freq, center + above * vib_freq, count)


def _fmt(x: float) -> str:
    return format(float(x), ".14e")


@dataclass
class Spectrum:
    """Intensity columns sharing one frequency grid."""

    grid: FrequencyGrid
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, name: str, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.grid.count,):
            raise ValueError(
                f"column {name!r} has shape {values.shape}, grid needs ({self.grid.count},)"
            )
        self.columns[name] = values

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_text(self, delimiter: str = ",") -> str:
        names = list(self.columns)
        lines = [delimiter.join(["omega_eV", *names])]
        data = [self.grid.omega, *(self.columns[n] for n in names)]
        for row in zip(*data):
            lines.append(delimiter.join(_fmt(x) for x in row))
        return "\n".join(lines) + "\n"


@dataclass
class SweepSurface:
    """Spectra on a common grid for a range of collective couplings (in units of the vib. frequency)."""

    coupling_axis: np.ndarray
    grid: FrequencyGrid
    intensity: np.ndarray

    def __post_init__(self):
        self.coupling_axis = np.asarray(self.coupling_axis, dtype=float)
        if self.intensity.shape != (self.coupling_axis.size, self.grid.count):
            raise ValueError("intensity must have shape (n_couplings, grid.count)")

    def log_intensity(self, floor: float = 1e-300) -> np.ndarray:
        return np.log10(np.maximum(self.intensity, floor))

    def to_text(self, delimiter: str = ",") -> str:
        logi = self.log_intensity()
        omega = self.grid.omega
        lines = [delimiter.join(["coupling_over_omegav", "omega_eV", "log10_intensity"])]
        for x, row in zip(self.coupling_axis, logi):
            sx = _fmt(x)
            lines.extend(delimiter.join((sx, _fmt(w), _fmt(v))) for w, v in zip(omega, row))
        return "\n".join(lines) + "\n"


def dipole_vector(model: MonomerModel, config: AggregateConfig) -> np.ndarray:
    """Dipole-excited state on the k=0 basis: ``sqrt(N+1) |mu| fc[0, m]``."""
    return np.sqrt(config.n_monomers) * model.dipole_mag * model.fc_ground_row


def _as_omega(omega) -> tuple[np.ndarray, bool]:
    w = np.asarray(omega, dtype=float)
    return w.reshape(-1), w.ndim == 0


# complex entries held per batched inverse; bounds peak memory to a few hundred MB
_BATCH_ELEMENTS = 1 << 21


def _recurse(w: np.ndarray, chain: BlockChain, config: AggregateConfig) -> np.ndarray:
    sigma = None
    for k in range(chain.k_max, -1, -1):
        d = chain.dims[k]
        a = (w + 1j * config.sector_damping(k))[:, None, None] * np.eye(d) - chain.diag_blocks[k]
        if sigma is not None:
            v = chain.couplings[k]
            a -= v @ sigma @ v.T
        try:
            sigma = np.linalg.inv(a)
        except np.linalg.LinAlgError as exc:
            raise SingularBlockError(f"shifted block of sector {k} is singular") from exc
        if not np.all(np.isfinite(sigma)):
            raise SingularBlockError(
                f"shifted block of sector {k} is numerically singular; increase gamma"
            )
    return sigma


def resolvent_k0(omega, chain: BlockChain, config: AggregateConfig | None = None) -> np.ndarray:
    """k=0 block of ``(w - H + i Gamma)^-1`` by backward continued-fraction recursion.

    Returns shape ``(d0, d0)`` for scalar ``omega``, ``(n_omega, d0, d0)`` otherwise.
    Frequencies are processed in batches sized to the largest block; each
    frequency is inverted independently, so batching does not change the result.
    """
    config = chain.config if config is None else config
    w, scalar = _as_omega(omega)
    batch = max(1, _BATCH_ELEMENTS // max(chain.dims) ** 2)
    if w.size <= batch:
        sigma = _recurse(w, chain, config)
    else:
        sigma = np.concatenate([_recurse(w[i : i + batch], chain, config) for i in range(0, w.size, batch)])
    return sigma[0] if scalar else sigma


def resolvent_k0_dense(omega, chain: BlockChain, config: AggregateConfig | None = None) -> np.ndarray:
    """Same quantity as :func:`resolvent_k0` via one dense solve of the full chain."""
    config = chain.config if config is None else config
    w, scalar = _as_omega(omega)
    h = chain.full_matrix()
    damp = np.concatenate(
        [np.full(d, config.sector_damping(k)) for k, d in enumerate(chain.dims)]
    )
    d0 = chain.dims[0]
    rhs = np.zeros((h.shape[0], d0))
    rhs[:d0] = np.eye(d0)
    out = np.empty((w.size, d0, d0), dtype=complex)
    for i, wi in enumerate(w):
        a = np.diag(wi + 1j * damp) - h
        out[i] = np.linalg.solve(a, rhs)[:d0]
    return out[0] if scalar else out


def map_grid(kernel: Callable[[np.ndarray], np.ndarray], omega: np.ndarray, threads: int = 1) -> np.ndarray:
    """Evaluate a vectorized kernel over ``omega``, optionally split across threads.

    Chunks are reassembled in grid order, so the result does not depend on ``threads``.
    """
    omega = np.asarray(omega, dtype=float)
    if threads <= 1 or omega.size < 2 * threads:
        return kernel(omega)
    chunks = np.array_split(omega, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(kernel, chunks))
    return np.concatenate(parts)


def spectrum_from_chain(omega, chain: BlockChain, dipole: np.ndarray, threads: int = 1) -> np.ndarray:
    def kernel(w):
        g = resolvent_k0(w, chain)
        return -np.einsum("i,wij,j->w", dipole, g, dipole).imag

    return map_grid(kernel, omega, threads)


def spectrum(
    model: MonomerModel,
    config: AggregateConfig,
    grid: FrequencyGrid | np.ndarray,
    k_max: int | None = None,
    threads: int = 1,
    chain: BlockChain | None = None,
) -> np.ndarray:
    """Absorption ``-Im <mu G mu>`` keeping sectors ``0..k_max`` (``None``: exact)."""
    omega = grid.omega if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    if chain is None:
        chain = build_chain(model, config, k_max)
    return spectrum_from_chain(omega, chain, dipole_vector(model, config), threads)


def cpa_spectrum(
    model: MonomerModel,
    config: AggregateConfig,
    grid: FrequencyGrid | np.ndarray,
    collective_coupling: float | None = None,
) -> np.ndarray:
    """Classical-optics (DDA/CPA/CES) absorption ``-Im g / (1 - NJ g)`` times ``(N+1)|mu|^2``.

    ``collective_coupling`` overrides ``N*J``, e.g. with :func:`surrogate_coupling`.
    """
    omega = grid.omega if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    nj = config.collective_coupling if collective_coupling is None else collective_coupling
    g = monomer_green(model, omega, config.gamma)
    g = np.atleast_1d(g)
    return -(config.n_monomers * model.dipole_mag**2) * (g / (1.0 - nj * g)).imag


def monomer_spectrum(model: MonomerModel, grid: FrequencyGrid | np.ndarray, gamma: float) -> np.ndarray:
    omega = grid.omega if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    return -(model.dipole_mag**2) * np.atleast_1d(monomer_green(model, omega, gamma)).imag


def surrogate_coupling(couplings: float | Iterable[float]) -> float:
    """Collective coupling of the all-to-all aggregate whose CPA response matches a given geometry.

    Pass the couplings between one monomer and each of its partners (or their
    sum). A nearest-neighbour chain with coupling ``J`` gives ``2J``.
    """
    if np.isscalar(couplings):
        total = float(couplings)
    else:
        total = float(np.sum(np.fromiter(couplings, dtype=float)))
    if not np.isfinite(total):
        raise ValueError("couplings must be finite")
    return total


def total_oscillator_strength(model: MonomerModel, config: AggregateConfig) -> float:
    """``pi (N+1) |mu|^2 sum_m fc[0,m]^2``: the frequency integral of the full spectrum."""
    return np.pi * config.n_monomers * model.dipole_mag**2 * float(np.sum(model.fc_ground_row**2))


def _edge_tails(sigma: np.ndarray, omega: np.ndarray, integral: float) -> float:
    # far tail of a sum of Lorentzians: sigma ~ C / (w - center)^2, whose
    # integral beyond an edge b is sigma(b) * |b - center|
    center = np.trapezoid(sigma * omega, omega) / integral
    return sigma[0] * (center - omega[0]) + sigma[-1] * (omega[-1] - center)


def integrated_intensity(
    sigma: np.ndarray, grid: FrequencyGrid | np.ndarray, tail_correction: bool = True
) -> float:
    """Trapezoid integral of ``sigma``, optionally completed with the Lorentzian tails."""
    omega = grid.omega if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    integral = float(np.trapezoid(sigma, omega))
    if tail_correction and integral > 0:
        integral += _edge_tails(sigma, omega, integral)
    return integral


def sum_rule(
    sigma: np.ndarray,
    grid: FrequencyGrid | np.ndarray,
    model: MonomerModel,
    config: AggregateConfig,
    tail_correction: bool = True,
    edge_tolerance: float = 0.01,
) -> float:
    """Relative deviation of the integrated intensity from ``pi (N+1) |mu|^2 sum_m fc[0,m]^2``.

    Warns (``RuntimeWarning``) when the tails beyond the window are estimated to
    hold more than ``edge_tolerance`` of the weight.
    """
    omega = grid.omega if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    raw = float(np.trapezoid(sigma, omega))
    if raw > 0:
        tails = _edge_tails(sigma, omega, raw)
        if tails > edge_tolerance * raw:
            warnings.warn(
                f"window edges carry ~{tails / raw:.2%} of the spectral weight",
                RuntimeWarning,
                stacklevel=2,
            )
    expected = total_oscillator_strength(model, config)
    return abs(integrated_intensity(sigma, omega, tail_correction) - expected) / expected


def find_peak_positions(
    sigma: np.ndarray, grid: FrequencyGrid | np.ndarray, rel_threshold: float = 1e-4
) -> np.ndarray:
    """Local maxima above ``rel_threshold * max``, refined by a three-point parabola."""
    omega = grid.omega if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    idx, _ = find_peaks(sigma, height=rel_threshold * sigma.max())
    step = omega[1] - omega[0]
    out = []
    for i in idx:
        y0, y1, y2 = sigma[i - 1], sigma[i], sigma[i + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        out.append(omega[i] + shift * step)
    return np.array(out)


def zeroth_order_matrix(model: MonomerModel, collective_coupling: float) -> np.ndarray:
    """``diag(w_em) + NJ c c^T`` with ``c = fc[0, :]``."""
    c = model.fc_ground_row
    return np.diag(model.excited_energies) + collective_coupling * np.outer(c, c)


def sweep(
    model: MonomerModel,
    config: AggregateConfig,
    couplings_over_vib: Iterable[float],
    vib_freq: float,
    grid: FrequencyGrid,
    k_max: int | None = 0,
    threads: int = 1,
) -> SweepSurface:
    """One spectrum per collective coupling ``NJ = x * vib_freq``.

    ``N``, ``gamma`` and ``gamma_v`` come from ``config``; its coupling is ignored.
    """
    axis = np.asarray(list(couplings_over_vib), dtype=float)
    if not np.all(np.isfinite(axis)):
        raise ValueError("coupling axis must be finite")
    rows = []
    for x in axis:
        cfg = AggregateConfig(
            n_ground=config.n_ground,
            coupling=x * vib_freq / config.n_ground,
            gamma=config.gamma,
            gamma_v=config.gamma_v,
        )
        rows.append(spectrum(model, cfg, grid, k_max=k_max, threads=threads))
    intensity = np.array(rows).reshape(axis.size, grid.count)
    return SweepSurface(coupling_axis=axis, grid=grid, intensity=intensity)


def compute_spectrum(
    model: MonomerModel,
    config: AggregateConfig,
    grid: FrequencyGrid,
    methods: Iterable[str | int],
    threads: int = 1,
    max_dim: int | None = None,
) -> Spectrum:
    """Build a :class:`Spectrum` with one column per method.

    Methods are ``"exact"``, ``"cpa"`` or an integer truncation order.
    """
    out = Spectrum(grid)
    kwargs = {} if max_dim is None else {"max_dim": max_dim}
    for method in methods:
        if method == "exact":
            chain = build_chain(model, config, None, **kwargs)
            out.add("sigma_exact", spectrum(model, config, grid, threads=threads, chain=chain))
        elif method == "cpa":
            out.add("sigma_cpa", cpa_spectrum(model, config, grid))
        elif isinstance(method, (int, np.integer)) and not isinstance(method, bool):
            chain = build_chain(model, config, int(method), **kwargs)
            out.add(f"sigma_k{int(method)}", spectrum(model, config, grid, threads=threads, chain=chain))
        else:
            raise ValueError(f"unknown method {method!r}")
    return out

