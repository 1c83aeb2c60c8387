"""Second-quantized aggregate Hamiltonian in the symmetric single-excitation basis.

The interaction is

    J * sum_{n m n' m'} fc[n, m'] fc[n', m] b_n^+ B_m^+ B_m' b_n'

which swaps the excitation between the excited molecule (level ``m'`` -> ground
level ``n``) and one ground molecule (level ``n'`` -> excited level ``m``). A
single move changes the number of vibrationally excited ground molecules by at
most one, so the sector chain is block tridiagonal for any ``m_g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .basis import (
    ManifoldBasis,
    OccState,
    enumerate_manifold,
    max_sector,
    total_dimension,
)
from .vibronic import MonomerModel

DEFAULT_MAX_DIM = 200_000


@dataclass(frozen=True)
class AggregateConfig:
    """``n_ground + 1`` identical monomers with uniform all-to-all coupling."""

    n_ground: int
    coupling: float
    gamma: float
    gamma_v: float = 0.0

    def __post_init__(self):
        if int(self.n_ground) != self.n_ground or self.n_ground < 1:
            raise ValueError(f"n_ground must be an integer >= 1, got {self.n_ground}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.gamma_v < 0:
            raise ValueError(f"gamma_v must be non-negative, got {self.gamma_v}")
        object.__setattr__(self, "n_ground", int(self.n_ground))

    @property
    def n_monomers(self) -> int:
        return self.n_ground + 1

    @property
    def collective_coupling(self) -> float:
        return self.n_ground * self.coupling

    def sector_damping(self, k: int) -> float:
        """Imaginary shift for sector ``k``: gamma/2 at k=0, (gamma+gamma_v)/2 above."""
        return 0.5 * self.gamma if k == 0 else 0.5 * (self.gamma + self.gamma_v)


@dataclass(frozen=True)
class BlockChain:
    """Diagonal blocks ``H_k`` and couplings ``v_k`` for sectors ``0..k_max``.

    ``couplings[k]`` has shape ``(dim_k, dim_{k+1})`` and holds
    ``<sector k | H | sector k+1>``.
    """

    diag_blocks: tuple[np.ndarray, ...]
    couplings: tuple[np.ndarray, ...]
    bases: tuple[ManifoldBasis, ...]
    config: AggregateConfig

    @property
    def k_max(self) -> int:
        return len(self.diag_blocks) - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.diag_blocks)

    @property
    def dimension(self) -> int:
        return sum(self.dims)

    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.dims)])

    def full_matrix(self) -> np.ndarray:
        """Dense Hermitian matrix of the truncated chain."""
        off = self.offsets()
        h = np.zeros((self.dimension, self.dimension))
        for k, blk in enumerate(self.diag_blocks):
            h[off[k] : off[k + 1], off[k] : off[k + 1]] = blk
        for k, v in enumerate(self.couplings):
            h[off[k] : off[k + 1], off[k + 1] : off[k + 2]] = v
            h[off[k + 1] : off[k + 2], off[k] : off[k + 1]] = v.T
        return h

    def damping_vector(self) -> np.ndarray:
        return np.concatenate(
            [np.full(d, self.config.sector_damping(k)) for k, d in enumerate(self.dims)]
        )

    def dump(self) -> str:
        """Plain-text dump of every block, row-major."""
        out = []
        for k, blk in enumerate(self.diag_blocks):
            out.append(f"# H_{k} {blk.shape[0]}x{blk.shape[1]}\n")
            out.extend(" ".join(f"{x:.15e}" for x in row) + "\n" for row in blk)
        for k, v in enumerate(self.couplings):
            out.append(f"# v_{k} {v.shape[0]}x{v.shape[1]}\n")
            out.extend(" ".join(f"{x:.15e}" for x in row) + "\n" for row in v)
        return "".join(out)


def _check_compatible(state: OccState, model: MonomerModel, config: AggregateConfig):
    if len(state.ground_occ) != model.m_g + 1:
        raise ValueError(
            f"state {state} has {len(state.ground_occ)} ground levels, model has {model.m_g + 1}"
        )
    if state.excited_level > model.m_e:
        raise ValueError(f"state {state} excited level exceeds m_e={model.m_e}")
    if state.n_ground != config.n_ground:
        raise ValueError(
            f"state {state} holds {state.n_ground} ground molecules, expected {config.n_ground}"
        )


def interaction_element(
    src: OccState, dst: OccState, model: MonomerModel, config: AggregateConfig
) -> float:
    """``<dst| H_int |src>`` for the all-to-all exchange interaction."""
    _check_compatible(src, model, config)
    _check_compatible(dst, model, config)
    fc = model.fc
    m_from, m_to = src.excited_level, dst.excited_level
    diff = [b - a for a, b in zip(src.ground_occ, dst.ground_occ)]
    if not any(diff):
        # n == n': a ground molecule is de-excited back into the level it left
        occ = np.asarray(src.ground_occ, dtype=float)
        amp = float(np.sum(occ * fc[:, m_from] * fc[:, m_to]))
    else:
        gained = [i for i, d in enumerate(diff) if d == 1]
        lost = [i for i, d in enumerate(diff) if d == -1]
        if len(gained) != 1 or len(lost) != 1 or sum(abs(d) for d in diff) != 2:
            return 0.0
        n, n_from = gained[0], lost[0]
        amp = (
            fc[n, m_from]
            * fc[n_from, m_to]
            * sqrt(src.ground_occ[n_from])
            * sqrt(src.ground_occ[n] + 1)
        )
    return config.coupling * amp


def _apply_interaction(state: OccState, model: MonomerModel):
    """Yield ``(target_ground_occ, target_m, amplitude / J)`` for every move out of ``state``."""
    fc = model.fc
    occ = state.ground_occ
    m_from = state.excited_level
    levels = range(model.m_g + 1)
    for n_from in levels:
        if occ[n_from] == 0:
            continue
        for n in levels:
            if n == n_from:
                new = occ
                bose = float(occ[n_from])
            else:
                new = list(occ)
                new[n_from] -= 1
                new[n] += 1
                new = tuple(new)
                bose = sqrt(occ[n_from] * (occ[n] + 1))
            row = fc[n, m_from] * bose
            if row == 0.0:
                continue
            for m in range(model.m_e + 1):
                amp = row * fc[n_from, m]
                if amp != 0.0:
                    yield new, m, amp


def _bare_energies(basis: ManifoldBasis, model: MonomerModel) -> np.ndarray:
    if len(basis) == 0:
        return np.zeros(0)
    return basis.occupations @ model.ground_energies + model.excited_energies[basis.excited_levels]


def _check_basis(basis: ManifoldBasis, model: MonomerModel, config: AggregateConfig):
    if (basis.n_ground, basis.m_g, basis.m_e) != (config.n_ground, model.m_g, model.m_e):
        raise ValueError(
            f"basis (N={basis.n_ground}, m_g={basis.m_g}, m_e={basis.m_e}) does not match "
            f"model/config (N={config.n_ground}, m_g={model.m_g}, m_e={model.m_e})"
        )


def assemble_diag_block(
    k: int, model: MonomerModel, config: AggregateConfig, basis: ManifoldBasis | None = None
) -> np.ndarray:
    """Intra-sector block: bare vibronic energies plus the exchange interaction."""
    if basis is None:
        basis = enumerate_manifold(config.n_ground, model.m_g, model.m_e, k)
    _check_basis(basis, model, config)
    if basis.k != k:
        raise ValueError(f"basis is sector {basis.k}, requested {k}")
    h = np.diag(_bare_energies(basis, model))
    if config.coupling != 0.0:
        for col, state in enumerate(basis.states):
            for occ, m, amp in _apply_interaction(state, model):
                row = basis.index.get(OccState(occ, m))
                if row is not None:
                    h[row, col] += config.coupling * amp
        # products of overlaps are summed in different orders across the diagonal
        h = 0.5 * (h + h.T)
    return h


def assemble_coupling(
    k: int,
    delta: int,
    model: MonomerModel,
    config: AggregateConfig,
    bases: tuple[ManifoldBasis, ManifoldBasis] | None = None,
) -> np.ndarray:
    """Off-diagonal block ``<sector k | H | sector k+delta>``, shape ``(dim_k, dim_{k+delta})``.

    Only ``delta == 1`` can be nonzero; larger offsets return a zero block of
    the right shape.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if bases is None:
        bases = (
            enumerate_manifold(config.n_ground, model.m_g, model.m_e, k),
            enumerate_manifold(config.n_ground, model.m_g, model.m_e, k + delta),
        )
    lo, hi = bases
    _check_basis(lo, model, config)
    _check_basis(hi, model, config)
    if (lo.k, hi.k) != (k, k + delta):
        raise ValueError(
            f"bases are sectors ({lo.k}, {hi.k}), expected ({k}, {k + delta})"
        )
    v = np.zeros((len(lo), len(hi)))
    if delta != 1 or config.coupling == 0.0:
        return v
    # H is real symmetric: fill <hi|H|lo> by acting on sector-k states, store transposed
    for col, state in enumerate(lo.states):
        for occ, m, amp in _apply_interaction(state, model):
            row = hi.index.get(OccState(occ, m))
            if row is not None:
                v[col, row] += config.coupling * amp
    return v


def build_chain(
    model: MonomerModel,
    config: AggregateConfig,
    k_max: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> BlockChain:
    """Assemble sectors ``0..k_max``; ``None`` (or anything beyond N) means the full chain."""
    top = max_sector(config.n_ground, model.m_g)
    if k_max is None:
        k_max = top
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    k_max = min(k_max, top)
    dim = total_dimension(config.n_ground, model.m_g, model.m_e, k_max)
    if dim > max_dim:
        raise MemoryError(
            f"chain dimension {dim} exceeds the cap of {max_dim}; "
            "lower k_max or raise max_dim"
        )
    bases = tuple(
        enumerate_manifold(config.n_ground, model.m_g, model.m_e, k) for k in range(k_max + 1)
    )
    diag = tuple(assemble_diag_block(k, model, config, b) for k, b in enumerate(bases))
    couplings = tuple(
        assemble_coupling(k, 1, model, config, (bases[k], bases[k + 1])) for k in range(k_max)
    )
    for arr in diag + couplings:
        arr.setflags(write=False)
    return BlockChain(diag_blocks=diag, couplings=couplings, bases=bases, config=config)


def interaction_part(block: np.ndarray, basis: ManifoldBasis, model: MonomerModel) -> np.ndarray:
    """Strip the bare vibronic energies from a diagonal block."""
    return block - np.diag(_bare_energies(basis, model))
