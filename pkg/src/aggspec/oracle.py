"""Brute-force reference built in the distinguishable-monomer product basis.

Every one of the ``N+1`` molecules is tracked individually, the pairwise
exchange ``J |e_i><e_j|`` is dressed with Franck-Condon factors, and the
spectrum comes from a dense eigendecomposition. This shares no code with the
symmetric-basis assembly and exists only to certify it on small aggregates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .basis import enumerate_manifold, max_sector
from .hamiltonian import AggregateConfig
from .vibronic import MonomerModel

DEFAULT_MAX_SITE_DIM = 20_000


@dataclass(frozen=True)
class SiteState:
    """Molecule ``excited_site`` is electronically excited in level ``excited_vib``.

    ``ground_vibs`` lists the ground levels of the other molecules in site order.
    """

    excited_site: int
    excited_vib: int
    ground_vibs: tuple[int, ...]

    def levels(self) -> tuple[int, ...]:
        """Per-site vibrational level (the excited site's entry is its excited level)."""
        lv = list(self.ground_vibs)
        lv.insert(self.excited_site, self.excited_vib)
        return tuple(lv)


def site_dimension(model: MonomerModel, config: AggregateConfig) -> int:
    return config.n_monomers * (model.m_e + 1) * (model.m_g + 1) ** config.n_ground


def site_basis(
    model: MonomerModel, config: AggregateConfig, max_dim: int = DEFAULT_MAX_SITE_DIM
) -> list[SiteState]:
    dim = site_dimension(model, config)
    if dim > max_dim:
        raise MemoryError(f"site-basis dimension {dim} exceeds the cap of {max_dim}")
    return [
        SiteState(i, m, g)
        for i in range(config.n_monomers)
        for m in range(model.m_e + 1)
        for g in product(range(model.m_g + 1), repeat=config.n_ground)
    ]


def site_hamiltonian(
    model: MonomerModel, config: AggregateConfig, max_dim: int = DEFAULT_MAX_SITE_DIM
) -> np.ndarray:
    """Dense single-excitation Hamiltonian over distinguishable molecules."""
    states = site_basis(model, config, max_dim)
    index = {(s.excited_site, s.levels()): a for a, s in enumerate(states)}
    fc, J = model.fc, config.coupling
    h = np.zeros((len(states), len(states)))
    for a, s in enumerate(states):
        lv = s.levels()
        i = s.excited_site
        h[a, a] = model.excited_energies[lv[i]] + sum(
            model.ground_energies[lv[j]] for j in range(len(lv)) if j != i
        )
        for j in range(len(lv)):
            if j == i:
                continue
            # i: (e, lv[i]) -> (g, n);  j: (g, lv[j]) -> (e, m)
            for n in range(model.m_g + 1):
                for m in range(model.m_e + 1):
                    amp = J * fc[n, lv[i]] * fc[lv[j], m]
                    if amp == 0.0:
                        continue
                    new = list(lv)
                    new[i], new[j] = n, m
                    h[index[(j, tuple(new))], a] += amp
    return h


def site_dipole(model: MonomerModel, config: AggregateConfig) -> np.ndarray:
    """``sum_i mu_i`` applied to the all-ground product state."""
    states = site_basis(model, config, max_dim=np.inf)
    vec = np.zeros(len(states))
    for a, s in enumerate(states):
        if not any(s.ground_vibs):
            vec[a] = model.dipole_mag * model.fc[0, s.excited_vib]
    return vec


def site_permutation(model: MonomerModel, config: AggregateConfig, perm) -> np.ndarray:
    """Matrix relabelling molecule ``i`` as ``perm[i]``."""
    states = site_basis(model, config, max_dim=np.inf)
    index = {(s.excited_site, s.levels()): a for a, s in enumerate(states)}
    p = np.zeros((len(states), len(states)))
    for a, s in enumerate(states):
        lv = s.levels()
        new = [0] * len(lv)
        for i, level in enumerate(lv):
            new[perm[i]] = level
        p[index[(perm[s.excited_site], tuple(new))], a] = 1.0
    return p


def symmetric_embedding(
    model: MonomerModel, config: AggregateConfig, k_max: int | None = None
) -> np.ndarray:
    """Isometry whose columns are the symmetric occupation states, sector by sector.

    Column order matches ``BlockChain.full_matrix`` for the same ``k_max``.
    """
    states = site_basis(model, config, max_dim=np.inf)
    top = max_sector(config.n_ground, model.m_g) if k_max is None else k_max
    cols = []
    for k in range(top + 1):
        for occ_state in enumerate_manifold(config.n_ground, model.m_g, model.m_e, k):
            col = np.zeros(len(states))
            for a, s in enumerate(states):
                counts = np.bincount(s.ground_vibs, minlength=model.m_g + 1)
                if s.excited_vib == occ_state.excited_level and tuple(counts) == occ_state.ground_occ:
                    col[a] = 1.0
            cols.append(col / np.linalg.norm(col))
    return np.array(cols).T


def oracle_spectrum(
    model: MonomerModel,
    config: AggregateConfig,
    grid,
    max_dim: int = DEFAULT_MAX_SITE_DIM,
) -> np.ndarray:
    """``-Im <mu (w - H + i gamma/2)^-1 mu>`` by dense diagonalization.

    One uniform damping ``gamma/2`` is used for every eigenstate; compare against
    the symmetric engine run with ``gamma_v = 0``.
    """
    omega = grid.omega if hasattr(grid, "omega") else np.asarray(grid, dtype=float)
    h = site_hamiltonian(model, config, max_dim)
    energies, vecs = np.linalg.eigh(h)
    weights = (vecs.T @ site_dipole(model, config)) ** 2
    resolvent = 1.0 / (omega[:, None] - energies[None, :] + 0.5j * config.gamma)
    return -(resolvent @ weights).imag


@dataclass(frozen=True)
class Deviation:
    max_abs: float
    max_rel: float
    scale: float

    def passes(self, tol: float) -> bool:
        return self.max_abs <= tol


def compare(col_a, col_b, grid_a=None, grid_b=None) -> Deviation:
    """Pointwise deviation between two columns on the same grid.

    ``max_rel`` is ``max_abs`` divided by the largest magnitude in either column.
    """
    a = np.asarray(col_a, dtype=float)
    b = np.asarray(col_b, dtype=float)
    if grid_a is not None and grid_b is not None and grid_a != grid_b:
        raise ValueError("columns live on different grids")
    if a.shape != b.shape:
        raise ValueError(f"grid mismatch: {a.shape} vs {b.shape}")
    diff = float(np.max(np.abs(a - b))) if a.size else 0.0
    scale = float(max(np.max(np.abs(a)), np.max(np.abs(b)))) if a.size else 0.0
    return Deviation(max_abs=diff, max_rel=diff / scale if scale > 0 else 0.0, scale=scale)

