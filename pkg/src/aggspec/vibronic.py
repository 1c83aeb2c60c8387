"""Monomer vibronic structure: energies, Franck-Condon overlaps, monomer Green's function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Array = np.ndarray

_NORM_SLACK = 1e-12


@dataclass(frozen=True)
class DisplacedOscillatorSpec:
    """Single-mode displaced harmonic oscillator monomer.

    Both electronic surfaces share the vibrational frequency ``vib_freq``;
    ``m_g`` and ``m_e`` are the highest retained level indices.
    """

    vib_freq: float
    huang_rhys: float
    zero_zero_energy: float
    m_g: int
    m_e: int

    def __post_init__(self):
        if not self.vib_freq > 0:
            raise ValueError(f"vib_freq must be positive, got {self.vib_freq}")
        if self.huang_rhys < 0:
            raise ValueError(f"huang_rhys must be non-negative, got {self.huang_rhys}")
        if self.m_g < 0 or self.m_e < 0:
            raise ValueError("m_g and m_e must be non-negative")


@dataclass(frozen=True)
class MonomerModel:
    """Vibronic eigenenergies of one monomer plus its Franck-Condon matrix.

    ``fc[n, m]`` is the overlap of ground-surface level ``n`` with
    excited-surface level ``m``. The ground-state energy is pinned to zero, so
    the electronic origin lives in ``excited_energies``.
    """

    ground_energies: Array
    excited_energies: Array
    fc: Array
    dipole_mag: float = 1.0

    def __post_init__(self):
        ge = np.array(self.ground_energies, dtype=float).reshape(-1)
        ee = np.array(self.excited_energies, dtype=float).reshape(-1)
        fc = np.array(self.fc, dtype=float)
        if fc.ndim != 2 or fc.shape != (ge.size, ee.size):
            raise ValueError(
                f"fc must have shape ({ge.size}, {ee.size}), got {fc.shape}"
            )
        if ge.size == 0 or ee.size == 0:
            raise ValueError("need at least one ground and one excited level")
        if ge[0] != 0.0:
            raise ValueError("ground_energies[0] must be 0")
        if np.any(np.diff(ge) < 0):
            raise ValueError("ground_energies must be nondecreasing")
        if np.any(np.abs(fc) > 1 + _NORM_SLACK):
            raise ValueError("Franck-Condon overlaps must satisfy |fc| <= 1")
        if not self.dipole_mag > 0:
            raise ValueError("dipole_mag must be positive")
        for arr in (ge, ee, fc):
            arr.setflags(write=False)
        object.__setattr__(self, "ground_energies", ge)
        object.__setattr__(self, "excited_energies", ee)
        object.__setattr__(self, "fc", fc)
        object.__setattr__(self, "dipole_mag", float(self.dipole_mag))

    @property
    def m_g(self) -> int:
        return self.ground_energies.size - 1

    @property
    def m_e(self) -> int:
        return self.excited_energies.size - 1

    @property
    def is_normalized(self) -> bool:
        """True when no row or column of ``fc`` has squared norm above one.

        Unit-overlap toy models (e.g. the Lambda system) deliberately break this.
        """
        sq = self.fc**2
        return bool(
            np.all(sq.sum(axis=0) <= 1 + _NORM_SLACK)
            and np.all(sq.sum(axis=1) <= 1 + _NORM_SLACK)
        )

    @property
    def fc_ground_row(self) -> Array:
        """Overlaps of the vibrationless ground level with every excited level."""
        return self.fc[0]


def franck_condon_matrix(spec: DisplacedOscillatorSpec) -> Array:
    """Overlaps between ground and displaced excited oscillator levels.

    The sign convention is fixed by ``fc[0, m] = exp(-S/2) sqrt(S)**m / sqrt(m!)``
    and the remaining rows follow from the ladder-operator recurrence

        sqrt(n+1) fc[n+1, m] = sqrt(m) fc[n, m-1] - sqrt(S) fc[n, m]

    Spectra depend on products of overlaps, so one global convention must be
    used for every entry; never flip signs column-wise.
    """
    s = float(spec.huang_rhys)
    if s < 0:
        raise ValueError("huang_rhys must be non-negative")
    ng, ne = spec.m_g + 1, spec.m_e + 1
    root_s = np.sqrt(s)
    fc = np.zeros((ng, ne))
    fc[0, 0] = np.exp(-s / 2)
    for m in range(1, ne):
        fc[0, m] = fc[0, m - 1] * root_s / np.sqrt(m)
    for n in range(ng - 1):
        lower = np.zeros(ne)
        lower[1:] = np.sqrt(np.arange(1, ne)) * fc[n, :-1]
        fc[n + 1] = (lower - root_s * fc[n]) / np.sqrt(n + 1)
    return fc


def build_model(spec: DisplacedOscillatorSpec, dipole_mag: float = 1.0) -> MonomerModel:
    """Harmonic ladders on both surfaces with displaced-oscillator overlaps."""
    return MonomerModel(
        ground_energies=spec.vib_freq * np.arange(spec.m_g + 1),
        excited_energies=spec.zero_zero_energy + spec.vib_freq * np.arange(spec.m_e + 1),
        fc=franck_condon_matrix(spec),
        dipole_mag=dipole_mag,
    )


def lambda_model(
    omega_e0: float = 2.3, omega_g1: float = 0.16, dipole_mag: float = 1.0
) -> MonomerModel:
    """Two ground levels, one excited level, all overlaps set to one."""
    return MonomerModel(
        ground_energies=[0.0, omega_g1],
        excited_energies=[omega_e0],
        fc=[[1.0], [1.0]],
        dipole_mag=dipole_mag,
    )


def monomer_green(model: MonomerModel, omega, gamma: float):
    """Scalar monomer Green's function ``sum_m fc[0,m]**2 / (omega - w_em + i gamma/2)``.

    ``omega`` may be a scalar or an array; the result has the same shape.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    w = np.asarray(omega, dtype=float)
    weights = model.fc_ground_row**2
    denom = w[..., None] - model.excited_energies + 0.5j * gamma
    g = (weights / denom).sum(axis=-1)
    return g if g.ndim else complex(g)
