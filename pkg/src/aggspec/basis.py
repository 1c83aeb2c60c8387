"""Permutation-symmetric occupation basis of the single-excitation manifold.

A state records how many of the ``N`` unexcited molecules sit in each ground
vibrational level, plus the vibronic level of the one excited molecule. States
are grouped into sectors by ``k``, the number of ground-state molecules that
carry vibrational excitation (``n_1 + ... + n_Mg``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb

import numpy as np


@dataclass(frozen=True, order=True)
class OccState:
    """One symmetric configuration ``|n_0 ... n_Mg ; 1_m>``."""

    ground_occ: tuple[int, ...]
    excited_level: int

    def __post_init__(self):
        occ = tuple(int(n) for n in self.ground_occ)
        if any(n < 0 for n in occ):
            raise ValueError(f"negative occupation in {occ}")
        if self.excited_level < 0:
            raise ValueError("excited_level must be non-negative")
        object.__setattr__(self, "ground_occ", occ)
        object.__setattr__(self, "excited_level", int(self.excited_level))

    @property
    def n_ground(self) -> int:
        return sum(self.ground_occ)

    @property
    def sector(self) -> int:
        return sum(self.ground_occ[1:])

    def __str__(self) -> str:
        return "[" + " ".join(map(str, self.ground_occ)) + f" | {self.excited_level}]"


@dataclass(frozen=True)
class ManifoldBasis:
    """All states of one ``k`` sector, in lexicographic order."""

    k: int
    n_ground: int
    m_g: int
    m_e: int
    states: tuple[OccState, ...]
    index: dict[OccState, int] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    @property
    def occupations(self) -> np.ndarray:
        """Ground occupations as an integer array of shape ``(dim, m_g + 1)``."""
        return np.array([s.ground_occ for s in self.states], dtype=np.int64).reshape(
            len(self.states), self.m_g + 1
        )

    @property
    def excited_levels(self) -> np.ndarray:
        return np.array([s.excited_level for s in self.states], dtype=np.int64)

    def dump(self) -> str:
        """One state per line as ``[n0 n1 ... | m]``."""
        return "".join(f"{s}\n" for s in self.states)


def manifold_dimension(m_g: int, m_e: int, k: int) -> int:
    """Number of symmetric states with ``k`` vibrationally excited ground molecules."""
    if k < 0 or m_g < 0 or m_e < 0:
        raise ValueError("m_g, m_e and k must be non-negative")
    if m_g == 0:
        if k > 0:
            raise ValueError("k > 0 is impossible without excited ground levels (m_g = 0)")
        return m_e + 1
    return (m_e + 1) * comb(k + m_g - 1, m_g - 1)


def max_sector(n_ground: int, m_g: int) -> int:
    """Largest populated sector: every unexcited molecule vibrationally excited."""
    return n_ground if m_g >= 1 else 0


def enumerate_manifold(n_ground: int, m_g: int, m_e: int, k: int) -> ManifoldBasis:
    """Enumerate the ``k`` sector for ``n_ground`` unexcited molecules."""
    if n_ground < 0 or m_g < 0 or m_e < 0:
        raise ValueError("n_ground, m_g and m_e must be non-negative")
    if k < 0 or k > max_sector(n_ground, m_g):
        raise ValueError(
            f"sector k={k} is empty for N={n_ground}, m_g={m_g} "
            f"(valid range 0..{max_sector(n_ground, m_g)})"
        )
    ground = []
    for levels in combinations_with_replacement(range(1, m_g + 1), k):
        occ = [0] * (m_g + 1)
        occ[0] = n_ground - k
        for lv in levels:
            occ[lv] += 1
        ground.append(tuple(occ))
    ground.sort()
    states = tuple(OccState(g, m) for g in ground for m in range(m_e + 1))
    return ManifoldBasis(
        k=k,
        n_ground=n_ground,
        m_g=m_g,
        m_e=m_e,
        states=states,
        index={s: i for i, s in enumerate(states)},
    )


def locate(state: OccState, basis: ManifoldBasis) -> int:
    """Position of ``state`` inside ``basis``; ``KeyError`` if it is not a member."""
    try:
        return basis.index[state]
    except KeyError:
        raise KeyError(
            f"state {state} is not in sector k={basis.k} "
            f"(N={basis.n_ground}, m_g={basis.m_g}, m_e={basis.m_e})"
        ) from None


def total_dimension(n_ground: int, m_g: int, m_e: int, k_max: int | None = None) -> int:
    top = max_sector(n_ground, m_g) if k_max is None else min(k_max, max_sector(n_ground, m_g))
    return sum(manifold_dimension(m_g, m_e, k) for k in range(top + 1))
