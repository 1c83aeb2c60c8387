"""Exact and classical-optics absorption spectra of all-to-all coupled molecular aggregates."""

from .basis import ManifoldBasis, OccState, enumerate_manifold, locate, manifold_dimension
from .config import ConfigError, parse_config
from .hamiltonian import (
    AggregateConfig,
    BlockChain,
    assemble_coupling,
    assemble_diag_block,
    build_chain,
    interaction_element,
)
from .oracle import compare, oracle_spectrum, site_hamiltonian
from .response import (
    FrequencyGrid,
    SingularBlockError,
    Spectrum,
    SweepSurface,
    compute_spectrum,
    cpa_spectrum,
    dipole_vector,
    find_peak_positions,
    resolvent_k0,
    spectrum,
    sum_rule,
    surrogate_coupling,
    sweep,
    zeroth_order_matrix,
)
from .vibronic import (
    DisplacedOscillatorSpec,
    MonomerModel,
    build_model,
    franck_condon_matrix,
    lambda_model,
    monomer_green,
)

__version__ = "0.1.0"
