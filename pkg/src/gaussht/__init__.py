"""Error exponents for discriminating translation-invariant bosonic Gaussian states.

Closed-form finite-volume and asymptotic quantities (Chernoff and Hoeffding
distances, relative entropies, the rate polar function) for a pair of
gauge-invariant Gaussian states on a cubic lattice, together with a
truncated Fock-space simulator that independently verifies every closed
form.
"""

from .symbols import (
    DiscriminationProblem,
    DisplacementSpec,
    GaussianStateSpec,
    SymbolSpec,
    eval_symbol,
    make_displacement,
    make_trig_symbol,
    strict_positivity_required,
)
from .lattice import SiteIndexer, restrict_displacement, restrict_symbol
from .calculus import (
    EigenSystem,
    apply_fn,
    eigh,
    positive_part_projector,
    sandwich_power,
    trace_fn,
)
from .finite import (
    FiniteProblem,
    FiniteReport,
    FiniteStateData,
    build_state_data,
    chernoff_finite,
    displacement_factor,
    finite_report,
    hoeffding_finite,
    psi_n,
    psi_n_extended,
    relative_entropy_finite,
)
from .asymptotics import (
    AsymptoticProblem,
    AsymptoticReport,
    QuadratureRule,
    asymptotic_report,
    dpsi_boundary,
    hoeffding_threshold,
    integrate,
    make_rule,
    mean_chernoff,
    mean_hoeffding,
    polar,
    psi_asym,
    psi_second,
    szego_check,
)
from .fock import (
    FockBasis,
    NPResult,
    TruncatedFockState,
    build_basis,
    displacement_operator,
    displace_state,
    error_exponent_sweep,
    fock_operator,
    gaussian_density,
    lattice_state,
    neyman_pearson,
    nussbaum_szkola,
    quasi_power_trace,
    second_quantized_trace_check,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
