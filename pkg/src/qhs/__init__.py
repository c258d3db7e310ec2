"""Classical simulation of hidden-subgroup period finding and its recovery steps."""

from .algorithms import (
    ConfigError,
    TrialRecord,
    replay,
    run_alg_circle,
    run_alg_r,
    run_alg_subspace,
    run_dual_shor_sweep,
)
from .groups import Cyclic, Grid, Product, Rational, add, gcd, normalize
from .oracle import (
    OracleInstance,
    make_periodic_oracle,
    make_subspace_oracle,
    minimal_period,
    verify_hidden_structure,
)
from .postprocess import (
    ContinuedFraction,
    SubspaceBasis,
    cf_expand,
    convergents,
    gcd_recover,
    orthogonal_complement,
    recover_rational,
    recover_subspace,
)
from .simulator import BinnedOutcome, SpectralDistribution, bin_frequency, full_state_evolve, left_marginal, measure
from .spectral import AmplitudeVector, dft, dft_product, spectrum_support

__version__ = "0.1.0"
