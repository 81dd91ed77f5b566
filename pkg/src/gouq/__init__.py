"""Stationary laws of a Poisson-driven generalised Ornstein-Uhlenbeck process.

mu_{c,q,r} is the law of sum_n c**-n U_n with U_n i.i.d. rho_{q,r}; the
subpackages decide its infinite divisibility and continuity type, evaluate
its characteristic function and Levy measure, and simulate the process.
"""

__version__ = "0.1.0"

from .params import CValue, ModelParams, RawRates, as_c, degenerate_value, normalize  # noqa: E402
from .rho import rho_cf, rho_entropy, rho_pmf, rho_power_entropy, rho_power_pmf  # noqa: E402
from .divisibility import (  # noqa: E402
    Decision,
    classify_mu_id,
    classify_rho_id,
    classify_sym_id,
    katti,
    levy_coefficients_a,
    sym_coefficients,
)
from .mu import SeriesSampler, mu_cf, mu_cf_modulus_exp, mu_levy_measure, mu_mean, mu_sample  # noqa: E402
from .continuity import (  # noqa: E402
    certify_pisot,
    classify_continuity,
    dim_bound,
    erdos_witness,
    power_singularity_threshold,
)
from .simulate import simulate_path, validate_innovation_law, validate_series_equivalence  # noqa: E402
