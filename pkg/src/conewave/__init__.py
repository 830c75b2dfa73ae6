"""conewave: spectral numerics for distributions with half-line Fourier support.

Carriers are cell-averaged spectra on uniform grids over [0, cutoff].  On
top of them sit exact constructors for boundary-value power distributions,
a one-sided Fourier product with quadrature exact for linear spectra,
Sobolev multiplier-bound calculators, a Duhamel/Picard solver for
u_tt - u_xx = kappa u^p, hyperbolic coordinate changes that move stationary
singularities onto arbitrary off-cone rays, windowed-spectrum regularity
diagnostics, and radial power pseudofunctions in higher dimensions.
"""

from .errors import (
    ConewaveError,
    DivergenceError,
    GridMismatchError,
    InvalidArgumentError,
    PartialTrackError,
    SingularPointError,
    StepTooCoarseError,
    UnsupportedExponentError,
    ValidationError,
)
from .spectral import (
    SpectralFunction,
    SpectralGrid,
    Tail,
    eval_physical,
    grid_make,
    indicator_spectrum,
    read_spectrum_csv,
    sobolev_norm,
    truncation_bound,
    write_spectrum_csv,
)
from .pseudofn import (
    PseudofunctionKind,
    PseudofunctionSpec,
    sobolev_membership,
    spectrum_amplitude,
    xplusi0_eval,
    xplusi0_spectrum,
)
from .products import (
    ProbeReport,
    ProductCase,
    RegularityBound,
    fourier_product,
    norm_probe,
    power,
    power_sigma_sup,
    product_sigma_sup,
    sobolev_s_min,
    wave_power_bound,
    wellposed_s_min,
)
from .wavesolver import (
    CauchyData,
    SolveReport,
    SpaceTimeField,
    constant_field,
    duhamel_apply,
    linear_field,
    picard_solve,
    residual,
    residual_profile,
)
from .geometry import (
    BoostSpec,
    BoostedSolution,
    ConeClass,
    Regime,
    Sign,
    boost_eval,
    boosted_cauchy_data,
    boosted_field,
    rapidity,
    ray_classify,
    transform_point,
)
from .radial import (
    RadialSpec,
    StationaryParams,
    laplacian_identity_check,
    power_valid,
    product_exists,
    rlambda_eval,
    rlambda_ft_profile,
    stationary_params_nd,
)
from .diagnostics import (
    RayEstimate,
    RegularityEstimate,
    exponent_profile,
    local_exponent,
    ray_positions,
    singular_set,
    track_ray,
)

__version__ = "0.1.0"
