"""Two-photon Hong-Ou-Mandel superresolution imaging toolkit.

Models a pair of incoherent point sources seen through a Gaussian PSF,
computes the spatially resolved coincidence/double densities behind a
50:50 beamsplitter, evaluates classical and quantum Fisher-information
limits for estimating the centroid and the separation, and verifies by
seeded Monte Carlo maximum-likelihood estimation that the two-photon
protocol resolves separations below the Rayleigh limit.
"""

from .densities import (
    OutcomeDensities,
    SourceModel,
    coincidence_prob_derivative,
    densities_with_gradients,
    outcome_densities,
    pc_density,
    pd_density,
    total_coincidence_prob,
)
from .errors import (
    ConfigError,
    DiscretizationError,
    HomsrError,
    InvalidArgumentError,
    NonIdentifiableError,
    QuadratureError,
    SamplingError,
)
from .estimation import (
    EstimationResult,
    GridSpec,
    PrecisionReport,
    Strategy,
    batch_precision,
    derive_seed,
    log_likelihood,
    mle_fit,
    precision_csv_row,
    PRECISION_CSV_HEADER,
)
from .fisher import (
    FisherMatrix,
    QuadratureSpec,
    SldGridSpec,
    crb,
    di_small_eps_reference,
    fi_direct_imaging,
    fi_twophoton_binary,
    fi_twophoton_spatial,
    qfi_numeric_sld,
    qfi_reference,
    twophoton_binary_small_eps_reference,
    twophoton_spatial_small_eps_reference,
)
from .sampling import (
    EVENT_DTYPE,
    BinnedEvents,
    DetectorSpec,
    EventRecord,
    KIND_COINCIDENCE,
    KIND_DOUBLE,
    bin_events,
    load_events_csv,
    sample_events,
    sample_positions,
    to_records,
    write_events_csv,
)
from .scene import (
    SourceScene,
    overlap_delta,
    psf_amplitude,
    rho_kernel,
    single_photon_density,
)

__version__ = "0.1.0"
