"""parahorn: realization and extraction of horn-map moduli for parabolic
germs on log-chart domains.

The package turns a finite window of horn-map pairs into a parabolic germ on
a standard (linear or quadratic) log-chart domain via contour-integral
corrections to the model Fatou coordinate, and extracts horn maps back from
a germ via orbit sums, closing the loop for round-trip verification.
"""

from .surface import (
    DomainSpec,
    HalfLine,
    LogPoint,
    PetalId,
    central_line,
    ell,
    from_z,
    parse_domain,
    petal_contains,
    to_z,
)
from .normal_form import (
    FormalClass,
    a_m,
    f0,
    f0_inverse,
    normalize_alpha,
    prenormalized_check,
    psi_nf,
    psi_nf_inverse,
    psi_nf_prime,
    x0_velocity,
)
from .moduli import (
    Equivalence,
    GermSeries,
    HornMapSequence,
    check_radii,
    check_symmetry,
    check_uniform_bounds,
    equivalence_normalize,
    g_from_h,
    h_from_g,
)
from .cauchy_heine import (
    CHConfig,
    CocycleField,
    ch_deformed,
    ch_line_integral,
    ch_on_line,
    realize_cocycle,
    region_classify,
    window_lines,
    window_petals,
)
from .realize import (
    FatouAtlas,
    IterationConfig,
    RealizedGerm,
    check_r_plus_invariance,
    correction_coefficients,
    gevrey_report,
    iterate_fatou,
    realization_report,
    realize_linear,
    recover_germ,
)
from .extract import (
    FatouExtract,
    OrbitConfig,
    RoundtripReport,
    apply_equivalence,
    extract_gluing_series,
    extract_horn_maps,
    fatou_from_germ,
    horn_maps_from_fatou,
    orbit_correction,
    roundtrip,
)
from .asymptotics import (
    FlatnessCertificate,
    GevreyReport,
    flatness_certificate,
    log_gevrey_bound,
    quadratic_weak_bound,
    verify_log_gevrey,
)
from .util import (
    BoundaryIndeterminateError,
    ConvergenceError,
    DivergenceError,
    DomainTooLargeError,
    EscapeError,
    InversionError,
    ParahornError,
    SingularPointError,
    TooCloseToLineError,
    ValidationError,
)

__version__ = "0.1.0"
