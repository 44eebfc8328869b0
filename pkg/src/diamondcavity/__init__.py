"""Open Fabry-Perot microcavities with color-center-doped diamond membranes.

The package splits into five concerns:

* :mod:`diamondcavity.stacks` / :mod:`diamondcavity.fields` /
  :mod:`diamondcavity.membrane` -- transfer-matrix optics of mirror and
  membrane stacks, standing-wave profiles, implantation overlap.
* :mod:`diamondcavity.geometry` / :mod:`diamondcavity.dispersion` --
  Gaussian-mode geometry and the hybrid-cavity resonance chart.
* :mod:`diamondcavity.emitters` -- strain-dependent fine structure, ensemble
  spectra, phonon-limited coherence estimates.
* :mod:`diamondcavity.cqed` -- finesse, quality factor, Purcell factors,
  cooperativity, and the derived parameter report.
* :mod:`diamondcavity.analysis` -- fitting of measured length scans,
  lifetime traces, and PLE sweeps.
"""

from .analysis import (
    FinesseResult,
    LifetimeFit,
    ResonanceFit,
    ScanTrace,
    aggregate_ple,
    analyze_fine_structure,
    emitter_loss_ppm,
    ensemble_cross_section_cm2,
    extract_finesse,
    fit_lifetime,
    fit_lorentzian,
    read_trace_csv,
    single_cross_section_cm2,
    thickness_from_fringes_nm,
    write_trace_csv,
)
from .cqed import (
    CQEDReport,
    build_report,
    cooperativity_from_coupling,
    coupling_from_cooperativity,
    finesse_from_losses,
    free_space_decay_ghz,
    purcell_effective,
    purcell_factor,
    quality_factor,
)
from .dispersion import (
    ModeChart,
    bare_cavity,
    hybrid_cavity,
    resonance_dispersion,
    write_mode_chart_csv,
)
from .emitters import (
    EnsembleSpec,
    FineStructure,
    GroupIVLevels,
    StrainState,
    density_from_fluence,
    emitter_count,
    splitting_to_wavelength_span_nm,
    splittings_from_strain,
    strain_from_splitting,
    synthesize_linescan,
    synthesize_zpl_spectrum,
    t2_phonon_limit_s,
)
from .errors import (
    AnalysisError,
    FitConvergenceError,
    StabilityError,
    StackError,
    ValidationError,
)
from .fields import DepthDistribution, FieldProfile, field_overlap, field_profile
from .geometry import (
    CavityGeometry,
    beam_waist_um,
    confocal_area_um2,
    confocal_waist_um,
    free_spectral_range_thz,
    linewidth_from_finesse_ghz,
    mode_area_um2,
    mode_number,
    mode_volume,
)
from .membrane import implantation_overlap, membrane_on_mirror
from .stacks import (
    LayerStack,
    OpticalLayer,
    SpectralResponse,
    default_coating,
    design_quarter_wave_dbr,
    load_stack,
    save_stack,
    stack_response,
    stack_spectrum,
)

__version__ = "0.1.0"
