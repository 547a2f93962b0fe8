"""Heralded single-photon entanglement between two nuclear-resonant crystals.

Submodules:

``nuclear_response``  forward-scattering wavepacket, beat and field inversion
``interferometer``    two-arm single-photon propagation and fringe intensities
``tomography``        sparse density matrix and concurrence lower bound
``event_sim``         seeded Monte Carlo of heralded trials
``rate_estimator``    XPDC susceptibility and heralding rate
``cli``               YAML configuration and CSV drivers
"""

__version__ = "0.1.0"

from .nuclear_response import (  # noqa: E402
    FE57_GAMMA,
    FieldSchedule,
    SampleParams,
    TimeGrid,
    Wavepacket,
    accumulated_phase,
    bessel_j1,
    envelope,
    scattered_wavepacket,
    scheduled_wavepacket,
    switched_pair,
)
from .interferometer import (  # noqa: E402
    FringePoint,
    TwoModeField,
    detector_intensities,
    fringe_scan,
    prompt_routing,
    propagate_chain,
)
from .tomography import (  # noqa: E402
    DiagonalProbs,
    TPEDensityMatrix,
    Visibility,
    assemble_rho,
    coherence_estimate,
    concurrence,
    visibility_from_fringe,
)
from .event_sim import (  # noqa: E402
    ExperimentConfig,
    Outcome,
    end_to_end_concurrence,
    run_events,
    sample_emission_time,
)
from .rate_estimator import (  # noqa: E402
    XPDCParams,
    chi2_111,
    heralded_rate,
    pump_density,
    rate_report,
    signal_flux,
)
