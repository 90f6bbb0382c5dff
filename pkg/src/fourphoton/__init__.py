"""Exact output statistics of four partially distinguishable photons in a four-port beam splitter array."""

__version__ = "0.1.0"

from .core import enumerate_events, multinomial_norm, permanent
from .engine import (
    NOT_TABULATED,
    EventDistribution,
    event_order,
    event_probabilities,
    evolve,
    output_distribution,
    p_distinguishable,
    p_indistinguishable_closed,
    permanent_cross_check,
    simulate,
)
from .experiments import (
    fringe_envelope,
    nonmonotonicity_report,
    scenario_continuous,
    scenario_stepwise,
)
from .multiport import build_four_port, load_unitary, validate
from .source import (
    FockState,
    SettingWeights,
    WavepacketSpec,
    build_input_state,
    gram_schmidt,
    overlap,
    setting_weights,
    wavelength_to_spec,
)
