"""Python interface to the dcbnet channel-bonding analyzer and simulator."""

from ._core import (
    ConfigError,
    Scenario,
    Ctmc,
    MetricsReport,
    DominanceReport,
    SimReport,
    __version__,
    allowed_channels,
    build_ctmc,
    cw_to_lambda,
    dominant_states,
    jfi,
    load_scenario,
    mixing_time,
    parse_scenario,
    simulate,
    solve,
    switching_probabilities,
    tx_duration,
)

__all__ = [
    "ConfigError",
    "Scenario",
    "Ctmc",
    "MetricsReport",
    "DominanceReport",
    "SimReport",
    "__version__",
    "allowed_channels",
    "build_ctmc",
    "cw_to_lambda",
    "dominant_states",
    "jfi",
    "load_scenario",
    "mixing_time",
    "parse_scenario",
    "simulate",
    "solve",
    "switching_probabilities",
    "tx_duration",
]
