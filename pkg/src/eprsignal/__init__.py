"""Simulator for a proposed signaling test over a path-entangled photon pair.

Bob watches a double slit; Alice either focuses her photon (one degenerate
outcome) or detects it off the focal plane (two which-path outcomes). The
package computes the resulting fringe patterns, Bob's reduced states and
seeded Monte Carlo counts under three reduction rules, and decodes Alice's
choice from Bob's singles.
"""

__version__ = "0.1.0"

from .experiment import (
    AliceSetting,
    ConfigError,
    FieldOperator,
    Geometry,
    GeometryWarning,
    Pattern,
    SpdcState,
    coincidence_rate,
    field_alice_focal,
    field_alice_offfocal,
    field_bob,
    load_geometry,
    parse_geometry,
    path_entangled_state,
    path_lengths,
    phase_evolved_state,
    sweep_pattern,
)
from .hilbert import (
    BipartiteLayout,
    DensityMatrix,
    DimensionMismatchError,
    HermitianOperator,
    StateVector,
    ZeroNormError,
    eigvalsh,
    expectation,
    normalize,
    partial_trace_A,
    partial_trace_B,
    tensor_product,
    trace_distance,
)
from .measurement import (
    MeasurementOutcome,
    MeasurementRule,
    ProjectorFamily,
    bob_marginal,
    build_family,
    joint_expectation,
    measure,
    measure_family,
    signal_strength,
)
from .mc import (
    EventRecord,
    RunConfig,
    VisibilityEstimate,
    decode_bit,
    histogram,
    simulate_run,
    visibility,
)
