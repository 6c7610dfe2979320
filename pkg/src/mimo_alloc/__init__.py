"""Optimal pilot/data power and training-length allocation for multicell
massive MIMO uplink with MRC, plus a Monte Carlo check of the rate bound."""

from .errors import (
    DegeneratePlacement,
    InvalidAntennaCount,
    InvalidConfig,
    InvalidPilot,
    IOFailure,
    MimoAllocError,
    NonFiniteObjective,
    OutOfBracket,
    UnsupportedLayout,
    ZeroSpectralEfficiency,
)
from .geometry import (
    FadingSnapshot,
    SystemConfig,
    TerminalPlacement,
    draw_snapshot,
    draw_snapshots,
    hexagonal_layout,
    large_scale_fading,
    load_config,
    place_terminals,
)
from .montecarlo import (
    ChannelRealization,
    MonteCarloEstimate,
    conditional_sinr,
    draw_channels,
    empirical_ergodic_rate,
    mmse_estimate,
    mrc_detect,
)
from .optimizer import (
    AllocationSolution,
    equal_power_baseline,
    f_k_second_derivative,
    objective_p2,
    pilot_power_from_data_power,
    solve_p1_bruteforce,
    solve_p2,
)
from .spectral import (
    EnergyBudget,
    PowerAllocation,
    RateCoefficients,
    achievable_rate,
    bit_energy,
    low_snr_equal_power_curvature,
    low_snr_fixed_pilot_slope,
    rate_coefficients,
    sum_spectral_efficiency,
)

__version__ = "0.1.0"
