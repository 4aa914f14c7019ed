"""Dynamic sensitivity of linearly coupled networks."""

from ._core import (
    ConvergenceError,
    DivergenceError,
    Error,
    FrequencySweep,
    Graph,
    InvalidArgument,
    IoError,
    NodalDynamics,
    PoleError,
    SpectralDecomposition,
    UndefinedStatistic,
    UnstableError,
    __version__,
    count_peaks,
    decompose,
    degree_correlation,
    find_crossover,
    generate,
    interaction_matrix,
    leading_mode,
    load_edge_list,
    log_grid,
    max_stable_gain,
    mean_sensitivity,
    mean_sensitivity_spectral,
    node_sensitivity,
    simulate_forced,
    steady_state,
    sweep,
    weight_scaling,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
