"""Statistical convergence diagnostics for oscillating sequences of fields,
with the companion compressible-flow solver used to generate them.

Everything is implemented in the C++ core; this package re-exports it.
"""

from ._core import (
    CompactObservable,
    ConvergenceReport,
    CorrelationRecord,
    EmpiricalMeasure,
    EulerParams,
    EulerState,
    FamilyConfig,
    FamilyResult,
    FieldSequence,
    Grid,
    ObservableDictionary,
    ParametrizedMeasure,
    ReynoldsDefectField,
    SpaceGrid,
    Weight,
    alternating_momentum_sequence,
    alternating_sequence,
    analyze_convergence,
    averaged_stationarity_modulus,
    block_member,
    block_sequence,
    boundary_energy_check,
    consistency_report_json,
    constant_sequence,
    convergence_report_json,
    correlation_matrix,
    decode_snapshot,
    default_weights,
    dictionary_for_sequence,
    disintegration_gap,
    empirical_measure,
    encode_snapshot,
    energy_defect_series,
    energy_density,
    harmonic_sequence,
    index_set_members,
    lf_step,
    lf_step_dt,
    load_snapshot,
    make_bump,
    make_dictionary,
    make_tent,
    max_wave_speed,
    measure_csv,
    moments,
    parametrized_distance,
    parametrized_measure,
    periodic_sequence,
    perturb_on_index_set,
    pressure,
    pressure_potential,
    reynolds_defect,
    run_cli,
    save_snapshot,
    simulate_family,
    statistical_density_gap,
    stationarity_modulus,
    strong_correlation_verdict,
    suggested_dt,
    total_energy,
    total_mass,
    unit_grid,
    wasserstein,
    weak_correlation_verdict,
    weak_star_distance,
    weight_by_name,
    weight_partial_sum,
    weighted_ergodic_mean,
    windowed_correlation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
