"""Linear quantum stochastic systems toolbox.

Physical realizability checks, two-Riccati H-infinity synthesis,
quantum/classical/mixed controller realization, and robustness analysis
for linear QSDE models.
"""

from ._core import (  # noqa: F401
    A1Report,
    A2Report,
    CareSolution,
    ClosedLoop,
    CommutationCheck,
    CommutationMatrix,
    ControllerTriple,
    DissipationCertificate,
    FullController,
    ItoMatrix,
    LinearQsde,
    OscillatorParams,
    Plant,
    QsynthError,
    RealizabilityReport,
    RealizationChoice,
    RobustnessReport,
    SbrResult,
    SynthesisResult,
    UncertainPlant,
    amplifier_cavity_plant,
    build_oscillator,
    canonical_ito,
    cavity_plant,
    check_assumption_a1,
    check_compatibility,
    check_physical_realizability,
    classical_ito,
    close_loop,
    commutation_ode_oracle,
    controller_shell,
    controller_triple,
    extract_hamiltonian_coupling,
    hinf_norm,
    ito_decompose,
    measured_cavity_plant,
    overbound_uncertainty,
    preserves_commutation,
    realize_classical_controller,
    realize_mixed_controller,
    realize_quantum_controller,
    robust_stability_check,
    solve_care,
    solve_lyapunov,
    solve_riccati_X,
    solve_riccati_Y,
    strict_bounded_real_check,
    synthesize,
    uncertain_cavity_plant,
)

__all__ = [name for name in dir() if not name.startswith("_")]
