//! Every tolerance and threshold used by the verification catalog and the
//! acceptance suite.

/// pauli_mul against explicit 2×2 complex matrices.
pub const PAULI_MATRIX: f64 = 1e-13;
/// exp_spin against a 40-term power series.
pub const EXP_SPIN_SERIES: f64 = 1e-12;
pub const EXP_SPIN_SERIES_TERMS: usize = 40;
/// Random triples drawn by the Pauli oracle.
pub const PAULI_SAMPLES: usize = 10_000;

/// Order-k recursion residual.
pub const RECURSION: f64 = 1e-8;
pub const RECURSION_BETAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Allowed distance between observed and expected convergence order.
pub const ORDER_WINDOW: f64 = 0.5;
pub const EPS_LEVELS: [f64; 3] = [0.2, 0.1, 0.05];

/// Round-trip charge error order.
pub const ROUNDTRIP_CHARGE_ORDER: f64 = 4.0;
/// Round-trip spin error order required by the acceptance criterion.
pub const ROUNDTRIP_SPIN_ORDER_STATED: f64 = 3.0;
/// Round-trip spin error order of the moment-consistent closure.
pub const ROUNDTRIP_SPIN_ORDER_DERIVED: f64 = 5.0;

/// ⟨θf⟩ and ⟨pθf⟩ + ∇V⟨f⟩ for a quadratic potential.
pub const THETA_MOMENTS: f64 = 1e-9;
/// 2V #_odd f − iεθf on band-limited V, at `ODD_PRODUCT_EPS`. The Moyal
/// expansion stops at order four, so the residual is O(ε⁵).
pub const ODD_PRODUCT: f64 = 1e-8;
pub const ODD_PRODUCT_EPS: f64 = 0.05;
pub const ODD_PRODUCT_ORDER: f64 = 5.0;
/// Momentum grid of the θ identities.
pub const THETA_PGRID: (usize, f64) = (48, 8.0);

/// Relative error of ⟨TM⟩ against 2ε n×a at ε = `RESIDUAL_CURRENT_EPS`.
pub const RESIDUAL_CURRENT: f64 = 0.01;
pub const RESIDUAL_CURRENT_EPS: f64 = 0.1;
pub const RESIDUAL_CURRENT_ORDER: f64 = 3.0;
/// Analytic ⟨TM⟩ against transport_apply plus quadrature.
pub const TRANSPORT_MOMENT: f64 = 1e-8;

/// ε = 0 local model against the spin-vector model.
pub const SPIN_VECTOR_REDUCTION: f64 = 1e-12;
/// Two-component consistency: stated bound and derived order.
pub const TWO_COMPONENT_ORDER_STATED: f64 = 2.0;
pub const TWO_COMPONENT_ORDER_DERIVED: f64 = 4.0;
/// Nonlocal minus local charge right-hand side.
pub const NONLOCAL_CHARGE_ORDER: f64 = 4.0;

/// Relative charge drift over `CONSERVATION_T_END`.
pub const CHARGE_DRIFT: f64 = 1e-9;
pub const CONSERVATION_T_END: f64 = 1.0;
/// Discrete dE/dt against the dissipation integral.
pub const DISSIPATION_MATCH: f64 = 0.05;
/// Relaxation rates over one e-fold.
pub const RELAXATION_RATE: f64 = 0.01;
/// Linearized gate-precession growth rate.
pub const GATE_RATE: f64 = 0.05;
/// Equilibrium time series drift.
pub const EQUILIBRIUM_DRIFT: f64 = 1e-9;

/// Hydrodynamic τ-ratio window and τ levels.
pub const TAU_RATIO: (f64, f64) = (1.5, 2.5);
pub const TAU_LEVELS: [f64; 3] = [0.04, 0.02, 0.01];
/// Kinetic dt as a fraction of τ in the ratio test.
pub const KINETIC_DT_OVER_TAU: f64 = 0.1;
/// Relative kinetic–fluid deviation at τ = `SMALL_TAU` over `HYDRO_T_END`.
pub const KINETIC_DEVIATION: f64 = 0.02;
pub const SMALL_TAU: f64 = 1e-3;
pub const SMALL_TAU_DT_OVER_TAU: f64 = 0.5;
pub const HYDRO_T_END: f64 = 0.5;
/// BGK conservation and equilibrium stationarity.
pub const BGK_CONSERVATION: f64 = 1e-12;
pub const KINETIC_STATIONARY: f64 = 1e-9;

/// Leading-order spin exponential against the matrix series.
pub const LEADING_SPIN: f64 = 1e-12;
/// |a| returned when the leading spin moment is forced to zero.
pub const SPIN_SOLVER: f64 = 1e-12;

/// Numeric against closed-form diffusion-matrix eigenvalues.
pub const EIGEN_AGREEMENT: f64 = 1e-8;
/// Random physical states drawn by the parabolicity probe.
pub const PARABOLIC_SAMPLES: usize = 24;

/// Fixed seed for generated test data.
pub const SEED: u64 = 0x5eed_2024;
