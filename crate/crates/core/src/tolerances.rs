//! Pass/fail thresholds shared by the test suites and the command-line driver.

/// Santaló identity, flat disk, `f = 1`.
pub const SANTALO_FLAT: f64 = 1e-3;
/// Santaló identity, bump metric, random smooth `f`.
pub const SANTALO_BUMP: f64 = 5e-3;
/// `|<I f, phi>_mu - <f, phi#>| / (|f| |phi|)` and the tensor version.
pub const ADJOINT: f64 = 1e-3;
/// `sup |I_m dp| / sup |dp|`.
pub const KERNEL: f64 = 1e-4;

/// Recovered potential against the constructed one.
pub const DECOMPOSE_POTENTIAL: f64 = 1e-2;
/// `|delta v_s| / |v|` after a decomposition.
pub const DECOMPOSE_DIVERGENCE: f64 = 1e-6;
/// `|v - v_s - dp| / |v|`.
pub const DECOMPOSE_RECOMPOSITION: f64 = 1e-10;
/// `|<v_s, dp>| / (|v_s| |dp|)`.
pub const DECOMPOSE_ORTHOGONALITY: f64 = 1e-6;
/// Solver tolerance of the potential solve.
pub const DECOMPOSE_SOLVER: f64 = 1e-8;
/// `|<u, dp> + <delta u, p>|` for compactly supported `p`.
pub const GREEN_PAIR: f64 = 1e-4;
/// Green's identity with the boundary term.
pub const GREEN_BOUNDARY: f64 = 1e-3;
/// `<ell_m u, f> = <u, L_m f>`.
pub const ELL_DUALITY: f64 = 1e-10;

/// Low-degree part of `X ell_m(v_s)` for solenoidal `v_s`.
pub const LEAKAGE: f64 = 1e-4;
/// Absolute error of the fiber average of `X ell_1(dp)`.
pub const FIBER_AVERAGE: f64 = 1e-3;
/// Energy of `eta_(+/-) f` outside the shifted degree.
pub const DEGREE_SHIFT: f64 = 1e-8;
/// `|<X_+ a, b> + <a, X_- b>| / (|a| |b|)`, also used for `X` itself.
pub const GK_ADJOINT: f64 = 1e-4;
/// Flat `eta_+ (x1 e^(i theta))`.
pub const ETA_FLAT: f64 = 1e-6;
/// `X(ell_(m-1) p) = ell_m dp` at interior nodes, relative.
pub const TRANSPORT_IDENTITY: f64 = 1e-5;

/// `N` symmetry, relative.
pub const NORMAL_SYMMETRY: f64 = 1e-3;
/// Relative round-trip error of `v -> I_m v -> v_hat`.
pub const ROUND_TRIP: f64 = 5e-2;
/// `|v_hat| / |dp|` when the data comes from a potential.
pub const POTENTIAL_INVISIBLE: f64 = 2e-2;

/// `|L_m f - u| / |u|` for a constructed first integral.
pub const FIRST_INTEGRAL_GAP: f64 = 5e-2;
/// `|X f| / |f|` over unflagged interior samples.
pub const INVARIANCE: f64 = 1e-2;

/// Weak divergence residual of the glued extension.
pub const EXTENSION_WEAK: f64 = 1e-4;
/// Separated annulus solution against the solver.
pub const EXTENSION_CLOSED_FORM: f64 = 1e-3;

/// Self-convergence of traced exit times.
pub const GEODESIC_REFERENCE: f64 = 1e-6;
