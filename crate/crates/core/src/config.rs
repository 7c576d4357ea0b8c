//! Numerical tolerances and resolution defaults, gathered in one record.

use serde::{Deserialize, Serialize};

/// Every tolerance and grid default used by the solvers.
///
/// [`Tolerances::DEFAULT`] is a compile-time constant; studies that need
/// tighter or coarser settings copy it and override individual fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Replacement magnitude for a vanishing Sturm pivot.
    pub sturm_pivot_floor: f64,
    /// Relative width at which eigenvalue bisection stops.
    pub bisection_rel: f64,
    /// Eigenvalues closer than this (relative) are treated as a cluster.
    pub cluster_rel: f64,
    pub inverse_iteration_max: usize,
    /// Residual bound `|T v - lambda W v|_w <= tol (1 + |lambda|) |v|_w`.
    pub eigen_residual: f64,
    /// Seed of the inverse-iteration start vectors.
    pub seed: u64,

    /// Base step count of the zero-energy shooting integrator.
    pub shoot_steps: usize,
    pub shoot_richardson_rel: f64,
    pub shoot_max_doublings: usize,
    /// Resonance is declared when `|psi'(a)| <= tol * max(|psi(a)|, |psi'(a)|, 1)`.
    pub resonance: f64,
    /// Relative accuracy of bisected resonant couplings.
    pub coupling_rel: f64,
    /// Point count of the refinement used for suprema over `[0, a]`.
    pub refinement_points: usize,

    /// Agreement of bound-state eigenvalues between `h` and `h/2`.
    pub bound_state_rel: f64,
    pub bound_state_max_halvings: usize,

    pub halfline_min_nodes: usize,
    /// Grid cells across the boundary layer `[0, a eps]` of the half-line model.
    pub halfline_cells_per_layer: f64,

    pub fibre_min_cells: usize,
    pub fibre_cells_per_layer: f64,
    pub fibre_max_cells: usize,
    /// Richardson certification of fibre eigenvalues.
    pub fibre_richardson_rel: f64,

    /// Target accuracy `|lambda_1 - beta| <= tol * max(1, |beta|)`.
    pub counterexample_rel: f64,
    /// Log-grid ratio of the downward epsilon scan.
    pub counterexample_scan_ratio: f64,
    /// Smallest epsilon the counterexample search may visit.
    pub counterexample_eps_floor: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        sturm_pivot_floor: 1e-300,
        bisection_rel: 1e-13,
        cluster_rel: 1e-10,
        inverse_iteration_max: 50,
        eigen_residual: 1e-8,
        seed: 0x5eba_1985,

        shoot_steps: 8192,
        shoot_richardson_rel: 1e-7,
        shoot_max_doublings: 4,
        resonance: 1e-8,
        coupling_rel: 1e-10,
        refinement_points: 4096,

        bound_state_rel: 1e-6,
        bound_state_max_halvings: 3,

        halfline_min_nodes: 2000,
        halfline_cells_per_layer: 100.0,

        fibre_min_cells: 4000,
        fibre_cells_per_layer: 50.0,
        fibre_max_cells: 1_000_000,
        fibre_richardson_rel: 1e-5,

        counterexample_rel: 1e-6,
        counterexample_scan_ratio: 0.8,
        counterexample_eps_floor: 1e-4,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
