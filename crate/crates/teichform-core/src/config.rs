//! Tolerance and control constants shared across the crate.
//!
//! Every numeric guard in the library references a named field here rather
//! than an inline literal, so the whole tolerance stack is visible in one
//! place and can be tightened or loosened coherently.

/// Numeric tolerances and perturbation controls.
///
/// The defaults are the contract values used by all invariant checks:
///
/// * `tol_point` — membership of points on the hyperboloid and orthogonality
///   of normals (`1e-10`);
/// * `tol_mat` — matrix-level identities such as `mᵀJm = J` and the relator
///   product (`1e-9`);
/// * `tol_deg` — degeneracy detection for crossings: near-endpoint,
///   near-tangent, near-collinear (`1e-8`);
/// * `tol_balance` — vertex balance defect (`1e-8`);
/// * `tol_cocycle` — relator defect of cocycles (`1e-8`);
/// * `tol_embed` — clearance between edge interiors and vertex orbit points
///   (`1e-7`);
/// * `perturb_delta` — isotopy displacement used when crossing enumeration
///   hits a degenerate configuration (`1e-4`: far above `tol_deg`, far below
///   edge lengths);
/// * `max_retries` — perturbation attempts before giving up (20);
/// * `ball_margin` — slack added to lift-enumeration search radii (0.5).
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub tol_point: f64,
    pub tol_mat: f64,
    pub tol_deg: f64,
    pub tol_balance: f64,
    pub tol_cocycle: f64,
    pub tol_embed: f64,
    pub perturb_delta: f64,
    pub max_retries: usize,
    pub ball_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_point: 1e-10,
            tol_mat: 1e-9,
            tol_deg: 1e-8,
            tol_balance: 1e-8,
            tol_cocycle: 1e-8,
            tol_embed: 1e-7,
            perturb_delta: 1e-4,
            max_retries: 20,
            ball_margin: 0.5,
        }
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        tol_point: 1e-10,
        tol_mat: 1e-9,
        tol_deg: 1e-8,
        tol_balance: 1e-8,
        tol_cocycle: 1e-8,
        tol_embed: 1e-7,
        perturb_delta: 1e-4,
        max_retries: 20,
        ball_margin: 0.5,
    };
}
