//! Linear-algebra kernel for ℝ^{2,1}, the hyperboloid model ℍ², oriented
//! geodesics, and the Lie algebra 𝔰𝔬(2,1) in Λ-vector representation.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * Minkowski form `⟨x,y⟩ = x₁y₁ + x₂y₂ − x₃y₃`; the hyperboloid is
//!   `ℍ² = {⟨x,x⟩ = −1, x₃ > 0}`.
//! * `Λ(x₁,x₂,x₃) = [[0,x₃,−x₂],[−x₃,0,x₁],[−x₂,x₁,0]]` identifies ℝ^{2,1}
//!   with 𝔰𝔬(2,1); the Killing form pulls back to `κ(Λx,Λx') = 2⟨x,x'⟩`.
//!   Lie algebra elements are stored as [`LieVec`] (the Λ-vector), never as
//!   matrices, so the adjoint action is plain matrix·vector and exactly
//!   equivariant.
//! * A [`Geodesic`] is the set `ℍ² ∩ x^⊥` for its unit spacelike normal `x`;
//!   the orientation induced by `x` has unit tangent `Λ(x)·p` at `p`.
//! * ℍ² is oriented so that an ordered tangent pair `(t₁,t₂)` at `p` is
//!   positive iff `det[p t₁ t₂] > 0`; counterclockwise angles follow it.

use crate::config::Tolerances;
use crate::real;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

// ---------------------------------------------------------------------------
// Vectors and matrices
// ---------------------------------------------------------------------------

/// A point of ℝ^{2,1} (also used for tangent vectors and normals).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkVector {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MinkVector {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }

    /// Euclidean sup-norm, used only for tolerance checks.
    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    /// Euclidean 2-norm of the coordinate triple (not the Minkowski norm).
    pub fn euclid_norm(self) -> f64 {
        real::sqrt(self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3)
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl Add for MinkVector {
    type Output = MinkVector;
    fn add(self, o: MinkVector) -> MinkVector {
        MinkVector::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for MinkVector {
    type Output = MinkVector;
    fn sub(self, o: MinkVector) -> MinkVector {
        MinkVector::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for MinkVector {
    type Output = MinkVector;
    fn neg(self) -> MinkVector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for MinkVector {
    type Output = MinkVector;
    fn mul(self, s: f64) -> MinkVector {
        self.scale(s)
    }
}

/// The Minkowski bilinear form `x₁y₁ + x₂y₂ − x₃y₃`.
pub fn mink_dot(x: MinkVector, y: MinkVector) -> f64 {
    x.x1 * y.x1 + x.x2 * y.x2 - x.x3 * y.x3
}

/// Determinant of the matrix with columns `a`, `b`, `c`.
pub fn det3(a: MinkVector, b: MinkVector, c: MinkVector) -> f64 {
    a.x1 * (b.x2 * c.x3 - b.x3 * c.x2) - b.x1 * (a.x2 * c.x3 - a.x3 * c.x2)
        + c.x1 * (a.x2 * b.x3 - a.x3 * b.x2)
}

/// Row-major 3×3 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const fn new(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    pub const fn identity() -> Self {
        Self::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub const fn zero() -> Self {
        Self::new([[0.0; 3]; 3])
    }

    /// diag(1, 1, −1): the Gram matrix of the Minkowski form.
    pub const fn mink_j() -> Self {
        Self::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]])
    }

    pub fn from_columns(c0: MinkVector, c1: MinkVector, c2: MinkVector) -> Self {
        Self::new([
            [c0.x1, c1.x1, c2.x1],
            [c0.x2, c1.x2, c2.x2],
            [c0.x3, c1.x3, c2.x3],
        ])
    }

    pub fn column(&self, j: usize) -> MinkVector {
        MinkVector::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.m;
        Mat3::new([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self) -> f64 {
        det3(self.column(0), self.column(1), self.column(2))
    }

    pub fn apply(&self, v: MinkVector) -> MinkVector {
        let m = &self.m;
        MinkVector::new(
            m[0][0] * v.x1 + m[0][1] * v.x2 + m[0][2] * v.x3,
            m[1][0] * v.x1 + m[1][1] * v.x2 + m[1][2] * v.x3,
            m[2][0] * v.x1 + m[2][1] * v.x2 + m[2][2] * v.x3,
        )
    }

    pub fn mul_mat(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        Mat3::new(r)
    }

    pub fn add_mat(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        Mat3::new(r)
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut r = self.m;
        for row in &mut r {
            for cell in row {
                *cell *= s;
            }
        }
        Mat3::new(r)
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn max_abs_diff(&self, o: &Mat3) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Validation failures of the geometric kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MinkError {
    /// `⟨p,p⟩` is not −1 (within tolerance) or `p.x3 ≤ 0`.
    NotAHyperbolicPoint { norm: f64, x3: f64 },
    /// The vector is not unit spacelike within tolerance.
    NotUnitSpacelike { norm: f64 },
    /// `u` is not a unit tangent at `p`.
    NotTangentAt { dot_up: f64, norm: f64 },
    /// Two points expected to be distinct coincide within tolerance.
    CoincidentPoints,
    /// A matrix does not have the Λ skew pattern within tolerance.
    NotLambdaShaped { defect: f64 },
    /// A matrix is not in SO₀(2,1) within tolerance.
    NotIsometry { form_defect: f64, det: f64, sheet: f64 },
}

impl fmt::Display for MinkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinkError::NotAHyperbolicPoint { norm, x3 } => write!(
                f,
                "not a point of the upper hyperboloid: <p,p> = {norm}, x3 = {x3}"
            ),
            MinkError::NotUnitSpacelike { norm } => {
                write!(f, "not unit spacelike: <x,x> = {norm}")
            }
            MinkError::NotTangentAt { dot_up, norm } => write!(
                f,
                "not a unit tangent: <u,p> = {dot_up}, <u,u> = {norm}"
            ),
            MinkError::CoincidentPoints => write!(f, "points coincide"),
            MinkError::NotLambdaShaped { defect } => {
                write!(f, "matrix is not Λ-shaped: pattern defect {defect}")
            }
            MinkError::NotIsometry {
                form_defect,
                det,
                sheet,
            } => write!(
                f,
                "matrix is not in SO0(2,1): form defect {form_defect}, det {det}, sheet sign {sheet}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MinkError {}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A point of the upper hyperboloid sheet ℍ².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    v: MinkVector,
}

impl HPoint {
    /// The center (0,0,1).
    pub const fn base() -> Self {
        Self {
            v: MinkVector::new(0.0, 0.0, 1.0),
        }
    }

    /// Validates `|⟨v,v⟩ + 1| < tol` and `v.x3 > 0`.
    pub fn new_with_tol(v: MinkVector, tol: f64) -> Result<Self, MinkError> {
        let n = mink_dot(v, v);
        if (n + 1.0).abs() < tol && v.x3 > 0.0 {
            Ok(Self { v })
        } else {
            Err(MinkError::NotAHyperbolicPoint { norm: n, x3: v.x3 })
        }
    }

    pub fn new(v: MinkVector) -> Result<Self, MinkError> {
        Self::new_with_tol(v, Tolerances::DEFAULT.tol_point)
    }

    /// Rescales a future timelike vector onto the hyperboloid. This is the
    /// workhorse constructor for computed points; it absorbs float drift.
    pub fn normalize(v: MinkVector) -> Result<Self, MinkError> {
        let n = mink_dot(v, v);
        if n >= 0.0 || v.x3 <= 0.0 {
            return Err(MinkError::NotAHyperbolicPoint { norm: n, x3: v.x3 });
        }
        Ok(Self {
            v: v.scale(1.0 / real::sqrt(-n)),
        })
    }

    pub fn vector(&self) -> MinkVector {
        self.v
    }
}

/// Hyperbolic distance `arccosh(−⟨a,b⟩)`.
pub fn distance(a: &HPoint, b: &HPoint) -> f64 {
    let c = -mink_dot(a.vector(), b.vector());
    real::acosh(c.max(1.0))
}

/// Geodesic exponential map: walk from `p` along tangent `v` (not
/// necessarily unit) by hyperbolic distance `√⟨v,v⟩`.
pub fn exp_map(p: &HPoint, v: MinkVector) -> HPoint {
    let n2 = mink_dot(v, v);
    if n2 <= 0.0 {
        // Zero (or numerically non-spacelike) displacement: stay put.
        return *p;
    }
    let t = real::sqrt(n2);
    let u = v.scale(1.0 / t);
    let w = p.vector().scale(real::cosh(t)) + u.scale(real::sinh(t));
    HPoint::normalize(w).expect("exp_map target is future timelike by construction")
}

/// An oriented complete geodesic `ℍ² ∩ x^⊥`, `x` its unit spacelike normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geodesic {
    normal: MinkVector,
}

impl Geodesic {
    pub fn new_with_tol(normal: MinkVector, tol: f64) -> Result<Self, MinkError> {
        let n = mink_dot(normal, normal);
        if (n - 1.0).abs() < tol {
            Ok(Self { normal })
        } else {
            Err(MinkError::NotUnitSpacelike { norm: n })
        }
    }

    pub fn new(normal: MinkVector) -> Result<Self, MinkError> {
        Self::new_with_tol(normal, Tolerances::DEFAULT.tol_point)
    }

    /// Normalizes any spacelike vector into a geodesic normal.
    pub fn from_spacelike(v: MinkVector) -> Result<Self, MinkError> {
        let n = mink_dot(v, v);
        if n <= 0.0 {
            return Err(MinkError::NotUnitSpacelike { norm: n });
        }
        Ok(Self {
            normal: v.scale(1.0 / real::sqrt(n)),
        })
    }

    pub fn normal(&self) -> MinkVector {
        self.normal
    }

    pub fn reversed(&self) -> Geodesic {
        Geodesic {
            normal: -self.normal,
        }
    }

    /// Unit tangent in the positive direction at a point `p` of the geodesic:
    /// `Λ(x)·p`.
    pub fn tangent_at(&self, p: &HPoint) -> MinkVector {
        lambda_apply(self.normal, p.vector())
    }

    /// Signed offset `⟨x, p⟩`; zero iff `p` lies on the geodesic. For points
    /// off the geodesic, `sinh` of the distance equals `|⟨x,p⟩|`.
    pub fn signed_offset(&self, p: &HPoint) -> f64 {
        mink_dot(self.normal, p.vector())
    }

    /// Hyperbolic distance from `p` to the geodesic.
    pub fn distance_to_point(&self, p: &HPoint) -> f64 {
        real::asinh(self.signed_offset(p).abs())
    }

    /// Foot of the perpendicular from `p` (projection onto the geodesic).
    pub fn foot_of(&self, p: &HPoint) -> HPoint {
        let off = self.signed_offset(p);
        HPoint::normalize(p.vector() - self.normal.scale(off))
            .expect("projection of a point stays future timelike")
    }
}

/// A nondegenerate geodesic segment with its carrier geodesic oriented from
/// `a` to `b`.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    a: HPoint,
    b: HPoint,
    geodesic: Geodesic,
    length: f64,
}

impl Segment {
    pub fn new_with_tol(a: HPoint, b: HPoint, tol: f64) -> Result<Self, MinkError> {
        let geodesic = geodesic_between_with_tol(&a, &b, tol)?;
        let length = distance(&a, &b);
        Ok(Self {
            a,
            b,
            geodesic,
            length,
        })
    }

    pub fn new(a: HPoint, b: HPoint) -> Result<Self, MinkError> {
        Self::new_with_tol(a, b, Tolerances::DEFAULT.tol_point)
    }

    pub fn start(&self) -> &HPoint {
        &self.a
    }

    pub fn end(&self) -> &HPoint {
        &self.b
    }

    pub fn geodesic(&self) -> &Geodesic {
        &self.geodesic
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Point at arc-length parameter `s ∈ [0, length]` from `a`.
    pub fn point_at(&self, s: f64) -> HPoint {
        let t = self.geodesic.tangent_at(&self.a);
        HPoint::normalize(self.a.vector().scale(real::cosh(s)) + t.scale(real::sinh(s)))
            .expect("segment points are future timelike")
    }

    /// Unit tangent in the a→b direction at parameter `s`.
    pub fn direction_at(&self, s: f64) -> MinkVector {
        let t = self.geodesic.tangent_at(&self.a);
        self.a.vector().scale(real::sinh(s)) + t.scale(real::cosh(s))
    }

    /// Signed arc-length parameter of a point assumed to lie on the carrier
    /// geodesic (`⟨p, tangent_at(a)⟩ = sinh s`).
    pub fn param_of(&self, p: &HPoint) -> f64 {
        let t = self.geodesic.tangent_at(&self.a);
        real::asinh(mink_dot(p.vector(), t))
    }

    /// Hyperbolic distance from `p` to the closed segment.
    pub fn distance_to_point(&self, p: &HPoint) -> f64 {
        let s = self.param_of(&self.geodesic.foot_of(p));
        if s <= 0.0 {
            distance(&self.a, p)
        } else if s >= self.length {
            distance(&self.b, p)
        } else {
            self.geodesic.distance_to_point(p)
        }
    }
}

/// An element of 𝔰𝔬(2,1) stored as its Λ-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LieVec(pub MinkVector);

impl LieVec {
    pub const fn zero() -> Self {
        Self(MinkVector::zero())
    }

    pub fn scale(self, s: f64) -> Self {
        Self(self.0.scale(s))
    }
}

impl Add for LieVec {
    type Output = LieVec;
    fn add(self, o: LieVec) -> LieVec {
        LieVec(self.0 + o.0)
    }
}

impl Sub for LieVec {
    type Output = LieVec;
    fn sub(self, o: LieVec) -> LieVec {
        LieVec(self.0 - o.0)
    }
}

impl Neg for LieVec {
    type Output = LieVec;
    fn neg(self) -> LieVec {
        LieVec(-self.0)
    }
}

/// An element of SO₀(2,1): preserves the form, det 1, fixes the upper sheet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    m: Mat3,
}

impl Isometry {
    pub const fn identity() -> Self {
        Self {
            m: Mat3::identity(),
        }
    }

    /// Validates `mᵀJm = J`, `det m = 1`, upper-sheet preservation.
    pub fn new_with_tol(m: Mat3, tol: f64) -> Result<Self, MinkError> {
        let j = Mat3::mink_j();
        let form_defect = m.transpose().mul_mat(&j).mul_mat(&m).max_abs_diff(&j);
        let det = m.det();
        let sheet = m.apply(MinkVector::new(0.0, 0.0, 1.0)).x3;
        if form_defect < tol && (det - 1.0).abs() < tol && sheet > 0.0 {
            Ok(Self { m })
        } else {
            Err(MinkError::NotIsometry {
                form_defect,
                det,
                sheet,
            })
        }
    }

    pub fn new(m: Mat3) -> Result<Self, MinkError> {
        Self::new_with_tol(m, Tolerances::DEFAULT.tol_mat)
    }

    pub(crate) fn from_mat_unchecked(m: Mat3) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// Linear action on ℝ^{2,1}; this is simultaneously the adjoint action
    /// on 𝔰𝔬(2,1) in the Λ-vector representation.
    pub fn apply(&self, v: MinkVector) -> MinkVector {
        self.m.apply(v)
    }

    /// Action on hyperboloid points, renormalized to absorb float drift.
    pub fn apply_point(&self, p: &HPoint) -> HPoint {
        HPoint::normalize(self.m.apply(p.vector()))
            .expect("isometries preserve the upper hyperboloid")
    }

    pub fn apply_lie(&self, a: LieVec) -> LieVec {
        LieVec(self.apply(a.0))
    }

    pub fn apply_geodesic(&self, l: &Geodesic) -> Geodesic {
        Geodesic {
            normal: self.apply(l.normal()),
        }
    }

    pub fn apply_segment(&self, s: &Segment) -> Segment {
        Segment {
            a: self.apply_point(&s.a),
            b: self.apply_point(&s.b),
            geodesic: self.apply_geodesic(&s.geodesic),
            length: s.length,
        }
    }

    /// Composition `self ∘ other` (matrix product).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            m: self.m.mul_mat(&other.m),
        }
    }

    /// Exact inverse `J mᵀ J` (valid because `mᵀJm = J`).
    pub fn inverse(&self) -> Isometry {
        let j = Mat3::mink_j();
        Isometry {
            m: j.mul_mat(&self.m.transpose()).mul_mat(&j),
        }
    }

    pub fn max_abs_diff(&self, other: &Isometry) -> f64 {
        self.m.max_abs_diff(&other.m)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.m.max_abs_diff(&Mat3::identity()) < tol
    }
}

// ---------------------------------------------------------------------------
// Λ and the Killing form
// ---------------------------------------------------------------------------

/// `Λ(x)` as an explicit matrix.
pub fn lambda_matrix(v: LieVec) -> Mat3 {
    let MinkVector { x1, x2, x3 } = v.0;
    Mat3::new([[0.0, x3, -x2], [-x3, 0.0, x1], [-x2, x1, 0.0]])
}

/// `Λ(x)·y` without forming the matrix.
#[inline]
pub fn lambda_apply(x: MinkVector, y: MinkVector) -> MinkVector {
    MinkVector::new(
        x.x3 * y.x2 - x.x2 * y.x3,
        -x.x3 * y.x1 + x.x1 * y.x3,
        -x.x2 * y.x1 + x.x1 * y.x2,
    )
}

/// Inverse of [`lambda_matrix`]; rejects matrices that deviate from the Λ
/// skew pattern by more than `tol`.
pub fn lambda_inv_with_tol(m: &Mat3, tol: f64) -> Result<LieVec, MinkError> {
    let a = &m.m;
    // Pattern defect: diagonal entries, the antisymmetry of the (1,2) block,
    // and the symmetry of the entries carrying x1 and x2.
    let defect = a[0][0]
        .abs()
        .max(a[1][1].abs())
        .max(a[2][2].abs())
        .max((a[0][1] + a[1][0]).abs())
        .max((a[0][2] - a[2][0]).abs())
        .max((a[1][2] - a[2][1]).abs());
    if defect >= tol {
        return Err(MinkError::NotLambdaShaped { defect });
    }
    Ok(LieVec(MinkVector::new(
        0.5 * (a[1][2] + a[2][1]),
        -0.5 * (a[0][2] + a[2][0]),
        0.5 * (a[0][1] - a[1][0]),
    )))
}

pub fn lambda_inv(m: &Mat3) -> Result<LieVec, MinkError> {
    lambda_inv_with_tol(m, Tolerances::DEFAULT.tol_mat)
}

/// Killing form in Λ-vector coordinates: `κ(Λx, Λx') = 2⟨x,x'⟩`.
pub fn killing(u: LieVec, w: LieVec) -> f64 {
    2.0 * mink_dot(u.0, w.0)
}

/// Reference implementation of the Killing form as `tr(Λ(u)·Λ(w))`; used by
/// tests to pin [`killing`] and kept out of all hot paths.
pub fn killing_trace_oracle(u: LieVec, w: LieVec) -> f64 {
    lambda_matrix(u).mul_mat(&lambda_matrix(w)).trace()
}

// ---------------------------------------------------------------------------
// Isometries from geodesics and points
// ---------------------------------------------------------------------------

/// Hyperbolic translation by signed length `t` along the oriented geodesic:
/// the closed form `exp(tΛ(x)) = I + sinh(t)Λ(x) + (cosh(t)−1)Λ(x)²` for
/// unit spacelike `x` (no series truncation).
pub fn translate_along(l: &Geodesic, t: f64) -> Isometry {
    let lam = lambda_matrix(LieVec(l.normal()));
    let lam2 = lam.mul_mat(&lam);
    let m = Mat3::identity()
        .add_mat(&lam.scale(real::sinh(t)))
        .add_mat(&lam2.scale(real::cosh(t) - 1.0));
    Isometry::from_mat_unchecked(m)
}

/// Rotation about the point `p` by angle `θ`, counterclockwise with respect
/// to the surface orientation: `exp(−θΛ(p)) = I − sin(θ)Λ(p) + (1−cos(θ))Λ(p)²`
/// for unit timelike `p`.
pub fn rotation_at(p: &HPoint, theta: f64) -> Isometry {
    let lam = lambda_matrix(LieVec(p.vector()));
    let lam2 = lam.mul_mat(&lam);
    let m = Mat3::identity()
        .add_mat(&lam.scale(-real::sin(theta)))
        .add_mat(&lam2.scale(1.0 - real::cos(theta)));
    Isometry::from_mat_unchecked(m)
}

/// The infinitesimal translation through `p` in unit tangent direction `u`:
/// the unique unit spacelike `x` with `Λ(x)·p = u` and `⟨x,p⟩ = 0`, namely
/// `x = Λ(p)·u`.
pub fn translation_generator_with_tol(
    p: &HPoint,
    u: MinkVector,
    tol: f64,
) -> Result<LieVec, MinkError> {
    let dot_up = mink_dot(u, p.vector());
    let norm = mink_dot(u, u);
    if dot_up.abs() >= tol || (norm - 1.0).abs() >= tol {
        return Err(MinkError::NotTangentAt { dot_up, norm });
    }
    Ok(LieVec(lambda_apply(p.vector(), u)))
}

pub fn translation_generator(p: &HPoint, u: MinkVector) -> Result<LieVec, MinkError> {
    translation_generator_with_tol(p, u, Tolerances::DEFAULT.tol_point)
}

/// The oriented geodesic through two distinct points, positive direction
/// a → b: normal `Λ(a)·b` normalized.
pub fn geodesic_between_with_tol(a: &HPoint, b: &HPoint, tol: f64) -> Result<Geodesic, MinkError> {
    let c = lambda_apply(a.vector(), b.vector());
    let n = mink_dot(c, c);
    // ⟨c,c⟩ = ⟨a,b⟩² − 1 = sinh²(d(a,b)); vanishes iff the points coincide.
    if n <= tol * tol {
        return Err(MinkError::CoincidentPoints);
    }
    Ok(Geodesic {
        normal: c.scale(1.0 / real::sqrt(n)),
    })
}

pub fn geodesic_between(a: &HPoint, b: &HPoint) -> Result<Geodesic, MinkError> {
    geodesic_between_with_tol(a, b, Tolerances::DEFAULT.tol_point)
}

// ---------------------------------------------------------------------------
// Crossings and angles
// ---------------------------------------------------------------------------

/// A transverse (or nearly transverse) segment crossing.
#[derive(Clone, Copy, Debug)]
pub struct SegmentCrossing {
    pub point: HPoint,
    /// Unit tangent of the first segment at the crossing, in its a→b direction.
    pub tangent_first: MinkVector,
    /// Unit tangent of the second segment at the crossing, in its a→b direction.
    pub tangent_second: MinkVector,
    /// Arc-length parameter along the first segment.
    pub param_first: f64,
    /// Arc-length parameter along the second segment.
    pub param_second: f64,
    /// Set when the crossing is within `tol_deg` of an endpoint of either
    /// segment or the carriers are near-tangent (`|⟨x,x'⟩| ≥ 1 − tol_deg`).
    pub degenerate: bool,
}

/// Result of intersecting two segments.
#[derive(Clone, Copy, Debug)]
pub enum SegmentMeet {
    /// No crossing within the (slightly fattened) segments.
    None,
    /// A crossing point, possibly flagged degenerate.
    Crossing(SegmentCrossing),
    /// Carrier geodesics nearly coincide and the segments approach each
    /// other: no reliable crossing point exists.
    NearCollinear,
}

/// Intersects two segments. Transverse interior crossings come back clean;
/// crossings within `tol_deg` of an endpoint or with near-tangent carriers
/// are flagged; near-collinear overlapping configurations are reported as
/// [`SegmentMeet::NearCollinear`]. Degeneracy is data, not an error.
pub fn segment_intersection(s: &Segment, s2: &Segment, tol_deg: f64) -> SegmentMeet {
    let n1 = s.geodesic().normal();
    let n2 = s2.geodesic().normal();
    let c = mink_dot(n1, n2);

    if c.abs() < 1.0 - tol_deg {
        // Carriers cross: their common point is the future normalization of
        // the Minkowski cross of the normals, w = Λ(n1)·n2, ⟨w,w⟩ = c² − 1 < 0.
        let w = lambda_apply(n1, n2);
        let w = if w.x3 > 0.0 { w } else { -w };
        let p = HPoint::normalize(w).expect("crossing of intersecting geodesics is timelike");
        let t1 = s.param_of(&p);
        let t2 = s2.param_of(&p);
        let near1 = t1 > -tol_deg && t1 < s.length() + tol_deg;
        let near2 = t2 > -tol_deg && t2 < s2.length() + tol_deg;
        if !(near1 && near2) {
            return SegmentMeet::None;
        }
        let endpoint_degenerate = t1 < tol_deg
            || t1 > s.length() - tol_deg
            || t2 < tol_deg
            || t2 > s2.length() - tol_deg;
        SegmentMeet::Crossing(SegmentCrossing {
            point: p,
            tangent_first: s.direction_at(t1),
            tangent_second: s2.direction_at(t2),
            param_first: t1,
            param_second: t2,
            degenerate: endpoint_degenerate,
        })
    } else if c.abs() < 1.0 + tol_deg {
        // Near-collinear carriers. Only report when the segments actually
        // come close; far-apart parallel segments are a plain miss.
        let close = s.distance_to_point(s2.start()) < tol_deg
            || s.distance_to_point(s2.end()) < tol_deg
            || s2.distance_to_point(s.start()) < tol_deg
            || s2.distance_to_point(s.end()) < tol_deg;
        if close {
            SegmentMeet::NearCollinear
        } else {
            SegmentMeet::None
        }
    } else {
        // Ultraparallel carriers never meet.
        SegmentMeet::None
    }
}

/// Signed cosine of the crossing angle at `p` between the unoriented lines
/// of the unit tangents `u`, `u'`: `⟨u,u'⟩ · sign(det[p u u'])`, the cosine
/// of the counterclockwise angle in (0,π) from line(u) to line(u').
#[derive(Clone, Copy, Debug)]
pub struct AngleReading {
    pub cos: f64,
    /// Set when `|det[p u u']| < tol_deg` (angle numerically 0 or π).
    pub degenerate: bool,
}

pub fn signed_cos_angle(p: &HPoint, u: MinkVector, u2: MinkVector, tol_deg: f64) -> AngleReading {
    let d = det3(p.vector(), u, u2);
    let sign = if d >= 0.0 { 1.0 } else { -1.0 };
    AngleReading {
        cos: mink_dot(u, u2) * sign,
        degenerate: d.abs() < tol_deg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_hpoint, random_isometry, random_unit_tangent_at};
    use crate::real::SplitMix64;

    const PI: f64 = core::f64::consts::PI;

    // ---- mink_dot ----

    #[test]
    fn mink_dot_base_point_is_minus_one() {
        let e3 = MinkVector::new(0.0, 0.0, 1.0);
        assert_eq!(mink_dot(e3, e3), -1.0);
    }

    #[test]
    fn mink_dot_unit_spacelike() {
        let e1 = MinkVector::new(1.0, 0.0, 0.0);
        assert_eq!(mink_dot(e1, e1), 1.0);
    }

    #[test]
    fn mink_dot_direct_arithmetic() {
        // 1·4 + 2·5 − 3·6 = 4 + 10 − 18 = −4.
        let x = MinkVector::new(1.0, 2.0, 3.0);
        let y = MinkVector::new(4.0, 5.0, 6.0);
        assert_eq!(mink_dot(x, y), -4.0);
        assert_eq!(mink_dot(y, x), -4.0);
    }

    // ---- lambda ----

    #[test]
    fn lambda_of_e1_matches_reference_matrix() {
        let m = lambda_matrix(LieVec(MinkVector::new(1.0, 0.0, 0.0)));
        let expect = Mat3::new([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
        assert_eq!(m, expect);
    }

    #[test]
    fn lambda_of_zero_is_zero() {
        assert_eq!(lambda_matrix(LieVec::zero()), Mat3::zero());
    }

    #[test]
    fn lambda_inv_round_trip() {
        let v = LieVec(MinkVector::new(2.0, -1.0, 5.0));
        let back = lambda_inv(&lambda_matrix(v)).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn lambda_inv_rejects_non_pattern() {
        let mut m = lambda_matrix(LieVec(MinkVector::new(1.0, 2.0, 3.0)));
        m.m[0][0] = 0.5;
        assert!(matches!(
            lambda_inv(&m),
            Err(MinkError::NotLambdaShaped { .. })
        ));
    }

    #[test]
    fn lambda_apply_agrees_with_matrix() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..50 {
            let x = MinkVector::new(rng.next_signed(), rng.next_signed(), rng.next_signed());
            let y = MinkVector::new(rng.next_signed(), rng.next_signed(), rng.next_signed());
            let via_matrix = lambda_matrix(LieVec(x)).apply(y);
            let direct = lambda_apply(x, y);
            assert!((via_matrix - direct).max_abs() < 1e-15);
        }
    }

    // ---- killing ----

    #[test]
    fn killing_unit_spacelike_is_two() {
        let u = LieVec(MinkVector::new(1.0, 0.0, 0.0));
        assert_eq!(killing(u, u), 2.0);
    }

    #[test]
    fn killing_zero_annihilates() {
        let w = LieVec(MinkVector::new(3.0, -2.0, 7.0));
        assert_eq!(killing(LieVec::zero(), w), 0.0);
    }

    #[test]
    fn killing_matches_trace_oracle_on_random_input() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let u = LieVec(MinkVector::new(
                3.0 * rng.next_signed(),
                3.0 * rng.next_signed(),
                3.0 * rng.next_signed(),
            ));
            let w = LieVec(MinkVector::new(
                3.0 * rng.next_signed(),
                3.0 * rng.next_signed(),
                3.0 * rng.next_signed(),
            ));
            assert!((killing(u, w) - killing_trace_oracle(u, w)).abs() < 1e-12);
        }
    }

    // ---- translate_along ----

    #[test]
    fn translate_along_e1_matches_reference_matrix() {
        let l = Geodesic::new(MinkVector::new(1.0, 0.0, 0.0)).unwrap();
        for t in [0.35, -1.2, 2.0] {
            let m = translate_along(&l, t);
            let expect = Mat3::new([
                [1.0, 0.0, 0.0],
                [0.0, t.cosh(), t.sinh()],
                [0.0, t.sinh(), t.cosh()],
            ]);
            assert!(m.matrix().max_abs_diff(&expect) < 1e-14);
        }
    }

    #[test]
    fn translate_along_zero_is_identity() {
        let l = Geodesic::new(MinkVector::new(0.6, 0.8, 0.0)).unwrap();
        assert!(translate_along(&l, 0.0).is_identity(1e-15));
    }

    #[test]
    fn translate_along_is_one_parameter_group() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            let p = random_hpoint(&mut rng, 1.0);
            let u = random_unit_tangent_at(&mut rng, &p);
            let x = translation_generator(&p, u).unwrap();
            let l = Geodesic::new_with_tol(x.0, 1e-9).unwrap();
            let s = 2.0 * rng.next_signed();
            let t = 2.0 * rng.next_signed();
            let lhs = translate_along(&l, s).compose(&translate_along(&l, t));
            let rhs = translate_along(&l, s + t);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn translate_along_fixes_normal_and_preserves_form() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let p = random_hpoint(&mut rng, 1.0);
            let u = random_unit_tangent_at(&mut rng, &p);
            let l = Geodesic::new_with_tol(translation_generator(&p, u).unwrap().0, 1e-9).unwrap();
            let t = 1.5 * rng.next_signed();
            let g = translate_along(&l, t);
            assert!((g.apply(l.normal()) - l.normal()).max_abs() < 1e-10);
            assert!(Isometry::new_with_tol(*g.matrix(), 1e-10).is_ok());
            // Moves points of the geodesic by |t|.
            let moved = g.apply_point(&p);
            assert!((distance(&p, &moved) - t.abs()).abs() < 1e-9);
        }
    }

    // ---- translation_generator ----

    #[test]
    fn translation_generator_base_example() {
        let p = HPoint::base();
        let u = MinkVector::new(0.0, 1.0, 0.0);
        let x = translation_generator(&p, u).unwrap();
        assert!((x.0 - MinkVector::new(1.0, 0.0, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn translation_generator_is_equivariant() {
        // Λ(η·x) = Ad η · Λ(x): computing the generator in moved data equals
        // moving the generator.
        let mut rng = SplitMix64::new(13);
        for _ in 0..50 {
            let p = random_hpoint(&mut rng, 1.2);
            let u = random_unit_tangent_at(&mut rng, &p);
            let g = random_isometry(&mut rng);
            let x = translation_generator(&p, u).unwrap();
            let moved = translation_generator_with_tol(&g.apply_point(&p), g.apply(u), 1e-8)
                .unwrap();
            assert!((moved.0 - g.apply(x.0)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn translation_generator_velocity_matches_central_difference() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..20 {
            let p = random_hpoint(&mut rng, 1.0);
            let u = random_unit_tangent_at(&mut rng, &p);
            let x = translation_generator(&p, u).unwrap();
            let l = Geodesic::new_with_tol(x.0, 1e-9).unwrap();
            let h = 1e-5;
            let plus = translate_along(&l, h).apply(p.vector());
            let minus = translate_along(&l, -h).apply(p.vector());
            let fd = (plus - minus).scale(1.0 / (2.0 * h));
            assert!((fd - u).max_abs() < 1e-7);
        }
    }

    #[test]
    fn translation_generator_rejects_non_tangent() {
        let p = HPoint::base();
        assert!(translation_generator(&p, MinkVector::new(0.0, 2.0, 0.0)).is_err());
        assert!(translation_generator(&p, MinkVector::new(0.0, 0.0, 1.0)).is_err());
    }

    // ---- geodesic_between ----

    #[test]
    fn geodesic_between_matches_flow_example() {
        let a = HPoint::base();
        let b = HPoint::new(MinkVector::new(0.0, 1f64.sinh(), 1f64.cosh())).unwrap();
        let l = geodesic_between(&a, &b).unwrap();
        assert!((l.normal() - MinkVector::new(1.0, 0.0, 0.0)).max_abs() < 1e-12);
        // Swapping endpoints reverses the orientation.
        let l_rev = geodesic_between(&b, &a).unwrap();
        assert!((l_rev.normal() + l.normal()).max_abs() < 1e-12);
    }

    #[test]
    fn geodesic_between_orthogonality_on_random_pairs() {
        let mut rng = SplitMix64::new(19);
        for _ in 0..100 {
            let a = random_hpoint(&mut rng, 1.5);
            let b = random_hpoint(&mut rng, 1.5);
            if distance(&a, &b) < 1e-3 {
                continue;
            }
            let l = geodesic_between(&a, &b).unwrap();
            assert!(l.signed_offset(&a).abs() < 1e-10);
            assert!(l.signed_offset(&b).abs() < 1e-10);
            assert!((mink_dot(l.normal(), l.normal()) - 1.0).abs() < 1e-12);
            // Tangent at a points toward b: moving along it decreases distance to b.
            let u = l.tangent_at(&a);
            let step = exp_map(&a, u.scale(1e-6));
            assert!(distance(&step, &b) < distance(&a, &b));
        }
    }

    #[test]
    fn geodesic_between_rejects_coincident() {
        let a = HPoint::base();
        assert!(matches!(
            geodesic_between(&a, &a),
            Err(MinkError::CoincidentPoints)
        ));
    }

    // ---- segment_intersection ----

    fn seg(a: MinkVector, b: MinkVector) -> Segment {
        Segment::new(HPoint::normalize(a).unwrap(), HPoint::normalize(b).unwrap()).unwrap()
    }

    #[test]
    fn perpendicular_segments_cross_at_base() {
        // Segment along the x1-axis direction and one along x2, both through (0,0,1).
        let s1 = seg(
            MinkVector::new(-(0.5f64.sinh()), 0.0, 0.5f64.cosh()),
            MinkVector::new(0.5f64.sinh(), 0.0, 0.5f64.cosh()),
        );
        let s2 = seg(
            MinkVector::new(0.0, -(0.5f64.sinh()), 0.5f64.cosh()),
            MinkVector::new(0.0, 0.5f64.sinh(), 0.5f64.cosh()),
        );
        match segment_intersection(&s1, &s2, 1e-8) {
            SegmentMeet::Crossing(c) => {
                assert!((c.point.vector() - MinkVector::new(0.0, 0.0, 1.0)).max_abs() < 1e-12);
                assert!(!c.degenerate);
                let reading = signed_cos_angle(&c.point, c.tangent_first, c.tangent_second, 1e-8);
                assert!(reading.cos.abs() < 1e-12);
            }
            other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    fn far_segments_miss() {
        let s1 = seg(
            MinkVector::new(-0.1, 0.0, (1.0f64 + 0.01).sqrt()),
            MinkVector::new(0.1, 0.0, (1.0f64 + 0.01).sqrt()),
        );
        let s2 = seg(
            MinkVector::new(-0.1, 5.0, (1.0f64 + 0.01 + 25.0).sqrt()),
            MinkVector::new(0.1, 5.0, (1.0f64 + 0.01 + 25.0).sqrt()),
        );
        assert!(matches!(
            segment_intersection(&s1, &s2, 1e-8),
            SegmentMeet::None
        ));
    }

    #[test]
    fn random_crossings_satisfy_incidence() {
        let mut rng = SplitMix64::new(23);
        let mut hits = 0;
        for _ in 0..300 {
            let p = random_hpoint(&mut rng, 0.8);
            let u1 = random_unit_tangent_at(&mut rng, &p);
            let u2 = random_unit_tangent_at(&mut rng, &p);
            // Two segments crossing near p by construction.
            let a1 = exp_map(&p, u1.scale(-0.7 - 0.3 * rng.next_f64()));
            let b1 = exp_map(&p, u1.scale(0.7 + 0.3 * rng.next_f64()));
            let a2 = exp_map(&p, u2.scale(-0.7 - 0.3 * rng.next_f64()));
            let b2 = exp_map(&p, u2.scale(0.7 + 0.3 * rng.next_f64()));
            let s1 = Segment::new(a1, b1).unwrap();
            let s2 = Segment::new(a2, b2).unwrap();
            match segment_intersection(&s1, &s2, 1e-8) {
                SegmentMeet::Crossing(c) => {
                    hits += 1;
                    let q = c.point.vector();
                    assert!(mink_dot(s1.geodesic().normal(), q).abs() < 1e-9);
                    assert!(mink_dot(s2.geodesic().normal(), q).abs() < 1e-9);
                    assert!((mink_dot(q, q) + 1.0).abs() < 1e-9);
                    assert!((c.point.vector() - p.vector()).max_abs() < 1e-8);
                }
                SegmentMeet::NearCollinear => {} // u1 ≈ ±u2 can happen
                SegmentMeet::None => panic!("constructed crossing was missed"),
            }
        }
        assert!(hits > 250);
    }

    #[test]
    fn segment_intersection_is_symmetric() {
        let mut rng = SplitMix64::new(29);
        for _ in 0..50 {
            let p = random_hpoint(&mut rng, 0.8);
            let u1 = random_unit_tangent_at(&mut rng, &p);
            let u2 = random_unit_tangent_at(&mut rng, &p);
            let s1 = Segment::new(exp_map(&p, u1.scale(-0.9)), exp_map(&p, u1.scale(0.8))).unwrap();
            let s2 = Segment::new(exp_map(&p, u2.scale(-0.8)), exp_map(&p, u2.scale(0.9))).unwrap();
            let m12 = segment_intersection(&s1, &s2, 1e-8);
            let m21 = segment_intersection(&s2, &s1, 1e-8);
            match (m12, m21) {
                (SegmentMeet::Crossing(c1), SegmentMeet::Crossing(c2)) => {
                    assert!((c1.point.vector() - c2.point.vector()).max_abs() < 1e-12);
                    assert!((c1.tangent_first - c2.tangent_second).max_abs() < 1e-12);
                    assert!((c1.tangent_second - c2.tangent_first).max_abs() < 1e-12);
                }
                (SegmentMeet::None, SegmentMeet::None) => {}
                (SegmentMeet::NearCollinear, SegmentMeet::NearCollinear) => {}
                other => panic!("asymmetric outcome {other:?}"),
            }
        }
    }

    #[test]
    fn endpoint_crossing_is_flagged_degenerate() {
        // Second segment starts exactly at the crossing point.
        let s1 = seg(
            MinkVector::new(-(0.5f64.sinh()), 0.0, 0.5f64.cosh()),
            MinkVector::new(0.5f64.sinh(), 0.0, 0.5f64.cosh()),
        );
        let s2 = Segment::new(
            HPoint::base(),
            HPoint::normalize(MinkVector::new(0.0, 0.4f64.sinh(), 0.4f64.cosh())).unwrap(),
        )
        .unwrap();
        match segment_intersection(&s1, &s2, 1e-8) {
            SegmentMeet::Crossing(c) => assert!(c.degenerate),
            other => panic!("expected degenerate crossing, got {other:?}"),
        }
    }

    #[test]
    fn collinear_overlap_is_reported() {
        let l = Geodesic::new(MinkVector::new(1.0, 0.0, 0.0)).unwrap();
        let p0 = HPoint::base();
        let along = |t: f64| translate_along(&l, t).apply_point(&p0);
        let s1 = Segment::new(along(-1.0), along(0.5)).unwrap();
        let s2 = Segment::new(along(-0.2), along(1.0)).unwrap();
        assert!(matches!(
            segment_intersection(&s1, &s2, 1e-8),
            SegmentMeet::NearCollinear
        ));
    }

    // ---- signed_cos_angle ----

    #[test]
    fn signed_cos_angle_quarter_turn_is_zero() {
        let p = HPoint::base();
        let u = MinkVector::new(1.0, 0.0, 0.0);
        let u2 = rotation_at(&p, PI / 2.0).apply(u);
        let r = signed_cos_angle(&p, u, u2, 1e-8);
        assert!(r.cos.abs() < 1e-12);
        assert!(!r.degenerate);
    }

    #[test]
    fn signed_cos_angle_eighth_turns() {
        let p = HPoint::base();
        let u = MinkVector::new(1.0, 0.0, 0.0);
        let plus = rotation_at(&p, PI / 4.0).apply(u);
        let minus = rotation_at(&p, -PI / 4.0).apply(u);
        let r_plus = signed_cos_angle(&p, u, plus, 1e-8);
        let r_minus = signed_cos_angle(&p, u, minus, 1e-8);
        assert!((r_plus.cos - (PI / 4.0).cos()).abs() < 1e-12);
        assert!((r_minus.cos + (PI / 4.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn signed_cos_angle_line_invariance_and_antisymmetry() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..100 {
            let p = random_hpoint(&mut rng, 1.0);
            let u = random_unit_tangent_at(&mut rng, &p);
            let w = random_unit_tangent_at(&mut rng, &p);
            let base = signed_cos_angle(&p, u, w, 1e-8);
            if base.degenerate {
                continue;
            }
            for (su, sw) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                let flipped = signed_cos_angle(&p, u.scale(su), w.scale(sw), 1e-8);
                assert!((flipped.cos - base.cos).abs() < 1e-12);
            }
            let swapped = signed_cos_angle(&p, w, u, 1e-8);
            assert!((swapped.cos + base.cos).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_cos_angle_flags_parallel_tangents() {
        let p = HPoint::base();
        let u = MinkVector::new(1.0, 0.0, 0.0);
        let r = signed_cos_angle(&p, u, u, 1e-8);
        assert!(r.degenerate);
    }

    // ---- Isometry plumbing ----

    #[test]
    fn isometry_inverse_and_equivariance() {
        let mut rng = SplitMix64::new(37);
        for _ in 0..50 {
            let g = random_isometry(&mut rng);
            assert!(g.compose(&g.inverse()).is_identity(1e-12));
            // Λ(g·v) = g Λ(v) g⁻¹.
            let v = MinkVector::new(rng.next_signed(), rng.next_signed(), rng.next_signed());
            let lhs = lambda_matrix(LieVec(g.apply(v)));
            let rhs = g
                .matrix()
                .mul_mat(&lambda_matrix(LieVec(v)))
                .mul_mat(g.inverse().matrix());
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
    }

    #[test]
    fn isometry_validation_rejects_reflections() {
        // diag(1,-1,1) preserves the form but has det −1.
        let m = Mat3::new([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(Isometry::new(m).is_err());
    }

    #[test]
    fn segment_parameters_are_consistent() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..50 {
            let a = random_hpoint(&mut rng, 1.0);
            let b = random_hpoint(&mut rng, 1.0);
            if distance(&a, &b) < 1e-2 {
                continue;
            }
            let s = Segment::new(a, b).unwrap();
            assert!(s.param_of(&a).abs() < 1e-10);
            assert!((s.param_of(&b) - s.length()).abs() < 1e-10);
            let mid = s.point_at(0.5 * s.length());
            assert!((s.param_of(&mid) - 0.5 * s.length()).abs() < 1e-10);
            assert!((distance(&a, &mid) - 0.5 * s.length()).abs() < 1e-10);
            // direction_at is the unit tangent: generator check at the midpoint.
            let d = s.direction_at(0.5 * s.length());
            assert!((mink_dot(d, d) - 1.0).abs() < 1e-10);
            assert!(mink_dot(d, mid.vector()).abs() < 1e-10);
        }
    }
}
