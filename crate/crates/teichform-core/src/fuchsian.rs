//! The discrete cocompact isometry group of a closed genus-2 hyperbolic
//! surface, presented on the regular hyperbolic octagon with the single
//! relator `a1 b1 a1⁻¹ b1⁻¹ a2 b2 a2⁻¹ b2⁻¹`.
//!
//! The octagon is centered at `(0,0,1)` with vertex angle `2π/8 = π/4`, so
//! the eight vertices form a single cycle on the quotient surface and the
//! side pairings generate a discrete, torsion-free, cocompact group. The
//! octagon is simultaneously the Dirichlet domain of that group at the
//! center, which is what makes [`FuchsianGroup::reduce_to_domain`] a strict
//! descent.
//!
//! Side layout (vertices `V_k` counterclockwise at angle `kπ/4`, side
//! `s_k = [V_k, V_{k+1}]`): crossing side `k` leads into `ρ(γ_k)·D` where
//! `γ_0..γ_7 = a1, b1⁻¹, a1⁻¹, b1, a2, b2⁻¹, a2⁻¹, b2`, and the pairings act
//! by `a1: s2→s0`, `b1: s1→s3`, `a2: s6→s4`, `b2: s5→s7`.

use crate::config::Tolerances;
use crate::mink::{
    det3, distance, exp_map, geodesic_between, lambda_apply, mink_dot, translate_along, Geodesic,
    HPoint, Isometry, Mat3, MinkError, MinkVector, Segment,
};
use crate::linalg::{jacobi_svd, DMat};
use crate::real::{self, SplitMix64};
use crate::words::{Gen, Letter, Word};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// Errors from group construction and group-level geometry.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupError {
    /// The single defining relator does not evaluate to the identity.
    RelatorDefect { defect: f64 },
    /// A generator fails to map its assigned octagon side to the paired side.
    SidePairingDefect { side: usize, defect: f64 },
    /// A supplied matrix is not a valid orientation-preserving isometry.
    BadIsometry(MinkError),
    /// The element is not hyperbolic (no translation axis).
    NotHyperbolic { trace: f64 },
    /// Domain reduction failed to converge (should not happen for points
    /// produced by group actions on valid data).
    ReductionDidNotConverge,
    /// A traced path runs through a curve lift; retry with another basepoint.
    DegeneratePath,
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::RelatorDefect { defect } => {
                write!(f, "surface relator defect {defect} exceeds tolerance")
            }
            GroupError::SidePairingDefect { side, defect } => write!(
                f,
                "generator does not realize the side pairing of side {side} (defect {defect})"
            ),
            GroupError::BadIsometry(e) => write!(f, "invalid isometry: {e}"),
            GroupError::NotHyperbolic { trace } => {
                write!(f, "element with trace {trace} has no translation axis")
            }
            GroupError::ReductionDidNotConverge => {
                write!(f, "reduction to the fundamental domain did not converge")
            }
            GroupError::DegeneratePath => {
                write!(f, "traced path passes through a curve lift; basepoint is degenerate")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GroupError {}

impl From<MinkError> for GroupError {
    fn from(e: MinkError) -> Self {
        GroupError::BadIsometry(e)
    }
}

/// The regular fundamental octagon and its side bookkeeping.
#[derive(Clone, Debug)]
pub struct Octagon {
    vertices: [HPoint; 8],
    sides: [Segment; 8],
    inward_normals: [MinkVector; 8],
    side_letters: [Letter; 8],
    circumradius: f64,
    inradius: f64,
}

impl Octagon {
    pub fn vertices(&self) -> &[HPoint; 8] {
        &self.vertices
    }

    pub fn side(&self, k: usize) -> &Segment {
        &self.sides[k % 8]
    }

    /// Crossing side `k` outward leads into `ρ(side_letter(k))·D`.
    pub fn side_letter(&self, k: usize) -> Letter {
        self.side_letters[k % 8]
    }

    pub fn inward_normal(&self, k: usize) -> MinkVector {
        self.inward_normals[k % 8]
    }

    /// Distance from the center to the vertices.
    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    /// Distance from the center to the sides.
    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    /// Upper bound for the diameter of the domain.
    pub fn diameter(&self) -> f64 {
        2.0 * self.circumradius
    }

    /// Signed clearance of `p`: the minimum over sides of the inward offset.
    /// Nonnegative (within tolerance) iff `p` lies in the closed domain.
    pub fn clearance(&self, p: &HPoint) -> f64 {
        let mut worst = f64::INFINITY;
        for n in &self.inward_normals {
            worst = worst.min(mink_dot(p.vector(), *n));
        }
        worst
    }

    pub fn contains(&self, p: &HPoint, tol: f64) -> bool {
        self.clearance(p) >= -tol
    }

    /// Side index with the most negative inward offset for `p`.
    fn most_violated_side(&self, p: &HPoint) -> (usize, f64) {
        let mut k_min = 0;
        let mut worst = f64::INFINITY;
        for (k, n) in self.inward_normals.iter().enumerate() {
            let off = mink_dot(p.vector(), *n);
            if off < worst {
                worst = off;
                k_min = k;
            }
        }
        (k_min, worst)
    }
}

/// A marked discrete group of hyperbolic isometries for the closed genus-2
/// surface, with its fundamental octagon.
#[derive(Clone, Debug)]
pub struct FuchsianGroup {
    gens: [Isometry; 4],
    relator: Word,
    octagon: Octagon,
}

/// Orthonormal Minkowski frame `[t, s, P]` at `P` with `t` the unit tangent
/// toward `Q` and `s` chosen so the frame is positively oriented
/// (`det[P t s] > 0`). Satisfies `MᵀJM = J`.
fn frame_toward(p: &HPoint, q: &HPoint) -> Result<Mat3, MinkError> {
    let t = geodesic_between(p, q)?.tangent_at(p);
    let s = -lambda_apply(p.vector(), t);
    Ok(Mat3::from_columns(t, s, p.vector()))
}

/// The unique orientation-preserving isometry taking the ordered pair
/// `(P, Q)` to `(P', Q')`; requires `d(P,Q) = d(P',Q')` to be side-length
/// preserving, which the octagon construction guarantees.
fn pair_transport(p: &HPoint, q: &HPoint, p2: &HPoint, q2: &HPoint) -> Result<Isometry, MinkError> {
    let m1 = frame_toward(p, q)?;
    let m2 = frame_toward(p2, q2)?;
    let j = Mat3::mink_j();
    let m1_inv = j.mul_mat(&m1.transpose()).mul_mat(&j);
    Isometry::new_with_tol(m2.mul_mat(&m1_inv), 1e-9)
}

/// Vertex angle of the regular octagon with circumradius `r`.
fn vertex_angle(r: f64) -> f64 {
    2.0 * real::atan(1.0 / (real::cosh(r) * real::tan(PI / 8.0)))
}

const SIDE_LETTERS: [(Gen, bool); 8] = [
    (Gen::A1, false), // s0 → a1·D
    (Gen::B1, true),  // s1 → b1⁻¹·D
    (Gen::A1, true),  // s2 → a1⁻¹·D
    (Gen::B1, false), // s3 → b1·D
    (Gen::A2, false), // s4 → a2·D
    (Gen::B2, true),  // s5 → b2⁻¹·D
    (Gen::A2, true),  // s6 → a2⁻¹·D
    (Gen::B2, false), // s7 → b2·D
];

impl FuchsianGroup {
    /// The marked group of the regular-octagon surface: all side lengths and
    /// all vertex angles equal, vertex angles summing to 2π.
    pub fn standard() -> Self {
        // Circumradius with vertex angle exactly π/4, located by bisection.
        // (Closed form: cosh r = cot²(π/8); the bisection keeps the
        // construction self-contained and is tested against the closed form.)
        let mut lo = 1.0f64;
        let mut hi = 4.0f64;
        debug_assert!(vertex_angle(lo) > PI / 4.0 && vertex_angle(hi) < PI / 4.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if vertex_angle(mid) > PI / 4.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let r = 0.5 * (lo + hi);

        let vertices: [HPoint; 8] = core::array::from_fn(|k| {
            let phi = (k as f64) * PI / 4.0;
            HPoint::normalize(MinkVector::new(
                real::sinh(r) * real::cos(phi),
                real::sinh(r) * real::sin(phi),
                real::cosh(r),
            ))
            .expect("octagon vertices are future timelike")
        });

        let v = &vertices;
        // Pairings chosen so the induced vertex cycle is a single 8-cycle and
        // the side-crossing word around it is the inverse of the relator;
        // with angle sum 2π that forces ρ(relator) = identity.
        let a1 = pair_transport(&v[2], &v[3], &v[1], &v[0]).expect("octagon side pairing a1");
        let b1 = pair_transport(&v[1], &v[2], &v[4], &v[3]).expect("octagon side pairing b1");
        let a2 = pair_transport(&v[6], &v[7], &v[5], &v[4]).expect("octagon side pairing a2");
        let b2 = pair_transport(&v[5], &v[6], &v[0], &v[7]).expect("octagon side pairing b2");

        let octagon = Self::build_octagon(vertices);
        let relator = Word::parse("a1 b1 A1 B1 a2 b2 A2 B2").expect("fixed relator");
        Self {
            gens: [a1, b1, a2, b2],
            relator,
            octagon,
        }
    }

    fn build_octagon(vertices: [HPoint; 8]) -> Octagon {
        let center = HPoint::base();
        let sides: [Segment; 8] = core::array::from_fn(|k| {
            Segment::new(vertices[k], vertices[(k + 1) % 8]).expect("octagon sides nondegenerate")
        });
        let inward_normals: [MinkVector; 8] = core::array::from_fn(|k| {
            let n = sides[k].geodesic().normal();
            if mink_dot(n, center.vector()) >= 0.0 {
                n
            } else {
                -n
            }
        });
        let side_letters: [Letter; 8] = core::array::from_fn(|k| {
            let (gen, inverse) = SIDE_LETTERS[k];
            Letter { gen, inverse }
        });
        let circumradius = distance(&center, &vertices[0]);
        let inradius = real::asinh(mink_dot(center.vector(), inward_normals[0]).abs());
        Octagon {
            vertices,
            sides,
            inward_normals,
            side_letters,
            circumradius,
            inradius,
        }
    }

    /// Builds a group from explicit generator matrices, validating the
    /// relator and that each generator realizes the standard octagon's side
    /// pairing (i.e. the matrices present the regular-octagon surface with
    /// the standard marking). This is the loader used for serialized groups.
    pub fn from_generators(gens: [Isometry; 4], tol: f64) -> Result<Self, GroupError> {
        let reference = Self::standard();
        let candidate = Self {
            gens,
            relator: reference.relator.clone(),
            octagon: reference.octagon,
        };
        let defect = candidate.relator_defect();
        if defect > tol {
            return Err(GroupError::RelatorDefect { defect });
        }
        // Pairing checks: a1: (V2,V3)→(V1,V0), b1: (V1,V2)→(V4,V3),
        //                 a2: (V6,V7)→(V5,V4), b2: (V5,V6)→(V0,V7).
        let v = candidate.octagon.vertices;
        let checks: [(usize, &Isometry, [usize; 4]); 4] = [
            (0, &candidate.gens[0], [2, 3, 1, 0]),
            (1, &candidate.gens[1], [1, 2, 4, 3]),
            (4, &candidate.gens[2], [6, 7, 5, 4]),
            (5, &candidate.gens[3], [5, 6, 0, 7]),
        ];
        for (side, g, [src_a, src_b, dst_a, dst_b]) in checks {
            let d1 = (g.apply_point(&v[src_a]).vector() - v[dst_a].vector()).max_abs();
            let d2 = (g.apply_point(&v[src_b]).vector() - v[dst_b].vector()).max_abs();
            let defect = d1.max(d2);
            if defect > tol {
                return Err(GroupError::SidePairingDefect { side, defect });
            }
        }
        Ok(candidate)
    }

    /// Internal constructor for deformed generator sets that inherit the
    /// untwisted octagon bookkeeping (see [`FuchsianGroup::twist_holonomy`]).
    fn with_generators_unchecked(&self, gens: [Isometry; 4]) -> Self {
        Self {
            gens,
            relator: self.relator.clone(),
            octagon: self.octagon.clone(),
        }
    }

    pub fn generators(&self) -> &[Isometry; 4] {
        &self.gens
    }

    pub fn generator(&self, g: Gen) -> &Isometry {
        &self.gens[g.index()]
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }

    pub fn octagon(&self) -> &Octagon {
        &self.octagon
    }

    /// Center of the fundamental domain, `(0,0,1)`.
    pub fn center(&self) -> HPoint {
        HPoint::base()
    }

    pub fn rho_letter(&self, l: Letter) -> Isometry {
        let g = self.gens[l.gen.index()];
        if l.inverse {
            g.inverse()
        } else {
            g
        }
    }

    /// Holonomy of a word, letters acting left-to-right as written:
    /// `ρ(uv) = ρ(u)ρ(v)`.
    pub fn rho(&self, w: &Word) -> Isometry {
        let mut acc = Isometry::identity();
        for &l in w.letters() {
            acc = acc.compose(&self.rho_letter(l));
        }
        acc
    }

    /// Sup-norm distance of the evaluated relator from the identity.
    pub fn relator_defect(&self) -> f64 {
        self.rho(&self.relator)
            .max_abs_diff(&Isometry::identity())
    }

    /// Hyperbolic area of the fundamental octagon measured from its angles
    /// (angle defect: `(n−2)π − Σ interior angles`).
    pub fn domain_area(&self) -> f64 {
        let v = &self.octagon.vertices;
        let mut angle_sum = 0.0;
        for k in 0..8 {
            let prev = v[(k + 7) % 8];
            let next = v[(k + 1) % 8];
            let u1 = geodesic_between(&v[k], &prev).expect("octagon edges").tangent_at(&v[k]);
            let u2 = geodesic_between(&v[k], &next).expect("octagon edges").tangent_at(&v[k]);
            let c = mink_dot(u1, u2).clamp(-1.0, 1.0);
            angle_sum += real::acos(c);
        }
        6.0 * PI - angle_sum
    }

    /// Finds `(q, w)` with `q` in the closed fundamental domain and
    /// `ρ(w)·q = p`, by repeatedly stepping across the most violated side.
    /// Strict distance descent is guaranteed because the octagon is the
    /// Dirichlet domain of the group at the center.
    pub fn reduce_to_domain(&self, p: &HPoint) -> Result<(HPoint, Word), GroupError> {
        let tol = Tolerances::DEFAULT.tol_point;
        let mut q = *p;
        let mut w = Word::identity();
        for _ in 0..10_000 {
            let (k, worst) = self.octagon.most_violated_side(&q);
            if worst >= -tol {
                return Ok((q, w));
            }
            let letter = self.octagon.side_letters[k];
            q = self.rho_letter(letter).inverse().apply_point(&q);
            w = w.push(letter);
        }
        Err(GroupError::ReductionDidNotConverge)
    }

    /// All freely reduced words of length at most `max_len` with their
    /// holonomies (including the empty word).
    pub fn word_ball(&self, max_len: usize) -> Vec<(Word, Isometry)> {
        let mut out = vec![(Word::identity(), Isometry::identity())];
        let mut frontier: Vec<usize> = vec![0];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for &idx in &frontier {
                let (w, iso) = out[idx].clone();
                for gen in Gen::ALL {
                    for inverse in [false, true] {
                        let l = Letter { gen, inverse };
                        if w.letters().last().is_some_and(|last| last.inverted() == l) {
                            continue;
                        }
                        let nw = w.push(l);
                        let niso = iso.compose(&self.rho_letter(l));
                        next.push(out.len());
                        out.push((nw, niso));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// All group elements `γ` with `d(ρ(γ)·center, center) ≤ radius`,
    /// shortlex-sorted, each listed once with a shortest representative
    /// word. Enumeration walks the tiling dual graph (append one letter =
    /// move to an adjacent tile) with a pruning radius fattened by the
    /// domain diameter, which keeps every target element reachable.
    pub fn group_ball(&self, radius: f64) -> Vec<(Word, Isometry)> {
        let center = self.center();
        let prune = radius + self.octagon.diameter() + 0.5;

        struct Entry {
            iso: Isometry,
            parent: usize,
            letter: Option<Letter>,
            in_ball: bool,
        }
        let dist_to_center = |iso: &Isometry| -> f64 {
            real::acosh(iso.apply(center.vector()).x3.max(1.0))
        };

        let mut entries: Vec<Entry> = vec![Entry {
            iso: Isometry::identity(),
            parent: 0,
            letter: None,
            in_ball: true,
        }];
        let mut dedup = PointDedup::new(0.5, 0.12);
        dedup.insert(center.vector(), 0);
        let mut frontier: Vec<usize> = vec![0];

        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &idx in &frontier {
                for gen in Gen::ALL {
                    for inverse in [false, true] {
                        let l = Letter { gen, inverse };
                        if entries[idx].letter.is_some_and(|last| last.inverted() == l) {
                            continue;
                        }
                        let iso = entries[idx].iso.compose(&self.rho_letter(l));
                        let d = dist_to_center(&iso);
                        if d > prune {
                            continue;
                        }
                        let p = iso.apply(center.vector());
                        if dedup.find(p, |j| entries[j].iso.apply(center.vector())).is_some() {
                            continue;
                        }
                        let new_idx = entries.len();
                        dedup.insert(p, new_idx);
                        entries.push(Entry {
                            iso,
                            parent: idx,
                            letter: Some(l),
                            in_ball: d <= radius,
                        });
                        next.push(new_idx);
                    }
                }
            }
            frontier = next;
        }

        let mut out = Vec::new();
        for (idx, e) in entries.iter().enumerate() {
            if !e.in_ball {
                continue;
            }
            // Reconstruct the word by walking parent links.
            let mut letters_rev = Vec::new();
            let mut cur = idx;
            while let Some(l) = entries[cur].letter {
                letters_rev.push(l);
                cur = entries[cur].parent;
            }
            letters_rev.reverse();
            out.push((Word::from_letters(letters_rev), e.iso));
        }
        out.sort_by(|a, b| a.0.shortlex_cmp(&b.0));
        out
    }

    /// Sample net along a segment: points spaced at most `spacing` apart
    /// (endpoints included), each given by its domain representative and
    /// reduction word (`ρ(word)·representative` is the sample point).
    pub fn net_along_segment(
        &self,
        seg: &Segment,
        spacing: f64,
    ) -> Result<Vec<(HPoint, Word)>, GroupError> {
        let len = seg.length();
        let steps = (len / spacing) as usize + 1;
        let mut out = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let s = len * (i as f64) / (steps as f64);
            let (q, w) = self.reduce_to_domain(&seg.point_at(s))?;
            out.push((q, w));
        }
        Ok(out)
    }

    /// Sample net along one period of a closed geodesic: points spaced at
    /// most `spacing` apart over axis parameters `[0, len)` measured from
    /// `p0`, each with its domain representative and reduction word.
    pub fn net_along_curve(
        &self,
        axis: &Geodesic,
        p0: &HPoint,
        len: f64,
        spacing: f64,
    ) -> Result<Vec<(HPoint, Word)>, GroupError> {
        let steps = ((len / spacing) as usize + 1).max(1);
        let tangent = axis.tangent_at(p0);
        let mut out = Vec::with_capacity(steps);
        for i in 0..steps {
            let s = len * (i as f64) / (steps as f64);
            let (q, w) = self.reduce_to_domain(&exp_map(p0, tangent.scale(s)))?;
            out.push((q, w));
        }
        Ok(out)
    }

    /// Precomputes the deck-search kernel for relative enumerations with
    /// approach distance up to `reach` (see [`DeckSearch::transporters`]).
    pub fn deck_search(&self, reach: f64) -> DeckSearch {
        let radius = 2.0 * self.octagon.circumradius() + reach + 0.1;
        DeckSearch {
            ball: self.group_ball(radius),
            reach,
        }
    }

    /// Translation axis and length of a hyperbolic element: the oriented
    /// geodesic it translates in its positive direction, and the translation
    /// length `arccosh((tr g − 1)/2)`.
    pub fn axis_of(g: &Isometry) -> Result<(Geodesic, f64), GroupError> {
        let tr = g.matrix().trace();
        if tr <= 3.0 + 1e-9 {
            return Err(GroupError::NotHyperbolic { trace: tr });
        }
        let len = real::acosh((tr - 1.0) / 2.0);
        // The axis normal is the fixed vector of the matrix (eigenvalue 1),
        // i.e. the kernel of g − I.
        let mut diff = DMat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                diff.set(i, j, g.matrix().m[i][j] - id);
            }
        }
        let svd = jacobi_svd(&diff);
        let k = svd.v.col(2); // smallest singular value
        let x = MinkVector::new(k[0], k[1], k[2]);
        let mut axis = Geodesic::from_spacelike(x).map_err(GroupError::BadIsometry)?;
        // Orient the axis so g translates in the positive direction:
        // for q on the axis, ⟨g·q, Λ(x)·q⟩ = sinh(len) > 0.
        let q = axis.foot_of(&HPoint::base());
        let push = mink_dot(g.apply(q.vector()), axis.tangent_at(&q));
        if push < 0.0 {
            axis = axis.reversed();
        }
        Ok((axis, len))
    }

    /// Left-twist deformation along the closed geodesic of `curve` with
    /// shear parameter `t`: each generator's holonomy is premultiplied by
    /// one translation `T_t` per crossing of the traced path
    /// `[basepoint, ρ(g)·basepoint]` with a lift of the curve's axis, lifts
    /// oriented at each crossing so the path crosses them positively
    /// (`det[q, u_lift, u_path] > 0`), factors ordered along the path.
    ///
    /// The result reuses this group's octagon bookkeeping: for `t ≠ 0` only
    /// the generator matrices (and word holonomies built from them) are
    /// meaningful, which is all downstream consumers use.
    pub fn twist_holonomy(
        &self,
        curve: &Word,
        t: f64,
        basepoint: Option<&HPoint>,
    ) -> Result<FuchsianGroup, GroupError> {
        if t == 0.0 {
            return Ok(self.with_generators_unchecked(self.gens));
        }
        match basepoint {
            Some(bp) => self.twist_attempt(curve, t, bp),
            None => {
                // Deterministic retry ladder of nudged basepoints.
                let mut rng = SplitMix64::new(0x7e1c_5f2d);
                let mut bp = self.center();
                for _ in 0..Tolerances::DEFAULT.max_retries {
                    match self.twist_attempt(curve, t, &bp) {
                        Err(GroupError::DegeneratePath) => {
                            let dir = MinkVector::new(rng.next_signed(), rng.next_signed(), 0.0);
                            let dir = dir + bp.vector().scale(mink_dot(dir, bp.vector()));
                            let n = mink_dot(dir, dir);
                            if n > 1e-12 {
                                bp = exp_map(&bp, dir.scale(1e-3 / real::sqrt(n)));
                            }
                        }
                        other => return other,
                    }
                }
                Err(GroupError::DegeneratePath)
            }
        }
    }

    fn twist_attempt(
        &self,
        curve: &Word,
        t: f64,
        basepoint: &HPoint,
    ) -> Result<FuchsianGroup, GroupError> {
        let g_curve = self.rho(curve);
        let (axis, curve_len) = Self::axis_of(&g_curve)?;

        let targets: [HPoint; 4] =
            core::array::from_fn(|i| self.gens[i].apply_point(basepoint));

        // Distinct axis lifts near any of the four traced paths, found by
        // relative deck search (sample nets + local kernel).
        let p0 = axis.foot_of(&self.center());
        let source = self.net_along_curve(&axis, &p0, curve_len, 0.5)?;
        let mut target_net = Vec::new();
        for tgt in &targets {
            let seg = Segment::new(*basepoint, *tgt).map_err(GroupError::BadIsometry)?;
            target_net.extend(self.net_along_segment(&seg, 0.5)?);
        }
        let search = self.deck_search(0.7);
        let mut lifts: Vec<Geodesic> = Vec::new();
        for (_, iso) in search.transporters(self, &target_net, &source, 0.6) {
            let cand = iso.apply_geodesic(&axis);
            let scale = 1.0 + cand.normal().max_abs();
            let dup = lifts.iter().any(|l| {
                (l.normal() - cand.normal()).max_abs() < 1e-7 * scale
                    || (l.normal() + cand.normal()).max_abs() < 1e-7 * scale
            });
            if !dup {
                lifts.push(cand);
            }
        }

        let mut new_gens = self.gens;
        for (gi, target) in targets.iter().enumerate() {
            let path = Segment::new(*basepoint, *target).map_err(GroupError::BadIsometry)?;
            // Crossings of the path with each lift: offsets of the endpoints
            // change sign strictly; an endpoint on a lift is degenerate.
            let mut crossings: Vec<(f64, Geodesic)> = Vec::new();
            for lift in &lifts {
                let o_a = lift.signed_offset(path.start());
                let o_b = lift.signed_offset(path.end());
                if o_a.abs() < 1e-9 || o_b.abs() < 1e-9 {
                    return Err(GroupError::DegeneratePath);
                }
                if o_a * o_b >= 0.0 {
                    continue;
                }
                let w = lambda_apply(path.geodesic().normal(), lift.normal());
                let w = if w.x3 > 0.0 { w } else { -w };
                let q = HPoint::normalize(w).map_err(GroupError::BadIsometry)?;
                let s = path.param_of(&q);
                let u_path = path.direction_at(s);
                let u_lift = lift.tangent_at(&q);
                let oriented = if det3(q.vector(), u_lift, u_path) > 0.0 {
                    *lift
                } else {
                    lift.reversed()
                };
                crossings.push((s, oriented));
            }
            crossings.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut factor = Isometry::identity();
            for (_, lift) in &crossings {
                factor = factor.compose(&translate_along(lift, t));
            }
            new_gens[gi] = factor.compose(&self.gens[gi]);
        }

        let twisted = self.with_generators_unchecked(new_gens);
        let defect = twisted.relator_defect();
        if defect > 1e-7 {
            return Err(GroupError::RelatorDefect { defect });
        }
        Ok(twisted)
    }
}

/// Relative deck enumeration: a small precomputed ball of "local" group
/// elements that, composed with the reduction words of two sample nets,
/// reaches every deck transformation carrying one net close to the other.
/// This keeps enumeration cost independent of how far the nets wander from
/// the domain (an absolute metric ball would grow exponentially with that
/// distance).
pub struct DeckSearch {
    ball: Vec<(Word, Isometry)>,
    reach: f64,
}

impl DeckSearch {
    /// Maximum approach distance this kernel supports.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Local elements `β` with both `c` and `ρ(β)·c` inside the kernel
    /// radius; useful for identifying boundary representatives of one
    /// surface point (`d(c, ρ(β)c) ≤ 2·circumradius + slack`).
    pub fn local_elements(&self) -> &[(Word, Isometry)] {
        &self.ball
    }

    /// Every deck `γ` with `d(x_k, ρ(γ)·y_m) ≤ r` for some target sample
    /// `x_k` and source sample `y_m` is returned (once, deduplicated by
    /// holonomy; words are concatenations `u_k·β·v_m⁻¹`, not geodesic).
    ///
    /// Correctness: for such a `γ`, `β = u_k⁻¹·γ·v_m` moves the domain
    /// representative of `y_m` within `r` of the domain representative of
    /// `x_k`, hence `d(c, βc) ≤ 2·circumradius + r` and `β` is in the
    /// kernel ball. Requires `r ≤ reach`.
    pub fn transporters(
        &self,
        group: &FuchsianGroup,
        target: &[(HPoint, Word)],
        source: &[(HPoint, Word)],
        r: f64,
    ) -> Vec<(Word, Isometry)> {
        debug_assert!(r <= self.reach + 1e-12);
        let cosh_r = real::cosh(r) + 1e-9;
        let rho_target: Vec<Isometry> = target.iter().map(|(_, u)| group.rho(u)).collect();
        let rho_source_inv: Vec<Isometry> =
            source.iter().map(|(_, v)| group.rho(v).inverse()).collect();

        let mut out: Vec<(Word, Isometry)> = Vec::new();
        for (m, (ym, vm)) in source.iter().enumerate() {
            let vm_inv = vm.inverse();
            for (bw, biso) in &self.ball {
                let moved = biso.apply(ym.vector());
                for (k, (xk, uk)) in target.iter().enumerate() {
                    if -mink_dot(xk.vector(), moved) > cosh_r {
                        continue;
                    }
                    let iso = rho_target[k].compose(biso).compose(&rho_source_inv[m]);
                    let scale = 1.0 + iso.matrix().max_abs_diff(&Mat3::zero());
                    if out
                        .iter()
                        .any(|(_, o)| o.max_abs_diff(&iso) < 1e-6 * scale)
                    {
                        continue;
                    }
                    let word = uk.concat(bw).concat(&vm_inv);
                    out.push((word, iso));
                }
            }
        }
        out
    }
}

/// Spatial dedup of well-separated points via quantized cells with boundary
/// probing. Distinct orbit points of a torsion-free cocompact group are
/// separated by order-1 Euclidean distances, while duplicates differ only by
/// float noise, so cell size 0.5 / match radius 0.1 has huge margins.
struct PointDedup {
    cell: f64,
    band: f64,
    map: BTreeMap<(i64, i64, i64), Vec<usize>>,
}

impl PointDedup {
    fn new(cell: f64, band: f64) -> Self {
        Self {
            cell,
            band,
            map: BTreeMap::new(),
        }
    }

    fn home(&self, p: MinkVector) -> (i64, i64, i64) {
        (
            libm_round(p.x1 / self.cell),
            libm_round(p.x2 / self.cell),
            libm_round(p.x3 / self.cell),
        )
    }

    fn axis_cells(&self, x: f64) -> (i64, Option<i64>) {
        let c = x / self.cell;
        let home = libm_round(c);
        let off = c - home as f64;
        let band = self.band / self.cell;
        if off > 0.5 - band {
            (home, Some(home + 1))
        } else if off < -(0.5 - band) {
            (home, Some(home - 1))
        } else {
            (home, None)
        }
    }

    fn find<F: Fn(usize) -> MinkVector>(&self, p: MinkVector, point_of: F) -> Option<usize> {
        let (c1, e1) = self.axis_cells(p.x1);
        let (c2, e2) = self.axis_cells(p.x2);
        let (c3, e3) = self.axis_cells(p.x3);
        let opts1 = [Some(c1), e1];
        let opts2 = [Some(c2), e2];
        let opts3 = [Some(c3), e3];
        for o1 in opts1.into_iter().flatten() {
            for o2 in opts2.into_iter().flatten() {
                for o3 in opts3.into_iter().flatten() {
                    if let Some(bucket) = self.map.get(&(o1, o2, o3)) {
                        for &idx in bucket {
                            if (point_of(idx) - p).max_abs() < 0.1 {
                                return Some(idx);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, p: MinkVector, idx: usize) {
        self.map.entry(self.home(p)).or_default().push(idx);
    }
}

/// Round-half-away-from-zero to i64 without requiring std.
fn libm_round(x: f64) -> i64 {
    if x >= 0.0 {
        (x + 0.5) as i64
    } else {
        (x - 0.5) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mink::rotation_at;
    use crate::testutil::random_hpoint;

    fn close(a: MinkVector, b: MinkVector, tol: f64) -> bool {
        (a - b).max_abs() < tol
    }

    #[test]
    fn circumradius_matches_closed_form() {
        let g = FuchsianGroup::standard();
        // cosh r = cot²(π/8) = 3 + 2√2.
        let expect = 3.0 + 2.0 * 2.0f64.sqrt();
        assert!((g.octagon().circumradius().cosh() - expect).abs() < 1e-12);
    }

    #[test]
    fn octagon_is_regular_with_quarter_pi_angles() {
        let g = FuchsianGroup::standard();
        let oct = g.octagon();
        let side_len = oct.side(0).length();
        for k in 0..8 {
            assert!((oct.side(k).length() - side_len).abs() < 1e-12);
        }
        // Interior angle measured from the geometry at each vertex.
        let v = oct.vertices();
        for k in 0..8 {
            let prev = v[(k + 7) % 8];
            let next = v[(k + 1) % 8];
            let u1 = geodesic_between(&v[k], &prev).unwrap().tangent_at(&v[k]);
            let u2 = geodesic_between(&v[k], &next).unwrap().tangent_at(&v[k]);
            let angle = mink_dot(u1, u2).clamp(-1.0, 1.0).acos();
            assert!((angle - PI / 4.0).abs() < 1e-12);
        }
        assert!(oct.inradius() < oct.circumradius());
    }

    #[test]
    fn side_pairings_map_assigned_vertices() {
        let g = FuchsianGroup::standard();
        let v = g.octagon().vertices();
        let cases = [
            (g.generator(Gen::A1), [(2usize, 1usize), (3, 0)]),
            (g.generator(Gen::B1), [(1, 4), (2, 3)]),
            (g.generator(Gen::A2), [(6, 5), (7, 4)]),
            (g.generator(Gen::B2), [(5, 0), (6, 7)]),
        ];
        for (iso, pairs) in cases {
            for (src, dst) in pairs {
                assert!(close(iso.apply_point(&v[src]).vector(), v[dst].vector(), 1e-10));
            }
        }
    }

    #[test]
    fn relator_evaluates_to_identity() {
        let g = FuchsianGroup::standard();
        assert!(g.relator_defect() < 1e-9);
    }

    #[test]
    fn vertex_cycle_is_a_single_eight_cycle() {
        // The side pairings chain all eight vertices into one cycle whose
        // angle sum is 2π; this is what forces the relator to close up.
        let g = FuchsianGroup::standard();
        let v = g.octagon().vertices();
        let expect = [3usize, 2, 1, 4, 7, 6, 5, 0];
        let steps = ["A1", "B1", "a1", "b1", "A2", "B2", "a2", "b2"];
        let mut cur = v[0];
        for (s, e) in steps.iter().zip(expect) {
            let l = Word::parse(s).unwrap();
            cur = g.rho(&l).apply_point(&cur);
            assert!(
                (cur.vector() - v[e].vector()).max_abs() < 1e-10,
                "chain step {s} missed vertex {e}"
            );
        }
    }

    #[test]
    fn domain_area_is_four_pi() {
        let g = FuchsianGroup::standard();
        assert!((g.domain_area() - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn generators_are_validated_isometries() {
        let g = FuchsianGroup::standard();
        for iso in g.generators() {
            assert!(Isometry::new_with_tol(*iso.matrix(), 1e-10).is_ok());
        }
    }

    #[test]
    fn sides_bisect_center_and_neighbor_center() {
        // Dirichlet property: each side lies on the perpendicular bisector of
        // the segment from the center to the neighboring tile center.
        let g = FuchsianGroup::standard();
        let c = g.center();
        for k in 0..8 {
            let letter = g.octagon().side_letter(k);
            let neighbor = g.rho_letter(letter).apply_point(&c);
            let mid = g.octagon().side(k).point_at(0.5 * g.octagon().side(k).length());
            assert!((distance(&mid, &c) - distance(&mid, &neighbor)).abs() < 1e-10);
            let v_start = g.octagon().side(k).start();
            assert!((distance(v_start, &c) - distance(v_start, &neighbor)).abs() < 1e-10);
        }
    }

    #[test]
    fn from_generators_round_trips_and_rejects_garbage() {
        let g = FuchsianGroup::standard();
        assert!(FuchsianGroup::from_generators(*g.generators(), 1e-8).is_ok());
        let mut bad = *g.generators();
        bad[2] = bad[3];
        assert!(FuchsianGroup::from_generators(bad, 1e-8).is_err());
    }

    #[test]
    fn reduce_to_domain_recovers_interior_representative() {
        let g = FuchsianGroup::standard();
        let mut rng = SplitMix64::new(2024);
        // Reduction of a point at distance d from the center is conditioned
        // like e^(2d)·ε in the recovered representative (the pull-backs
        // re-expand the float rounding of the far coordinates), so the
        // pointwise tolerance is tight for short words and loose for the
        // deliberately long one. The recovered word itself is exact.
        let words: [(&str, f64); 6] = [
            ("a1", 1e-9),
            ("b2 A1", 1e-9),
            ("a1 b1 a2", 1e-7),
            ("B1 B1 a2 b2", 1e-7),
            ("a1 b1 A1 B1 a2", 1e-7),
            ("b2 a2 b1 a1 B2 A2", 1e-3),
        ];
        for (w_str, point_tol) in words {
            let w0 = Word::parse(w_str).unwrap();
            // Interior point well inside the domain.
            let p0 = random_hpoint(&mut rng, 0.3 * g.octagon().inradius());
            assert!(g.octagon().contains(&p0, 0.0));
            let p = g.rho(&w0).apply_point(&p0);
            let (q, w) = g.reduce_to_domain(&p).unwrap();
            assert!(g.octagon().contains(&q, 1e-10));
            assert!(close(q.vector(), p0.vector(), point_tol));
            // Far orbit points have huge coordinates; compare relatively.
            // (The hyperbolic distance of near-equal far points drowns in
            // the cancellation noise of the inner product.)
            let back = g.rho(&w).apply_point(&q);
            let rel = (back.vector() - p.vector()).max_abs() / p.vector().max_abs().max(1.0);
            assert!(rel < point_tol, "relative round-trip error {rel}");
            // The recovered element matches the input word exactly.
            assert!(g.rho(&w).max_abs_diff(&g.rho(&w0))
                / (1.0 + g.rho(&w0).matrix().max_abs_diff(&Mat3::zero()))
                < 1e-8);
        }
    }

    #[test]
    fn reduce_to_domain_is_identity_inside() {
        let g = FuchsianGroup::standard();
        let p = random_hpoint(&mut SplitMix64::new(5), 0.4);
        let (q, w) = g.reduce_to_domain(&p).unwrap();
        assert!(w.is_empty());
        assert!(close(q.vector(), p.vector(), 0.0 + 1e-15));
    }

    #[test]
    fn word_ball_counts_reduced_words() {
        let g = FuchsianGroup::standard();
        assert_eq!(g.word_ball(0).len(), 1);
        assert_eq!(g.word_ball(1).len(), 9);
        assert_eq!(g.word_ball(2).len(), 9 + 56);
    }

    #[test]
    fn no_near_identity_in_word_ball() {
        let g = FuchsianGroup::standard();
        let mut min_defect = f64::INFINITY;
        for (w, iso) in g.word_ball(3) {
            if w.is_empty() {
                continue;
            }
            min_defect = min_defect.min(iso.max_abs_diff(&Isometry::identity()));
        }
        assert!(min_defect > 1e-2, "min defect {min_defect}");
    }

    #[test]
    fn group_ball_small_radii() {
        let g = FuchsianGroup::standard();
        let tiny = g.group_ball(0.5);
        assert_eq!(tiny.len(), 1);
        assert!(tiny[0].0.is_empty());

        // Nearest nontrivial orbit points sit at twice the inradius.
        let first_shell = 2.0 * g.octagon().inradius();
        let ball = g.group_ball(first_shell + 0.05);
        assert_eq!(ball.len(), 9, "identity plus the eight side neighbors");
        let c = g.center();
        for (w, iso) in &ball {
            assert!(distance(&iso.apply_point(&c), &c) <= first_shell + 0.05);
            assert!(w.len() <= 1);
        }
    }

    #[test]
    fn group_ball_is_inverse_closed_and_duplicate_free() {
        let g = FuchsianGroup::standard();
        let c = g.center();
        let ball = g.group_ball(4.0);
        for (i, (_, iso)) in ball.iter().enumerate() {
            // inverse closure
            let inv_point = iso.inverse().apply_point(&c);
            assert!(
                ball.iter()
                    .any(|(_, o)| close(o.apply_point(&c).vector(), inv_point.vector(), 1e-6)),
                "inverse of element {i} missing"
            );
            // no duplicates
            for (_, other) in ball.iter().skip(i + 1) {
                assert!(
                    (other.apply_point(&c).vector() - iso.apply_point(&c).vector()).max_abs()
                        > 0.5
                );
            }
        }
    }

    #[test]
    fn group_ball_growth_is_monotone() {
        let g = FuchsianGroup::standard();
        let n4 = g.group_ball(4.0).len();
        let n5 = g.group_ball(5.0).len();
        let n6 = g.group_ball(6.0).len();
        assert!(n4 <= n5 && n5 <= n6);
        assert!(n6 > n4, "growth should be visible between radii 4 and 6");
    }

    #[test]
    fn axis_of_generator_is_translated() {
        let g = FuchsianGroup::standard();
        for gen in Gen::ALL {
            let iso = *g.generator(gen);
            let (axis, len) = FuchsianGroup::axis_of(&iso).unwrap();
            assert!(len > 0.5);
            // The axis normal is fixed by the matrix.
            assert!(close(iso.apply(axis.normal()), axis.normal(), 1e-9));
            // Points on the axis are translated forward by exactly `len`.
            let q = axis.foot_of(&HPoint::base());
            let moved = iso.apply_point(&q);
            assert!(axis.signed_offset(&moved).abs() < 1e-9);
            assert!((distance(&q, &moved) - len).abs() < 1e-9);
            assert!(mink_dot(moved.vector(), axis.tangent_at(&q)) > 0.0);
            // The inverse has the reversed axis and the same length.
            let (axis_inv, len_inv) = FuchsianGroup::axis_of(&iso.inverse()).unwrap();
            assert!((len - len_inv).abs() < 1e-10);
            assert!(close(axis_inv.normal(), -axis.normal(), 1e-9));
        }
    }

    #[test]
    fn axis_of_rejects_rotation() {
        let rot = rotation_at(&HPoint::base(), 0.7);
        assert!(matches!(
            FuchsianGroup::axis_of(&rot),
            Err(GroupError::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn twist_zero_is_bitwise_identity() {
        let g = FuchsianGroup::standard();
        let curve = Word::parse("a1").unwrap();
        let twisted = g.twist_holonomy(&curve, 0.0, None).unwrap();
        for (a, b) in twisted.generators().iter().zip(g.generators()) {
            assert_eq!(a.matrix().m, b.matrix().m);
        }
    }

    #[test]
    fn twist_preserves_relator() {
        let g = FuchsianGroup::standard();
        for curve_str in ["a1", "b2"] {
            let curve = Word::parse(curve_str).unwrap();
            for t in [0.05, 0.4, -0.3] {
                let twisted = g.twist_holonomy(&curve, t, None).unwrap();
                assert!(
                    twisted.relator_defect() < 1e-9,
                    "curve {curve_str}, t {t}: defect {}",
                    twisted.relator_defect()
                );
            }
        }
    }

    #[test]
    fn twist_is_additive_on_commuting_parameters() {
        // Twisting by s then evaluating crossings again is not composition of
        // group elements in general, but holonomies of the twisted group along
        // the curve itself keep their trace (the curve is unsheared by its
        // own twist).
        let g = FuchsianGroup::standard();
        let curve = Word::parse("a1").unwrap();
        let base_trace = g.rho(&curve).matrix().trace();
        let twisted = g.twist_holonomy(&curve, 0.35, None).unwrap();
        let new_trace = twisted.rho(&curve).matrix().trace();
        assert!((base_trace - new_trace).abs() < 1e-8);
    }
}
