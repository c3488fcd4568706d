//! Group cocycles valued in the Lie algebra of the isometry group, and the
//! map Φ from weighted geodesic graphs to cocycles.
//!
//! A cocycle assigns a Lie-algebra vector to each generator and extends to
//! words by `τ(uv) = τ(u) + Ad(ρ(u))·τ(v)`; it is closed when the extension
//! of the surface relator vanishes. Coboundaries are `δξ(g) = ξ − Ad(ρ(g))ξ`.
//! Over the four generators the closed cocycles form a 9-dimensional space,
//! the coboundaries a 3-dimensional subspace, so the cohomology — the model
//! of the deformation tangent space — has dimension 6.
//!
//! Φ turns a balanced graph into a cocycle: trace a path from a basepoint
//! `x₀` to `ρ(g)·x₀`; every transverse crossing with a lift of a graph edge
//! contributes the edge weight times the generator of the hyperbolic
//! translation along that lift, the lift oriented so the path crosses it
//! positively (`det[p, u_edge, u_path] > 0`). Balance makes the sum
//! invariant under path homotopy and basepoint change up to coboundaries.

use crate::fuchsian::{DeckSearch, FuchsianGroup, GroupError};
use crate::geograph::{GeodesicGraph, GraphError};
use crate::linalg::{jacobi_svd, least_squares, solve, DMat};
use crate::mink::{
    det3, exp_map, lambda_apply, mink_dot, segment_intersection, HPoint, LieVec, MinkVector,
    Segment, SegmentMeet,
};
use crate::real::{self, SplitMix64};
use crate::words::{Gen, Word};
use alloc::vec::Vec;

/// A Lie-algebra-valued 1-cochain on the group, determined by its values on
/// the four generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    values: [LieVec; 4],
}

impl Cocycle {
    pub fn new(values: [LieVec; 4]) -> Self {
        Self { values }
    }

    pub fn zero() -> Self {
        Self {
            values: [LieVec::zero(); 4],
        }
    }

    pub fn value(&self, g: Gen) -> LieVec {
        self.values[g.index()]
    }

    pub fn values(&self) -> &[LieVec; 4] {
        &self.values
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            values: core::array::from_fn(|i| self.values[i] + other.values[i]),
        }
    }

    pub fn sub(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            values: core::array::from_fn(|i| self.values[i] - other.values[i]),
        }
    }

    pub fn scale(&self, s: f64) -> Cocycle {
        Cocycle {
            values: core::array::from_fn(|i| self.values[i].scale(s)),
        }
    }

    /// Flat 12-vector layout: generator-major, components `x1,x2,x3`.
    pub fn to_flat(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (i, v) in self.values.iter().enumerate() {
            let a = v.0.as_array();
            out[3 * i] = a[0];
            out[3 * i + 1] = a[1];
            out[3 * i + 2] = a[2];
        }
        out
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        assert_eq!(flat.len(), 12);
        Self {
            values: core::array::from_fn(|i| {
                LieVec(MinkVector::new(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]))
            }),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.0.max_abs())
            .fold(0.0, f64::max)
    }

    /// Extension to an arbitrary word: `τ(uv) = τ(u) + Ad(ρ(u))·τ(v)`, with
    /// `τ(g⁻¹) = −Ad(ρ(g)⁻¹)·τ(g)` on inverse letters. Invariant under free
    /// reduction of the word.
    pub fn extend(&self, group: &FuchsianGroup, w: &Word) -> LieVec {
        let mut acc = crate::mink::Isometry::identity();
        let mut val = LieVec::zero();
        for &l in w.letters() {
            let tau_l = if l.inverse {
                let ginv = group.rho_letter(l);
                -ginv.apply_lie(self.values[l.gen.index()])
            } else {
                self.values[l.gen.index()]
            };
            val = val + acc.apply_lie(tau_l);
            acc = acc.compose(&group.rho_letter(l));
        }
        val
    }

    /// Norm of the extension of the defining relator; zero exactly on closed
    /// cocycles.
    pub fn relator_defect(&self, group: &FuchsianGroup) -> f64 {
        self.extend(group, group.relator()).0.max_abs()
    }
}

/// The coboundary of a Lie-algebra vector: `δξ(g) = ξ − Ad(ρ(g))·ξ`.
pub fn coboundary(group: &FuchsianGroup, xi: LieVec) -> Cocycle {
    Cocycle {
        values: core::array::from_fn(|i| {
            let g = group.generator(Gen::ALL[i]);
            xi - g.apply_lie(xi)
        }),
    }
}

/// The closedness constraint as a 3×12 matrix `A` on flat cocycle vectors:
/// `A·flat(τ) = extend(τ, relator)`. Walking the relator with prefix
/// holonomies `p_k`, a positive letter `g` at position `k` contributes the
/// block `+Ad(ρ(p_{k−1}))` to `g`'s columns and an inverse letter `g⁻¹`
/// contributes `−Ad(ρ(p_k))`.
pub fn constraint_matrix(group: &FuchsianGroup) -> DMat {
    let mut a = DMat::zeros(3, 12);
    let mut prefix = crate::mink::Isometry::identity();
    for &l in group.relator().letters() {
        let next = prefix.compose(&group.rho_letter(l));
        let (block, sign) = if l.inverse {
            (next, -1.0)
        } else {
            (prefix, 1.0)
        };
        for r in 0..3 {
            for c in 0..3 {
                let col = 3 * l.gen.index() + c;
                a.set(r, col, a.get(r, col) + sign * block.matrix().m[r][c]);
            }
        }
        prefix = next;
    }
    a
}

/// The coboundary map as a 12×3 matrix on Lie-algebra vectors `ξ`.
pub fn coboundary_matrix(group: &FuchsianGroup) -> DMat {
    let mut b = DMat::zeros(12, 3);
    for (i, &g) in Gen::ALL.iter().enumerate() {
        let m = group.generator(g).matrix();
        for r in 0..3 {
            for c in 0..3 {
                let id = if r == c { 1.0 } else { 0.0 };
                b.set(3 * i + r, c, id - m.m[r][c]);
            }
        }
    }
    b
}

/// Basis of the space of closed cocycles (kernel of the constraint matrix);
/// dimension 9 for this group.
pub fn cocycle_basis(group: &FuchsianGroup) -> Vec<Cocycle> {
    crate::linalg::kernel_basis(&constraint_matrix(group), 1e-10)
        .into_iter()
        .map(|k| Cocycle::from_flat(&k))
        .collect()
}

/// Distance between the cohomology classes of two cocycles: the least-squares
/// residual of `a − b` against the coboundary subspace (Euclidean norm on
/// flat 12-vectors).
pub fn class_distance(group: &FuchsianGroup, a: &Cocycle, b: &Cocycle) -> f64 {
    let d = a.sub(b).to_flat();
    let bmat = coboundary_matrix(group);
    least_squares(&bmat, &d)
        .map(|(_, residual)| residual)
        .unwrap_or(f64::INFINITY)
}

/// A reproducible random closed cocycle of unit flat norm: a raw random
/// 12-vector projected onto the constraint kernel.
pub fn random_cocycle(group: &FuchsianGroup, rng: &mut SplitMix64) -> Cocycle {
    let a = constraint_matrix(group);
    loop {
        let raw: Vec<f64> = (0..12).map(|_| rng.next_signed()).collect();
        // Project out the row space: v − Aᵀ(AAᵀ)⁻¹Av.
        let av = a.matvec(&raw);
        let mut aat = DMat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..12 {
                    s += a.get(i, k) * a.get(j, k);
                }
                aat.set(i, j, s);
            }
        }
        let Some(coef) = solve(&aat, &av) else {
            continue;
        };
        let back = a.tr_matvec(&coef);
        let mut z: Vec<f64> = raw.iter().zip(&back).map(|(r, b)| r - b).collect();
        let norm = real::sqrt(z.iter().map(|x| x * x).sum::<f64>());
        if norm < 1e-6 {
            continue;
        }
        for x in &mut z {
            *x /= norm;
        }
        return Cocycle::from_flat(&z);
    }
}

/// Dimensions (closed, coboundary, cohomology) measured from the linear
/// algebra with the given singular-value tolerance.
pub fn cohomology_dimensions(group: &FuchsianGroup, tol: f64) -> (usize, usize, usize) {
    let a = constraint_matrix(group);
    let z = 12 - crate::linalg::rank(&a, tol);
    let b = crate::linalg::rank(&coboundary_matrix(group), tol);
    (z, b, z - b)
}

/// Largest singular value of the constraint matrix (scale reference for
/// rank tolerances).
pub fn constraint_scale(group: &FuchsianGroup) -> f64 {
    let svd = jacobi_svd(&constraint_matrix(group));
    svd.singular.first().copied().unwrap_or(0.0)
}

// ---------------------------------------------------------------------
// Φ: graphs to cocycles
// ---------------------------------------------------------------------

/// Φ with automatic basepoint selection: starts at the domain center and
/// walks a deterministic nudge ladder until no traced path is degenerate
/// (the center lies on all four generator axes, so graphs containing those
/// curves need the nudge).
pub fn phi(group: &FuchsianGroup, graph: &GeodesicGraph) -> Result<Cocycle, GraphError> {
    let mut rng = SplitMix64::new(0x9a3c_11d7);
    let mut bp = group.center();
    for _ in 0..32 {
        match phi_from(group, graph, &bp) {
            Err(GraphError::Group(GroupError::DegeneratePath)) => {
                let dir = MinkVector::new(rng.next_signed(), rng.next_signed(), 0.0);
                let dir = dir + bp.vector().scale(mink_dot(dir, bp.vector()));
                let n = mink_dot(dir, dir);
                if n > 1e-12 {
                    bp = exp_map(&bp, dir.scale(1e-4 / real::sqrt(n)));
                }
            }
            other => return other,
        }
    }
    Err(GraphError::Group(GroupError::DegeneratePath))
}

/// Φ from an explicit basepoint. For each generator `g` the path
/// `x₀ → mid → ρ(g)·x₀` is traced (two geodesic segments through a midpoint
/// that a deterministic retry ladder nudges off degenerate crossings); the
/// basepoint itself is never moved, so callers can feed the same basepoint
/// to the twist-deformation side.
pub fn phi_from(
    group: &FuchsianGroup,
    graph: &GeodesicGraph,
    basepoint: &HPoint,
) -> Result<Cocycle, GraphError> {
    let search = group.deck_search(0.7);
    let mut edge_net = Vec::new();
    let lifts: Vec<Segment> = (0..graph.edges().len())
        .map(|e| graph.edge_lift(group, e))
        .collect();
    for seg in &lifts {
        edge_net.extend(group.net_along_segment(seg, 0.5)?);
    }

    let mut values = [LieVec::zero(); 4];
    for (gi, &g) in Gen::ALL.iter().enumerate() {
        let target = group.generator(g).apply_point(basepoint);
        let mut rng = SplitMix64::new(0x51f0_77aa ^ (gi as u64));
        let mut attempt_ok = false;
        for retry in 0..32 {
            // Midpoint of the straight run, nudged more on every retry.
            let base_seg = Segment::new(*basepoint, target).map_err(GraphError::Geometry)?;
            let mut mid = base_seg.point_at(0.5 * base_seg.length());
            if retry > 0 {
                let dir = MinkVector::new(rng.next_signed(), rng.next_signed(), rng.next_signed());
                let dir = dir + mid.vector().scale(mink_dot(dir, mid.vector()));
                let n = mink_dot(dir, dir);
                if n > 1e-12 {
                    mid = exp_map(&mid, dir.scale(1e-3 * (retry as f64) / real::sqrt(n)));
                }
            }
            let path = [
                Segment::new(*basepoint, mid).map_err(GraphError::Geometry)?,
                Segment::new(mid, target).map_err(GraphError::Geometry)?,
            ];
            match crossing_sum_along(group, graph, &lifts, &search, &edge_net, &path) {
                Ok(v) => {
                    values[gi] = v;
                    attempt_ok = true;
                    break;
                }
                Err(GraphError::Group(GroupError::DegeneratePath)) => continue,
                Err(e) => return Err(e),
            }
        }
        if !attempt_ok {
            return Err(GraphError::Group(GroupError::DegeneratePath));
        }
    }
    Ok(Cocycle { values })
}

/// Weighted crossing sum of a polyline path against all edge lifts of the
/// graph: each transverse crossing contributes `weight ·` (generator of the
/// translation along the lift, oriented so `det[p, u_edge, u_path] > 0`).
/// Degenerate crossings (through endpoints, near-collinear) are reported as
/// [`GroupError::DegeneratePath`] so callers can reroute.
pub fn crossing_sum_along(
    group: &FuchsianGroup,
    graph: &GeodesicGraph,
    lifts: &[Segment],
    search: &DeckSearch,
    edge_net: &[(HPoint, Word)],
    path: &[Segment],
) -> Result<LieVec, GraphError> {
    let mut path_net = Vec::new();
    for seg in path {
        path_net.extend(group.net_along_segment(seg, 0.5)?);
    }
    let decks = search.transporters(group, &path_net, edge_net, 0.6);

    let tol_deg = crate::config::Tolerances::DEFAULT.tol_deg;
    let mut total = LieVec::zero();
    for seg in path {
        let m1 = seg.point_at(0.5 * seg.length());
        for (ei, lift) in lifts.iter().enumerate() {
            let reach = real::cosh(0.5 * seg.length() + 0.5 * lift.length() + 0.3);
            for (_, giso) in &decks {
                let m2 = giso.apply_point(&lift.point_at(0.5 * lift.length()));
                if -mink_dot(m1.vector(), m2.vector()) > reach {
                    continue;
                }
                let moved = giso.apply_segment(lift);
                match segment_intersection(seg, &moved, tol_deg) {
                    SegmentMeet::None => {}
                    SegmentMeet::NearCollinear => {
                        // Path runs along a lift: cannot assign a crossing.
                        return Err(GraphError::Group(GroupError::DegeneratePath));
                    }
                    SegmentMeet::Crossing(c) => {
                        if c.degenerate {
                            return Err(GraphError::Group(GroupError::DegeneratePath));
                        }
                        let p = c.point;
                        let u_edge = c.tangent_second;
                        let u_path = c.tangent_first;
                        let sign = if det3(p.vector(), u_edge, u_path) > 0.0 {
                            1.0
                        } else {
                            -1.0
                        };
                        let gen_vec = lambda_apply(p.vector(), u_edge.scale(sign));
                        total = total + LieVec(gen_vec).scale(graph.edges()[ei].weight);
                    }
                }
            }
        }
    }
    Ok(total)
}
