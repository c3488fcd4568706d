//! Weighted geodesic graphs on the surface.
//!
//! A graph lives on the quotient surface but is stored through the cover:
//! every vertex keeps a representative point in the closed fundamental
//! domain, and every edge `(from, to, deck, weight)` denotes the geodesic
//! segment from `pt(from)` to `ρ(deck)·pt(to)` (its *canonical lift*),
//! projected to the surface. The general lift between cover copies
//! `ρ(α)pt(from)` and `ρ(β)pt(to)` exists when `α⁻¹β` equals the deck in
//! the group.
//!
//! A graph is *balanced* when at every vertex the weighted unit tangents
//! into the incident edge-ends sum to zero; balanced graphs are the tangent
//! data this crate turns into group cohomology. Balance is a measured
//! property ([`GeodesicGraph::balance_defects`]), not an invariant of the
//! type: constructions return graphs whose defect the caller (and the test
//! suite) checks.

use crate::config::Tolerances;
use crate::fuchsian::{FuchsianGroup, GroupError};
use crate::mink::{
    distance, exp_map, geodesic_between, lambda_apply, mink_dot, Geodesic, HPoint, Isometry,
    MinkError, MinkVector, Segment, SegmentMeet,
};
use crate::real;
use crate::words::Word;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A graph vertex: a point in the closed fundamental domain.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub point: HPoint,
}

/// A weighted edge with its canonical-lift deck word.
#[derive(Clone, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub deck: Word,
    pub weight: f64,
}

/// Validation and construction failures for geodesic graphs.
#[derive(Clone, Debug)]
pub enum GraphError {
    VertexOutsideDomain { id: usize, clearance: f64 },
    EdgeEndpointOutOfRange { id: usize },
    DegenerateEdge { id: usize },
    NonFiniteWeight { id: usize },
    /// Two multicurve components trace the same closed geodesic.
    SameGeodesicComponents { first: usize, second: usize },
    /// Crossing resolution hit an unresolvable degeneracy.
    DegenerateCrossing,
    /// The descent did not reach the requested balance tolerance.
    RealizeFailed { defect: f64 },
    /// A perturbation-resolved pairing failed its self-consistency check
    /// across perturbation scales; `gap` is the last observed discrepancy.
    UnstablePairing { gap: f64 },
    /// An orbit was too degenerate for a full-dimensional convex hull.
    DegenerateHull,
    /// No spacelike past-facing face survived on an orbit hull; the seed
    /// likely sat outside the invariant future-convex domain.
    NoSpacelikeFaces,
    EmptyGraph,
    Group(GroupError),
    Geometry(MinkError),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutsideDomain { id, clearance } => {
                write!(f, "vertex {id} lies outside the fundamental domain (clearance {clearance})")
            }
            GraphError::EdgeEndpointOutOfRange { id } => {
                write!(f, "edge {id} references a missing vertex")
            }
            GraphError::DegenerateEdge { id } => write!(f, "edge {id} has coincident lift endpoints"),
            GraphError::NonFiniteWeight { id } => write!(f, "edge {id} has a non-finite weight"),
            GraphError::SameGeodesicComponents { first, second } => write!(
                f,
                "multicurve components {first} and {second} trace the same closed geodesic"
            ),
            GraphError::DegenerateCrossing => write!(f, "unresolvable crossing degeneracy"),
            GraphError::RealizeFailed { defect } => {
                write!(f, "relaxation stalled at balance defect {defect}")
            }
            GraphError::UnstablePairing { gap } => {
                write!(f, "pairing value unstable across perturbation scales (gap {gap})")
            }
            GraphError::DegenerateHull => write!(f, "orbit convex hull is degenerate"),
            GraphError::NoSpacelikeFaces => {
                write!(f, "no spacelike face survived on the orbit hull")
            }
            GraphError::EmptyGraph => write!(f, "graph has no edges"),
            GraphError::Group(e) => write!(f, "group error: {e}"),
            GraphError::Geometry(e) => write!(f, "geometry error: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

impl From<GroupError> for GraphError {
    fn from(e: GroupError) -> Self {
        GraphError::Group(e)
    }
}

impl From<MinkError> for GraphError {
    fn from(e: MinkError) -> Self {
        GraphError::Geometry(e)
    }
}

/// A weighted geodesic graph on the surface (see module docs).
#[derive(Clone, Debug)]
pub struct GeodesicGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl GeodesicGraph {
    /// Validates and wraps raw graph data. Vertices must lie in the closed
    /// fundamental domain within `tol`; edge lifts must be nondegenerate.
    pub fn new(
        group: &FuchsianGroup,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        tol: f64,
    ) -> Result<Self, GraphError> {
        for (id, v) in vertices.iter().enumerate() {
            let clearance = group.octagon().clearance(&v.point);
            if clearance < -tol {
                return Err(GraphError::VertexOutsideDomain { id, clearance });
            }
        }
        for (id, e) in edges.iter().enumerate() {
            if e.from >= vertices.len() || e.to >= vertices.len() {
                return Err(GraphError::EdgeEndpointOutOfRange { id });
            }
            if !e.weight.is_finite() {
                return Err(GraphError::NonFiniteWeight { id });
            }
            let a = vertices[e.from].point;
            let b = group.rho(&e.deck).apply_point(&vertices[e.to].point);
            if distance(&a, &b) < 1e-9 {
                return Err(GraphError::DegenerateEdge { id });
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Canonical lift of edge `e`: the segment `[pt(from), ρ(deck)·pt(to)]`.
    pub fn edge_lift(&self, group: &FuchsianGroup, e: usize) -> Segment {
        let edge = &self.edges[e];
        let a = self.vertices[edge.from].point;
        let b = group.rho(&edge.deck).apply_point(&self.vertices[edge.to].point);
        Segment::new(a, b).expect("validated edges are nondegenerate")
    }

    pub fn edge_length(&self, group: &FuchsianGroup, e: usize) -> f64 {
        self.edge_lift(group, e).length()
    }

    pub fn total_weighted_length(&self, group: &FuchsianGroup) -> f64 {
        (0..self.edges.len())
            .map(|e| self.edges[e].weight * self.edge_length(group, e))
            .sum()
    }

    /// Unit tangents at `pt(v)` into each incident edge-end, with the edge
    /// weight: for an edge out of `v` the tangent points toward
    /// `ρ(deck)·pt(to)`; for an edge into `v` the canonical lift is pulled
    /// back by the deck, so the tangent points toward `ρ(deck⁻¹)·pt(from)`.
    /// Loops contribute both ends.
    pub fn edge_end_tangents(&self, group: &FuchsianGroup, v: usize) -> Vec<(usize, MinkVector, f64)> {
        let p = self.vertices[v].point;
        let mut out = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if e.from == v {
                let q = group.rho(&e.deck).apply_point(&self.vertices[e.to].point);
                if let Ok(l) = geodesic_between(&p, &q) {
                    out.push((ei, l.tangent_at(&p), e.weight));
                }
            }
            if e.to == v {
                let q = group
                    .rho(&e.deck.inverse())
                    .apply_point(&self.vertices[e.from].point);
                if let Ok(l) = geodesic_between(&p, &q) {
                    out.push((ei, l.tangent_at(&p), e.weight));
                }
            }
        }
        out
    }

    /// Per-vertex balance defect: the weighted sum of unit tangents into the
    /// incident edge-ends (zero on a balanced graph).
    pub fn balance_defects(&self, group: &FuchsianGroup) -> Vec<MinkVector> {
        (0..self.vertices.len())
            .map(|v| {
                let mut acc = MinkVector::zero();
                for (_, u, w) in self.edge_end_tangents(group, v) {
                    acc = acc + u.scale(w);
                }
                acc
            })
            .collect()
    }

    /// Largest per-vertex defect magnitude (tangent vectors are spacelike,
    /// so the Minkowski norm is a genuine norm here).
    pub fn max_balance_defect(&self, group: &FuchsianGroup) -> f64 {
        self.balance_defects(group)
            .iter()
            .map(|d| real::sqrt(mink_dot(*d, *d).max(0.0)))
            .fold(0.0, f64::max)
    }

    /// Multiplies every weight by `lambda` (tangent vectors form a linear
    /// space; this is scalar multiplication on the graph side).
    pub fn scale(&self, lambda: f64) -> GeodesicGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.weight *= lambda;
        }
        g
    }

    // -----------------------------------------------------------------
    // Closed geodesics and multicurves
    // -----------------------------------------------------------------

    /// The closed geodesic of (the conjugacy class of) `curve`, subdivided
    /// into `subdivisions ≥ 1` arcs of equal length, all weights `weight`.
    /// Vertices are the reduced representatives of equally spaced axis
    /// points; consecutive decks come from the reduction words, and the
    /// wrap-around edge folds in one period of the curve's holonomy.
    pub fn from_closed_geodesic(
        group: &FuchsianGroup,
        curve: &Word,
        subdivisions: usize,
        weight: f64,
    ) -> Result<GeodesicGraph, GraphError> {
        let n = subdivisions.max(1);
        let g_curve = group.rho(curve);
        let (axis, len) = FuchsianGroup::axis_of(&g_curve)?;
        let p0 = axis.foot_of(&group.center());
        let tangent0 = axis.tangent_at(&p0);

        let mut vertices = Vec::with_capacity(n);
        let mut red_words = Vec::with_capacity(n);
        for i in 0..n {
            let s = (i as f64) * len / (n as f64);
            let p = exp_map(&p0, tangent0.scale(s));
            let (q, u) = group.reduce_to_domain(&p)?;
            vertices.push(Vertex { point: q });
            red_words.push(u);
        }
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let deck = if j == 0 {
                red_words[i].inverse().concat(curve).concat(&red_words[0])
            } else {
                red_words[i].inverse().concat(&red_words[j])
            };
            edges.push(Edge {
                from: i,
                to: j,
                deck,
                weight,
            });
        }
        GeodesicGraph::new(group, vertices, edges, 1e-7)
    }

    /// The union of the closed geodesics of several weighted curves, with
    /// all transverse crossings (including self-crossings) turned into
    /// shared 4-valent vertices. Components without crossings get two
    /// subdivision vertices. Components tracing the same closed geodesic
    /// are rejected.
    pub fn from_multicurve(
        group: &FuchsianGroup,
        components: &[(Word, f64)],
    ) -> Result<GeodesicGraph, GraphError> {
        struct Comp {
            curve: Word,
            weight: f64,
            axis: Geodesic,
            len: f64,
            p0: HPoint,
        }
        let center = group.center();
        let mut comps = Vec::new();
        for (curve, weight) in components {
            let g_curve = group.rho(curve);
            let (axis, len) = FuchsianGroup::axis_of(&g_curve)?;
            let p0 = axis.foot_of(&center);
            comps.push(Comp {
                curve: curve.clone(),
                weight: *weight,
                axis,
                len,
                p0,
            });
        }

        // One relative deck-search kernel and one sample net per component
        // serve all pairs.
        let search = group.deck_search(0.7);
        let mut nets = Vec::with_capacity(comps.len());
        for c in &comps {
            nets.push(group.net_along_curve(&c.axis, &c.p0, c.len, 0.5)?);
        }

        struct EntryRec {
            s: f64,
            vertex: usize,
            word: Word,
        }
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut entries: Vec<Vec<EntryRec>> = comps.iter().map(|_| Vec::new()).collect();

        let claimed = |list: &[EntryRec], s: f64, len: f64| -> bool {
            list.iter().any(|e| {
                let d = (e.s - s).abs();
                d < 1e-7 || (len - d).abs() < 1e-7
            })
        };

        for i in 0..comps.len() {
            let axis_i = comps[i].axis;
            let len_i = comps[i].len;
            let t0_i = axis_i.tangent_at(&comps[i].p0);
            for j in i..comps.len() {
                // Distinct lifts of axis_j (dedup'd by unoriented normal).
                let mut lifts: Vec<(Word, MinkVector)> = Vec::new();
                for (w, iso) in search.transporters(group, &nets[i], &nets[j], 0.6) {
                    let n = iso.apply(comps[j].axis.normal());
                    let scale = 1.0 + n.max_abs();
                    let dup = lifts.iter().any(|(_, m)| {
                        (*m - n).max_abs() < 1e-7 * scale || (*m + n).max_abs() < 1e-7 * scale
                    });
                    if !dup {
                        lifts.push((w, n));
                    }
                }
                for (gamma, n_lift) in &lifts {
                    let c = mink_dot(axis_i.normal(), *n_lift);
                    if c.abs() >= 1.0 - 1e-9 {
                        if c.abs() <= 1.0 + 1e-9 {
                            if i == j {
                                continue; // the axis itself or an axis-preserving image
                            }
                            return Err(GraphError::SameGeodesicComponents { first: i, second: j });
                        }
                        continue; // ultraparallel
                    }
                    // Transverse crossing of the two full geodesics.
                    let w = lambda_apply(axis_i.normal(), *n_lift);
                    let w = if w.x3 > 0.0 { w } else { -w };
                    let q = HPoint::normalize(w).map_err(GraphError::Geometry)?;
                    let s_i = real::asinh(mink_dot(q.vector(), t0_i));
                    if !(0.0..comps[i].len).contains(&s_i) {
                        continue; // this crossing belongs to a translated lift
                    }
                    if i == j && claimed(&entries[i], s_i, len_i) {
                        continue; // mirror record of an already-seen self-crossing
                    }
                    // Reduce the crossing point once; both entries share it.
                    let (qd, u) = group.reduce_to_domain(&q)?;
                    let vertex = vertices.len();
                    vertices.push(Vertex { point: qd });
                    entries[i].push(EntryRec {
                        s: s_i,
                        vertex,
                        word: u.clone(),
                    });
                    // Parameter on curve j via the lift's anchor word.
                    let y = group.rho(gamma).inverse().apply_point(&q);
                    let t0_j = comps[j].axis.tangent_at(&comps[j].p0);
                    let s_raw = real::asinh(mink_dot(y.vector(), t0_j));
                    let k = real::floor(s_raw / comps[j].len);
                    let s_j = s_raw - k * comps[j].len;
                    let word_j = word_power(&comps[j].curve, -(k as i64))
                        .concat(&gamma.inverse())
                        .concat(&u);
                    entries[j].push(EntryRec {
                        s: s_j,
                        vertex,
                        word: word_j,
                    });
                }
            }
        }

        // Components without crossings get two plain subdivision vertices.
        // The phase offset avoids parking vertices on symmetry-distinguished
        // points (feet of perpendiculars, crossing loci of other curves).
        for (i, comp) in comps.iter().enumerate() {
            if !entries[i].is_empty() {
                continue;
            }
            let t0 = comp.axis.tangent_at(&comp.p0);
            for s in [0.237 * comp.len, 0.737 * comp.len] {
                let p = exp_map(&comp.p0, t0.scale(s));
                let (qd, u) = group.reduce_to_domain(&p)?;
                let vertex = vertices.len();
                vertices.push(Vertex { point: qd });
                entries[i].push(EntryRec { s, vertex, word: u });
            }
        }

        // Edges: consecutive entries along each curve, wrap folds in the
        // curve's own holonomy word.
        let mut edges = Vec::new();
        for (i, comp) in comps.iter().enumerate() {
            entries[i].sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
            let list = &entries[i];
            for k in 0..list.len() {
                let a = &list[k];
                let wrap = k + 1 == list.len();
                let b = &list[(k + 1) % list.len()];
                let deck = if wrap {
                    a.word.inverse().concat(&comp.curve).concat(&b.word)
                } else {
                    a.word.inverse().concat(&b.word)
                };
                edges.push(Edge {
                    from: a.vertex,
                    to: b.vertex,
                    deck,
                    weight: comp.weight,
                });
            }
        }
        GeodesicGraph::new(group, vertices, edges, 1e-7)
    }

    // -----------------------------------------------------------------
    // Graph sum
    // -----------------------------------------------------------------

    /// Geometric union of two graphs: transverse crossings between their
    /// edges become shared vertices, a vertex of one graph lying on an edge
    /// of the other splits that edge, coincident vertices are identified,
    /// and collinear overlapping sub-edges merge with summed weights. The
    /// sum of balanced graphs is balanced.
    pub fn add(
        group: &FuchsianGroup,
        g1: &GeodesicGraph,
        g2: &GeodesicGraph,
    ) -> Result<GeodesicGraph, GraphError> {
        // Combined vertex list: g1's, then g2's (offset), then crossings.
        let offset = g1.vertices.len();
        let mut vertices: Vec<Vertex> = g1.vertices.clone();
        vertices.extend(g2.vertices.iter().cloned());

        // Split records per edge of each graph: (param, vertex id, word g)
        // with the cover location of the vertex on the edge lift being
        // ρ(g)·pt(vertex).
        struct Split {
            s: f64,
            vertex: usize,
            word: Word,
        }
        let mut splits1: Vec<Vec<Split>> = g1.edges.iter().map(|_| Vec::new()).collect();
        let mut splits2: Vec<Vec<Split>> = g2.edges.iter().map(|_| Vec::new()).collect();

        let lifts1: Vec<Segment> = (0..g1.edges.len()).map(|e| g1.edge_lift(group, e)).collect();
        let lifts2: Vec<Segment> = (0..g2.edges.len()).map(|e| g2.edge_lift(group, e)).collect();

        // Relative deck search over whole-graph sample nets: every deck
        // moving any g2 edge or vertex onto a g1 edge (or vice versa — the
        // inverse decks cover that direction) is in `decks`.
        let search = group.deck_search(0.7);
        let mut net1 = Vec::new();
        for seg in &lifts1 {
            net1.extend(group.net_along_segment(seg, 0.5)?);
        }
        let mut net2 = Vec::new();
        for seg in &lifts2 {
            net2.extend(group.net_along_segment(seg, 0.5)?);
        }
        let decks = search.transporters(group, &net1, &net2, 0.6);

        let tol_deg = Tolerances::DEFAULT.tol_deg;
        for (e1, s1) in lifts1.iter().enumerate() {
            let m1 = s1.point_at(0.5 * s1.length());
            for (e2, s2) in lifts2.iter().enumerate() {
                let m2 = s2.point_at(0.5 * s2.length());
                let reach = real::cosh(0.5 * s1.length() + 0.5 * s2.length() + 0.3);
                for (gw, giso) in &decks {
                    if -mink_dot(m1.vector(), giso.apply(m2.vector())) > reach {
                        continue;
                    }
                    let moved = giso.apply_segment(s2);
                    match crate::mink::segment_intersection(s1, &moved, tol_deg) {
                        SegmentMeet::None => {}
                        SegmentMeet::Crossing(c) => {
                            if c.degenerate {
                                return Err(GraphError::DegenerateCrossing);
                            }
                            let (qd, u) = group.reduce_to_domain(&c.point)?;
                            let vertex = vertices.len();
                            vertices.push(Vertex { point: qd });
                            splits1[e1].push(Split {
                                s: c.param_first,
                                vertex,
                                word: u.clone(),
                            });
                            splits2[e2].push(Split {
                                s: c.param_second,
                                vertex,
                                word: gw.inverse().concat(&u),
                            });
                        }
                        SegmentMeet::NearCollinear => {
                            // Overlap: split each edge at the other's interior
                            // endpoints; identical sub-edges merge below.
                            let ends2 = [
                                (g2.edges[e2].from + offset, *moved.start(), gw.clone()),
                                (
                                    g2.edges[e2].to + offset,
                                    *moved.end(),
                                    gw.concat(&g2.edges[e2].deck),
                                ),
                            ];
                            for (vid, pt, word) in ends2 {
                                let s = s1.param_of(&s1.geodesic().foot_of(&pt));
                                if s > 1e-9
                                    && s < s1.length() - 1e-9
                                    && s1.geodesic().distance_to_point(&pt) < 1e-7
                                    && !splits1[e1].iter().any(|sp| (sp.s - s).abs() < 1e-7)
                                {
                                    splits1[e1].push(Split { s, vertex: vid, word });
                                }
                            }
                            let ends1 = [
                                (g1.edges[e1].from, *s1.start(), gw.inverse()),
                                (
                                    g1.edges[e1].to,
                                    *s1.end(),
                                    gw.inverse().concat(&g1.edges[e1].deck),
                                ),
                            ];
                            for (vid, pt, word) in ends1 {
                                let back = giso.inverse().apply_point(&pt);
                                let s = s2.param_of(&s2.geodesic().foot_of(&back));
                                if s > 1e-9
                                    && s < s2.length() - 1e-9
                                    && s2.geodesic().distance_to_point(&back) < 1e-7
                                    && !splits2[e2].iter().any(|sp| (sp.s - s).abs() < 1e-7)
                                {
                                    splits2[e2].push(Split { s, vertex: vid, word });
                                }
                            }
                        }
                    }
                }
            }
        }

        // Also: vertices of one graph sitting in the interior of an edge of
        // the other (without a transverse crossing there) split that edge.
        // `decks` maps net2-side data onto net1-side data; the inverses map
        // the other way.
        let vertex_hits = |lifts: &[Segment],
                               other: &GeodesicGraph,
                               vert_offset: usize,
                               splits: &mut Vec<Vec<Split>>,
                               invert: bool| {
            for (ei, seg) in lifts.iter().enumerate() {
                let m = seg.point_at(0.5 * seg.length());
                let reach = real::cosh(0.5 * seg.length() + 0.2);
                for (vid, v) in other.vertices.iter().enumerate() {
                    for (gw, giso) in &decks {
                        let (gw, giso) = if invert {
                            (gw.inverse(), giso.inverse())
                        } else {
                            (gw.clone(), *giso)
                        };
                        let moved = giso.apply_point(&v.point);
                        if -mink_dot(m.vector(), moved.vector()) > reach {
                            continue;
                        }
                        let s = seg.param_of(&seg.geodesic().foot_of(&moved));
                        if s > 1e-7
                            && s < seg.length() - 1e-7
                            && distance(&seg.point_at(s), &moved) < 1e-9
                            && !splits[ei].iter().any(|sp| (sp.s - s).abs() < 1e-7)
                        {
                            splits[ei].push(Split {
                                s,
                                vertex: vid + vert_offset,
                                word: gw,
                            });
                        }
                    }
                }
            }
        };
        vertex_hits(&lifts1, g2, offset, &mut splits1, false);
        vertex_hits(&lifts2, g1, 0, &mut splits2, true);

        // Rebuild edges with splits applied.
        let mut edges: Vec<Edge> = Vec::new();
        let mut emit = |graph: &GeodesicGraph, vert_offset: usize, splits: Vec<Vec<Split>>| {
            for (e, mut list) in graph.edges.iter().zip(splits) {
                list.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
                // pt(from) —[g₁]— x₁ —[g₂]— x₂ … —[deck]— pt(to)
                let mut prev_vertex = e.from + vert_offset;
                let mut prev_word = Word::identity();
                for sp in list {
                    edges.push(Edge {
                        from: prev_vertex,
                        to: sp.vertex,
                        deck: prev_word.inverse().concat(&sp.word),
                        weight: e.weight,
                    });
                    prev_vertex = sp.vertex;
                    prev_word = sp.word;
                }
                edges.push(Edge {
                    from: prev_vertex,
                    to: e.to + vert_offset,
                    deck: prev_word.inverse().concat(&e.deck),
                    weight: e.weight,
                });
            }
        };
        emit(g1, 0, splits1);
        emit(g2, offset, splits2);

        // Identify vertices that are the same surface point (vertices the
        // graphs share, crossing points coinciding with either). Union-find
        // with per-vertex words to the root: pt(v) = ρ(up(v))·pt(root).
        let local: Vec<(Word, Isometry)> = search
            .local_elements()
            .iter()
            .filter(|(_, iso)| {
                iso.apply(group.center().vector()).x3
                    <= real::cosh(2.0 * group.octagon().circumradius() + 0.1)
            })
            .cloned()
            .collect();
        let coincide = |p: &HPoint, q: &HPoint| -> Option<Word> {
            // q ≈ ρ(γ)·p for which γ? Coordinate comparison: hyperbolic
            // distance loses half the digits near zero.
            let scale = 1.0 + p.vector().max_abs().max(q.vector().max_abs());
            if (q.vector() - p.vector()).max_abs() < 1e-8 * scale {
                return Some(Word::identity());
            }
            for (w, iso) in &local {
                if (q.vector() - iso.apply(p.vector())).max_abs() < 1e-8 * scale {
                    return Some(w.clone());
                }
            }
            None
        };
        let n = vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut up: Vec<Word> = vec![Word::identity(); n];
        let find = |parent: &[usize], up: &[Word], mut v: usize| -> (usize, Word) {
            let mut w = Word::identity();
            while parent[v] != v {
                w = w.concat(&up[v]);
                v = parent[v];
            }
            (v, w)
        };
        for j in 1..n {
            for i in 0..j {
                let Some(gamma) = coincide(&vertices[i].point, &vertices[j].point) else {
                    continue;
                };
                // pt(j) = ρ(γ)·pt(i)
                let (ri, wi) = find(&parent, &up, i);
                let (rj, wj) = find(&parent, &up, j);
                if ri != rj {
                    parent[rj] = ri;
                    up[rj] = wj.inverse().concat(&gamma).concat(&wi);
                }
                break;
            }
        }
        let roots: Vec<(usize, Word)> = (0..n).map(|v| find(&parent, &up, v)).collect();
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                let (ra, wa) = &roots[e.from];
                let (rb, wb) = &roots[e.to];
                Edge {
                    from: *ra,
                    to: *rb,
                    deck: wa.inverse().concat(&e.deck).concat(wb),
                    weight: e.weight,
                }
            })
            .collect();

        // Merge identical sub-edges (collinear overlaps): same endpoints and
        // same deck up to reversal.
        let mut merged: Vec<Edge> = Vec::new();
        'outer: for e in edges {
            for m in &mut merged {
                let same = m.from == e.from
                    && m.to == e.to
                    && group.rho(&m.deck).max_abs_diff(&group.rho(&e.deck)) < 1e-7;
                let rev = m.from == e.to
                    && m.to == e.from
                    && group
                        .rho(&m.deck)
                        .max_abs_diff(&group.rho(&e.deck.inverse()))
                        < 1e-7;
                if same || rev {
                    m.weight += e.weight;
                    continue 'outer;
                }
            }
            merged.push(e);
        }

        // Drop vertices that ended up unused (e.g. interior to a merged
        // overlap), remapping indices.
        let mut used = vec![false; vertices.len()];
        for e in &merged {
            used[e.from] = true;
            used[e.to] = true;
        }
        let mut remap = vec![usize::MAX; vertices.len()];
        let mut kept = Vec::new();
        for (i, v) in vertices.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(v);
            }
        }
        let edges = merged
            .into_iter()
            .map(|e| Edge {
                from: remap[e.from],
                to: remap[e.to],
                deck: e.deck,
                weight: e.weight,
            })
            .collect();

        GeodesicGraph::new(group, kept, edges, 1e-7)
    }

    // -----------------------------------------------------------------
    // Simplification
    // -----------------------------------------------------------------

    /// Removes near-zero-weight edges and isolated vertices, then merges
    /// valence-2 vertices whose two edge-ends are collinear-opposite with
    /// equal weights. A vertex carrying a lone loop is never merged away
    /// (every circle keeps at least one vertex).
    pub fn simplify(&self, group: &FuchsianGroup, weight_tol: f64) -> GeodesicGraph {
        let mut g = self.clone();
        g.edges.retain(|e| e.weight.abs() >= weight_tol);

        loop {
            let mut changed = false;
            'scan: for v in 0..g.vertices.len() {
                // Collect edge-ends at v as (edge index, points out of v?).
                let mut ends: Vec<(usize, bool)> = Vec::new();
                for (ei, e) in g.edges.iter().enumerate() {
                    if e.from == v {
                        ends.push((ei, true));
                    }
                    if e.to == v {
                        ends.push((ei, false));
                    }
                }
                if ends.len() != 2 {
                    continue;
                }
                let (e1, out1) = ends[0];
                let (e2, out2) = ends[1];
                if e1 == e2 {
                    continue; // lone loop
                }
                // Normalize both edges to start at v.
                let norm = |e: &Edge, out: bool| -> (usize, Word) {
                    if out {
                        (e.to, e.deck.clone())
                    } else {
                        (e.from, e.deck.inverse())
                    }
                };
                let (a, d1) = norm(&g.edges[e1], out1);
                let (b, d2) = norm(&g.edges[e2], out2);
                let w1 = g.edges[e1].weight;
                let w2 = g.edges[e2].weight;
                if (w1 - w2).abs() > 1e-12 * (1.0 + w1.abs()) {
                    continue;
                }
                let p = g.vertices[v].point;
                let q1 = group.rho(&d1).apply_point(&g.vertices[a].point);
                let q2 = group.rho(&d2).apply_point(&g.vertices[b].point);
                let (Ok(l1), Ok(l2)) = (geodesic_between(&p, &q1), geodesic_between(&p, &q2))
                else {
                    continue;
                };
                let t1 = l1.tangent_at(&p);
                let t2 = l2.tangent_at(&p);
                if mink_dot(t1, t2) > -1.0 + 1e-9 {
                    continue; // not collinear-opposite
                }
                // Merge: a → v → b becomes a → b with deck d1⁻¹·d2.
                let new_edge = Edge {
                    from: a,
                    to: b,
                    deck: d1.inverse().concat(&d2),
                    weight: w1,
                };
                let (hi, lo) = if e1 > e2 { (e1, e2) } else { (e2, e1) };
                g.edges.remove(hi);
                g.edges.remove(lo);
                g.edges.push(new_edge);
                changed = true;
                break 'scan;
            }
            if !changed {
                break;
            }
        }

        // Drop isolated vertices.
        let mut used = vec![false; g.vertices.len()];
        for e in &g.edges {
            used[e.from] = true;
            used[e.to] = true;
        }
        let mut remap = vec![usize::MAX; g.vertices.len()];
        let mut kept = Vec::new();
        for (i, v) in g.vertices.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(v);
            }
        }
        for e in &mut g.edges {
            e.from = remap[e.from];
            e.to = remap[e.to];
        }
        GeodesicGraph {
            vertices: kept,
            edges: g.edges,
        }
    }

    // -----------------------------------------------------------------
    // Variational realization
    // -----------------------------------------------------------------

    /// Relaxes vertex positions to minimize total weighted length at fixed
    /// combinatorics (decks and weights unchanged during the descent). The
    /// negative gradient at a vertex is exactly its balance defect, so the
    /// minimizer is a balanced graph. Uses backtracking line search; weights
    /// are normalized internally by their mean magnitude, making the
    /// trajectory invariant under scaling all weights.
    pub fn realize(
        &self,
        group: &FuchsianGroup,
        opts: &RealizeOptions,
    ) -> Result<(GeodesicGraph, RealizeReport), GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mean_w: f64 = self.edges.iter().map(|e| e.weight.abs()).sum::<f64>()
            / (self.edges.len() as f64);
        if !(mean_w > 0.0) {
            return Err(GraphError::NonFiniteWeight { id: 0 });
        }

        // Working copy with normalized weights; decks pre-evaluated.
        let mut work = self.clone();
        for e in &mut work.edges {
            e.weight /= mean_w;
        }
        let rhos: Vec<Isometry> = work.edges.iter().map(|e| group.rho(&e.deck)).collect();
        let rhos_inv: Vec<Isometry> = rhos.iter().map(|r| r.inverse()).collect();

        let energy = |pts: &[HPoint]| -> f64 {
            work.edges
                .iter()
                .enumerate()
                .map(|(ei, e)| e.weight * distance(&pts[e.from], &rhos[ei].apply_point(&pts[e.to])))
                .sum()
        };
        let defects = |pts: &[HPoint]| -> Vec<MinkVector> {
            let mut out = vec![MinkVector::zero(); pts.len()];
            for (ei, e) in work.edges.iter().enumerate() {
                let a = pts[e.from];
                let b = rhos[ei].apply_point(&pts[e.to]);
                if distance(&a, &b) < 1e-12 {
                    continue;
                }
                if let Ok(l) = geodesic_between(&a, &b) {
                    out[e.from] = out[e.from] + l.tangent_at(&a).scale(e.weight);
                }
                let b_pull = rhos_inv[ei].apply_point(&pts[e.from]);
                let a_here = pts[e.to];
                if let Ok(l) = geodesic_between(&a_here, &b_pull) {
                    out[e.to] = out[e.to] + l.tangent_at(&a_here).scale(e.weight);
                }
            }
            out
        };
        let max_defect = |d: &[MinkVector]| -> f64 {
            d.iter()
                .map(|v| real::sqrt(mink_dot(*v, *v).max(0.0)))
                .fold(0.0, f64::max)
        };

        let mut pts: Vec<HPoint> = work.vertices.iter().map(|v| v.point).collect();
        let mut e_cur = energy(&pts);
        let e_initial = e_cur;
        let mut energy_trace = vec![e_cur];
        let mut iterations = 0usize;
        let mut final_defect;

        // Phase 1: backtracking descent on the energy (monotone trace).
        loop {
            let d = defects(&pts);
            final_defect = max_defect(&d);
            if final_defect < opts.tol || iterations >= opts.max_iters {
                break;
            }
            let grad_sq: f64 = d.iter().map(|v| mink_dot(*v, *v).max(0.0)).sum();
            // Move every vertex along its defect (the descent direction) and
            // require an Armijo decrease.
            let mut alpha = opts.initial_step;
            let mut accepted = false;
            while alpha > 1e-14 {
                let trial: Vec<HPoint> = pts
                    .iter()
                    .zip(&d)
                    .map(|(p, dv)| exp_map(p, dv.scale(alpha)))
                    .collect();
                let e_trial = energy(&trial);
                if e_trial <= e_cur - 1e-4 * alpha * grad_sq {
                    pts = trial;
                    e_cur = e_trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            iterations += 1;
            if !accepted || alpha < 1e-8 {
                break; // energy decrease below float resolution
            }
            if energy_trace.len() < 4096 {
                energy_trace.push(e_cur);
            }
        }

        // Phase 2: near the minimum, per-step energy decreases (~α‖∇E‖²)
        // fall under the energy's float resolution and the line search
        // stalls, but the defect itself is still well-resolved. A fixed-step
        // iteration on the defect field contracts the rest of the way.
        if final_defect >= opts.tol {
            let mut alpha = 0.5 * opts.initial_step;
            let mut best_pts = pts.clone();
            let mut best_defect = final_defect;
            let mut polish_iters = 0usize;
            while polish_iters < opts.max_iters && alpha > 1e-6 {
                polish_iters += 1;
                let d = defects(&pts);
                let cur = max_defect(&d);
                if cur < best_defect {
                    best_defect = cur;
                    best_pts = pts.clone();
                }
                if cur < opts.tol {
                    break;
                }
                if cur > 2.0 * best_defect {
                    alpha *= 0.5;
                    pts = best_pts.clone();
                    iterations += 1;
                    continue;
                }
                pts = pts
                    .iter()
                    .zip(&d)
                    .map(|(p, dv)| exp_map(p, dv.scale(alpha)))
                    .collect();
                iterations += 1;
            }
            let d = defects(&pts);
            final_defect = max_defect(&d);
            if best_defect < final_defect {
                pts = best_pts;
                final_defect = best_defect;
            }
            e_cur = energy(&pts);
        }

        if final_defect >= opts.tol {
            return Err(GraphError::RealizeFailed {
                defect: final_defect,
            });
        }

        // Canonicalize: vertices back into the domain, decks conjugated by
        // the reduction words (weights restored to the caller's scale).
        let mut new_vertices = Vec::with_capacity(pts.len());
        let mut red = Vec::with_capacity(pts.len());
        for p in &pts {
            let (q, u) = group.reduce_to_domain(p)?;
            new_vertices.push(Vertex { point: q });
            red.push(u);
        }
        let new_edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge {
                from: e.from,
                to: e.to,
                deck: red[e.from].inverse().concat(&e.deck).concat(&red[e.to]),
                weight: e.weight,
            })
            .collect();
        let graph = GeodesicGraph::new(group, new_vertices, new_edges, 1e-7)?;
        Ok((
            graph,
            RealizeReport {
                iterations,
                final_defect,
                energy_initial: e_initial * mean_w,
                energy_final: e_cur * mean_w,
                energy_trace,
            },
        ))
    }
}

/// Options for [`GeodesicGraph::realize`].
#[derive(Clone, Debug)]
pub struct RealizeOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub initial_step: f64,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            tol: Tolerances::DEFAULT.tol_balance,
            initial_step: 0.25,
        }
    }
}

/// Outcome data of a relaxation run. `energy_trace` holds the (normalized
/// trajectory's) accepted energies rescaled to the caller's weights.
#[derive(Clone, Debug)]
pub struct RealizeReport {
    pub iterations: usize,
    pub final_defect: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub energy_trace: Vec<f64>,
}

/// `w` concatenated `k` times (`k < 0` uses the inverse).
pub fn word_power(w: &Word, k: i64) -> Word {
    let base = if k >= 0 { w.clone() } else { w.inverse() };
    let mut out = Word::identity();
    for _ in 0..k.unsigned_abs() {
        out = out.concat(&base);
    }
    out
}
