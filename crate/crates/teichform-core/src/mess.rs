//! Recovering a balanced geodesic graph from a deformation cocycle.
//!
//! A cocycle `τ` turns the holonomy group into a group of affine Minkowski
//! isometries `x ↦ ρ(γ)·x + τ(γ)` (the cocycle identity is exactly the
//! composition law for the affine parts). The convex hull of one orbit of
//! this affine action is a polyhedral approximation of an invariant
//! future-convex surface. On its past boundary:
//!
//! * each spacelike face develops a totally geodesic piece of the bent
//!   surface; its future unit conormal is a point of the hyperbolic plane
//!   (the face's *Gauss point*);
//! * each hull edge between two such faces develops a bending line; the
//!   Gauss points of the two faces span the dual geodesic arc crossing it.
//!
//! Reducing Gauss points to the fundamental domain groups hull faces into
//! classes (all lifts of one surface face share a reduced Gauss point).
//! Each kept class becomes a graph vertex; each class of hull edges
//! between kept classes becomes a graph edge, weighted by the Minkowski
//! length of the bending line, with the relative deck transformation of
//! the two faces as the edge's deck word. The resulting weighted geodesic
//! graph is balanced (faces close up), and its derivative cocycle
//! recovers the class of `τ`: this module is the computational inverse of
//! [`crate::cohomology::phi`].
//!
//! Truncation. A finite orbit truncates the hull, which produces two
//! kinds of unreliable faces: non-spacelike or future-facing rim debris
//! (discarded by classification), and *chord* faces — shortcuts whose
//! true polygon has a vertex outside the sampled ball. Transporting a
//! face's plane by the inverse affine action of its reduction word
//! yields its class's *canonical plane* — the same plane for every lift
//! of a genuine surface face, a genuinely different one for a chord. A
//! class is kept exactly when its canonical plane supports an orbit
//! sample slightly larger than the one that was hulled: genuine planes
//! support the whole (infinite) orbit, while a chord or rim plane is
//! strictly violated by some sample point near the seed or just past
//! the hull's rim. Partial rim lifts of a bending line are merged by
//! interval union along the line, never double-counted; when a bending
//! line is invariant under its own deck holonomy (a closed bending
//! geodesic), the union is folded modulo the holonomy's translation
//! period so each surface point is counted once.

use alloc::vec;
use alloc::vec::Vec;

use crate::cohomology::Cocycle;
use crate::fuchsian::FuchsianGroup;
use crate::geograph::{Edge, GeodesicGraph, GraphError, Vertex};
use crate::hull::{classify_face, convex_hull, TriHull};
use crate::mink::{distance, mink_dot, HPoint, Isometry, MinkVector};
use crate::real;
use crate::words::Word;

/// Tuning knobs for the orbit → hull → graph pipeline.
#[derive(Clone, Copy, Debug)]
pub struct MessOptions {
    /// Group-ball radius for the orbit (hyperbolic displacement of the
    /// base point). Larger radii sample deeper, more complete hulls.
    pub radius: f64,
    /// Height `x₃` of the orbit seed `(0, 0, h)`.
    pub seed_height: f64,
    /// Matching tolerance between reduced Gauss points when grouping
    /// faces into classes.
    pub cluster_tol: f64,
    /// Relative tolerance when matching transported bending-line pieces
    /// to a common line.
    pub line_tol: f64,
    /// Below this, a relative deck transformation counts as trivial
    /// (coplanar triangles subdividing one flat face).
    pub deck_tol: f64,
    /// Relative slack for the canonical support-plane test.
    pub support_tol: f64,
    /// Extra group-ball radius for the support-test sample: canonical
    /// planes are tested against the orbit out to `radius + probe`, so
    /// truncation artifacts of the hulled sample are caught by orbit
    /// points just past its rim.
    pub probe: f64,
    /// How many increasingly high seeds to try before giving up.
    pub max_seed_retries: usize,
    /// Diagnostic: keep vertices with broken edge stars instead of
    /// pruning them (the graph is then generally unbalanced).
    pub keep_incomplete: bool,
}

impl Default for MessOptions {
    fn default() -> Self {
        Self {
            radius: 8.0,
            seed_height: 3.0,
            cluster_tol: 1e-5,
            line_tol: 1e-6,
            deck_tol: 1e-6,
            support_tol: 1e-7,
            probe: 1.5,
            max_seed_retries: 3,
            keep_incomplete: false,
        }
    }
}

/// Diagnostics from one orbit → hull → graph run.
#[derive(Clone, Copy, Debug, Default)]
pub struct MessReport {
    pub orbit_size: usize,
    pub face_count: usize,
    /// Spacelike past-facing faces (candidates for surface pieces).
    pub flat_faces: usize,
    /// Distinct reduced Gauss points among flat faces.
    pub class_count: usize,
    /// Classes whose canonical plane supports the extended orbit sample,
    /// before deep-cell pruning.
    pub raw_kept_classes: usize,
    /// Vertices surviving deep-cell pruning (the graph's vertex count).
    pub kept_classes: usize,
    /// Edges assembled between raw kept classes, before pruning.
    pub raw_edge_count: usize,
    pub edge_count: usize,
    /// Hull-edge pieces dropped as degenerate or non-spacelike.
    pub skipped_pieces: usize,
    pub max_balance_defect: f64,
    pub seed_height: f64,
}

/// Orbit of `seed` under the affine deformation `x ↦ ρ(γ)·x + τ(γ)` of
/// the holonomy action, over the group ball of `radius`.
pub fn affine_orbit(
    group: &FuchsianGroup,
    tau: &Cocycle,
    seed: MinkVector,
    radius: f64,
) -> Vec<MinkVector> {
    group
        .group_ball(radius)
        .into_iter()
        .map(|(w, iso)| iso.apply(seed) + tau.extend(group, &w).0)
        .collect()
}

/// One hull face that passed classification: its reduced Gauss point `q`
/// and the reduction word `u` with `ρ(u)·q = gauss point`.
struct FlatFace {
    q: HPoint,
    u: Word,
}

struct LineBucket {
    anchor: MinkVector,
    dir: MinkVector,
    intervals: Vec<(f64, f64)>,
}

struct EdgeGroup {
    ca: usize,
    cb: usize,
    deck_word: Word,
    deck: Isometry,
    lines: Vec<LineBucket>,
}

fn mat_lex_less(a: &Isometry, b: &Isometry) -> bool {
    let (ma, mb) = (&a.matrix().m, &b.matrix().m);
    for r in 0..3 {
        for c in 0..3 {
            if ma[r][c] < mb[r][c] {
                return true;
            }
            if ma[r][c] > mb[r][c] {
                return false;
            }
        }
    }
    false
}

/// Distance from `p` to the line through `anchor` with Minkowski-unit
/// spacelike direction `dir`, measured in the Euclidean norm (adequate
/// for matching: points on the line project exactly).
fn line_offset(anchor: MinkVector, dir: MinkVector, p: MinkVector) -> f64 {
    let e = p - anchor;
    let s = mink_dot(e, dir);
    (e - dir.scale(s)).euclid_norm()
}

/// Whether a set of coplanar contact points genuinely spans two
/// dimensions: some pair is clearly separated, and some third point sits
/// clearly off their connecting line.
fn contact_set_is_planar(contacts: &[MinkVector]) -> bool {
    if contacts.len() < 3 {
        return false;
    }
    let c0 = contacts[0];
    let sep = 1e-6;
    let Some(c1) = contacts
        .iter()
        .find(|c| (**c - c0).euclid_norm() > sep * (1.0 + c0.euclid_norm()))
    else {
        return false;
    };
    let dvec = *c1 - c0;
    let len2 = mink_dot(dvec, dvec);
    if len2 <= 0.0 {
        // Contacts on a spacelike plane always span spacelike chords.
        return false;
    }
    let dir = dvec.scale(1.0 / real::sqrt(len2));
    contacts
        .iter()
        .any(|c| line_offset(c0, dir, *c) > sep * (1.0 + c.euclid_norm()))
}

/// Measure of the union of closed intervals folded into the circle
/// `ℝ / period·ℤ`. Splitting each folded interval at the seam keeps the
/// covered measure exact, so no seam merging is needed.
fn circle_union_length(intervals: &[(f64, f64)], period: f64, merge_slack: f64) -> f64 {
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(intervals.len() + 4);
    for &(s, e) in intervals {
        let len = e - s;
        if len >= period - merge_slack {
            return period;
        }
        let a = s.rem_euclid(period);
        if a + len <= period {
            pieces.push((a, a + len));
        } else {
            pieces.push((a, period));
            pieces.push((0.0, a + len - period));
        }
    }
    union_length(&pieces, merge_slack).min(period)
}

/// Total length of the union of closed intervals.
fn union_length(intervals: &[(f64, f64)], merge_slack: f64) -> f64 {
    let mut v: Vec<(f64, f64)> = intervals.to_vec();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite interval ends"));
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for &(s, e) in &v {
        match current {
            None => current = Some((s, e)),
            Some((cs, ce)) => {
                if s <= ce + merge_slack {
                    current = Some((cs, ce.max(e)));
                } else {
                    total += ce - cs;
                    current = Some((s, e));
                }
            }
        }
    }
    if let Some((cs, ce)) = current {
        total += ce - cs;
    }
    total
}

/// The dual-graph extraction. `tau` here is the cocycle whose affine
/// action generated `points` (the hulled sample) and `ext_points` (the
/// same orbit out to `radius + probe`, one point per `ext` entry, same
/// order; used only by the support test and the period search).
fn dual_graph(
    group: &FuchsianGroup,
    tau: &Cocycle,
    ext: &[(Word, Isometry)],
    ext_points: &[MinkVector],
    points: &[MinkVector],
    hull: &TriHull,
    opts: &MessOptions,
) -> Result<(GeodesicGraph, MessReport), GraphError> {
    let nf = hull.tris.len();
    let mut report = MessReport {
        face_count: nf,
        ..MessReport::default()
    };

    // Classify faces; reduce Gauss points of spacelike past-facing ones.
    let mut flat: Vec<Option<FlatFace>> = Vec::with_capacity(nf);
    for f in 0..nf {
        match classify_face(hull, f).gauss {
            Some(g) => {
                let (q, u) = group.reduce_to_domain(&g)?;
                flat.push(Some(FlatFace { q, u }));
            }
            None => flat.push(None),
        }
    }
    report.flat_faces = flat.iter().filter(|f| f.is_some()).count();
    if report.flat_faces == 0 {
        // The seed was likely outside the invariant future-convex
        // domain; the caller retries with a higher seed.
        return Err(GraphError::NoSpacelikeFaces);
    }

    // Group flat faces into classes by reduced Gauss point. A point on
    // the fundamental domain's boundary has several equivalent reduced
    // representatives (one per domain copy meeting the boundary there),
    // so matching is done modulo the group elements that can carry one
    // domain point to another — the ball of twice the circumradius.
    // When a face matches through such an element, its reduction word
    // is realigned so that it maps the class representative exactly to
    // the face's original Gauss point.
    struct Class {
        rep_face: usize,
        q: HPoint,
    }
    let two_diam = 2.0 * group.octagon().circumradius() + 0.2;
    let neighbors = group.group_ball(two_diam);
    let mut classes: Vec<Class> = Vec::new();
    let mut class_of: Vec<usize> = vec![usize::MAX; nf];
    for f in 0..nf {
        let Some(ff) = &flat[f] else { continue };
        let qf = ff.q;
        let mut found: Option<(usize, &Word)> = None;
        'search: for (ci, cl) in classes.iter().enumerate() {
            for (gw, giso) in &neighbors {
                if distance(&giso.apply_point(&cl.q), &qf) < opts.cluster_tol {
                    found = Some((ci, gw));
                    break 'search;
                }
            }
        }
        match found {
            Some((ci, gamma)) => {
                class_of[f] = ci;
                let q_rep = classes[ci].q;
                let ffm = flat[f].as_mut().expect("flat");
                ffm.u = ffm.u.concat(gamma);
                ffm.q = q_rep;
            }
            None => {
                class_of[f] = classes.len();
                classes.push(Class { rep_face: f, q: qf });
            }
        }
    }
    report.class_count = classes.len();

    // Canonical support test. Transporting a face's plane by the inverse
    // affine action of its reduction word yields its class's *canonical
    // plane* — the same plane for every true lift, a genuinely different
    // one for a chord. The extended sample and the canonical plane live
    // in the same ambient coordinates, so the test is a direct sweep of
    // Minkowski products: a genuine plane supports the entire orbit,
    // while a chord plane is violated by a point near the seed (its
    // missing vertex) and a rim-debris plane by a point just past the
    // hulled sample's rim — both inside the extended sample. A plane
    // that supports the orbit but only touches it along an edge or a
    // vertex is not a surface face either, so the contact set must also
    // be two-dimensional: at least three non-collinear contacts.
    let mut vid_of_class: Vec<Option<usize>> = vec![None; classes.len()];
    let mut vertices: Vec<Vertex> = Vec::new();
    for (ci, cl) in classes.iter().enumerate() {
        let ff = flat[cl.rep_face].as_ref().expect("rep is flat");
        let qv = ff.q.vector();
        let back = group.rho(&ff.u).inverse();
        let shift = tau.extend(group, &ff.u).0;

        // Canonical support value from the face's transported corners.
        let tri = hull.tris[cl.rep_face];
        let mut c0 = f64::NEG_INFINITY;
        for k in 0..3 {
            let y = back.apply(points[tri[k]] - shift);
            c0 = c0.max(mink_dot(y, qv));
        }

        let mut keep = true;
        let mut contacts: Vec<MinkVector> = Vec::new();
        for &p in ext_points.iter() {
            let v = mink_dot(p, qv);
            let s = v - c0;
            let slack = opts.support_tol * (1.0 + v.abs());
            if s > slack {
                // A sampled orbit point lies beyond the plane: the face
                // is a truncation artifact, not a surface piece.
                keep = false;
                break;
            }
            if s.abs() <= slack {
                contacts.push(p);
            }
        }
        keep = keep && contact_set_is_planar(&contacts);
        if keep {
            vid_of_class[ci] = Some(vertices.len());
            vertices.push(Vertex { point: ff.q });
        }
    }
    report.raw_kept_classes = vertices.len();

    // Collect hull edges between kept classes, transported to a
    // canonical lift, grouped by (class pair, relative deck holonomy).
    let mut groups: Vec<EdgeGroup> = Vec::new();
    for (ends, faces) in &hull.edge_faces() {
        if faces.len() != 2 {
            report.skipped_pieces += 1;
            continue;
        }
        let (mut fa, mut fb) = (faces[0], faces[1]);
        if flat[fa].is_none() || flat[fb].is_none() {
            continue;
        }
        let (mut ca, mut cb) = (class_of[fa], class_of[fb]);
        if vid_of_class[ca].is_none() || vid_of_class[cb].is_none() {
            continue;
        }

        // Relative deck transformation between the two face lifts.
        let word_ab = |x: usize, y: usize| {
            flat[x]
                .as_ref()
                .expect("flat")
                .u
                .inverse()
                .concat(&flat[y].as_ref().expect("flat").u)
        };
        let mut deck_word = word_ab(fa, fb);
        let mut deck = group.rho(&deck_word);

        if deck.is_identity(opts.deck_tol) && ca == cb {
            // Coplanar triangles subdividing one flat face.
            continue;
        }

        // Canonical orientation so every lift of one surface edge lands
        // in the same group: smaller class first; loops oriented by a
        // deterministic comparison of the deck holonomy with its inverse
        // (they differ, since the group is torsion-free).
        let flip = if ca != cb {
            cb < ca
        } else {
            mat_lex_less(&deck.inverse(), &deck)
        };
        if flip {
            core::mem::swap(&mut fa, &mut fb);
            core::mem::swap(&mut ca, &mut cb);
            deck_word = word_ab(fa, fb);
            deck = group.rho(&deck_word);
        }

        // Degenerate dual segment: the two Gauss points coincide even
        // though the deck differs — skip rather than build a zero edge.
        if distance(&classes[ca].q, &deck.apply_point(&classes[cb].q)) < 1e-9 {
            report.skipped_pieces += 1;
            continue;
        }

        // Transport the hull edge piece by the inverse affine action of
        // the first face's reduction word.
        let ua = &flat[fa].as_ref().expect("flat").u;
        let shift = tau.extend(group, ua).0;
        let back = group.rho(ua).inverse();
        let p0 = back.apply(hull.points[ends[0]] - shift);
        let p1 = back.apply(hull.points[ends[1]] - shift);
        let dvec = p1 - p0;
        let len2 = mink_dot(dvec, dvec);
        if len2 <= 0.0 {
            // A bending line is spacelike; anything else is rim debris.
            report.skipped_pieces += 1;
            continue;
        }
        let len = real::sqrt(len2);
        let dir = dvec.scale(1.0 / len);

        let gi = match groups
            .iter()
            .position(|g| g.ca == ca && g.cb == cb && g.deck.max_abs_diff(&deck) < 1e-6)
        {
            Some(i) => i,
            None => {
                groups.push(EdgeGroup {
                    ca,
                    cb,
                    deck_word,
                    deck,
                    lines: Vec::new(),
                });
                groups.len() - 1
            }
        };
        let eg = &mut groups[gi];

        // Match the piece to a line bucket (or open a new one) and
        // record its parameter interval.
        let tol0 = opts.line_tol * (1.0 + p0.euclid_norm());
        let tol1 = opts.line_tol * (1.0 + p1.euclid_norm());
        let bi = eg.lines.iter().position(|b| {
            line_offset(b.anchor, b.dir, p0) < tol0 && line_offset(b.anchor, b.dir, p1) < tol1
        });
        let bucket = match bi {
            Some(i) => &mut eg.lines[i],
            None => {
                eg.lines.push(LineBucket {
                    anchor: p0,
                    dir,
                    intervals: Vec::new(),
                });
                eg.lines.last_mut().expect("just pushed")
            }
        };
        let s0 = mink_dot(p0 - bucket.anchor, bucket.dir);
        let s1 = mink_dot(p1 - bucket.anchor, bucket.dir);
        bucket.intervals.push((s0.min(s1), s0.max(s1)));
    }

    // Weights. A bucket's intervals cover the sampled pieces of one
    // bending line; their union is the sampled length of the surface
    // edge. If some affine deck element translates the bucket's line to
    // itself, the line covers a *closed* bending geodesic and every
    // interval repeats with the translation period; folding modulo the
    // smallest period counts each surface point once.
    let ext_trans: Vec<MinkVector> = ext
        .iter()
        .map(|(w, _)| tau.extend(group, w).0)
        .collect();
    let line_period = |anchor: MinkVector, dir: MinkVector| -> Option<f64> {
        let tol = 1e-8;
        let mut best: Option<f64> = None;
        for (i, (_, iso)) in ext.iter().enumerate() {
            let d2 = iso.apply(dir) - dir;
            if d2.euclid_norm() > tol {
                continue;
            }
            let y0 = iso.apply(anchor) + ext_trans[i];
            if line_offset(anchor, dir, y0) > tol * (1.0 + anchor.euclid_norm()) {
                continue;
            }
            let t = mink_dot(y0 - anchor, dir).abs();
            if t > 1e-6 && best.map_or(true, |b| t < b) {
                best = Some(t);
            }
        }
        best
    };

    let mut edges: Vec<Edge> = Vec::new();
    for eg in &groups {
        let mut weight = 0.0;
        for b in &eg.lines {
            weight += match line_period(b.anchor, b.dir) {
                Some(period) => circle_union_length(&b.intervals, period, 1e-9),
                None => union_length(&b.intervals, 1e-9),
            };
        }
        edges.push(Edge {
            from: vid_of_class[eg.ca].expect("kept"),
            to: vid_of_class[eg.cb].expect("kept"),
            deck: eg.deck_word.clone(),
            weight,
        });
    }

    report.raw_edge_count = edges.len();

    // Deep-cell pruning. A retained face class is only usable when its
    // full edge star survived truncation; a missing star edge leaves a
    // balance defect of the order of the missing weight, orders of
    // magnitude above the roundoff-level defect of a complete star.
    // Drop such vertices (with their edges) until stable.
    loop {
        let graph = GeodesicGraph::new(group, vertices.clone(), edges.clone(), 1e-7)?;
        let max_w = edges.iter().fold(0.0f64, |m, e| m.max(e.weight));
        if max_w == 0.0 {
            vertices.clear();
            edges.clear();
            report.kept_classes = 0;
            report.edge_count = 0;
            report.max_balance_defect = 0.0;
            return Ok((GeodesicGraph::new(group, vertices, edges, 1e-7)?, report));
        }
        let defects = graph.balance_defects(group);
        let mut degree = vec![0usize; vertices.len()];
        for e in &edges {
            degree[e.from] += 1;
            degree[e.to] += 1;
        }
        let broken: Vec<bool> = defects
            .iter()
            .zip(degree.iter())
            .map(|(d, &deg)| {
                deg == 0 || real::sqrt(mink_dot(*d, *d).max(0.0)) > 0.1 * max_w
            })
            .collect();
        if opts.keep_incomplete || !broken.iter().any(|&b| b) {
            report.kept_classes = vertices.len();
            report.edge_count = edges.len();
            report.max_balance_defect = graph.max_balance_defect(group);
            return Ok((graph, report));
        }
        let mut remap: Vec<Option<usize>> = Vec::with_capacity(vertices.len());
        let mut next = 0usize;
        for &b in &broken {
            if b {
                remap.push(None);
            } else {
                remap.push(Some(next));
                next += 1;
            }
        }
        vertices = vertices
            .into_iter()
            .zip(broken.iter())
            .filter(|(_, &b)| !b)
            .map(|(v, _)| v)
            .collect();
        edges = edges
            .into_iter()
            .filter_map(|mut e| {
                let (f, t) = (remap[e.from]?, remap[e.to]?);
                e.from = f;
                e.to = t;
                Some(e)
            })
            .collect();
    }
}

/// Full pipeline: affine orbit, convex hull, dual graph. Retries with a
/// higher seed when the hull or the dual graph degenerates.
///
/// Orientation: with this library's crossing conventions, the dual graph
/// of the surface invariant under the affine action with translation
/// part `−τ` is the one whose derivative cocycle represents `+[τ]`, so
/// the pipeline deforms by the negated cocycle internally; the round
/// trip `tangent_to_graph` → [`crate::cohomology::phi`] is then the
/// identity on cohomology classes.
pub fn tangent_to_graph(
    group: &FuchsianGroup,
    tau: &Cocycle,
    opts: &MessOptions,
) -> Result<(GeodesicGraph, MessReport), GraphError> {
    let tau_eff = tau.scale(-1.0);
    let ball = group.group_ball(opts.radius);
    let ext = group.group_ball(opts.radius + opts.probe);
    let mut height = opts.seed_height;
    let mut last: Option<GraphError> = None;
    for _ in 0..=opts.max_seed_retries {
        let seed = MinkVector::new(0.0, 0.0, height);
        let orbit = |entries: &[(Word, Isometry)]| -> Vec<MinkVector> {
            entries
                .iter()
                .map(|(w, iso)| iso.apply(seed) + tau_eff.extend(group, w).0)
                .collect()
        };
        let points = orbit(&ball);
        let ext_points = orbit(&ext);
        match convex_hull(&points) {
            Ok(hull) => {
                match dual_graph(group, &tau_eff, &ext, &ext_points, &points, &hull, opts) {
                    Ok((graph, mut rep)) => {
                        rep.orbit_size = points.len();
                        rep.seed_height = height;
                        return Ok((graph, rep));
                    }
                    Err(e) => last = Some(e),
                }
            }
            Err(_) => last = Some(GraphError::DegenerateHull),
        }
        height += 2.0;
    }
    Err(last.unwrap_or(GraphError::DegenerateHull))
}
