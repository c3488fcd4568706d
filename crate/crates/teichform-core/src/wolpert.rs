//! The geometric symplectic pairing on weighted geodesic graphs: half the
//! sum, over all transverse crossings between the two graphs on the
//! surface, of `w·w′·cos θ`, with `θ` the counterclockwise angle from the
//! first graph's line to the second's at the crossing.
//!
//! Crossings are enumerated between canonical edge lifts of the first graph
//! and deck translates of the second's, with the deck candidates harvested
//! from sample nets (the same relative-search machinery the graph union
//! uses). Contributions at honestly transverse crossings come from the
//! unperturbed geometry. Degenerate incidences — shared vertices, edges
//! running along a common geodesic — are resolved by displacing the second
//! graph's vertices by a tiny deterministic pseudo-random isotopy: the
//! displaced copy decides *whether* a degenerate incidence contributes,
//! while the contribution's angle still comes from the original tangents
//! (or saturates at ±1 along a shared geodesic). Every value is computed at
//! two displacement scales and accepted only when the results agree, with
//! fresh displacement seeds on disagreement.
//!
//! This route never touches group cohomology, so it is an independent check
//! of the cup-product route in [`crate::goldman`].

use crate::config::Tolerances;
use crate::fuchsian::FuchsianGroup;
use crate::geograph::{GeodesicGraph, GraphError};
use crate::mink::{
    exp_map, mink_dot, segment_intersection, signed_cos_angle, HPoint, MinkVector, Segment,
    SegmentMeet,
};
use crate::real::{self, SplitMix64};
use crate::words::Word;
use alloc::vec::Vec;

/// Controls for the perturbation isotopy and its self-consistency check.
#[derive(Clone, Copy, Debug)]
pub struct PairingOptions {
    /// Vertex displacement scale for resolving degenerate incidences.
    pub delta: f64,
    /// Seed for the deterministic displacement directions.
    pub seed: u64,
    /// Fresh-seed attempts before giving up.
    pub max_retries: usize,
    /// Accepted relative gap between the two displacement scales.
    pub stability_tol: f64,
}

impl Default for PairingOptions {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            seed: 0x77c2_91b3_5d10_6e4f,
            max_retries: 8,
            stability_tol: 1e-6,
        }
    }
}

/// One transverse crossing's contribution to the pairing.
#[derive(Clone, Debug)]
pub struct CrossingRecord {
    /// Edge index in the first graph.
    pub edge_first: usize,
    /// Edge index in the second graph.
    pub edge_second: usize,
    /// Crossing point (on the canonical lift of the first edge).
    pub point: HPoint,
    /// Signed cosine of the counterclockwise angle from first to second.
    pub cos_angle: f64,
    /// Product of the two edge weights.
    pub weight_product: f64,
}

/// Pairing value together with the crossings that produced it.
#[derive(Clone, Debug)]
pub struct WolpertResult {
    pub value: f64,
    pub crossings: Vec<CrossingRecord>,
}

pub fn wolpert_pairing(
    group: &FuchsianGroup,
    first: &GeodesicGraph,
    second: &GeodesicGraph,
) -> Result<WolpertResult, GraphError> {
    wolpert_pairing_with(group, first, second, &PairingOptions::default())
}

pub fn wolpert_pairing_with(
    group: &FuchsianGroup,
    first: &GeodesicGraph,
    second: &GeodesicGraph,
    opts: &PairingOptions,
) -> Result<WolpertResult, GraphError> {
    let mut seeds = SplitMix64::new(opts.seed);
    let mut last_gap = f64::INFINITY;
    for _ in 0..opts.max_retries.max(1) {
        let seed = seeds.next_u64();
        let full = crossing_sum(group, first, second, opts.delta, seed);
        let half = crossing_sum(group, first, second, 0.5 * opts.delta, seed);
        match (full, half) {
            (Ok((v1, records)), Ok((v2, _))) => {
                let gap = (v1 - v2).abs();
                if gap <= opts.stability_tol * (1.0 + v1.abs()) {
                    return Ok(WolpertResult {
                        value: v1,
                        crossings: records,
                    });
                }
                last_gap = gap;
            }
            (Err(GraphError::DegenerateCrossing), _)
            | (_, Err(GraphError::DegenerateCrossing)) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Err(GraphError::UnstablePairing { gap: last_gap })
}

/// What the unperturbed geometry says about one (edge, deck, edge) pair.
enum Incidence {
    /// Transverse interior crossing: point and signed cosine, both exact.
    Clean(HPoint, f64),
    /// Crossing at a segment endpoint (shared vertex, vertex-on-edge):
    /// angle is exact, existence needs the displaced copy's verdict.
    AtEndpoint(HPoint, f64),
    /// Segments run along one geodesic: contribution saturates at ±1 with
    /// the side chosen by the displaced copy.
    AlongCommonGeodesic,
}

/// Sum `w·w′·cos θ` over crossings at one displacement scale; the pairing
/// is half of it.
fn crossing_sum(
    group: &FuchsianGroup,
    first: &GeodesicGraph,
    second: &GeodesicGraph,
    delta: f64,
    seed: u64,
) -> Result<(f64, Vec<CrossingRecord>), GraphError> {
    let tol_deg = Tolerances::DEFAULT.tol_deg;

    let lifts1: Vec<Segment> = (0..first.edges().len())
        .map(|e| first.edge_lift(group, e))
        .collect();
    let lifts2: Vec<Segment> = (0..second.edges().len())
        .map(|e| second.edge_lift(group, e))
        .collect();

    let mut net1 = Vec::new();
    for seg in &lifts1 {
        net1.extend(group.net_along_segment(seg, 0.5)?);
    }
    let mut net2 = Vec::new();
    for seg in &lifts2 {
        net2.extend(group.net_along_segment(seg, 0.5)?);
    }
    let search = group.deck_search(0.7);
    let decks = search.transporters(group, &net1, &net2, 0.6);

    // Displaced copy of the second graph's vertices, coherent across all
    // lifts: every lift of an edge moves by the conjugated displacement.
    let moved: Vec<HPoint> = second
        .vertices()
        .iter()
        .enumerate()
        .map(|(vid, v)| {
            let mut rng =
                SplitMix64::new(seed ^ ((vid as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            loop {
                let raw = MinkVector::new(rng.next_signed(), rng.next_signed(), 0.0);
                let tangent = raw + v.point.vector().scale(mink_dot(raw, v.point.vector()));
                let n = mink_dot(tangent, tangent);
                if n > 1e-12 {
                    return exp_map(&v.point, tangent.scale(delta / real::sqrt(n)));
                }
            }
        })
        .collect();
    let lifts2_moved: Vec<Segment> = second
        .edges()
        .iter()
        .map(|e| {
            Segment::new(
                moved[e.from],
                group.rho(&e.deck).apply_point(&moved[e.to]),
            )
            .map_err(GraphError::Geometry)
        })
        .collect::<Result<_, _>>()?;

    let mut total = 0.0;
    let mut records = Vec::new();
    for (e1, lift1) in lifts1.iter().enumerate() {
        let w1 = first.edges()[e1].weight;
        let m1 = lift1.point_at(0.5 * lift1.length());
        for (e2, lift2) in lifts2.iter().enumerate() {
            let w2 = second.edges()[e2].weight;
            let reach = real::cosh(0.5 * lift1.length() + 0.5 * lift2.length() + 0.4);
            let mid2 = lift2.point_at(0.5 * lift2.length());
            for (_, giso) in &decks {
                if -mink_dot(m1.vector(), giso.apply_point(&mid2).vector()) > reach {
                    continue;
                }
                let trans2 = giso.apply_segment(lift2);
                // Unperturbed geometry first: honest transverse crossings
                // contribute exactly; anything degenerate goes to the
                // displaced copy for resolution.
                let incidence = match segment_intersection(lift1, &trans2, tol_deg) {
                    SegmentMeet::None => continue,
                    SegmentMeet::NearCollinear => Incidence::AlongCommonGeodesic,
                    SegmentMeet::Crossing(c) => {
                        let reading =
                            signed_cos_angle(&c.point, c.tangent_first, c.tangent_second, tol_deg);
                        if reading.degenerate {
                            Incidence::AlongCommonGeodesic
                        } else if c.degenerate {
                            Incidence::AtEndpoint(c.point, reading.cos)
                        } else {
                            Incidence::Clean(c.point, reading.cos)
                        }
                    }
                };
                let (point, cos) = match incidence {
                    Incidence::Clean(p, cos) => (p, cos),
                    // The displaced copy decides whether the incidence is a
                    // crossing at all; the angle comes from the original
                    // tangents at the touching point.
                    Incidence::AtEndpoint(q, cos) => {
                        let moved2 = giso.apply_segment(&lifts2_moved[e2]);
                        match segment_intersection(lift1, &moved2, tol_deg) {
                            SegmentMeet::None => continue,
                            SegmentMeet::NearCollinear => {
                                return Err(GraphError::DegenerateCrossing)
                            }
                            SegmentMeet::Crossing(c) if c.degenerate => {
                                return Err(GraphError::DegenerateCrossing)
                            }
                            SegmentMeet::Crossing(_) => (q, cos),
                        }
                    }
                    // Along a shared geodesic the limit angle is 0 or π; the
                    // displaced copy picks the side, which fixes the sign.
                    Incidence::AlongCommonGeodesic => {
                        let moved2 = giso.apply_segment(&lifts2_moved[e2]);
                        match segment_intersection(lift1, &moved2, tol_deg) {
                            SegmentMeet::None => continue,
                            SegmentMeet::NearCollinear => {
                                return Err(GraphError::DegenerateCrossing)
                            }
                            SegmentMeet::Crossing(c) if c.degenerate => {
                                return Err(GraphError::DegenerateCrossing)
                            }
                            SegmentMeet::Crossing(c) => {
                                let reading = signed_cos_angle(
                                    &c.point,
                                    c.tangent_first,
                                    c.tangent_second,
                                    tol_deg,
                                );
                                (c.point, if reading.cos >= 0.0 { 1.0 } else { -1.0 })
                            }
                        }
                    }
                };
                total += w1 * w2 * cos;
                records.push(CrossingRecord {
                    edge_first: e1,
                    edge_second: e2,
                    point,
                    cos_angle: cos,
                    weight_product: w1 * w2,
                });
            }
        }
    }
    Ok((0.5 * total, records))
}

/// Direct angle-sum for two single closed geodesics given by words: finds
/// the axes' crossings on the surface from scratch (no graph machinery) and
/// returns half the sum of signed cosines. A cross-check oracle for the
/// graph-based pairing on classical inputs.
pub fn classical_two_curve_pairing(
    group: &FuchsianGroup,
    first: &Word,
    second: &Word,
) -> Result<f64, GraphError> {
    let g1 = GeodesicGraph::from_multicurve(group, &[(first.clone(), 1.0)])?;
    let g2 = GeodesicGraph::from_multicurve(group, &[(second.clone(), 1.0)])?;
    let r = wolpert_pairing(group, &g1, &g2)?;
    Ok(r.value)
}
