//! Convex hulls of finite point sets in 3-space, built incrementally with
//! exact orientation predicates, plus the Minkowski face classification the
//! orbit construction needs: every face of the hull of a deformed group
//! orbit gets a conormal, and the spacelike ones project to points of the
//! hyperbolic plane (the face's Gauss point).
//!
//! Orientation convention: each triangle `[a, b, c]` is counterclockwise
//! seen from outside, so `orient3d(a, b, c, p) > 0` exactly when `p` is
//! strictly inside the supporting half-space and `< 0` when `p` sees the
//! face from outside. Degenerate inputs (fewer than four points, or all
//! points coplanar) are rejected rather than guessed at.

use crate::mink::{mink_dot, HPoint, MinkVector};
use crate::real;
use alloc::vec::Vec;
use robust::{orient3d, Coord3D};

#[derive(Clone, Debug, PartialEq)]
pub enum HullError {
    /// Fewer than four distinct points.
    TooFewPoints,
    /// All points lie in one plane (or line, or point).
    Degenerate,
}

impl core::fmt::Display for HullError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HullError::TooFewPoints => write!(f, "need at least four points"),
            HullError::Degenerate => write!(f, "points are coplanar"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HullError {}

/// Triangulated convex hull: indices into the input point slice.
#[derive(Clone, Debug)]
pub struct TriHull {
    pub points: Vec<MinkVector>,
    /// Outward-oriented triangles (counterclockwise from outside).
    pub tris: Vec<[usize; 3]>,
}

fn coord(v: MinkVector) -> Coord3D<f64> {
    let a = v.as_array();
    Coord3D {
        x: a[0],
        y: a[1],
        z: a[2],
    }
}

fn orient(points: &[MinkVector], a: usize, b: usize, c: usize, d: MinkVector) -> f64 {
    orient3d(coord(points[a]), coord(points[b]), coord(points[c]), coord(d))
}

/// Incremental convex hull. Exact predicates decide visibility, so points
/// exactly on a face plane are never treated as outside it; coplanar
/// patches come out as fans of coplanar triangles.
pub fn convex_hull(input: &[MinkVector]) -> Result<TriHull, HullError> {
    // Deduplicate exactly coincident points (bitwise: orbit points of
    // distinct group elements essentially never collide, but the seed's
    // identity copy can repeat under retries).
    let mut points: Vec<MinkVector> = Vec::with_capacity(input.len());
    for &p in input {
        if !points.iter().any(|q| (*q - p).max_abs() == 0.0) {
            points.push(p);
        }
    }
    if points.len() < 4 {
        return Err(HullError::TooFewPoints);
    }

    // Initial simplex: two distinct points, a third maximizing triangle
    // area, a fourth maximizing (exact-signed) volume.
    let p0 = 0;
    let p1 = (1..points.len())
        .max_by(|&i, &j| {
            let di = (points[i] - points[p0]).max_abs();
            let dj = (points[j] - points[p0]).max_abs();
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap();
    let cross_mag = |i: usize| {
        let u = points[p1] - points[p0];
        let v = points[i] - points[p0];
        let ua = u.as_array();
        let va = v.as_array();
        let c = [
            ua[1] * va[2] - ua[2] * va[1],
            ua[2] * va[0] - ua[0] * va[2],
            ua[0] * va[1] - ua[1] * va[0],
        ];
        real::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2])
    };
    let p2 = (0..points.len())
        .filter(|&i| i != p0 && i != p1)
        .max_by(|&i, &j| cross_mag(i).partial_cmp(&cross_mag(j)).unwrap())
        .ok_or(HullError::TooFewPoints)?;
    if cross_mag(p2) == 0.0 {
        return Err(HullError::Degenerate);
    }
    let p3 = (0..points.len())
        .filter(|&i| i != p0 && i != p1 && i != p2)
        .max_by(|&i, &j| {
            let vi = orient(&points, p0, p1, p2, points[i]).abs();
            let vj = orient(&points, p0, p1, p2, points[j]).abs();
            vi.partial_cmp(&vj).unwrap()
        })
        .ok_or(HullError::TooFewPoints)?;
    if orient(&points, p0, p1, p2, points[p3]) == 0.0 {
        return Err(HullError::Degenerate);
    }

    // Orient the four starting faces so the opposite vertex is inside.
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for (f, opp) in [
        ([p0, p1, p2], p3),
        ([p0, p1, p3], p2),
        ([p0, p2, p3], p1),
        ([p1, p2, p3], p0),
    ] {
        let t = if orient(&points, f[0], f[1], f[2], points[opp]) > 0.0 {
            f
        } else {
            [f[0], f[2], f[1]]
        };
        tris.push(t);
    }

    for p in 0..points.len() {
        if p == p0 || p == p1 || p == p2 || p == p3 {
            continue;
        }
        let visible: Vec<bool> = tris
            .iter()
            .map(|t| orient(&points, t[0], t[1], t[2], points[p]) < 0.0)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        // Horizon: directed edges of visible faces whose reverse belongs to
        // a hidden face (or to no face, which cannot happen on a closed
        // hull). New faces keep the horizon edge's direction, which
        // preserves outward orientation.
        let mut horizon: Vec<[usize; 2]> = Vec::new();
        for (t, &vis) in tris.iter().zip(&visible) {
            if !vis {
                continue;
            }
            for e in [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]] {
                let reverse_visible = tris.iter().zip(&visible).any(|(s, &sv)| {
                    sv && (([s[0], s[1]] == [e[1], e[0]])
                        || ([s[1], s[2]] == [e[1], e[0]])
                        || ([s[2], s[0]] == [e[1], e[0]]))
                });
                if !reverse_visible {
                    horizon.push(e);
                }
            }
        }
        let mut next: Vec<[usize; 3]> = tris
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(t, _)| *t)
            .collect();
        for e in horizon {
            next.push([e[0], e[1], p]);
        }
        tris = next;
    }

    Ok(TriHull { points, tris })
}

impl TriHull {
    /// Euclidean (unnormalized) outward normal of a face.
    pub fn face_normal(&self, f: usize) -> MinkVector {
        let [a, b, c] = self.tris[f];
        let u = self.points[b] - self.points[a];
        let v = self.points[c] - self.points[a];
        let ua = u.as_array();
        let va = v.as_array();
        MinkVector::new(
            ua[1] * va[2] - ua[2] * va[1],
            ua[2] * va[0] - ua[0] * va[2],
            ua[0] * va[1] - ua[1] * va[0],
        )
    }

    /// Map from each undirected edge to the (two, on a closed hull) faces
    /// containing it, as `(sorted endpoint pair, face indices)`.
    pub fn edge_faces(&self) -> Vec<([usize; 2], Vec<usize>)> {
        let mut out: Vec<([usize; 2], Vec<usize>)> = Vec::new();
        for (fi, t) in self.tris.iter().enumerate() {
            for e in [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]] {
                let key = if e[0] < e[1] { [e[0], e[1]] } else { [e[1], e[0]] };
                match out.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, faces)) => faces.push(fi),
                    None => out.push((key, alloc::vec![fi])),
                }
            }
        }
        out
    }

    /// True if every input point lies inside or on every face half-space
    /// (exact predicate); the defining property of a convex hull.
    pub fn contains_all(&self, pts: &[MinkVector]) -> bool {
        pts.iter().all(|&p| {
            self.tris
                .iter()
                .all(|t| orient(&self.points, t[0], t[1], t[2], p) >= 0.0)
        })
    }
}

/// Minkowski classification of a hull face. The conormal `m = J·n` of the
/// face plane (with `n` the Euclidean outward normal) satisfies
/// `⟨m, x⟩ = n·x`; the face is spacelike exactly when `m` is timelike.
/// For a spacelike face with past-pointing outward normal (`n₃ < 0`,
/// i.e. a face of the *past* boundary of a future-convex set), the
/// future-normalized conormal `m/√(−⟨m,m⟩)` is the face's Gauss point.
#[derive(Clone, Copy, Debug)]
pub struct FaceClass {
    /// Face is spacelike (its conormal is timelike).
    pub spacelike: bool,
    /// Euclidean outward normal has negative third component.
    pub past_facing: bool,
    /// Gauss point for spacelike past-facing faces.
    pub gauss: Option<HPoint>,
}

pub fn classify_face(hull: &TriHull, f: usize) -> FaceClass {
    let n = hull.face_normal(f);
    let na = n.as_array();
    let m = MinkVector::new(na[0], na[1], -na[2]);
    let q = mink_dot(m, m);
    let spacelike = q < 0.0;
    let past_facing = na[2] < 0.0;
    let gauss = if spacelike && past_facing {
        let mut g = m.scale(1.0 / real::sqrt(-q));
        if g.x3 < 0.0 {
            g = g.scale(-1.0);
        }
        HPoint::normalize(g).ok()
    } else {
        None
    };
    FaceClass {
        spacelike,
        past_facing,
        gauss,
    }
}
