//! Seeded random generators for geometric test data. Test-only.

use crate::mink::{
    mink_dot, rotation_at, translate_along, translation_generator, Geodesic, HPoint, Isometry,
    MinkVector,
};
use crate::real::{self, SplitMix64};

/// A random point with coordinates `(x1, x2)` uniform in `[-spread, spread]`.
pub fn random_hpoint(rng: &mut SplitMix64, spread: f64) -> HPoint {
    let x1 = spread * rng.next_signed();
    let x2 = spread * rng.next_signed();
    let x3 = real::sqrt(1.0 + x1 * x1 + x2 * x2);
    HPoint::new_with_tol(MinkVector::new(x1, x2, x3), 1e-9).expect("constructed on hyperboloid")
}

/// A uniform-ish random unit tangent vector at `p`.
pub fn random_unit_tangent_at(rng: &mut SplitMix64, p: &HPoint) -> MinkVector {
    loop {
        let v = MinkVector::new(rng.next_signed(), rng.next_signed(), rng.next_signed());
        // Project onto the tangent space at p: v + ⟨v,p⟩p (since ⟨p,p⟩ = −1).
        let w = v + p.vector().scale(mink_dot(v, p.vector()));
        let n = mink_dot(w, w);
        if n > 1e-6 {
            return w.scale(1.0 / real::sqrt(n));
        }
    }
}

/// A random geodesic through a random point.
pub fn random_geodesic(rng: &mut SplitMix64, spread: f64) -> Geodesic {
    let p = random_hpoint(rng, spread);
    let u = random_unit_tangent_at(rng, &p);
    let x = translation_generator(&p, u).expect("tangent by construction");
    Geodesic::new_with_tol(x.0, 1e-9).expect("generator of a tangent is unit spacelike")
}

/// A generic random orientation-preserving isometry: two translations and a
/// rotation composed.
pub fn random_isometry(rng: &mut SplitMix64) -> Isometry {
    let t1 = translate_along(&random_geodesic(rng, 1.0), 1.5 * rng.next_signed());
    let t2 = translate_along(&random_geodesic(rng, 1.0), 1.5 * rng.next_signed());
    let r = rotation_at(
        &random_hpoint(rng, 0.7),
        core::f64::consts::PI * rng.next_signed(),
    );
    t1.compose(&r).compose(&t2)
}

/// A random Lie algebra vector with entries in `[-spread, spread]`.
pub fn random_lie(rng: &mut SplitMix64, spread: f64) -> crate::mink::LieVec {
    crate::mink::LieVec(MinkVector::new(
        spread * rng.next_signed(),
        spread * rng.next_signed(),
        spread * rng.next_signed(),
    ))
}
