//! The four model spaces: unit interval, circle of circumference 1, flat
//! torus `R^2/Z^2`, and the pillowcase sphere (torus quotient by `p ~ -p`).
//!
//! Each space carries a geodesic metric, an ambient diameter and a cone-point
//! list (empty except for the pillowcase, whose four branch classes carry
//! curvature `pi` each). Points are stored in canonical fundamental-domain
//! coordinates; for the pillowcase the representative with lexicographically
//! smaller coordinates among `{x, -x mod 1}` is chosen, so involution-fixed
//! points represent themselves.

use crate::geom::{self, V2};
use crate::{Error, Result};

/// A model surface. The metric, diameter and cone points are determined by
/// the kind, so the space itself is a copyable tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Interval,
    Circle,
    Torus,
    Pillowcase,
}

/// A point of a model space in canonical coordinates.
///
/// One coordinate is used for interval/circle (second held at zero), two for
/// torus/pillowcase, all inside the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub space: Space,
    pub coords: V2,
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interval" => Ok(Space::Interval),
            "circle" => Ok(Space::Circle),
            "torus" => Ok(Space::Torus),
            "pillowcase" => Ok(Space::Pillowcase),
            other => Err(Error::Parse(format!("unknown space {other:?}"))),
        }
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Space::Interval => "interval",
            Space::Circle => "circle",
            Space::Torus => "torus",
            Space::Pillowcase => "pillowcase",
        };
        f.write_str(name)
    }
}

impl Space {
    /// Number of coordinates a point of this space uses.
    pub fn dim(self) -> usize {
        match self {
            Space::Interval | Space::Circle => 1,
            Space::Torus | Space::Pillowcase => 2,
        }
    }

    /// Largest possible distance between two points of the space.
    pub fn ambient_diameter(self) -> f64 {
        match self {
            Space::Interval => 1.0,
            Space::Circle => 0.5,
            // Half-diagonal of the unit square; on the pillowcase the value
            // is attained between opposite cone points.
            Space::Torus | Space::Pillowcase => std::f64::consts::SQRT_2 / 2.0,
        }
    }

    /// Cone points of the space. Empty except for the pillowcase, whose four
    /// branch classes each carry a 1-prong (curvature `pi`).
    pub fn cone_points(self) -> Vec<Point> {
        match self {
            Space::Pillowcase => [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]]
                .into_iter()
                .map(|coords| Point {
                    space: Space::Pillowcase,
                    coords,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Map lift coordinates to canonical fundamental-domain coordinates.
    pub fn canonicalize(self, lift: V2) -> V2 {
        match self {
            Space::Interval => [lift[0], 0.0],
            Space::Circle => [geom::wrap01(lift[0]), 0.0],
            Space::Torus => [geom::wrap01(lift[0]), geom::wrap01(lift[1])],
            Space::Pillowcase => {
                let p = [geom::wrap01(lift[0]), geom::wrap01(lift[1])];
                let q = [geom::wrap01(-lift[0]), geom::wrap01(-lift[1])];
                if (q[0], q[1]) < (p[0], p[1]) {
                    q
                } else {
                    p
                }
            }
        }
    }

    /// The quotient involution image of canonical coordinates (pillowcase);
    /// identity elsewhere.
    pub fn involution(self, p: V2) -> V2 {
        match self {
            Space::Pillowcase => [geom::wrap01(-p[0]), geom::wrap01(-p[1])],
            _ => p,
        }
    }

    /// Geodesic distance between canonical coordinate pairs.
    pub fn dist_coords(self, p: V2, q: V2) -> f64 {
        match self {
            Space::Interval => (p[0] - q[0]).abs(),
            Space::Circle => geom::circ_dist(p[0], q[0]),
            Space::Torus => torus_dist(p, q),
            Space::Pillowcase => torus_dist(p, q).min(torus_dist(p, self.involution(q))),
        }
    }

    /// Build a canonical point from lift coordinates.
    pub fn point(self, lift: V2) -> Point {
        Point {
            space: self,
            coords: self.canonicalize(lift),
        }
    }
}

/// Flat metric of `R^2/Z^2`: Euclidean length of the shortest integer
/// translate, computed per coordinate (the metric is a product).
#[inline]
pub fn torus_dist(p: V2, q: V2) -> f64 {
    let dx = geom::circ_dist(p[0], q[0]);
    let dy = geom::circ_dist(p[1], q[1]);
    dx.hypot(dy)
}

/// Geodesic distance between two points of the same space.
pub fn dist(p: Point, q: Point) -> Result<f64> {
    if p.space != q.space {
        return Err(Error::SpaceMismatch(p.space, q.space));
    }
    Ok(p.space.dist_coords(p.coords, q.coords))
}

/// Cone curvature of an `n`-prong singularity: `(2 - n) * pi`.
pub fn cone_curvature(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::usage("prong count must be at least 1"));
    }
    Ok((2.0 - n as f64) * std::f64::consts::PI)
}

/// Total curvature of a list of prong counts.
pub fn total_curvature(prongs: &[u32]) -> Result<f64> {
    prongs.iter().map(|&n| cone_curvature(n)).sum()
}

/// Sum of cone curvatures of the space. The pillowcase carries four 1-prongs,
/// so the total is `4*pi = 2*pi*chi(S^2)`; the torus has no singular points
/// and totals zero.
pub fn gauss_bonnet_check(space: Space) -> f64 {
    match space {
        Space::Pillowcase => 4.0 * std::f64::consts::PI,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_point(space: Space, rng: &mut ChaCha8Rng) -> Point {
        space.point([rng.gen::<f64>(), rng.gen::<f64>()])
    }

    #[test]
    fn circle_wraps_around() {
        let s = Space::Circle;
        let d = dist(s.point([0.1, 0.0]), s.point([0.9, 0.0])).unwrap();
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn torus_uses_nearest_translate() {
        let s = Space::Torus;
        let d = dist(s.point([0.1, 0.1]), s.point([0.9, 0.9])).unwrap();
        assert!((d - (0.2f64 * 0.2 + 0.2 * 0.2).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pillowcase_involution_image_can_be_closer() {
        let s = Space::Pillowcase;
        let d = dist(s.point([0.1, 0.0]), s.point([0.85, 0.0])).unwrap();
        assert!((d - 0.05).abs() < 1e-12);
    }

    #[test]
    fn interval_is_euclidean() {
        let s = Space::Interval;
        let d = dist(s.point([0.2, 0.0]), s.point([0.7, 0.0])).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mismatched_spaces_error() {
        let p = Space::Circle.point([0.1, 0.0]);
        let q = Space::Torus.point([0.1, 0.0]);
        assert!(dist(p, q).is_err());
    }

    #[test]
    fn cone_curvature_values() {
        assert!((cone_curvature(1).unwrap() - PI).abs() < 1e-15);
        assert_eq!(cone_curvature(2).unwrap(), 0.0);
        assert!((cone_curvature(4).unwrap() + 2.0 * PI).abs() < 1e-15);
        assert!(cone_curvature(0).is_err());
    }

    #[test]
    fn gauss_bonnet_totals() {
        assert!((gauss_bonnet_check(Space::Pillowcase) - 4.0 * PI).abs() < 1e-12);
        assert_eq!(gauss_bonnet_check(Space::Torus), 0.0);
        assert!((total_curvature(&[1, 1, 1, 1]).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn pillowcase_cone_points_are_the_four_branch_classes() {
        let pts = Space::Pillowcase.cone_points();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            // Each branch point is fixed by the involution.
            let inv = p.space.involution(p.coords);
            assert_eq!(inv, p.coords);
        }
    }

    #[test]
    fn triangle_inequality_sampled() {
        for space in [
            Space::Interval,
            Space::Circle,
            Space::Torus,
            Space::Pillowcase,
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(31);
            for _ in 0..10_000 {
                let p = random_point(space, &mut rng);
                let q = random_point(space, &mut rng);
                let r = random_point(space, &mut rng);
                let pq = dist(p, q).unwrap();
                let qr = dist(q, r).unwrap();
                let pr = dist(p, r).unwrap();
                assert!(pr <= pq + qr + 1e-12);
                assert!(pr <= space.ambient_diameter() + 1e-12);
            }
        }
    }

    #[test]
    fn pillowcase_distance_invariant_under_involution() {
        let s = Space::Pillowcase;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = random_point(s, &mut rng);
            let q = random_point(s, &mut rng);
            // Canonicalizing the involution image must give the same class,
            // hence exactly the same distance.
            let qi = s.point(s.involution(q.coords));
            assert_eq!(dist(p, q).unwrap(), dist(p, qi).unwrap());
            let pi = s.point(s.involution(p.coords));
            assert_eq!(dist(p, q).unwrap(), dist(pi, q).unwrap());
        }
    }
}
