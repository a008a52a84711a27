//! Small planar vector helpers shared by the geometry code.
//!
//! Coordinates are `[f64; 2]` throughout; 1-dimensional spaces use the first
//! component and keep the second at zero.

pub type V2 = [f64; 2];

#[inline]
pub fn add(a: V2, b: V2) -> V2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: V2, b: V2) -> V2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(a: V2, s: f64) -> V2 {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn neg(a: V2) -> V2 {
    [-a[0], -a[1]]
}

#[inline]
pub fn dot(a: V2, b: V2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Counterclockwise perpendicular.
#[inline]
pub fn perp(a: V2) -> V2 {
    [-a[1], a[0]]
}

#[inline]
pub fn norm(a: V2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: V2, b: V2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
pub fn lerp(a: V2, b: V2, t: f64) -> V2 {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

/// Fractional part mapped into `[0, 1)`, safe against the `-1e-18` edge where
/// rounding would otherwise return `1.0`.
#[inline]
pub fn wrap01(x: f64) -> f64 {
    let mut f = x - x.floor();
    if f >= 1.0 {
        f -= 1.0;
    }
    if f < 0.0 {
        f += 1.0;
    }
    f
}

/// Distance from `x` to the nearest integer.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// 1-D circle distance between wrapped coordinates.
#[inline]
pub fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    let d = d - d.floor();
    d.min(1.0 - d)
}

/// Distance from `s` to the closed interval `[lo, hi]`.
#[inline]
pub fn excess(s: f64, lo: f64, hi: f64) -> f64 {
    if s < lo {
        lo - s
    } else if s > hi {
        s - hi
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_handles_negatives() {
        assert_eq!(wrap01(-0.3), 0.7);
        assert_eq!(wrap01(1.25), 0.25);
        assert_eq!(wrap01(0.0), 0.0);
        let w = wrap01(-1e-18);
        assert!((0.0..1.0).contains(&w));
    }

    #[test]
    fn circ_dist_wraps() {
        assert!((circ_dist(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert!((circ_dist(0.0, 0.5) - 0.5).abs() < 1e-15);
    }
}
