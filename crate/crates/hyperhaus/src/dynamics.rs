//! The linear Anosov torus map, its pillowcase quotient, leaf-arc
//! constructors, arc iteration, and the arc-translation construction.
//!
//! Maps act on lifts by integer matrices, so iteration is exact up to the
//! floating-point products; a precision budget refuses iteration counts
//! whose stretch factor would push lift coordinates past the point where
//! vertex arithmetic stays trustworthy.

use crate::continua::PolylineArc;
use crate::geom::{self, V2};
use crate::leaf::SegDesc;
use crate::spaces::{Point, Space};
use crate::{Error, Result};

/// Lift coordinates stay below this bound times the initial data; beyond it
/// the 1e-9 agreement targets are lost.
pub const LIFT_PRECISION_BUDGET: f64 = 1e8;

/// A hyperbolic unimodular integer matrix acting on the torus, with its
/// eigendata.
#[derive(Debug, Clone, Copy)]
pub struct ToralAutomorphism {
    m: [[i64; 2]; 2],
    lambda_u: f64,
    lambda_s: f64,
    dir_u: V2,
    dir_s: V2,
}

impl ToralAutomorphism {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(Error::usage(format!(
                "matrix must be unimodular (|det| = 1), got det = {det}"
            )));
        }
        let tr = (m[0][0] + m[1][1]) as f64;
        let disc = tr * tr - 4.0 * det as f64;
        if disc <= 0.0 {
            return Err(Error::usage("matrix is not hyperbolic"));
        }
        let sq = disc.sqrt();
        let l1 = (tr + sq) / 2.0;
        let l2 = (tr - sq) / 2.0;
        let (lambda_u, lambda_s) = if l1.abs() >= l2.abs() { (l1, l2) } else { (l2, l1) };
        if !(lambda_s.abs() < 1.0 && lambda_u.abs() > 1.0) {
            return Err(Error::usage(
                "matrix is not hyperbolic: need |lambda_s| < 1 < |lambda_u|",
            ));
        }
        let eigvec = |lambda: f64| -> Result<V2> {
            let (a, b, c, d) = (
                m[0][0] as f64,
                m[0][1] as f64,
                m[1][0] as f64,
                m[1][1] as f64,
            );
            let v = if b.abs() > 1e-12 {
                [b, lambda - a]
            } else if c.abs() > 1e-12 {
                [lambda - d, c]
            } else {
                return Err(Error::usage("diagonal unimodular matrices are not hyperbolic"));
            };
            let n = geom::norm(v);
            let v = [v[0] / n, v[1] / n];
            let mv = [a * v[0] + b * v[1], c * v[0] + d * v[1]];
            let res = geom::dist(mv, geom::scale(v, lambda));
            if res > 1e-12 {
                return Err(Error::usage(format!("eigenvector residual {res} too large")));
            }
            Ok(v)
        };
        Ok(ToralAutomorphism {
            m,
            lambda_u,
            lambda_s,
            dir_u: eigvec(lambda_u)?,
            dir_s: eigvec(lambda_s)?,
        })
    }

    /// The paper's default `f(x, y) = (2x + y, x + y)`.
    pub fn cat_map() -> Self {
        ToralAutomorphism::new([[2, 1], [1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    pub fn dir_u(&self) -> V2 {
        self.dir_u
    }

    pub fn dir_s(&self) -> V2 {
        self.dir_s
    }

    /// Inverse by the adjugate; exact integers since `det = +-1`.
    pub fn inverse_matrix(&self) -> [[i64; 2]; 2] {
        let [[a, b], [c, d]] = self.m;
        let det = a * d - b * c;
        [[d * det, -b * det], [-c * det, a * det]]
    }

    /// Integer matrix power for any sign of `n`.
    pub fn matrix_power(&self, n: i64) -> Result<[[i64; 2]; 2]> {
        let base = if n >= 0 { self.m } else { self.inverse_matrix() };
        let mut acc = [[1i64, 0], [0, 1]];
        for _ in 0..n.unsigned_abs() {
            acc = mat_mul(acc, base)?;
        }
        Ok(acc)
    }

    /// Apply the n-th power on a lift.
    pub fn apply_lift(&self, p: V2, n: i64) -> Result<V2> {
        let mm = self.matrix_power(n)?;
        Ok(apply_mat(mm, p))
    }
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> Result<[[i64; 2]; 2]> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let v = (a[i][0] as i128) * (b[0][j] as i128) + (a[i][1] as i128) * (b[1][j] as i128);
            out[i][j] = i64::try_from(v)
                .map_err(|_| Error::PrecisionBudget("matrix power overflows".into()))?;
        }
    }
    Ok(out)
}

fn apply_mat(m: [[i64; 2]; 2], p: V2) -> V2 {
    [
        m[0][0] as f64 * p[0] + m[0][1] as f64 * p[1],
        m[1][0] as f64 * p[0] + m[1][1] as f64 * p[1],
    ]
}

/// The double branched quotient of a toral automorphism by `p ~ -p`.
#[derive(Debug, Clone, Copy)]
pub struct PillowcaseSystem {
    pub base: ToralAutomorphism,
}

/// One of the two concrete systems the experiments run on.
#[derive(Debug, Clone, Copy)]
pub enum System {
    Torus(ToralAutomorphism),
    Pillowcase(PillowcaseSystem),
}

impl System {
    pub fn new(space: Space, auto: ToralAutomorphism) -> Result<System> {
        match space {
            Space::Torus => Ok(System::Torus(auto)),
            Space::Pillowcase => Ok(System::Pillowcase(PillowcaseSystem { base: auto })),
            other => Err(Error::usage(format!("no dynamics on the {other}"))),
        }
    }

    pub fn space(&self) -> Space {
        match self {
            System::Torus(_) => Space::Torus,
            System::Pillowcase(_) => Space::Pillowcase,
        }
    }

    pub fn auto(&self) -> &ToralAutomorphism {
        match self {
            System::Torus(a) => a,
            System::Pillowcase(p) => &p.base,
        }
    }

    /// Apply the n-th power of the map to a point (reduced to canonical
    /// coordinates; the pillowcase canonicalization follows the projection).
    pub fn apply(&self, p: Point, n: i64) -> Result<Point> {
        if p.space != self.space() {
            return Err(Error::SpaceMismatch(p.space, self.space()));
        }
        let lift = self.auto().apply_lift(p.coords, n)?;
        Ok(self.space().point(lift))
    }

    /// Straight stable segment descriptor centered at `center`, fold-reduced
    /// on the pillowcase.
    pub fn stable_seg(&self, center: V2, len: f64) -> Result<SegDesc> {
        self.leaf_seg(center, len, true)
    }

    /// Straight unstable segment descriptor centered at `center`.
    pub fn unstable_seg(&self, center: V2, len: f64) -> Result<SegDesc> {
        self.leaf_seg(center, len, false)
    }

    fn leaf_seg(&self, center: V2, len: f64, stable: bool) -> Result<SegDesc> {
        if !(len >= 0.0) {
            return Err(Error::usage("arc length must be nonnegative"));
        }
        if len > LIFT_PRECISION_BUDGET {
            return Err(Error::PrecisionBudget(format!(
                "arc length {len} exceeds the lift precision budget"
            )));
        }
        let dir = if stable {
            self.auto().dir_s
        } else {
            self.auto().dir_u
        };
        let desc = SegDesc::from_center(self.space(), center, dir, len);
        Ok(if self.space() == Space::Pillowcase {
            fold_reduce(desc)
        } else {
            desc
        })
    }

    /// Stable arc of length `len` centered at `x`, sampled at gauge `h`.
    /// On the pillowcase the result is the projected torus arc (shorter when
    /// the segment crosses a branch point).
    pub fn stable_arc(&self, x: Point, len: f64, h: f64) -> Result<PolylineArc> {
        if x.space != self.space() {
            return Err(Error::SpaceMismatch(x.space, self.space()));
        }
        self.stable_seg(x.coords, len)?.to_arc(h)
    }

    /// Unstable arc of length `len` centered at `x`, sampled at gauge `h`.
    pub fn unstable_arc(&self, x: Point, len: f64, h: f64) -> Result<PolylineArc> {
        if x.space != self.space() {
            return Err(Error::SpaceMismatch(x.space, self.space()));
        }
        self.unstable_seg(x.coords, len)?.to_arc(h)
    }

    /// Exact affine image of an arc under the n-th power, resampled at `h`.
    pub fn iterate_arc(&self, a: &PolylineArc, n: i64, h: f64) -> Result<PolylineArc> {
        if a.space() != self.space() {
            return Err(Error::SpaceMismatch(a.space(), self.space()));
        }
        let stretch = self.auto().lambda_u.abs().powi(n.unsigned_abs() as i32);
        if stretch * a.len().max(1.0) > LIFT_PRECISION_BUDGET {
            return Err(Error::PrecisionBudget(format!(
                "iterating {n} steps would stretch the arc to {:.3e}, past the budget {LIFT_PRECISION_BUDGET:.0e}",
                stretch * a.len().max(1.0)
            )));
        }
        let mm = self.auto().matrix_power(n)?;
        let verts: Vec<V2> = a.verts().iter().map(|&v| apply_mat(mm, v)).collect();
        if self.space() == Space::Pillowcase {
            if let Some(seg) = as_straight_seg(Space::Pillowcase, &verts) {
                let reduced = fold_reduce(seg);
                return reduced.to_arc(h);
            }
        }
        PolylineArc::new(self.space(), verts, h)
    }

    /// The lemma's translated arc: on the torus the translate `A_x + (y - x)`
    /// (length preserved); on the pillowcase the projection of the covering
    /// translate, which may be shorter when it crosses a branch point. Either
    /// way `d_H(A_x, A_y) <= dist(x, y)` up to sampling slack.
    pub fn translate_arc(&self, a: &PolylineArc, x: Point, y: Point) -> Result<PolylineArc> {
        if a.space() != self.space() || x.space != self.space() || y.space != self.space() {
            return Err(Error::usage("translate_arc operands must share the system's space"));
        }
        // Shortest covering translate; on the pillowcase the involuted
        // representative of y may be the nearer one.
        let mut delta = wrap_delta(geom::sub(y.coords, x.coords));
        if self.space() == Space::Pillowcase {
            let alt = wrap_delta(geom::sub(self.space().involution(y.coords), x.coords));
            if geom::norm(alt) < geom::norm(delta) {
                delta = alt;
            }
        }
        let verts: Vec<V2> = a.verts().iter().map(|&v| geom::add(v, delta)).collect();
        if self.space() == Space::Pillowcase {
            if let Some(seg) = as_straight_seg(Space::Pillowcase, &verts) {
                return fold_reduce(seg).to_arc(a.gauge());
            }
        }
        PolylineArc::new(self.space(), verts, a.gauge())
    }
}

/// Per-coordinate shortest representative of a torus translation.
fn wrap_delta(d: V2) -> V2 {
    [d[0] - d[0].round(), d[1] - d[1].round()]
}

/// Recognize a polyline that is a straight segment (all vertices collinear,
/// monotone along the direction).
fn as_straight_seg(space: Space, verts: &[V2]) -> Option<SegDesc> {
    if verts.len() < 2 {
        return None;
    }
    let p0 = verts[0];
    let p1 = *verts.last().unwrap();
    let d = geom::sub(p1, p0);
    let len = geom::norm(d);
    if len == 0.0 {
        return None;
    }
    let dir = geom::scale(d, 1.0 / len);
    let up = geom::perp(dir);
    for &v in verts {
        let rel = geom::sub(v, p0);
        if geom::dot(rel, up).abs() > 1e-9 * len.max(1.0) {
            return None;
        }
    }
    Some(SegDesc::new(space, p0, dir, len))
}

/// Reduce a straight pillowcase segment that crosses a branch point of the
/// double cover: points symmetric about the crossing are identified, so the
/// projected image is the longer half. Irrational-slope segments cross at
/// most one branch point; the loop guards degenerate rational setups.
pub fn fold_reduce(mut desc: SegDesc) -> SegDesc {
    debug_assert_eq!(desc.space, Space::Pillowcase);
    const TOL: f64 = 1e-9;
    for _ in 0..4 {
        let Some(t) = find_branch_crossing(&desc, TOL) else {
            return desc;
        };
        desc = if t >= desc.len / 2.0 {
            SegDesc { len: t, ..desc }
        } else {
            SegDesc {
                p0: desc.at(t),
                len: desc.len - t,
                ..desc
            }
        };
    }
    desc
}

/// Smallest interior parameter where the segment passes through a point of
/// the half-integer lattice, if any.
fn find_branch_crossing(desc: &SegDesc, tol: f64) -> Option<f64> {
    let d = desc.dir;
    let (axis, other) = if d[0].abs() >= d[1].abs() { (0, 1) } else { (1, 0) };
    let da = d[axis];
    if da.abs() < 1e-15 {
        return None;
    }
    let a0 = desc.p0[axis];
    let b0 = desc.p0[other];
    let (lo, hi) = {
        let e = desc.at(desc.len)[axis];
        (a0.min(e), a0.max(e))
    };
    let k_lo = (2.0 * lo - 1e-6).floor() as i64;
    let k_hi = (2.0 * hi + 1e-6).ceil() as i64;
    let mut best: Option<f64> = None;
    for k in k_lo..=k_hi {
        let t = (k as f64 / 2.0 - a0) / da;
        if t <= tol || t >= desc.len - tol {
            continue;
        }
        let o = b0 + t * d[other];
        if (2.0 * o - (2.0 * o).round()).abs() <= 2.0 * tol {
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continua::Continuum;
    use crate::metrics::hausdorff;
    use crate::spaces::dist;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn torus_sys() -> System {
        System::Torus(ToralAutomorphism::cat_map())
    }

    fn pillow_sys() -> System {
        System::Pillowcase(PillowcaseSystem {
            base: ToralAutomorphism::cat_map(),
        })
    }

    /// Random dyadic coordinates keep every matrix product exact in f64, so
    /// exactness assertions are meaningful.
    fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
        (rng.gen_range(0u32..(1 << 20)) as f64) / (1u64 << 20) as f64
    }

    #[test]
    fn cat_map_eigendata() {
        let f = ToralAutomorphism::cat_map();
        assert!((f.lambda_u() - (3.0 + 5.0f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((f.lambda_s() - (3.0 - 5.0f64.sqrt()) / 2.0).abs() < 1e-12);
        let ds = f.dir_s();
        assert!((ds[0] - 0.525731112119).abs() < 1e-9);
        assert!((ds[1] + 0.850650808352).abs() < 1e-9);
        // Slope of the stable direction is -(1+sqrt(5))/2.
        assert!((ds[1] / ds[0] + (1.0 + 5.0f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_hyperbolic_matrices_rejected() {
        assert!(ToralAutomorphism::new([[1, 1], [0, 1]]).is_err()); // parabolic
        assert!(ToralAutomorphism::new([[0, 1], [-1, 0]]).is_err()); // elliptic
        assert!(ToralAutomorphism::new([[2, 0], [0, 2]]).is_err()); // not unimodular
        assert!(ToralAutomorphism::new([[0, 1], [1, 0]]).is_err()); // |lambda| = 1
    }

    #[test]
    fn fixed_point_and_arithmetic() {
        let sys = torus_sys();
        let o = Space::Torus.point([0.0, 0.0]);
        assert_eq!(sys.apply(o, 1).unwrap().coords, [0.0, 0.0]);

        let p = Space::Torus.point([0.2, 0.3]);
        let fp = sys.apply(p, 1).unwrap();
        assert!(geom::dist(fp.coords, [0.7, 0.5]) < 1e-12);

        let back = sys.apply(fp, -1).unwrap();
        assert!(geom::dist(back.coords, [0.2, 0.3]) < 1e-12);
    }

    #[test]
    fn inverse_matrix_is_adjugate() {
        let f = ToralAutomorphism::cat_map();
        assert_eq!(f.inverse_matrix(), [[1, -1], [-1, 2]]);
    }

    #[test]
    fn stable_arc_shrinks_forward_grows_backward() {
        let sys = torus_sys();
        let x = Space::Torus.point([0.1, 0.2]);
        let a = sys.stable_arc(x, 0.1, 0.01).unwrap();
        let lu = sys.auto().lambda_u();

        let fwd = sys.iterate_arc(&a, 1, 0.01).unwrap();
        assert!((fwd.len() - 0.1 * sys.auto().lambda_s()).abs() < 1e-9);

        let back = sys.iterate_arc(&a, -1, 0.01).unwrap();
        assert!((back.len() - 0.1 * lu).abs() < 1e-9);
        assert!((0.1 * lu - 0.261803398875).abs() < 1e-9);

        // Unstable arcs stretch forward by the same factor.
        let u = sys.unstable_arc(x, 0.1, 0.01).unwrap();
        let ufwd = sys.iterate_arc(&u, 1, 0.01).unwrap();
        assert!((ufwd.len() - 0.1 * lu).abs() < 1e-9);
    }

    #[test]
    fn iterate_zero_is_resample_only() {
        let sys = torus_sys();
        let a = sys
            .stable_arc(Space::Torus.point([0.3, 0.4]), 0.2, 0.05)
            .unwrap();
        let b = sys.iterate_arc(&a, 0, 0.01).unwrap();
        assert!((a.len() - b.len()).abs() < 1e-12);
        assert!(b.verts().len() >= a.verts().len());
    }

    #[test]
    fn precision_budget_refused() {
        let sys = torus_sys();
        let a = sys
            .stable_arc(Space::Torus.point([0.1, 0.2]), 0.05, 0.01)
            .unwrap();
        let err = sys.iterate_arc(&a, -60, 0.01);
        assert!(matches!(err, Err(Error::PrecisionBudget(_))));
    }

    #[test]
    fn translate_preserves_length_and_hausdorff_bound_on_torus() {
        let sys = torus_sys();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let x = Space::Torus.point([rng.gen(), rng.gen()]);
            let y = Space::Torus.point([rng.gen(), rng.gen()]);
            let a = sys.stable_arc(x, 0.3, 0.01).unwrap();
            let b = sys.translate_arc(&a, x, y).unwrap();
            assert!((a.len() - b.len()).abs() < 1e-12);
            let d = hausdorff(&Continuum::Arc(a), &Continuum::Arc(b.clone())).unwrap();
            let dxy = dist(x, y).unwrap();
            assert!(
                d.value <= dxy + d.slack + 1e-12,
                "d_H {} vs dist {}",
                d.value,
                dxy
            );
        }
    }

    #[test]
    fn pillowcase_translate_through_cone_point_shortens() {
        let sys = pillow_sys();
        let x = Space::Pillowcase.point([0.21, 0.34]);
        let y = Space::Pillowcase.point([0.0, 0.0]); // cone point
        let a = sys.stable_arc(x, 0.2, 0.01).unwrap();
        assert!((a.len() - 0.2).abs() < 1e-9);
        let b = sys.translate_arc(&a, x, y).unwrap();
        // The arc now passes straight through the branch point and folds in
        // half.
        assert!((b.len() - 0.1).abs() < 1e-9, "len {}", b.len());
        assert!(b.len() <= a.len() + 1e-12);
    }

    #[test]
    fn pillowcase_equivariance_on_dyadic_points() {
        let sys = pillow_sys();
        let torus = torus_sys();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..1000 {
            let c = [dyadic(&mut rng), dyadic(&mut rng)];
            let p = Space::Torus.point(c);
            // Project after mapping on the torus.
            let lhs = Space::Pillowcase.point(torus.apply(p, 1).unwrap().coords);
            // Map the projected class; dyadic coordinates make both the
            // involution and the matrix products exact, so the canonical
            // coordinates agree bit for bit.
            let q = Space::Pillowcase.point(c);
            let rhs = sys.apply(q, 1).unwrap();
            assert_eq!(lhs.coords, rhs.coords);
        }
    }

    #[test]
    fn hyperbolic_separation_rates() {
        let sys = torus_sys();
        let f = sys.auto();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let n = 6;
        let rate = f.lambda_u().powi(n);
        for _ in 0..100 {
            let p = Space::Torus.point([rng.gen(), rng.gen()]);
            let eps = 1e-6;
            for (dir, grows) in [(f.dir_u(), true), (f.dir_s(), false)] {
                let q = Space::Torus.point(geom::add(p.coords, geom::scale(dir, eps)));
                let steps = if grows { n as i64 } else { -(n as i64) };
                let fp = sys.apply(p, steps).unwrap();
                let fq = sys.apply(q, steps).unwrap();
                let d = dist(fp, fq).unwrap();
                let expected = eps * rate;
                assert!(
                    (d / expected - 1.0).abs() < 0.10,
                    "rate off: {d} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn random_arcs_are_cw_expanded_within_six_iterates() {
        // K = ceil(log(100)/log(lambda_u)) + 1 = 6 is enough to push any
        // arc of diameter >= 1e-3 past delta = 0.1 forward or backward.
        let sys = torus_sys();
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let delta = 0.1;
        for _ in 0..50 {
            let c: V2 = [rng.gen(), rng.gen()];
            let dir = {
                let ang = rng.gen::<f64>() * std::f64::consts::TAU;
                [ang.cos(), ang.sin()]
            };
            let r = 5e-4 + rng.gen::<f64>() * 5e-3;
            let a = PolylineArc::new(
                Space::Torus,
                vec![geom::sub(c, geom::scale(dir, r)), geom::add(c, geom::scale(dir, r))],
                0.2,
            )
            .unwrap();
            assert!(a.diameter().value >= 1e-3 || 2.0 * r < 1e-3);
            let mut expanded = false;
            for n in 1..=6i64 {
                for sign in [1, -1] {
                    let it = sys.iterate_arc(&a, sign * n, 0.05).unwrap();
                    if it.diameter_exceeds(delta) {
                        expanded = true;
                        break;
                    }
                }
                if expanded {
                    break;
                }
            }
            assert!(expanded, "arc of diameter {} never expanded", 2.0 * r);
        }
    }
}
