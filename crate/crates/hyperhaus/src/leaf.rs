//! Exact distance kernels for straight leaf segments and circle arcs.
//!
//! Stable and unstable arcs of a linear toral automorphism are straight
//! segments in the lift with a fixed irrational direction, so distances
//! between them reduce to one-dimensional envelope computations over the
//! finitely many lattice translates that can matter. These kernels return
//! set-level values (no sampling error) and are checked against the sampled
//! engine in tests; the experiment drivers use them where the sampled engine
//! would be too slow.

use crate::continua::PolylineArc;
use crate::geom::{self, V2};
use crate::metrics::BucketGrid;
use crate::spaces::Space;
use crate::Result;

/// A straight segment in the universal cover of the torus or pillowcase.
/// The projected set is the segment's image, which on the pillowcase may
/// fold through a branch point; the kernels below are insensitive to that.
#[derive(Debug, Clone, Copy)]
pub struct SegDesc {
    pub space: Space,
    pub p0: V2,
    pub dir: V2,
    pub len: f64,
}

impl SegDesc {
    pub fn new(space: Space, p0: V2, dir: V2, len: f64) -> SegDesc {
        debug_assert!(matches!(space, Space::Torus | Space::Pillowcase));
        debug_assert!((geom::norm(dir) - 1.0).abs() < 1e-9);
        SegDesc { space, p0, dir, len }
    }

    pub fn from_center(space: Space, center: V2, dir: V2, len: f64) -> SegDesc {
        SegDesc::new(space, geom::sub(center, geom::scale(dir, len / 2.0)), dir, len)
    }

    pub fn end(&self) -> V2 {
        geom::add(self.p0, geom::scale(self.dir, self.len))
    }

    pub fn at(&self, t: f64) -> V2 {
        geom::add(self.p0, geom::scale(self.dir, t))
    }

    pub fn midpoint(&self) -> V2 {
        self.at(self.len / 2.0)
    }

    /// The lift segment of the involution image (pillowcase alias),
    /// reparameterized to run along `dir`.
    pub fn negated(&self) -> SegDesc {
        SegDesc {
            space: self.space,
            p0: geom::neg(self.end()),
            dir: self.dir,
            len: self.len,
        }
    }

    /// Materialize as a polyline at the given gauge.
    pub fn to_arc(&self, gauge: f64) -> Result<PolylineArc> {
        PolylineArc::new(self.space, vec![self.p0, self.end()], gauge)
    }
}

/// One lattice translate of the target segment, seen from the source
/// parameterization: distance is `sqrt(beta^2 + excess(t, lo, hi)^2)`.
#[derive(Debug, Clone, Copy)]
struct Trough {
    beta2: f64,
    lo: f64,
    hi: f64,
}

/// Collect the translates of `b` that can come within `cap` of the segment
/// `a` parameterized over `t in [0, a.len]`.
fn collect_troughs(a: &SegDesc, b: &SegDesc, cap: f64, out: &mut Vec<Trough>) {
    let u = a.dir;
    let up = geom::perp(u);
    let d0 = geom::sub(a.p0, b.p0);
    let beta0 = geom::dot(d0, up);
    let c0 = geom::dot(d0, u);

    // k ranges over integer vectors with |k.up - beta0| <= cap and
    // k.u - c0 in [-b.len - cap, a.len + cap].
    let span_perp = beta0.abs() + cap + 1.0;
    let span_along = c0.abs() + a.len + b.len + cap + 1.0;
    let r = span_perp.hypot(span_along).ceil() as i64;

    // Solve the perpendicular strip along whichever axis has the larger
    // coefficient, iterating the other.
    let (iter_x, c_outer, c_inner) = if up[1].abs() >= up[0].abs() {
        (true, up[0], up[1])
    } else {
        (false, up[1], up[0])
    };
    for m in -r..=r {
        // beta(k) = beta0 - (m*c_outer + n*c_inner); want |beta| <= cap.
        let rhs_lo = (beta0 - cap) - m as f64 * c_outer;
        let rhs_hi = (beta0 + cap) - m as f64 * c_outer;
        let (mut nlo, mut nhi) = (rhs_lo / c_inner, rhs_hi / c_inner);
        if nlo > nhi {
            std::mem::swap(&mut nlo, &mut nhi);
        }
        let n0 = nlo.floor() as i64;
        let n1 = nhi.ceil() as i64;
        for n in n0..=n1 {
            if n < -r || n > r {
                continue;
            }
            let k = if iter_x {
                [m as f64, n as f64]
            } else {
                [n as f64, m as f64]
            };
            let beta = beta0 - geom::dot(k, up);
            if beta.abs() > cap {
                continue;
            }
            let c = c0 - geom::dot(k, u);
            // Flat interval of this translate in t; gap is the distance
            // between that interval and [0, a.len].
            let (lo, hi) = (-c, b.len - c);
            let gap = if hi < 0.0 {
                -hi
            } else if lo > a.len {
                lo - a.len
            } else {
                0.0
            };
            if beta * beta + gap * gap > cap * cap + 1e-15 {
                continue;
            }
            out.push(Trough {
                beta2: beta * beta,
                lo,
                hi,
            });
        }
    }
}

fn trough_value(tr: &Trough, t: f64) -> f64 {
    let e = geom::excess(t, tr.lo, tr.hi);
    (tr.beta2 + e * e).sqrt()
}

/// Max over `t in [0, la]` of the lower envelope of the troughs.
fn envelope_max(troughs: &[Trough], la: f64) -> f64 {
    let phi = |t: f64| -> f64 {
        troughs
            .iter()
            .map(|tr| trough_value(tr, t))
            .fold(f64::INFINITY, f64::min)
    };
    let mut cands: Vec<f64> = vec![0.0, la];
    for tr in troughs {
        if tr.lo > 0.0 && tr.lo < la {
            cands.push(tr.lo);
        }
        if tr.hi > 0.0 && tr.hi < la {
            cands.push(tr.hi);
        }
    }
    // Pairwise branch crossings; local maxima of the envelope sit where the
    // active trough switches. Every non-flat branch has squared form
    // beta^2 + (t - e)^2 with e a flat edge, so each edge pairing yields one
    // linear equation.
    fn push_cand(cands: &mut Vec<f64>, la: f64, t: f64) {
        if t.is_finite() && t > 0.0 && t < la {
            cands.push(t);
        }
    }
    fn cross(cands: &mut Vec<f64>, la: f64, ea: f64, b2a: f64, eb: f64, b2b: f64) {
        let denom = 2.0 * (eb - ea);
        if denom.abs() > 1e-300 {
            push_cand(cands, la, (b2b - b2a + eb * eb - ea * ea) / denom);
        }
    }
    let n = troughs.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&troughs[i], &troughs[j]);
            cross(&mut cands, la, a.hi, a.beta2, b.hi, b.beta2);
            cross(&mut cands, la, a.hi, a.beta2, b.lo, b.beta2);
            cross(&mut cands, la, a.lo, a.beta2, b.hi, b.beta2);
            cross(&mut cands, la, a.lo, a.beta2, b.lo, b.beta2);
            // Flat of one against branches of the other.
            for (flat, other) in [(a, b), (b, a)] {
                let d2 = flat.beta2 - other.beta2;
                if d2 >= 0.0 {
                    let s = d2.sqrt();
                    push_cand(&mut cands, la, other.hi + s);
                    push_cand(&mut cands, la, other.lo - s);
                }
            }
        }
    }
    let mut best = 0.0f64;
    for &t in &cands {
        let v = phi(t);
        if v > best {
            best = v;
        }
    }
    best
}

/// One-sided exact Hausdorff distance from segment `a` to segment `b`
/// (parallel directions required; both on the same space).
pub fn seg_directed(a: &SegDesc, b: &SegDesc) -> f64 {
    debug_assert_eq!(a.space, b.space);
    debug_assert!(
        geom::dot(a.dir, geom::perp(b.dir)).abs() < 1e-9,
        "leaf kernel needs parallel segments"
    );
    // Align orientations.
    let b = if geom::dot(a.dir, b.dir) < 0.0 {
        SegDesc {
            space: b.space,
            p0: b.end(),
            dir: geom::neg(b.dir),
            len: b.len,
        }
    } else {
        *b
    };
    let b = SegDesc { dir: a.dir, ..b };

    // Upper bound from the midpoint-aligned translate (and the involution
    // alias on the pillowcase).
    let single_cap = |bb: &SegDesc| -> f64 {
        let delta = geom::sub(a.midpoint(), bb.midpoint());
        let k = [delta[0].round(), delta[1].round()];
        let d0 = geom::sub(geom::sub(a.p0, bb.p0), k);
        let beta = geom::dot(d0, geom::perp(a.dir));
        let c = geom::dot(d0, a.dir);
        let (lo, hi) = (-c, bb.len - c);
        let e0 = geom::excess(0.0, lo, hi);
        let e1 = geom::excess(a.len, lo, hi);
        (beta * beta + e0.max(e1).powi(2)).sqrt()
    };
    let mut cap = single_cap(&b);
    let aliases: Vec<SegDesc> = if a.space == Space::Pillowcase {
        let nb = b.negated();
        cap = cap.min(single_cap(&nb));
        vec![b, nb]
    } else {
        vec![b]
    };
    let mut troughs = Vec::new();
    for bb in &aliases {
        collect_troughs(a, bb, cap + 1e-12, &mut troughs);
    }
    debug_assert!(!troughs.is_empty());
    envelope_max(&troughs, a.len)
}

/// Exact Hausdorff distance between two parallel leaf segments.
pub fn seg_hausdorff(a: &SegDesc, b: &SegDesc) -> f64 {
    seg_directed(a, b).max(seg_directed(b, a))
}

/// A leaf segment with its gauge-spaced samples, projections, grid bucket
/// and arc positions; the workhorse representation for long iterated arcs.
pub struct SampledSeg {
    pub desc: SegDesc,
    pub h: f64,
    pub lifts: Vec<V2>,
    pub proj: Vec<V2>,
    pub grid: BucketGrid,
}

impl SampledSeg {
    pub fn build(desc: SegDesc, h: f64, cell: f64) -> SampledSeg {
        let n = ((desc.len / h) - 1e-9).ceil().max(1.0) as usize;
        let mut lifts = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = desc.len * i as f64 / n as f64;
            lifts.push(desc.at(t));
        }
        if desc.len == 0.0 {
            lifts.truncate(1);
        }
        let proj: Vec<V2> = lifts.iter().map(|&v| desc.space.canonicalize(v)).collect();
        let grid = BucketGrid::build(desc.space, &proj, cell);
        SampledSeg {
            desc,
            h,
            lifts,
            proj,
            grid,
        }
    }

    /// Arc position of sample `i`.
    pub fn t_of(&self, i: usize) -> f64 {
        if self.lifts.len() <= 1 {
            0.0
        } else {
            self.desc.len * i as f64 / (self.lifts.len() - 1) as f64
        }
    }

    /// Exact distance from a canonical point to the projected segment set,
    /// with the arc position of the foot. Resolves the sampled nearest hit
    /// to the continuous segment by refining every sample that could be
    /// adjacent to the true foot.
    pub fn nearest_exact(&self, p: V2) -> (f64, f64) {
        let space = self.desc.space;
        let rough = self.grid.nearest(p, -1.0);
        let radius = rough.dist + self.h / 2.0 + 1e-12;
        let cands = self.grid.within(p, radius);
        let mut best = rough.dist;
        let mut best_t = self.t_of(rough.index);
        if self.lifts.len() == 1 {
            return (best, best_t);
        }
        for i in cands {
            // Refine the segments adjacent to the candidate sample.
            for seg_i in [i.saturating_sub(1), i.min(self.lifts.len() - 2)] {
                let (d, tt) = self.refine_segment(p, seg_i);
                if d < best {
                    best = d;
                    best_t = tt;
                }
            }
        }
        (best, best_t)
    }

    /// Exact point-to-lift-segment distance for the piece between samples
    /// `i` and `i+1`, over the relevant lattice translates (and involution
    /// aliases on the pillowcase).
    fn refine_segment(&self, p: V2, i: usize) -> (f64, f64) {
        if self.lifts.len() == 1 {
            let d = self.desc.space.dist_coords(p, self.proj[0]);
            return (d, 0.0);
        }
        let i = i.min(self.lifts.len() - 2);
        let a = self.lifts[i];
        let b = self.lifts[i + 1];
        let mut best = f64::INFINITY;
        let mut best_t = self.t_of(i);
        let mut try_pair = |a: V2, b: V2, t0: f64, t1: f64| {
            // Bring p's lattice class next to the piece midpoint.
            let mid = geom::scale(geom::add(a, b), 0.5);
            let q = [
                p[0] + (mid[0] - p[0]).round(),
                p[1] + (mid[1] - p[1]).round(),
            ];
            // Check the 3x3 translates around it; the piece is shorter than
            // the gauge so that is exhaustive.
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let qq = [q[0] + dx as f64, q[1] + dy as f64];
                    let seg = geom::sub(b, a);
                    let l2 = geom::dot(seg, seg);
                    let t = if l2 > 0.0 {
                        (geom::dot(geom::sub(qq, a), seg) / l2).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    let foot = geom::lerp(a, b, t);
                    let d = geom::dist(qq, foot);
                    if d < best {
                        best = d;
                        best_t = t0 + (t1 - t0) * t;
                    }
                }
            }
        };
        let (t0, t1) = (self.t_of(i), self.t_of(i + 1));
        try_pair(a, b, t0, t1);
        if self.desc.space == Space::Pillowcase {
            try_pair(geom::neg(a), geom::neg(b), t0, t1);
        }
        (best, best_t)
    }

    /// Exact directed distance from a point set to this segment.
    pub fn directed_from(&self, pts: &[V2]) -> f64 {
        let mut worst = 0.0f64;
        for &p in pts {
            // Quick sampled reject: the exact distance can only be smaller.
            let rough = self.grid.nearest(p, worst);
            if rough.aborted || rough.dist <= worst {
                continue;
            }
            let (d, _) = self.nearest_exact(p);
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// Certified upper bound for the covering radius of a segment: the exact
/// directed distance from an ambient `m x m` sample plus the sample's own
/// covering gauge.
pub fn covering_radius_bound(desc: &SegDesc, h: f64, m: usize) -> f64 {
    let s = crate::continua::SampledContinuum::ambient(desc.space, m).expect("ambient sample");
    let seg = SampledSeg::build(*desc, h, 0.02_f64.max(h));
    seg.directed_from(s.points()) + s.gauge()
}

// ---------------------------------------------------------------------------
// Circle arcs
// ---------------------------------------------------------------------------

/// An arc of the unit-circumference circle: `[start, start + len]` mod 1.
/// `len = 1` is the full circle (as a set).
#[derive(Debug, Clone, Copy)]
pub struct CircArcDesc {
    pub start: f64,
    pub len: f64,
}

impl CircArcDesc {
    pub fn to_arc(&self, gauge: f64) -> Result<PolylineArc> {
        PolylineArc::new(
            Space::Circle,
            vec![[self.start, 0.0], [self.start + self.len, 0.0]],
            gauge,
        )
    }
}

/// Distance from a circle point to an arc.
pub fn point_to_circ_arc(x: f64, arc: &CircArcDesc) -> f64 {
    if arc.len >= 1.0 {
        return 0.0;
    }
    let off = geom::wrap01(x - arc.start);
    if off <= arc.len {
        0.0
    } else {
        (off - arc.len).min(1.0 - off)
    }
}

/// Exact one-sided Hausdorff distance between circle arcs.
pub fn circ_directed(a: &CircArcDesc, b: &CircArcDesc) -> f64 {
    if b.len >= 1.0 {
        return 0.0;
    }
    if a.len >= 1.0 {
        return (1.0 - b.len) / 2.0;
    }
    let mut worst = point_to_circ_arc(a.start, b).max(point_to_circ_arc(a.start + a.len, b));
    // The global maximum of dist(., b) sits antipodal to b's midpoint.
    let far = b.start + b.len / 2.0 + 0.5;
    let off = geom::wrap01(far - a.start);
    if off <= a.len {
        worst = worst.max((1.0 - b.len) / 2.0);
    }
    worst
}

/// Exact Hausdorff distance between circle arcs.
pub fn circ_hausdorff(a: &CircArcDesc, b: &CircArcDesc) -> f64 {
    circ_directed(a, b).max(circ_directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continua::Continuum;
    use crate::metrics::hausdorff;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const DIR_S: V2 = [0.5257311121191336, -0.8506508083520399];

    #[test]
    fn parallel_segments_match_sampled_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = 0.002;
        for space in [Space::Torus, Space::Pillowcase] {
            for _ in 0..40 {
                let a = SegDesc::from_center(
                    space,
                    [rng.gen::<f64>(), rng.gen::<f64>()],
                    DIR_S,
                    rng.gen::<f64>() * 2.0,
                );
                let b = SegDesc::from_center(
                    space,
                    [rng.gen::<f64>(), rng.gen::<f64>()],
                    DIR_S,
                    rng.gen::<f64>() * 2.0,
                );
                let exact = seg_hausdorff(&a, &b);
                let ca = Continuum::Arc(a.to_arc(h).unwrap());
                let cb = Continuum::Arc(b.to_arc(h).unwrap());
                let sampled = hausdorff(&ca, &cb).unwrap();
                assert!(
                    (exact - sampled.value).abs() <= 1.5 * h + 1e-9,
                    "{space}: exact {exact} vs sampled {} (len {} {})",
                    sampled.value,
                    a.len,
                    b.len
                );
            }
        }
    }

    #[test]
    fn cocentered_segments_differ_by_half_length_gap() {
        let c = [0.37, 0.21];
        let a = SegDesc::from_center(Space::Torus, c, DIR_S, 0.30);
        let b = SegDesc::from_center(Space::Torus, c, DIR_S, 0.20);
        let d = seg_hausdorff(&a, &b);
        assert!((d - 0.05).abs() < 1e-12, "{d}");
    }

    #[test]
    fn point_to_segment_matches_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for space in [Space::Torus, Space::Pillowcase] {
            let desc = SegDesc::from_center(space, [0.4, 0.6], DIR_S, 3.0);
            let seg = SampledSeg::build(desc, 0.005, 0.02);
            for _ in 0..100 {
                let p = space.canonicalize([rng.gen::<f64>(), rng.gen::<f64>()]);
                let (d, _) = seg.nearest_exact(p);
                // Brute force over a fine sampling of the segment.
                let mut brute = f64::INFINITY;
                let steps = 6000;
                for i in 0..=steps {
                    let q = space.canonicalize(desc.at(desc.len * i as f64 / steps as f64));
                    brute = brute.min(space.dist_coords(p, q));
                }
                assert!(
                    d <= brute + 1e-9 && brute <= d + desc.len / steps as f64,
                    "{space}: exact {d} vs brute {brute}"
                );
            }
        }
    }

    #[test]
    fn circle_arc_formulas_match_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let h = 0.002;
        for _ in 0..60 {
            let a = CircArcDesc {
                start: rng.gen(),
                len: rng.gen::<f64>(),
            };
            let b = CircArcDesc {
                start: rng.gen(),
                len: rng.gen::<f64>(),
            };
            let exact = circ_hausdorff(&a, &b);
            let ca = Continuum::Arc(a.to_arc(h).unwrap());
            let cb = Continuum::Arc(b.to_arc(h).unwrap());
            let sampled = hausdorff(&ca, &cb).unwrap().value;
            assert!(
                (exact - sampled).abs() <= 1.5 * h + 1e-9,
                "exact {exact} vs sampled {sampled} (a={a:?}, b={b:?})"
            );
        }
    }

    #[test]
    fn full_circle_versus_arc() {
        let full = CircArcDesc { start: 0.3, len: 1.0 };
        let arc = CircArcDesc {
            start: 0.0,
            len: 0.875,
        };
        // Farthest point is antipodal to the arc midpoint.
        let d = circ_hausdorff(&full, &arc);
        assert!((d - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn covering_radius_shrinks_with_length() {
        let mk = |len: f64| SegDesc::from_center(Space::Torus, [0.3, 0.4], DIR_S, len);
        let r4 = covering_radius_bound(&mk(4.0), 0.01, 64);
        let r16 = covering_radius_bound(&mk(16.0), 0.01, 64);
        assert!(r16 < r4);
        assert!(r16 < 0.08, "{r16}");
    }
}
