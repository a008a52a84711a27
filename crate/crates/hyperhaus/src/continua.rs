//! Discretized continua: polyline arcs carried in the universal cover, plus
//! plain point samples for continua that are not arcs (such as the ambient
//! space itself).
//!
//! Arcs live in the cover (the plane for torus/pillowcase, the line for the
//! circle, `[0,1]` for the interval) and are projected on demand. Iterating
//! by an integer matrix is then exact and wrap-around artifacts cannot occur.
//! Consecutive lifted vertices are kept within the sampling gauge `h`, and
//! the gauge is capped at 0.25 so that single segments project isometrically
//! (below the injectivity radius of the closed spaces).

use crate::geom::{self, V2};
use crate::metrics::ErrorBudget;
use crate::spaces::Space;
use crate::{Error, Result};

/// Hard ceiling on the sampling gauge; segments this short project
/// isometrically on every model space.
pub const MAX_GAUGE: f64 = 0.25;

/// Relative tolerance used when validating vertex gaps against the gauge.
const GAP_TOL: f64 = 1e-9;

/// An arc sampled as a polyline in the universal cover.
#[derive(Debug, Clone)]
pub struct PolylineArc {
    space: Space,
    verts: Vec<V2>,
    proj: Vec<V2>,
    cum: Vec<f64>,
    gauge: f64,
    closed: bool,
}

impl PolylineArc {
    /// Build an arc from lift vertices, splitting any segment longer than the
    /// gauge into even pieces.
    pub fn new(space: Space, verts: Vec<V2>, gauge: f64) -> Result<Self> {
        Self::build(space, verts, gauge, false)
    }

    /// Build a closed loop; the first and last vertex must project to the
    /// same point (their lift difference must be an integer vector).
    pub fn new_closed(space: Space, verts: Vec<V2>, gauge: f64) -> Result<Self> {
        Self::build(space, verts, gauge, true)
    }

    fn build(space: Space, verts: Vec<V2>, gauge: f64, closed: bool) -> Result<Self> {
        if verts.is_empty() {
            return Err(Error::usage("an arc needs at least one vertex"));
        }
        if !(gauge > 0.0 && gauge <= MAX_GAUGE) {
            return Err(Error::usage(format!(
                "gauge must lie in (0, {MAX_GAUGE}], got {gauge}"
            )));
        }
        if space.dim() == 1 {
            for v in &verts {
                if v[1] != 0.0 {
                    return Err(Error::usage(
                        "1-dimensional spaces use the first coordinate only; second must be 0",
                    ));
                }
            }
        }
        if space == Space::Interval {
            for v in &verts {
                if !(-1e-9..=1.0 + 1e-9).contains(&v[0]) {
                    return Err(Error::usage("interval lift coordinates must stay in [0,1]"));
                }
            }
        }
        if closed {
            let a = verts[0];
            let b = *verts.last().unwrap();
            let frac = [a[0] - b[0] - (a[0] - b[0]).round(), a[1] - b[1] - (a[1] - b[1]).round()];
            if geom::norm(frac) > 1e-9 {
                return Err(Error::usage(
                    "closed arcs must end where they start (up to an integer lift translate)",
                ));
            }
        }

        // Split long segments so consecutive vertices stay within the gauge.
        let mut out = Vec::with_capacity(verts.len());
        out.push(verts[0]);
        for w in verts.windows(2) {
            let seg = geom::dist(w[0], w[1]);
            let k = ((seg / gauge) - GAP_TOL).ceil().max(1.0) as usize;
            for i in 1..=k {
                out.push(geom::lerp(w[0], w[1], i as f64 / k as f64));
            }
        }

        let mut cum = Vec::with_capacity(out.len());
        let mut total = 0.0;
        cum.push(0.0);
        for w in out.windows(2) {
            total += geom::dist(w[0], w[1]);
            cum.push(total);
        }
        let proj = out.iter().map(|&v| space.canonicalize(v)).collect();
        Ok(PolylineArc {
            space,
            verts: out,
            proj,
            cum,
            gauge,
            closed,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    /// Lift vertices.
    pub fn verts(&self) -> &[V2] {
        &self.verts
    }

    /// Canonical projections of the lift vertices; these are the samples all
    /// metric computations consume.
    pub fn samples(&self) -> &[V2] {
        &self.proj
    }

    /// Cumulative lift length per vertex (`cum[0] = 0`).
    pub fn cum(&self) -> &[f64] {
        &self.cum
    }

    /// Total lift length.
    pub fn len(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn is_singleton(&self) -> bool {
        self.verts.len() == 1
    }

    /// Lift point at arc-length parameter `s` (clamped to `[0, len]`).
    pub fn point_at(&self, s: f64) -> V2 {
        let s = s.clamp(0.0, self.len());
        // Index of the first vertex with cum >= s.
        let idx = self.cum.partition_point(|&c| c < s);
        if idx == 0 {
            return self.verts[0];
        }
        let (c0, c1) = (self.cum[idx - 1], self.cum[idx]);
        if c1 - c0 <= 0.0 {
            return self.verts[idx];
        }
        geom::lerp(self.verts[idx - 1], self.verts[idx], (s - c0) / (c1 - c0))
    }

    /// Arc-length restriction to `[s, t]`, endpoints interpolated on their
    /// segments, interior vertices kept, gauge preserved.
    pub fn subarc(&self, s: f64, t: f64) -> Result<PolylineArc> {
        let len = self.len();
        if !((-1e-9..=len + 1e-9).contains(&s) && s <= t + 1e-12 && t <= len + 1e-9) {
            return Err(Error::usage(format!(
                "subarc parameters must satisfy 0 <= s <= t <= len, got s={s}, t={t}, len={len}"
            )));
        }
        let s = s.clamp(0.0, len);
        let t = t.clamp(0.0, len);
        if t - s <= 1e-15 {
            return Self::build(self.space, vec![self.point_at(s)], self.gauge, false);
        }
        let mut verts = vec![self.point_at(s)];
        let lo = self.cum.partition_point(|&c| c <= s + 1e-12);
        let hi = self.cum.partition_point(|&c| c < t - 1e-12);
        verts.extend_from_slice(&self.verts[lo..hi]);
        verts.push(self.point_at(t));
        Self::build(self.space, verts, self.gauge, false)
    }

    /// Subarc of a closed loop starting at parameter `start` with the given
    /// length, wrapping through the seam when needed.
    pub fn subarc_wrapped(&self, start: f64, length: f64) -> Result<PolylineArc> {
        if !self.closed {
            return self.subarc(start, start + length);
        }
        let total = self.len();
        if length > total + 1e-9 {
            return Err(Error::usage("wrapped subarc longer than the loop"));
        }
        let start = start.rem_euclid(total);
        if start + length <= total + 1e-12 {
            return self.subarc(start, (start + length).min(total));
        }
        let first = self.subarc(start, total)?;
        let second = self.subarc(0.0, start + length - total)?;
        // The loop's lift may close up only modulo a lattice vector; shift the
        // wrapped piece so the concatenation is continuous.
        let shift = geom::sub(*self.verts.last().unwrap(), self.verts[0]);
        let mut verts = first.verts;
        for v in &second.verts[1..] {
            verts.push(geom::add(*v, shift));
        }
        Self::build(self.space, verts, self.gauge, false)
    }

    /// Same underlying curve with all consecutive gaps at most `h`. Original
    /// vertices are kept, so resampling is idempotent.
    pub fn resample(&self, h: f64) -> Result<PolylineArc> {
        if !(h > 0.0 && h <= MAX_GAUGE) {
            return Err(Error::usage(format!(
                "resample gauge must lie in (0, {MAX_GAUGE}], got {h}"
            )));
        }
        Self::build(self.space, self.verts.clone(), h, self.closed)
    }

    /// Sampled diameter with its gauge error budget.
    pub fn diameter(&self) -> ErrorBudget {
        diameter_of(self.space, &self.proj, self.gauge)
    }

    /// True as soon as two samples are farther apart than `threshold`.
    pub fn diameter_exceeds(&self, threshold: f64) -> bool {
        let pts = &self.proj;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if self.space.dist_coords(pts[i], pts[j]) > threshold {
                    return true;
                }
            }
        }
        false
    }

    /// Serialize as `t,x,y` CSV rows over the lift (header included).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y\n");
        for (i, v) in self.verts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.cum[i], v[0], v[1]));
        }
        out
    }

    /// Parse a `t,x,y` CSV produced by [`PolylineArc::to_csv`].
    pub fn from_csv(space: Space, gauge: f64, text: &str) -> Result<PolylineArc> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "t,x,y" => {}
            _ => return Err(Error::Parse("arc CSV must start with header `t,x,y`".into())),
        }
        let mut verts = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let mut field = |name: &str| -> Result<f64> {
                cols.next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing {name}", lineno + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
            };
            let _t = field("t")?;
            let x = field("x")?;
            let y = field("y")?;
            verts.push([x, y]);
        }
        PolylineArc::new(space, verts, gauge)
    }
}

/// A finite sample of a continuum that is not an arc, e.g. the ambient space.
/// `gauge` bounds the covering radius: every point of the intended continuum
/// lies within `gauge` of some sample point.
#[derive(Debug, Clone)]
pub struct SampledContinuum {
    space: Space,
    points: Vec<V2>,
    gauge: f64,
}

impl SampledContinuum {
    pub fn new(space: Space, points: Vec<V2>, gauge: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::usage("a sampled continuum needs at least one point"));
        }
        if gauge < 0.0 {
            return Err(Error::usage("gauge must be nonnegative"));
        }
        let points = points.into_iter().map(|p| space.canonicalize(p)).collect();
        Ok(SampledContinuum {
            space,
            points,
            gauge,
        })
    }

    /// Uniform sample of the whole space with `per_axis` points per axis and
    /// the matching covering-radius gauge.
    pub fn ambient(space: Space, per_axis: usize) -> Result<Self> {
        if per_axis == 0 {
            return Err(Error::usage("ambient sample needs at least one point per axis"));
        }
        let m = per_axis as f64;
        let (points, gauge) = match space {
            Space::Interval => {
                let pts = (0..=per_axis).map(|i| [i as f64 / m, 0.0]).collect();
                (pts, 0.5 / m)
            }
            Space::Circle => {
                let pts = (0..per_axis).map(|i| [i as f64 / m, 0.0]).collect();
                (pts, 0.5 / m)
            }
            Space::Torus | Space::Pillowcase => {
                let mut pts = Vec::with_capacity(per_axis * per_axis);
                for i in 0..per_axis {
                    for j in 0..per_axis {
                        let p = space.canonicalize([i as f64 / m, j as f64 / m]);
                        pts.push(p);
                    }
                }
                if space == Space::Pillowcase {
                    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    pts.dedup();
                }
                (pts, std::f64::consts::SQRT_2 / (2.0 * m))
            }
        };
        SampledContinuum::new(space, points, gauge)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn points(&self) -> &[V2] {
        &self.points
    }

    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    pub fn diameter(&self) -> ErrorBudget {
        diameter_of(self.space, &self.points, self.gauge)
    }
}

/// Either kind of discretized continuum; the common currency of the metric
/// layer.
#[derive(Debug, Clone)]
pub enum Continuum {
    Arc(PolylineArc),
    Points(SampledContinuum),
}

impl Continuum {
    pub fn space(&self) -> Space {
        match self {
            Continuum::Arc(a) => a.space(),
            Continuum::Points(s) => s.space(),
        }
    }

    pub fn samples(&self) -> &[V2] {
        match self {
            Continuum::Arc(a) => a.samples(),
            Continuum::Points(s) => s.points(),
        }
    }

    pub fn gauge(&self) -> f64 {
        match self {
            Continuum::Arc(a) => a.gauge(),
            Continuum::Points(s) => s.gauge(),
        }
    }

    pub fn diameter(&self) -> ErrorBudget {
        diameter_of(self.space(), self.samples(), self.gauge())
    }
}

impl From<PolylineArc> for Continuum {
    fn from(a: PolylineArc) -> Self {
        Continuum::Arc(a)
    }
}

impl From<SampledContinuum> for Continuum {
    fn from(s: SampledContinuum) -> Self {
        Continuum::Points(s)
    }
}

fn diameter_of(space: Space, pts: &[V2], gauge: f64) -> ErrorBudget {
    // Cap the quadratic scan; the stride widens the error budget accordingly.
    const CAP: usize = 4000;
    let stride = pts.len().div_ceil(CAP).max(1);
    let mut best = 0.0f64;
    let mut i = 0;
    while i < pts.len() {
        let mut j = i + stride;
        while j < pts.len() {
            best = best.max(space.dist_coords(pts[i], pts[j]));
            j += stride;
        }
        i += stride;
    }
    ErrorBudget::new(best, gauge * stride as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight(space: Space, a: V2, b: V2, gauge: f64) -> PolylineArc {
        PolylineArc::new(space, vec![a, b], gauge).unwrap()
    }

    #[test]
    fn gauge_is_enforced_by_splitting() {
        let a = straight(Space::Torus, [0.0, 0.0], [1.0, 0.0], 0.25);
        assert_eq!(a.verts().len(), 5);
        for w in a.verts().windows(2) {
            assert!(geom::dist(w[0], w[1]) <= 0.25 + 1e-9);
        }
        assert!((a.len() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subarc_identity_and_degenerate() {
        let a = straight(Space::Torus, [0.0, 0.0], [1.0, 0.0], 0.1);
        let full = a.subarc(0.0, a.len()).unwrap();
        assert!((full.len() - a.len()).abs() < 1e-12);
        assert_eq!(full.verts().len(), a.verts().len());

        let point = a.subarc(0.4, 0.4).unwrap();
        assert!(point.is_singleton());
        assert_eq!(point.len(), 0.0);
    }

    #[test]
    fn subarc_interpolates_endpoints() {
        let a = straight(Space::Torus, [0.0, 0.0], [1.0, 0.0], 0.25);
        let s = a.subarc(0.2, 0.5).unwrap();
        assert!((s.len() - 0.3).abs() < 1e-12);
        assert!(geom::dist(s.verts()[0], [0.2, 0.0]) < 1e-12);
        assert!(geom::dist(*s.verts().last().unwrap(), [0.5, 0.0]) < 1e-12);
    }

    #[test]
    fn subarc_out_of_range_errors() {
        let a = straight(Space::Torus, [0.0, 0.0], [0.5, 0.0], 0.1);
        assert!(a.subarc(-0.1, 0.2).is_err());
        assert!(a.subarc(0.3, 0.2).is_err());
        assert!(a.subarc(0.0, 0.6).is_err());
    }

    #[test]
    fn resample_counts_and_idempotence() {
        let a = straight(Space::Torus, [0.0, 0.0], [1.0, 0.0], 0.25);
        assert_eq!(a.verts().len(), 5);
        let b = a.resample(0.25).unwrap();
        assert_eq!(b.verts().len(), 5);
        let c = b.resample(0.25).unwrap();
        assert_eq!(b.verts(), c.verts());
        assert!((c.len() - a.len()).abs() < 1e-12);
    }

    #[test]
    fn resample_preserves_length() {
        let verts = vec![[0.0, 0.0], [0.1, 0.05], [0.23, 0.01], [0.3, 0.11]];
        let a = PolylineArc::new(Space::Torus, verts, 0.2).unwrap();
        let b = a.resample(0.013).unwrap();
        assert!((a.len() - b.len()).abs() < 1e-12);
        // Every new vertex lies on the original polyline, so the underlying
        // curve (and with it the set-level Hausdorff distance) is unchanged.
        for v in b.verts() {
            let on_some_segment = a.verts().windows(2).any(|w| {
                let seg = geom::sub(w[1], w[0]);
                let l = geom::norm(seg);
                if l == 0.0 {
                    return geom::dist(*v, w[0]) < 1e-12;
                }
                let t = geom::dot(geom::sub(*v, w[0]), seg) / (l * l);
                (-1e-12..=1.0 + 1e-12).contains(&t)
                    && geom::dist(*v, geom::lerp(w[0], w[1], t.clamp(0.0, 1.0))) < 1e-12
            });
            assert!(on_some_segment);
        }
    }

    #[test]
    fn subarc_monotone_nesting() {
        let verts = vec![[0.0, 0.0], [0.2, 0.1], [0.4, 0.05], [0.6, 0.2]];
        let a = PolylineArc::new(Space::Torus, verts, 0.25).unwrap();
        let outer = a.subarc(0.1, 0.6).unwrap();
        let inner = a.subarc(0.2, 0.5).unwrap();
        // Every vertex of the inner subarc lies on the outer one.
        for v in inner.verts() {
            let hit = outer.verts().windows(2).any(|w| {
                let seg = geom::sub(w[1], w[0]);
                let l = geom::norm(seg);
                if l == 0.0 {
                    return geom::dist(*v, w[0]) < 1e-12;
                }
                let t = (geom::dot(geom::sub(*v, w[0]), seg) / (l * l)).clamp(0.0, 1.0);
                geom::dist(*v, geom::lerp(w[0], w[1], t)) < 1e-10
            });
            assert!(hit);
        }
    }

    #[test]
    fn diameter_examples() {
        let p = PolylineArc::new(Space::Torus, vec![[0.3, 0.4]], 0.1).unwrap();
        assert_eq!(p.diameter().value, 0.0);

        let seg = straight(Space::Torus, [0.0, 0.0], [0.3, 0.0], 0.01);
        let d = seg.diameter();
        assert!((d.value - 0.3).abs() < 1e-12);

        let loop_arc =
            PolylineArc::new_closed(Space::Circle, vec![[0.0, 0.0], [1.0, 0.0]], 0.01).unwrap();
        let d = loop_arc.diameter();
        assert!((d.value - 0.5).abs() <= 0.01 + 1e-12);
    }

    #[test]
    fn diameter_bounded_by_length_and_ambient() {
        let seg = straight(Space::Torus, [0.1, 0.2], [0.35, 0.3], 0.01);
        let d = seg.diameter();
        assert!(d.value <= seg.len() + 1e-12);
        assert!(d.value <= Space::Torus.ambient_diameter() + 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let verts = vec![[0.0, 0.0], [0.1234567890123, 0.05], [0.2, 0.1111111]];
        let a = PolylineArc::new(Space::Torus, verts, 0.2).unwrap();
        let text = a.to_csv();
        let b = PolylineArc::from_csv(Space::Torus, a.gauge(), &text).unwrap();
        assert_eq!(a.verts(), b.verts());
        assert_eq!(text, b.to_csv());
    }

    #[test]
    fn wrapped_subarc_crosses_the_seam() {
        let square = PolylineArc::new_closed(
            Space::Torus,
            vec![
                [0.25, 0.25],
                [0.75, 0.25],
                [0.75, 0.75],
                [0.25, 0.75],
                [0.25, 0.25],
            ],
            0.1,
        )
        .unwrap();
        assert!((square.len() - 2.0).abs() < 1e-12);
        let w = square.subarc_wrapped(1.8, 0.4).unwrap();
        assert!((w.len() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn ambient_sample_covers() {
        let s = SampledContinuum::ambient(Space::Pillowcase, 16).unwrap();
        // Canonical classes only.
        for p in s.points() {
            assert_eq!(*p, Space::Pillowcase.canonicalize(*p));
        }
        assert!(s.gauge() > 0.0);
        let t = SampledContinuum::ambient(Space::Torus, 16).unwrap();
        assert_eq!(t.points().len(), 256);
        // Pillowcase classes collapse involution pairs.
        assert!(s.points().len() < t.points().len());
    }
}
