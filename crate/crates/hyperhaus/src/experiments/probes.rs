//! Numerical probes of the dynamical statements: covering radii of iterated
//! arcs, topological mixing on a cell grid, density of leaf unions, the
//! stable/unstable separation, and the continuum-wise expansivity witness.

use super::ConvergenceSeries;
use crate::continua::{PolylineArc, SampledContinuum};
use crate::dynamics::{System, ToralAutomorphism};
use crate::geom::{self, V2};
use crate::hyper::{stable_family, unstable_family, FamilyConfig};
use crate::leaf::{SampledSeg, SegDesc};
use crate::metrics::ErrorBudget;
use crate::spaces::{Point, Space};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Covering-radius series: the one-sided distance from a dense ambient
/// sample to the iterated arc `f^{-n}(A_0)`. The distance from each sample
/// point to the arc is exact, so the slack is the sample's covering gauge.
pub fn covering_radius_series(
    system: &System,
    a0_center: V2,
    a0_len: f64,
    n_max: u32,
    gauge: f64,
    ambient_per_axis: u32,
    label: &str,
) -> Result<ConvergenceSeries> {
    if a0_len <= 0.0 {
        return Err(Error::usage("the initial arc must be non-trivial"));
    }
    let ambient = SampledContinuum::ambient(system.space(), ambient_per_axis as usize)?;
    let auto = *system.auto();
    let mut cfg = BTreeMap::new();
    cfg.insert("space".into(), system.space().to_string());
    cfg.insert("a0_len".into(), a0_len.to_string());
    cfg.insert("ambient_per_axis".into(), ambient_per_axis.to_string());
    cfg.insert("gauge".into(), gauge.to_string());
    let mut series = ConvergenceSeries::new(label, cfg);
    for n in 0..=n_max as i64 {
        let seg0 = system.stable_seg(a0_center, a0_len)?;
        let e0 = auto.apply_lift(seg0.p0, -n)?;
        let e1 = auto.apply_lift(seg0.end(), -n)?;
        let d = geom::sub(e1, e0);
        let len = geom::norm(d);
        let seg = SegDesc::new(
            system.space(),
            e0,
            if len > 0.0 {
                geom::scale(d, 1.0 / len)
            } else {
                seg0.dir
            },
            len,
        );
        let ss = SampledSeg::build(seg, gauge, gauge.max(0.005));
        let r = ss.directed_from(ambient.points());
        series.push(n, ErrorBudget::new(r, ambient.gauge()));
    }
    Ok(series)
}

/// Mean of the consecutive ratios `r_{n+1}/r_n` over `n in [from, to]`.
pub fn covering_ratio_mean(series: &ConvergenceSeries, from: i64, to: i64) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0;
    for n in from..=to {
        let a = series.value_at(n)?.value;
        let b = series.value_at(n + 1)?.value;
        if a <= 0.0 {
            return None;
        }
        sum += b / a;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// Bit mask over a `c x c` cell grid.
#[derive(Clone)]
pub struct CellMask {
    c: usize,
    words: Vec<u64>,
}

impl CellMask {
    fn new(c: usize) -> CellMask {
        CellMask {
            c,
            words: vec![0; (c * c + 63) / 64],
        }
    }

    fn full(c: usize) -> CellMask {
        let mut m = CellMask::new(c);
        for i in 0..c * c {
            m.words[i / 64] |= 1 << (i % 64);
        }
        m
    }

    fn set(&mut self, ix: usize, iy: usize) {
        let i = iy * self.c + ix;
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        let i = iy * self.c + ix;
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn or_with(&mut self, other: &CellMask) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }
}

/// Cells of the `c x c` torus grid crossed by a lift segment, by exact
/// traversal of the grid lines.
pub fn raster_cells(desc: &SegDesc, c: usize) -> CellMask {
    let mut mask = CellMask::new(c);
    let cf = c as f64;
    let cell_of = |p: V2| -> (usize, usize) {
        let x = ((geom::wrap01(p[0]) * cf) as usize).min(c - 1);
        let y = ((geom::wrap01(p[1]) * cf) as usize).min(c - 1);
        (x, y)
    };
    if desc.len == 0.0 {
        let (x, y) = cell_of(desc.p0);
        mask.set(x, y);
        return mask;
    }
    let mut t = 0.0f64;
    while t < desc.len {
        let p = desc.at(t);
        // Parameter of the next grid-line crossing in either coordinate.
        let mut t_next = desc.len;
        for ax in 0..2 {
            let d = desc.dir[ax];
            if d.abs() < 1e-15 {
                continue;
            }
            let scaled = p[ax] * cf;
            let next_line = if d > 0.0 {
                (scaled.floor() + 1.0) / cf
            } else {
                (scaled.ceil() - 1.0) / cf
            };
            let dt = (next_line - p[ax]) / d;
            if dt > 1e-12 {
                t_next = t_next.min(t + dt);
            }
        }
        if t_next <= t {
            t_next = t + 1.0 / (cf * 4.0);
        }
        let mid = desc.at((t + t_next.min(desc.len)) / 2.0);
        let (x, y) = cell_of(mid);
        mask.set(x, y);
        t = t_next;
    }
    let (x, y) = cell_of(desc.at(desc.len));
    mask.set(x, y);
    mask
}

/// Position-independent certificate: an upper bound for the covering radius
/// of ANY leaf segment of length at least `len`, computed by maximizing the
/// exact directed distance from an `m x m` lattice over a subgrid of one
/// lattice cell and adding the subgrid jitter.
pub fn position_maxed_rho(
    auto: &ToralAutomorphism,
    stable: bool,
    len: f64,
    m: usize,
    gauge: f64,
) -> Result<f64> {
    let torus = System::Torus(*auto);
    let ambient = SampledContinuum::ambient(Space::Torus, m)?;
    let sub = 6usize;
    let cell = 1.0 / m as f64;
    let jitter = std::f64::consts::SQRT_2 / 2.0 * cell / sub as f64;
    let mut worst = 0.0f64;
    for a in 0..sub {
        for b in 0..sub {
            let center = [
                (a as f64 + 0.37) * cell / sub as f64,
                (b as f64 + 0.61) * cell / sub as f64,
            ];
            let seg = if stable {
                torus.stable_seg(center, len)?
            } else {
                torus.unstable_seg(center, len)?
            };
            let ss = SampledSeg::build(seg, gauge.max(0.005), 0.02);
            worst = worst.max(ss.directed_from(ambient.points()));
        }
    }
    Ok(worst + jitter + ambient.gauge())
}

#[derive(Debug, Clone)]
pub struct MixingReport {
    pub cells: u32,
    pub window: u32,
    pub n_cap: u32,
    /// Largest first-hit index over all ordered cell pairs, or None if some
    /// pair never stabilized within the cap.
    pub max_n: Option<u32>,
    pub failures: usize,
    /// First-hit index for the pair of cells containing the origin.
    pub origin_pair_n: Option<u32>,
}

/// For every ordered cell pair (U, V): the least N such that the unstable
/// arc seeded at V's center (half a cell wide) meets U for ALL n in
/// [N, N + window]. Long iterates are certified dense through the
/// position-maximized covering bound instead of being rasterized.
pub fn mixing_probe(system: &System, cells: u32, window: u32, n_cap: u32) -> Result<MixingReport> {
    if system.space() != Space::Torus {
        return Err(Error::usage("the mixing probe runs on the torus"));
    }
    if cells < 2 {
        return Err(Error::usage("need at least a 2x2 cell grid"));
    }
    let c = cells as usize;
    let auto = *system.auto();
    let len0 = 0.5 / cells as f64;
    let inradius = 0.5 / cells as f64;

    // Certified density threshold: the smallest pivot length whose
    // position-maximized covering bound fits inside a cell.
    let mut dense_len = f64::INFINITY;
    for pivot in [12.0, 24.0, 48.0] {
        if position_maxed_rho(&auto, false, pivot, 128, 0.01)? < inradius * 0.95 {
            dense_len = pivot;
            break;
        }
    }

    let lambda = auto.lambda_u().abs();
    let mut hits: Vec<Vec<CellMask>> = Vec::new(); // [n][v]
    for n in 0..=n_cap as i64 {
        let len_n = len0 * lambda.powi(n as i32);
        let mut row = Vec::with_capacity(c * c);
        for vy in 0..c {
            for vx in 0..c {
                if len_n >= dense_len {
                    row.push(CellMask::full(c));
                    continue;
                }
                let center = [
                    (vx as f64 + 0.5) / cells as f64,
                    (vy as f64 + 0.5) / cells as f64,
                ];
                let seg0 = system.unstable_seg(center, len0)?;
                let e0 = auto.apply_lift(seg0.p0, n)?;
                let e1 = auto.apply_lift(seg0.end(), n)?;
                let d = geom::sub(e1, e0);
                let l = geom::norm(d);
                let seg = SegDesc::new(
                    Space::Torus,
                    e0,
                    if l > 0.0 { geom::scale(d, 1.0 / l) } else { seg0.dir },
                    l,
                );
                row.push(raster_cells(&seg, c));
            }
        }
        hits.push(row);
    }

    let mut max_n: Option<u32> = Some(0);
    let mut failures = 0usize;
    let mut origin_pair_n = None;
    for v in 0..c * c {
        for uy in 0..c {
            for ux in 0..c {
                let mut found = None;
                'outer: for n0 in 0..=(n_cap.saturating_sub(window)) {
                    for n in n0..=(n0 + window) {
                        if !hits[n as usize][v].get(ux, uy) {
                            continue 'outer;
                        }
                    }
                    found = Some(n0);
                    break;
                }
                match found {
                    Some(n0) => {
                        if v == 0 && ux == 0 && uy == 0 {
                            origin_pair_n = Some(n0);
                        }
                        max_n = max_n.map(|m| m.max(n0));
                    }
                    None => {
                        failures += 1;
                        max_n = None;
                    }
                }
            }
        }
    }
    Ok(MixingReport {
        cells,
        window,
        n_cap,
        max_n,
        failures,
        origin_pair_n,
    })
}

/// Fraction of grid cells touched by the union over n <= n_max of
/// `f^{-n}(stable arc of diameter delta through f^n(x))`; since the map is
/// linear, the pullback is the stable arc through `x` of length
/// `delta * lambda_u^n`. Returns the cumulative fraction per n.
pub fn density_probe(
    system: &System,
    x: Point,
    n_max: u32,
    cells: u32,
    delta: f64,
) -> Result<Vec<f64>> {
    if system.space() != Space::Torus {
        return Err(Error::usage("the density probe runs on the torus"));
    }
    let c = cells as usize;
    let auto = *system.auto();
    let lambda = auto.lambda_u().abs();
    let inradius = 0.5 / cells as f64;
    let mut dense_len = f64::INFINITY;
    for pivot in [12.0, 24.0, 48.0] {
        if position_maxed_rho(&auto, true, pivot, 128, 0.01)? < inradius * 0.95 {
            dense_len = pivot;
            break;
        }
    }
    let mut acc = CellMask::new(c);
    let mut fractions = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max as i32 {
        let len = delta * lambda.powi(n);
        if len >= dense_len {
            acc = CellMask::full(c);
        } else {
            let seg = system.stable_seg(x.coords, len)?;
            acc.or_with(&raster_cells(&seg, c));
        }
        fractions.push(acc.count() as f64 / (c * c) as f64);
    }
    Ok(fractions)
}

/// Hausdorff distance between the ambient-stripped stable and unstable
/// family approximations. With the shared ambient member removed, the
/// theorem's separation is literally measurable.
pub fn separation_probe(system: &System, cfg: &FamilyConfig) -> Result<ErrorBudget> {
    let fs = stable_family(system, cfg)?.without_ambient()?;
    let fu = unstable_family(system, cfg)?.without_ambient()?;
    crate::hyper::hyper_distance(&fs, &fu)
}

#[derive(Debug, Clone)]
pub struct CwReport {
    pub total: usize,
    pub expanded: usize,
    pub max_iterations_needed: i64,
}

/// Continuum-wise expansivity witness: every sampled arc with diameter at
/// least `min_diam` must exceed `delta` within `max_iter` forward or
/// backward iterations.
pub fn cw_expansivity_probe(
    system: &System,
    count: usize,
    min_diam: f64,
    delta: f64,
    max_iter: i64,
    seed: u64,
) -> Result<CwReport> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut expanded = 0usize;
    let mut worst_n = 0i64;
    for _ in 0..count {
        let c: V2 = [rng.gen(), rng.gen()];
        let ang = rng.gen::<f64>() * std::f64::consts::TAU;
        let dir = [ang.cos(), ang.sin()];
        let r = (min_diam / 2.0) * (1.0 + rng.gen::<f64>() * 9.0);
        // A slightly bent three-vertex arc.
        let kink = geom::scale(geom::perp(dir), r * (rng.gen::<f64>() - 0.5) * 0.6);
        let verts = vec![
            geom::sub(c, geom::scale(dir, r)),
            geom::add(c, kink),
            geom::add(c, geom::scale(dir, r)),
        ];
        let arc = PolylineArc::new(system.space(), verts, 0.2)?;
        if arc.diameter().value < min_diam {
            continue;
        }
        let mut ok = None;
        'search: for n in 1..=max_iter {
            for sign in [1i64, -1] {
                let it = system.iterate_arc(&arc, sign * n, 0.05)?;
                if it.diameter_exceeds(delta) {
                    ok = Some(n);
                    break 'search;
                }
            }
        }
        match ok {
            Some(n) => {
                expanded += 1;
                worst_n = worst_n.max(n);
            }
            None => {}
        }
    }
    Ok(CwReport {
        total: count,
        expanded,
        max_iterations_needed: worst_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> System {
        System::Torus(ToralAutomorphism::cat_map())
    }

    #[test]
    fn covering_radius_decreases_and_tracks_lambda_s() {
        let sys = torus();
        let s = covering_radius_series(&sys, [0.1, 0.2], 0.05, 9, 0.01, 64, "cover").unwrap();
        // Monotone within slack.
        for w in s.rows.windows(2) {
            assert!(w[1].1.value <= w[0].1.value + w[0].1.slack + 1e-9);
        }
        let mean = covering_ratio_mean(&s, 3, 8).unwrap();
        let ls = ToralAutomorphism::cat_map().lambda_s();
        assert!(
            (mean - ls).abs() < 0.05,
            "ratio mean {mean} vs lambda_s {ls}"
        );
    }

    #[test]
    fn raster_marks_the_right_cells() {
        // Horizontal segment through the middle of the bottom row.
        let seg = SegDesc::new(Space::Torus, [0.0, 0.05], [1.0, 0.0], 0.9);
        let mask = raster_cells(&seg, 4);
        for ix in 0..4 {
            assert!(mask.get(ix, 0));
        }
        assert!(!mask.get(0, 2));
    }

    #[test]
    fn small_mixing_grid_settles_quickly() {
        let sys = torus();
        let rep = mixing_probe(&sys, 2, 6, 24).unwrap();
        assert_eq!(rep.failures, 0);
        let n = rep.max_n.unwrap();
        assert!(n <= 6, "coarse 2x2 grid needed N = {n}");
    }

    #[test]
    fn density_probe_is_monotone() {
        let sys = torus();
        let x = Space::Torus.point([0.1, 0.2]);
        let fr = density_probe(&sys, x, 8, 8, 0.1).unwrap();
        for w in fr.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(*fr.last().unwrap() >= 0.99);
        assert!(fr[0] > 0.0);
    }

    #[test]
    fn cw_probe_expands_everything() {
        let sys = torus();
        let rep = cw_expansivity_probe(&sys, 60, 1e-3, 0.1, 6, 11).unwrap();
        assert_eq!(rep.expanded, rep.total);
        assert!(rep.max_iterations_needed <= 6);
    }

    #[test]
    fn separation_is_bounded_away_from_zero() {
        let sys = torus();
        let cfg = FamilyConfig {
            base_grid: 4,
            ladder: FamilyConfig::ladder_from(0.2, 0.6),
            gauge: 0.02,
            ambient_per_axis: 16,
        };
        let d = separation_probe(&sys, &cfg).unwrap();
        assert!(d.value >= 0.1, "separation {}", d.value);
    }
}
