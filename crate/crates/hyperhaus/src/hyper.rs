//! Finite approximations of distinguished hypercontinua: the subcontinuum
//! family `i(A)` of an arc, stable/unstable foliation closures, marked
//! hypercircles, and the triangle model of the interval hyperspace.
//!
//! A family lists finitely many continua together with a resolution: every
//! intended element of the ideal hypercontinuum lies within `resolution` (in
//! Hausdorff distance) of a listed member. Families built for the big
//! experiment configurations keep their members as segment descriptors and
//! are consumed by the structured evaluators in [`crate::experiments`]; the
//! generic [`hyper_distance`] here materializes members and is meant for the
//! demo-sized configurations.

use crate::continua::{Continuum, PolylineArc, SampledContinuum};
use crate::dynamics::System;
use crate::geom::{self, V2};
use crate::leaf::{circ_hausdorff, seg_hausdorff, CircArcDesc, SegDesc};
use crate::metrics::{grid_positions, hausdorff_value, ErrorBudget};
use crate::spaces::Space;
use crate::{Error, Result};

/// A member of a finite hyperfamily. Descriptor variants carry the gauge
/// they materialize at.
#[derive(Debug, Clone)]
pub enum Member {
    Arc(PolylineArc),
    Points(SampledContinuum),
    Seg(SegDesc, f64),
    CircArc(CircArcDesc, f64),
}

impl Member {
    pub fn space(&self) -> Space {
        match self {
            Member::Arc(a) => a.space(),
            Member::Points(p) => p.space(),
            Member::Seg(s, _) => s.space,
            Member::CircArc(..) => Space::Circle,
        }
    }

    pub fn to_continuum(&self) -> Result<Continuum> {
        Ok(match self {
            Member::Arc(a) => Continuum::Arc(a.clone()),
            Member::Points(p) => Continuum::Points(p.clone()),
            Member::Seg(s, gauge) => Continuum::Arc(s.to_arc(*gauge)?),
            Member::CircArc(c, gauge) => Continuum::Arc(c.to_arc(*gauge)?),
        })
    }
}

/// A finite set of continua approximating a hypercontinuum.
#[derive(Debug, Clone)]
pub struct FiniteHyperFamily {
    pub space: Space,
    pub members: Vec<Member>,
    /// Every intended element of the ideal hypercontinuum is within this of
    /// a listed member, in Hausdorff distance.
    pub resolution: f64,
    /// Whether the ambient space itself is listed (as a dense sample).
    pub includes_ambient: bool,
}

impl FiniteHyperFamily {
    pub fn new(
        space: Space,
        members: Vec<Member>,
        resolution: f64,
        includes_ambient: bool,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::usage("a hyperfamily needs at least one member"));
        }
        for m in &members {
            if m.space() != space {
                return Err(Error::SpaceMismatch(m.space(), space));
            }
        }
        Ok(FiniteHyperFamily {
            space,
            members,
            resolution,
            includes_ambient,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Copy of this family without its ambient member(s); used by the
    /// separation probe, where the shared ambient member would trivially
    /// collapse the distance.
    pub fn without_ambient(&self) -> Result<FiniteHyperFamily> {
        let members: Vec<Member> = self
            .members
            .iter()
            .filter(|m| !matches!(m, Member::Points(_)))
            .cloned()
            .collect();
        FiniteHyperFamily::new(self.space, members, self.resolution, false)
    }
}

/// Finite approximation of `i(A)`: all grid subarcs of `A` (singletons and
/// the full arc included); for closed loops the windows wrap.
pub fn enumerate_subcontinua(a: &PolylineArc, grid: f64) -> Result<FiniteHyperFamily> {
    if grid <= 0.0 {
        return Err(Error::usage("grid step must be positive"));
    }
    let mut members = Vec::new();
    if a.closed() {
        let starts = grid_positions(a.len(), grid);
        let lens = grid_positions(a.len(), grid);
        for &s in starts.iter().take(starts.len().saturating_sub(1)) {
            for &l in &lens {
                if l >= a.len() {
                    continue;
                }
                members.push(Member::Arc(a.subarc_wrapped(s, l)?));
            }
        }
        members.push(Member::Arc(a.clone()));
    } else {
        let pos = grid_positions(a.len(), grid);
        for i in 0..pos.len() {
            for j in i..pos.len() {
                members.push(Member::Arc(a.subarc(pos[i], pos[j])?));
            }
        }
    }
    FiniteHyperFamily::new(a.space(), members, grid, false)
}

/// `i(A)` for a circle arc kept in closed form: grid subarcs as descriptors.
pub fn circle_subarc_family(start: f64, len: f64, grid: f64, gauge: f64) -> Result<FiniteHyperFamily> {
    if grid <= 0.0 {
        return Err(Error::usage("grid step must be positive"));
    }
    let offs = grid_positions(len, grid);
    let mut members = Vec::new();
    for (i, &a) in offs.iter().enumerate() {
        for &l in &offs[..(offs.len() - i)] {
            if a + l <= len + 1e-12 {
                members.push(Member::CircArc(
                    CircArcDesc {
                        start: geom::wrap01(start + a),
                        len: l,
                    },
                    gauge,
                ));
            }
        }
    }
    FiniteHyperFamily::new(Space::Circle, members, grid, len >= 1.0)
}

/// `i(S^1)`: every grid arc of the circle, any start, plus the circle
/// itself.
pub fn circle_hyperspace_family(grid: f64, gauge: f64) -> Result<FiniteHyperFamily> {
    let starts = grid_positions(1.0, grid);
    let lens = grid_positions(1.0, grid);
    let mut members = Vec::new();
    for &s in starts.iter().take(starts.len() - 1) {
        for &l in lens.iter().filter(|&&l| l < 1.0) {
            members.push(Member::CircArc(CircArcDesc { start: s, len: l }, gauge));
        }
    }
    members.push(Member::CircArc(CircArcDesc { start: 0.0, len: 1.0 }, gauge));
    FiniteHyperFamily::new(Space::Circle, members, grid, true)
}

/// The marked hypercircle at `s`: all grid arcs `[s+a, s+a+l]` with
/// `a, l >= 0` and `a + l <= 1`, i.e. the arcs avoiding `s` in their
/// interior, including singletons and the full circle anchored at `s`.
pub fn marked_hypercircle(s: f64, grid: f64, gauge: f64) -> Result<FiniteHyperFamily> {
    if grid <= 0.0 {
        return Err(Error::usage("grid step must be positive"));
    }
    let pos = grid_positions(1.0, grid);
    let mut members = Vec::new();
    for &a in &pos {
        for &l in &pos {
            if a + l <= 1.0 + 1e-12 {
                members.push(Member::CircArc(
                    CircArcDesc {
                        start: geom::wrap01(s + a),
                        len: l,
                    },
                    gauge,
                ));
            }
        }
    }
    FiniteHyperFamily::new(Space::Circle, members, grid, true)
}

/// Triangle model of the interval hyperspace: `[a, b] <-> (a, b)` with
/// `a <= b`.
pub fn interval_to_triangle(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
        return Err(Error::usage("need 0 <= a <= b <= 1"));
    }
    Ok((a, b))
}

/// Inverse of [`interval_to_triangle`].
pub fn triangle_to_interval(p: (f64, f64)) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p.0) || !(0.0..=1.0).contains(&p.1) || p.0 > p.1 {
        return Err(Error::usage("triangle points satisfy 0 <= a <= b <= 1"));
    }
    Ok(p)
}

/// Parameters for the foliation-closure families.
#[derive(Debug, Clone)]
pub struct FamilyConfig {
    /// Arc centers on a `base_grid x base_grid` lattice.
    pub base_grid: u32,
    /// Sorted arc lengths, starting at 0.
    pub ladder: Vec<f64>,
    /// Sampling gauge of materialized members.
    pub gauge: f64,
    /// Ambient sample points per axis.
    pub ambient_per_axis: u32,
}

impl FamilyConfig {
    pub fn ladder_from(step: f64, max: f64) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut l = step;
        while l < max - 1e-12 {
            out.push(l);
            l += step;
        }
        out.push(max);
        out
    }

    pub fn max_ladder_gap(&self) -> f64 {
        self.ladder
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        if self.base_grid == 0 || self.ambient_per_axis == 0 {
            return Err(Error::usage("family grids must be nonzero"));
        }
        if self.ladder.is_empty() || self.ladder[0] != 0.0 {
            return Err(Error::usage("ladder must start at 0"));
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::usage("ladder must be strictly increasing"));
        }
        Ok(())
    }
}

/// Finite approximation of the stable foliation closure: stable arcs of
/// every ladder length centered on the base grid, plus the ambient sample.
pub fn stable_family(system: &System, cfg: &FamilyConfig) -> Result<FiniteHyperFamily> {
    foliation_family(system, cfg, true)
}

/// Dual family along the unstable direction (the stable family of the
/// inverse map).
pub fn unstable_family(system: &System, cfg: &FamilyConfig) -> Result<FiniteHyperFamily> {
    foliation_family(system, cfg, false)
}

fn foliation_family(system: &System, cfg: &FamilyConfig, stable: bool) -> Result<FiniteHyperFamily> {
    cfg.validate()?;
    let space = system.space();
    let bg = cfg.base_grid as f64;
    let mut centers: Vec<V2> = Vec::new();
    for i in 0..cfg.base_grid {
        for j in 0..cfg.base_grid {
            centers.push(space.canonicalize([i as f64 / bg, j as f64 / bg]));
        }
    }
    if space == Space::Pillowcase {
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        centers.dedup();
    }
    let mut members = Vec::new();
    for &c in &centers {
        for &len in &cfg.ladder {
            let seg = if stable {
                system.stable_seg(c, len)?
            } else {
                system.unstable_seg(c, len)?
            };
            members.push(Member::Seg(seg, cfg.gauge));
        }
    }
    let ambient = SampledContinuum::ambient(space, cfg.ambient_per_axis as usize)?;
    let ambient_gauge = ambient.gauge();
    members.push(Member::Points(ambient));
    let resolution = (1.0 / (2.0 * bg))
        .max(cfg.max_ladder_gap() / 2.0)
        .max(ambient_gauge);
    FiniteHyperFamily::new(space, members, resolution, true)
}

/// Hausdorff distance between two finite hyperfamilies, with the member
/// Hausdorff distance as ground metric. Exact closed forms are used for
/// leaf-segment and circle-arc pairs; everything else goes through the
/// sampled engine. Pairs are pruned with a midpoint lower bound, and inner
/// minima abort once they cannot affect the outer maximum.
pub fn hyper_distance(f: &FiniteHyperFamily, g: &FiniteHyperFamily) -> Result<ErrorBudget> {
    if f.space != g.space {
        return Err(Error::SpaceMismatch(f.space, g.space));
    }
    if f.is_empty() || g.is_empty() {
        return Err(Error::usage("empty family"));
    }
    let fi = MemberInfo::build(f)?;
    let gi = MemberInfo::build(g)?;
    let mut worst = 0.0f64;
    let mut max_slack = 0.0f64;
    for (xs, ys) in [(&fi, &gi), (&gi, &fi)] {
        for x in xs.iter() {
            let mut best = f64::INFINITY;
            for y in ys.iter() {
                // d_H(x, y) >= dist(mid_x, mid_y) - min(rad_x, rad_y).
                let lb = x.space_dist(y) - x.rad.min(y.rad);
                if lb >= best {
                    continue;
                }
                let (d, slack) = ground_distance(x, y);
                max_slack = max_slack.max(slack);
                if d < best {
                    best = d;
                    if best <= worst {
                        break; // cannot raise the outer maximum
                    }
                }
            }
            if best > worst {
                worst = best;
            }
        }
    }
    Ok(ErrorBudget::new(
        worst,
        f.resolution + g.resolution + max_slack,
    ))
}

struct MemberInfo {
    space: Space,
    cont: Continuum,
    fast: Fast,
    mid: V2,
    rad: f64,
}

enum Fast {
    Seg(SegDesc),
    Circ(CircArcDesc),
    None,
}

impl MemberInfo {
    fn build(f: &FiniteHyperFamily) -> Result<Vec<MemberInfo>> {
        f.members
            .iter()
            .map(|m| {
                let cont = m.to_continuum()?;
                let (fast, mid, rad) = match m {
                    Member::Seg(s, _) => (
                        Fast::Seg(*s),
                        f.space.canonicalize(s.midpoint()),
                        s.len / 2.0,
                    ),
                    Member::CircArc(c, _) => (
                        Fast::Circ(*c),
                        f.space.canonicalize([c.start + c.len / 2.0, 0.0]),
                        c.len / 2.0,
                    ),
                    Member::Arc(a) => {
                        let mid = f.space.canonicalize(a.point_at(a.len() / 2.0));
                        (Fast::None, mid, a.len() / 2.0)
                    }
                    Member::Points(p) => (Fast::None, p.points()[0], f64::INFINITY),
                };
                Ok(MemberInfo {
                    space: f.space,
                    cont,
                    fast,
                    mid,
                    rad,
                })
            })
            .collect()
    }

    fn space_dist(&self, other: &MemberInfo) -> f64 {
        self.space.dist_coords(self.mid, other.mid)
    }
}

fn ground_distance(x: &MemberInfo, y: &MemberInfo) -> (f64, f64) {
    match (&x.fast, &y.fast) {
        (Fast::Seg(a), Fast::Seg(b))
            if geom::dot(a.dir, geom::perp(b.dir)).abs() < 1e-9 =>
        {
            (seg_hausdorff(a, b), 0.0)
        }
        (Fast::Circ(a), Fast::Circ(b)) => (circ_hausdorff(a, b), 0.0),
        _ => {
            let (ca, cb) = (&x.cont, &y.cont);
            let v = hausdorff_value(
                x.space,
                ca.samples(),
                cb.samples(),
                ca.gauge(),
                cb.gauge(),
            );
            let slack =
                (ca.gauge() / 2.0 + cb.gauge()).max(cb.gauge() / 2.0 + ca.gauge());
            (v, slack)
        }
    }
}
