//! Uniform grid bucketing for nearest-sample queries on the model spaces.
//!
//! The grid lives on the unit square with wrapped neighbor lookup. Wrapping
//! is exact for circle/torus and conservative for the interval (torus cell
//! distance never exceeds interval distance, so ring bounds stay valid
//! lower bounds). Pillowcase point sets are inserted twice, once per
//! involution representative, which turns pillowcase nearest-class queries
//! into plain torus queries over the alias set.

use crate::geom::{self, V2};
use crate::spaces::{torus_dist, Space};

pub struct BucketGrid {
    space: Space,
    cell: f64,
    n: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
    alias_pts: Vec<V2>,
    n_orig: usize,
}

/// Result of a nearest-sample query.
pub struct Nearest {
    /// Distance found. Exact minimum unless `aborted` is set.
    pub dist: f64,
    /// Index into the original point slice.
    pub index: usize,
    /// True when the search stopped early because a sample closer than the
    /// abort threshold was found; `dist` is then only an upper bound.
    pub aborted: bool,
}

impl BucketGrid {
    /// Build a grid with the given cell size (clamped so the grid stays
    /// between 1 and 512 cells per axis).
    pub fn build(space: Space, pts: &[V2], cell: f64) -> BucketGrid {
        let cell = cell.clamp(1.0 / 512.0, 1.0);
        let n = (1.0 / cell).ceil().max(1.0) as usize;
        let n_orig = pts.len();
        let mut alias_pts: Vec<V2> = Vec::with_capacity(if space == Space::Pillowcase {
            2 * n_orig
        } else {
            n_orig
        });
        alias_pts.extend_from_slice(pts);
        if space == Space::Pillowcase {
            alias_pts.extend(pts.iter().map(|&p| space.involution(p)));
        }

        // Counting sort into CSR layout.
        let mut counts = vec![0u32; n * n + 1];
        let cell_of = |p: V2| -> usize {
            let cx = ((geom::wrap01(p[0]) * n as f64) as usize).min(n - 1);
            let cy = ((geom::wrap01(p[1]) * n as f64) as usize).min(n - 1);
            cy * n + cx
        };
        for &p in &alias_pts {
            counts[cell_of(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; alias_pts.len()];
        for (i, &p) in alias_pts.iter().enumerate() {
            let c = cell_of(p);
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        BucketGrid {
            space,
            cell: 1.0 / n as f64,
            n,
            starts,
            items,
            alias_pts,
            n_orig,
        }
    }

    fn point_dist(&self, p: V2, q: V2) -> f64 {
        match self.space {
            Space::Interval => (p[0] - q[0]).abs(),
            Space::Circle => geom::circ_dist(p[0], q[0]),
            // Aliases make pillowcase queries plain torus queries.
            Space::Torus | Space::Pillowcase => torus_dist(p, q),
        }
    }

    /// Exact nearest-sample distance from `p`, with optional early abort once
    /// any sample at distance `<= abort_below` is found.
    pub fn nearest(&self, p: V2, abort_below: f64) -> Nearest {
        let n = self.n as isize;
        let cx = ((geom::wrap01(p[0]) * self.n as f64) as isize).min(n - 1);
        let cy = ((geom::wrap01(p[1]) * self.n as f64) as isize).min(n - 1);
        let mut best = f64::INFINITY;
        let mut best_idx = 0usize;

        let mut scan_cell = |gx: isize, gy: isize, best: &mut f64, best_idx: &mut usize| {
            let gx = gx.rem_euclid(n) as usize;
            let gy = gy.rem_euclid(n) as usize;
            let c = gy * self.n + gx;
            let (lo, hi) = (self.starts[c] as usize, self.starts[c + 1] as usize);
            for &it in &self.items[lo..hi] {
                let d = self.point_dist(p, self.alias_pts[it as usize]);
                if d < *best {
                    *best = d;
                    *best_idx = it as usize % self.n_orig;
                }
            }
        };

        let max_ring = (self.n / 2 + 1) as isize;
        for r in 0..=max_ring {
            if r == 0 {
                scan_cell(cx, cy, &mut best, &mut best_idx);
            } else {
                for dx in -r..=r {
                    scan_cell(cx + dx, cy - r, &mut best, &mut best_idx);
                    scan_cell(cx + dx, cy + r, &mut best, &mut best_idx);
                }
                for dy in (-r + 1)..=(r - 1) {
                    scan_cell(cx - r, cy + dy, &mut best, &mut best_idx);
                    scan_cell(cx + r, cy + dy, &mut best, &mut best_idx);
                }
            }
            if best <= abort_below {
                return Nearest {
                    dist: best,
                    index: best_idx,
                    aborted: true,
                };
            }
            // Samples in ring r+1 sit at least r cells away.
            if best <= r as f64 * self.cell {
                break;
            }
        }
        Nearest {
            dist: best,
            index: best_idx,
            aborted: false,
        }
    }

    /// Indices of all original samples within `radius` of `p` (exact).
    pub fn within(&self, p: V2, radius: f64) -> Vec<usize> {
        let n = self.n as isize;
        let cx = ((geom::wrap01(p[0]) * self.n as f64) as isize).min(n - 1);
        let cy = ((geom::wrap01(p[1]) * self.n as f64) as isize).min(n - 1);
        let rings = ((radius / self.cell).ceil() as isize + 1).min((self.n / 2 + 1) as isize);
        let mut out = Vec::new();
        for dy in -rings..=rings {
            for dx in -rings..=rings {
                let gx = (cx + dx).rem_euclid(n) as usize;
                let gy = (cy + dy).rem_euclid(n) as usize;
                let c = gy * self.n + gx;
                let (lo, hi) = (self.starts[c] as usize, self.starts[c + 1] as usize);
                for &it in &self.items[lo..hi] {
                    if self.point_dist(p, self.alias_pts[it as usize]) <= radius {
                        out.push(it as usize % self.n_orig);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
