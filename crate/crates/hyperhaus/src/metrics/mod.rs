//! Hausdorff distance, the second-order (subcontinuum-wise) Hausdorff
//! distance, and distances between finite hypercontinuum families.
//!
//! Every reported distance is an [`ErrorBudget`]: the computed value together
//! with an additive slack bounding the discretization error, composed from
//! the sampling gauges of the operands and (for the subarc metrics) the
//! endpoint grid step. Optimized routines keep brute-force counterparts in
//! the public API; tests pin both to each other.

mod buckets;
mod subarc;

pub use buckets::{BucketGrid, Nearest};
pub use subarc::{
    grid_positions, second_order_distance, second_order_distance_brute, subarc_infimum,
    subarc_infimum_brute,
};

pub use crate::hyper::hyper_distance;

use crate::continua::Continuum;
use crate::geom::V2;
use crate::spaces::Space;
use crate::{Error, Result};

/// A measured length with an additive error bound: the true (set-level)
/// quantity lies in `[value - slack, value + slack]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    pub value: f64,
    pub slack: f64,
}

impl ErrorBudget {
    pub fn new(value: f64, slack: f64) -> Self {
        debug_assert!(slack >= 0.0);
        ErrorBudget { value, slack }
    }

    pub fn exact(value: f64) -> Self {
        ErrorBudget { value, slack: 0.0 }
    }

    /// Widen the slack, keeping the value.
    pub fn widen(self, extra: f64) -> Self {
        ErrorBudget {
            value: self.value,
            slack: self.slack + extra,
        }
    }

    pub fn upper(self) -> f64 {
        self.value + self.slack
    }

    pub fn lower(self) -> f64 {
        (self.value - self.slack).max(0.0)
    }
}

impl std::fmt::Display for ErrorBudget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.value, self.slack)
    }
}

fn check_pair(a: &Continuum, b: &Continuum) -> Result<Space> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch(a.space(), b.space()));
    }
    if a.samples().is_empty() || b.samples().is_empty() {
        return Err(Error::usage("empty continuum"));
    }
    Ok(a.space())
}

/// Slack of the one-sided sampled distance from `a` to `b`.
fn directed_slack(a: &Continuum, b: &Continuum) -> f64 {
    a.gauge() / 2.0 + b.gauge()
}

/// Slack of the symmetric sampled distance.
pub(crate) fn sym_slack(a: &Continuum, b: &Continuum) -> f64 {
    directed_slack(a, b).max(directed_slack(b, a))
}

/// Plain double loop over the samples; the oracle all optimized paths are
/// checked against.
pub fn directed_value_brute(space: Space, a: &[V2], b: &[V2]) -> f64 {
    let mut worst = 0.0f64;
    for &p in a {
        let mut best = f64::INFINITY;
        for &q in b {
            let d = space.dist_coords(p, q);
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Grid-bucketed directed distance with the classic early-break: a sample of
/// `a` is abandoned as soon as some sample of `b` is provably at least as
/// close as the running maximum, which cannot change the final value.
pub fn directed_value(space: Space, a: &[V2], b: &[V2], gauge_b: f64) -> f64 {
    // Cheap estimate of the answer to size the buckets: the final cell is
    // max(gauge, estimate/4), so queries resolve within a few rings.
    let step = (b.len() / 8).max(1);
    let mut estimate = 0.0f64;
    for &p in a.iter().step_by((a.len() / 8).max(1)).take(8) {
        let mut best = f64::INFINITY;
        for &q in b.iter().step_by(step) {
            best = best.min(space.dist_coords(p, q));
        }
        estimate = estimate.max(best);
    }
    let cell = gauge_b.max(estimate / 4.0).max(1e-6);
    let grid = BucketGrid::build(space, b, cell);
    directed_value_with_grid(&grid, a)
}

/// Directed distance against a prebuilt bucket grid of the target samples.
pub fn directed_value_with_grid(grid: &BucketGrid, a: &[V2]) -> f64 {
    let mut cmax = 0.0f64;
    for &p in a {
        let res = grid.nearest(p, cmax);
        if !res.aborted && res.dist > cmax {
            cmax = res.dist;
        }
    }
    cmax
}

/// Symmetric sampled Hausdorff value.
pub fn hausdorff_value(space: Space, a: &[V2], b: &[V2], gauge_a: f64, gauge_b: f64) -> f64 {
    // Small inputs are faster brute-force than through grid construction.
    if a.len() * b.len() <= 4096 {
        directed_value_brute(space, a, b).max(directed_value_brute(space, b, a))
    } else {
        directed_value(space, a, b, gauge_b).max(directed_value(space, b, a, gauge_a))
    }
}

/// One-sided Hausdorff distance from `a` to `b` (optimized path).
pub fn directed_hausdorff(a: &Continuum, b: &Continuum) -> Result<ErrorBudget> {
    let space = check_pair(a, b)?;
    let v = directed_value(space, a.samples(), b.samples(), b.gauge());
    Ok(ErrorBudget::new(v, directed_slack(a, b)))
}

/// One-sided Hausdorff distance, brute-force oracle.
pub fn directed_hausdorff_brute(a: &Continuum, b: &Continuum) -> Result<ErrorBudget> {
    let space = check_pair(a, b)?;
    let v = directed_value_brute(space, a.samples(), b.samples());
    Ok(ErrorBudget::new(v, directed_slack(a, b)))
}

/// Symmetric Hausdorff distance (optimized path).
pub fn hausdorff(a: &Continuum, b: &Continuum) -> Result<ErrorBudget> {
    let space = check_pair(a, b)?;
    let v = directed_value(space, a.samples(), b.samples(), b.gauge())
        .max(directed_value(space, b.samples(), a.samples(), a.gauge()));
    Ok(ErrorBudget::new(v, sym_slack(a, b)))
}

/// Symmetric Hausdorff distance, brute-force oracle.
pub fn hausdorff_brute(a: &Continuum, b: &Continuum) -> Result<ErrorBudget> {
    let space = check_pair(a, b)?;
    let v = directed_value_brute(space, a.samples(), b.samples())
        .max(directed_value_brute(space, b.samples(), a.samples()));
    Ok(ErrorBudget::new(v, sym_slack(a, b)))
}
