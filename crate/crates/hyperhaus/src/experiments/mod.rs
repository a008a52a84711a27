//! Scripted numerical verifications: convergence of iterated stable arcs to
//! the foliation-closure family, covering radii, mixing, separation and
//! density probes, plus the worked examples on the interval, circle and a
//! square boundary with a gap.

pub mod converge;
pub mod demos;
pub mod probes;

pub use converge::{convergence_experiment, ConvergeParams, ConvergenceRunner};
pub use demos::{circle_demo, interval_demo, square_gap_demo};
pub use probes::{
    covering_radius_series, cw_expansivity_probe, density_probe, mixing_probe, separation_probe,
};

use crate::metrics::ErrorBudget;
use std::collections::BTreeMap;

/// An indexed sequence of measured distances with error budgets, plus the
/// configuration snapshot that produced it. Reruns with an identical
/// snapshot reproduce every value bit for bit.
#[derive(Debug, Clone)]
pub struct ConvergenceSeries {
    pub label: String,
    pub rows: Vec<(i64, ErrorBudget)>,
    pub config: BTreeMap<String, String>,
}

impl ConvergenceSeries {
    pub fn new(label: impl Into<String>, config: BTreeMap<String, String>) -> Self {
        ConvergenceSeries {
            label: label.into(),
            rows: Vec::new(),
            config,
        }
    }

    pub fn push(&mut self, n: i64, value: ErrorBudget) {
        if let Some(&(last, _)) = self.rows.last() {
            assert!(n > last, "series indices must increase");
        }
        self.rows.push((n, value));
    }

    pub fn value_at(&self, n: i64) -> Option<ErrorBudget> {
        self.rows.iter().find(|&&(i, _)| i == n).map(|&(_, v)| v)
    }

    /// CSV body with header `n,value,slack`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,slack\n");
        for (n, v) in &self.rows {
            out.push_str(&format!("{},{},{}\n", n, v.value, v.slack));
        }
        out
    }

    /// True when the rows starting at index `from` never increase by more
    /// than `tol`.
    pub fn decreasing_within(&self, from: i64, tol: f64) -> bool {
        let tail: Vec<&(i64, ErrorBudget)> =
            self.rows.iter().filter(|(n, _)| *n >= from).collect();
        tail.windows(2)
            .all(|w| w[1].1.value <= w[0].1.value + tol)
    }
}
