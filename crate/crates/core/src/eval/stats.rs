use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Two-sided 5% critical value of the signed-rank statistic for N = 20.
pub const WILCOXON_T_CRITICAL_N20: f64 = 52.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WilcoxonResult {
    pub r_plus: f64,
    pub r_minus: f64,
    /// `min(r_plus, r_minus)`.
    pub statistic: f64,
    pub n: usize,
    /// `Some(statistic <= 52)` when `n == 20`; no verdict otherwise.
    pub reject_at_0_05: Option<bool>,
}

/// Signed-rank sums of paired differences.
///
/// `|d|` is ranked ascending with average ranks on ties. Zero differences
/// are kept, and half of their rank mass is credited to each side.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> WilcoxonResult {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diffs[a].abs().total_cmp(&diffs[b].abs()));

    let mut ranks = alloc::vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && diffs[order[j]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // positions i..j share the average of ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }

    let (mut r_plus, mut r_minus) = (0.0, 0.0);
    for (&d, &r) in diffs.iter().zip(&ranks) {
        if d > 0.0 {
            r_plus += r;
        } else if d < 0.0 {
            r_minus += r;
        } else {
            r_plus += r / 2.0;
            r_minus += r / 2.0;
        }
    }
    let statistic = r_plus.min(r_minus);
    WilcoxonResult {
        r_plus,
        r_minus,
        statistic,
        n,
        reject_at_0_05: (n == 20).then_some(statistic <= WILCOXON_T_CRITICAL_N20),
    }
}

/// Natural log of a positive duration in seconds.
pub fn lnt(seconds: f64) -> Result<f64> {
    if !(seconds > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "log-time needs a positive duration, got {seconds}"
        )));
    }
    Ok(libm::log(seconds))
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample (n - 1) standard deviation; exactly 0 for fewer than two values or
/// identical values.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 || values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (values.len() - 1) as f64)
}
