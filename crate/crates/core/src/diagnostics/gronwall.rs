//! Fitting the Gronwall-type growth bound to a relative entropy trace.

use super::entropy::RelEntropyTrace;
use crate::error::{Error, Result};

/// Fraction of the dissipation absorbed on the left of the integral inequality.
pub const GRONWALL_LAMBDA: f64 = 0.5;

/// Relative excess of the entropy over the bound that counts as a violation.
const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GronwallFit {
    pub k: f64,
    pub lambda: f64,
    pub bound_curve: Vec<f64>,
    pub violated: bool,
}

/// Running trapezoid integral of `values` over `times`, starting at 0.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for n in 0..values.len() {
        if n > 0 {
            acc += 0.5 * (times[n] - times[n - 1]) * (values[n] + values[n - 1]);
        }
        out.push(acc);
    }
    out
}

/// Least `k >= 0` with `E(t) - E(0) + (1 - lambda) D(t) <= k int_0^t omega E`
/// at every sample, and the bound `E(0) exp(k int_0^t omega)`.
pub fn gronwall_fit(trace: &RelEntropyTrace) -> Result<GronwallFit> {
    let n = trace.times.len();
    if n == 0 {
        return Err(Error::EmptyTrace);
    }
    if trace.entropy.len() != n || trace.dissipation.len() != n || trace.omega.len() != n {
        return Err(Error::Sampling("entropy trace columns differ in length".into()));
    }
    let e0 = trace.entropy[0];
    let weighted: Vec<f64> = trace.entropy.iter().zip(&trace.omega).map(|(e, w)| e * w).collect();
    let growth = cumulative_trapezoid(&trace.times, &weighted);
    let mut k: f64 = 0.0;
    for ((e, d), w) in trace.entropy.iter().zip(&trace.dissipation).zip(&growth).skip(1) {
        let excess = e - e0 + (1.0 - GRONWALL_LAMBDA) * d;
        if excess <= 0.0 {
            continue;
        }
        k = if *w > 0.0 { k.max(excess / w) } else { f64::INFINITY };
    }
    let weight = cumulative_trapezoid(&trace.times, &trace.omega);
    let bound_curve: Vec<f64> = weight
        .iter()
        .map(|w| if *w == 0.0 { e0 } else { e0 * (k * w).exp() })
        .collect();
    let violated = trace
        .entropy
        .iter()
        .zip(&bound_curve)
        .any(|(e, b)| e - b > BOUND_TOLERANCE * b.abs());
    Ok(GronwallFit {
        k,
        lambda: GRONWALL_LAMBDA,
        bound_curve,
        violated,
    })
}
