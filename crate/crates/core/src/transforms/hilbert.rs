//! Finite Hilbert transform `H(g)(x) = PV \int_{-1}^1 g(y) / (x - y) dy`.
//!
//! The principal value is removed by subtracting `g(x)`:
//! `H(g)(x) = \int (g(y) - g(x)) / (x - y) dy + g(x) log((1+x)/(1-x))`,
//! and the remaining integrable kernel is integrated with tanh-sinh panels
//! meeting at `x`.

use crate::error::{Error, Result};
use crate::measure::GenJacobiSpec;
use crate::quadrature::{jacobi_panels, PanelNode};

/// Tanh-sinh level used for all transforms in this module.
pub const LEVEL: u32 = 8;

/// `log((1+x)/(1-x))`.
pub fn log_ratio(x: f64) -> f64 {
    x.ln_1p() - (-x).ln_1p()
}

fn check_interior(x: f64) -> Result<()> {
    if x > -1.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::PointOnBoundary(x))
    }
}

/// Panel nodes for transforms at `x` against `w(y) dy`.
pub fn panels_at(weight: &GenJacobiSpec, x: f64) -> Result<Vec<PanelNode>> {
    check_interior(x)?;
    Ok(jacobi_panels(weight, &[x], LEVEL))
}

/// `H(w)(x)` for the weight itself.
pub fn hilbert_of_weight(nodes: &[PanelNode], weight: &GenJacobiSpec, x: f64) -> f64 {
    let wx = weight.weight(x);
    let body: f64 = nodes
        .iter()
        .map(|nd| nd.ts_weight * (nd.w - wx) / nd.offset_from(x))
        .sum();
    body + wx * log_ratio(x)
}

/// `H(p w)(x)` given `p` at the panel nodes and at `x`, and `H(w)(x)`.
pub fn hilbert_with_weight(nodes: &[PanelNode], p: &[f64], px: f64, hw: f64, x: f64) -> f64 {
    let body: f64 = nodes
        .iter()
        .zip(p)
        .map(|(nd, &py)| nd.ts_weight * nd.w * (py - px) / nd.offset_from(x))
        .sum();
    body + px * hw
}

/// `[M_b, H](p w)(x) = \int (b(x) - b(y)) p(y) w(y) / (x - y) dy`, given `b`
/// and `p` at the panel nodes.
pub fn hilbert_commutator_with_weight(
    nodes: &[PanelNode],
    b: &[f64],
    p: &[f64],
    bx: f64,
    x: f64,
) -> f64 {
    nodes
        .iter()
        .zip(b.iter().zip(p))
        .map(|(nd, (&by, &py))| nd.ts_weight * nd.w * (bx - by) * py / nd.offset_from(x))
        .sum()
}

/// `H(g)(x)` for a density `g` continuous at `x`.
pub fn hilbert_transform(g: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let weight = GenJacobiSpec::legendre();
    let nodes = panels_at(&weight, x)?;
    let p: Vec<f64> = nodes.iter().map(|nd| g(nd.y)).collect();
    Ok(hilbert_with_weight(&nodes, &p, g(x), log_ratio(x), x))
}

/// `H(p w)(x)` for a generalized Jacobi weight `w`.
pub fn weighted_hilbert(p: impl Fn(f64) -> f64, weight: &GenJacobiSpec, x: f64) -> Result<f64> {
    let nodes = panels_at(weight, x)?;
    let vals: Vec<f64> = nodes.iter().map(|nd| p(nd.y)).collect();
    let hw = hilbert_of_weight(&nodes, weight, x);
    Ok(hilbert_with_weight(&nodes, &vals, p(x), hw, x))
}

/// `[M_b, H](p w)(x)`.
pub fn hilbert_commutator(
    b: impl Fn(f64) -> f64,
    p: impl Fn(f64) -> f64,
    weight: &GenJacobiSpec,
    x: f64,
) -> Result<f64> {
    let nodes = panels_at(weight, x)?;
    let bv: Vec<f64> = nodes.iter().map(|nd| b(nd.y)).collect();
    let pv: Vec<f64> = nodes.iter().map(|nd| p(nd.y)).collect();
    Ok(hilbert_commutator_with_weight(&nodes, &bv, &pv, b(x), x))
}
