// SPDX-License-Identifier: Apache-2.0

//! Text formatting and the versioned JSON report.

use serde::Serialize;

use qdec_core::io::{format_subspace, SubspaceReport};
use qdec_core::{SubspaceBasis, Tolerances};

pub const REPORT_SCHEMA: &str = "qdec-report/1";

/// Values match symbolic labels when within this distance.
const LABEL_TOL: f64 = 1e-9;

/// Fixed-point with at most 12 decimals, trailing zeros removed.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-6 {
        return format!("{x:.3e}");
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn join_nums(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")
}

fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).expect("decimal digit") as usize])
        .collect()
}

/// `1` or `1−γᵢ` when `sigma` matches, using the model's own γ numbering.
pub fn radius_label(sigma: f64, gammas: &[f64], first_index: usize) -> Option<String> {
    if (sigma - 1.0).abs() <= LABEL_TOL {
        return Some("1".into());
    }
    let matches: Vec<String> = gammas
        .iter()
        .enumerate()
        .filter(|(_, g)| (sigma - (1.0 - **g)).abs() <= LABEL_TOL)
        .map(|(i, _)| format!("1−γ{}", subscript(i + first_index)))
        .collect();
    if matches.is_empty() {
        None
    } else {
        Some(matches.join(" = "))
    }
}

pub fn subspace(h: &SubspaceBasis, tol: &Tolerances) -> String {
    format_subspace(h, tol)
}

#[derive(Debug, Serialize)]
pub struct ChannelSummary {
    pub dim: usize,
    pub num_kraus: usize,
    pub is_tp: bool,
    pub tp_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct DualReport {
    pub gas: bool,
    pub stalled: bool,
    /// Distinct supports of `T*ⁿ(Π_S)` in order.
    pub supports: Vec<SubspaceReport>,
}

#[derive(Debug, Serialize)]
pub struct DidStageReport {
    pub subspace: SubspaceReport,
    pub gamma_min: f64,
    pub gamma_max: f64,
}

#[derive(Debug, Serialize)]
pub struct DidReport {
    pub gas: bool,
    pub outcome: &'static str,
    /// Transient stages; an unsuccessful run's trapped remainder is reported
    /// separately.
    pub stages: Vec<DidStageReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trapped: Option<SubspaceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bottleneck: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct NfdStageReport {
    pub subspace: SubspaceReport,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct NfdReport {
    pub gas: bool,
    pub stages: Vec<NfdStageReport>,
    pub minimal_gas: SubspaceReport,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub steps: usize,
    pub probabilities: Vec<f64>,
    pub max_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct AsymptoticsReport {
    pub parts: Vec<SubspaceReport>,
    pub probabilities: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remainder: Option<f64>,
    pub limit_duals: Vec<qdec_core::io::JsonMatrix>,
    pub route_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub channel: ChannelSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace: Option<SubspaceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariance_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gas: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub did: Option<DidReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nfd: Option<NfdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotics: Option<AsymptoticsReport>,
}

impl Report {
    pub fn new(command: &'static str, channel: ChannelSummary) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            command,
            channel,
            subspace: None,
            invariance_residual: None,
            gas: None,
            dual: None,
            did: None,
            nfd: None,
            asymptotics: None,
        }
    }

    pub fn print(&self) {
        println!(
            "{}",
            serde_json::to_string_pretty(self).expect("reports always serialize")
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_trimmed() {
        assert_eq!(num(0.05), "0.05");
        assert_eq!(num(0.049999999999999996), "0.05");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.75), "0.75");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(3e-9), "3.000e-9");
    }

    #[test]
    fn symbolic_radii() {
        let g = [0.3, 0.3, 0.05, 0.15, 0.2];
        assert_eq!(radius_label(1.0, &g, 1).as_deref(), Some("1"));
        assert_eq!(radius_label(0.95, &g, 1).as_deref(), Some("1−γ₃"));
        assert_eq!(radius_label(0.7, &g, 1).as_deref(), Some("1−γ₁ = 1−γ₂"));
        assert_eq!(radius_label(0.5, &g, 1), None);
        assert_eq!(radius_label(0.8, &[0.5, 0.3, 0.2], 0).as_deref(), Some("1−γ₂"));
    }
}
