//! Report records produced by the diagnostic suites.
//!
//! Reports are concrete `f64` structures with serde support so the CLI can
//! serialize them to JSON and CSV deterministically.

use serde::{Deserialize, Serialize};

/// Shell-max decay threshold for a "compact-consistent" verdict.
pub const DECAY_THRESHOLD: f64 = 0.1;
/// Shell-max growth threshold for a divergence flag.
pub const DIVERGENCE_THRESHOLD: f64 = 10.0;

/// One dyadic boundary shell of a ratio profile: shells are indexed by
/// 1 - |a| in (2^-(k+1), 2^-k].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellEntry {
    pub shell_index: usize,
    /// Representative 1 - |a| for the shell (upper edge 2^-shell_index).
    pub one_minus_a: f64,
    pub max_ratio: f64,
    /// True if any contributing node carried an overflow sentinel.
    pub flag: bool,
}

/// Result of a Carleson ratio sweep over lattice centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    /// max over centers of mu(B(a,r)) / (1-|a|^2)^(n+1+beta).
    pub constant: f64,
    /// Coordinates of the maximizing center as [re, im] pairs.
    pub argmax_center: Vec<[f64; 2]>,
    pub r: f64,
    pub beta: f64,
    /// Truncation radius of the center sweep; finiteness claims are claims
    /// about |a| <= rho_max only.
    pub rho_max: f64,
    pub shell_profile: Vec<ShellEntry>,
    /// Overflow seen, or last-shell max exceeds DIVERGENCE_THRESHOLD x the
    /// first-shell max.
    pub divergence_flag: bool,
    /// Vanishing-mode verdict: last-shell max <= DECAY_THRESHOLD x peak.
    pub compact_flag: bool,
    /// "sup" (boundedness sweep) or "vanishing" (compactness sweep).
    pub mode: String,
    pub decay_threshold: f64,
    pub divergence_threshold: f64,
}

/// Result of a named property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub samples: usize,
    pub observed_bound: f64,
    pub asserted_bound: Option<f64>,
    pub pass: bool,
    pub notes: String,
}

impl PropertyReport {
    pub fn passing(name: &str, samples: usize, observed: f64, asserted: f64, notes: String) -> Self {
        Self {
            name: name.to_string(),
            samples,
            observed_bound: observed,
            asserted_bound: Some(asserted),
            pass: observed <= asserted,
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_report_pass_logic() {
        let r = PropertyReport::passing("demo", 10, 0.5, 1.0, String::new());
        assert!(r.pass);
        let r = PropertyReport::passing("demo", 10, 2.0, 1.0, String::new());
        assert!(!r.pass);
    }

    #[test]
    fn json_round_trip() {
        let rep = CarlesonReport {
            constant: 3.25,
            argmax_center: vec![[0.5, -0.25]],
            r: 1.0,
            beta: 0.0,
            rho_max: 0.999,
            shell_profile: vec![ShellEntry {
                shell_index: 1,
                one_minus_a: 0.5,
                max_ratio: 3.25,
                flag: false,
            }],
            divergence_flag: false,
            compact_flag: false,
            mode: "sup".into(),
            decay_threshold: DECAY_THRESHOLD,
            divergence_threshold: DIVERGENCE_THRESHOLD,
        };
        let s = serde_json::to_string(&rep).unwrap();
        let back: CarlesonReport = serde_json::from_str(&s).unwrap();
        assert_eq!(rep, back);
    }
}
