//! Tallies for property checks that run over many samples.

use serde::Serialize;

/// Witnesses kept per check; further failures are only counted.
const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    /// Largest `lhs − rhs` seen over inequality checks (negative means slack).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_excess: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checks: 0,
            failures: 0,
            max_excess: None,
            witnesses: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    /// Record `lhs ≤ rhs + tol`.
    pub fn record_le(&mut self, lhs: f64, rhs: f64, tol: f64, witness: impl FnOnce() -> String) {
        let excess = lhs - rhs;
        self.max_excess = Some(match self.max_excess {
            Some(m) if m >= excess || excess.is_nan() => m,
            _ => excess,
        });
        self.record(excess <= tol, || {
            format!("{} (lhs {lhs:e}, rhs {rhs:e})", witness())
        });
    }

    /// Record `|lhs − rhs| ≤ tol`.
    pub fn record_close(&mut self, lhs: f64, rhs: f64, tol: f64, witness: impl FnOnce() -> String) {
        let gap = (lhs - rhs).abs();
        self.max_excess = Some(match self.max_excess {
            Some(m) if m >= gap || gap.is_nan() => m,
            _ => gap,
        });
        self.record(gap <= tol, || {
            format!("{} (|{lhs:e} − {rhs:e}| = {gap:e})", witness())
        });
    }

    /// Record an error as a failed check.
    pub fn record_result<T, E: std::fmt::Display>(
        &mut self,
        result: std::result::Result<T, E>,
        context: impl FnOnce() -> String,
    ) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.record(false, || format!("{}: {e}", context()));
                None
            }
        }
    }
}
