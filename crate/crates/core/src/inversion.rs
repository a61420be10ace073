//! Invertibility in `E(Ω, X)`: certified Neumann series, perturbation of
//! inverses, and mixing preservation of inversion.
//!
//! Bounds checked by the certificates:
//!
//! * `‖x‖ ≪ 1` ⇒ `‖(e − x)⁻¹ − e‖ ≤ ‖x‖(1 − ‖x‖)⁻¹`;
//! * `2‖h‖ ≪ ‖x⁻¹‖⁻¹` ⇒ `‖(x + h)⁻¹ − x⁻¹‖ ≤ 2‖x⁻¹‖²‖h‖`.
//!
//! Both are `E`-valued, i.e. they hold atom by atom.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::bundle::Section;
use crate::error::{Error, Result};
use crate::fiber::FiberInverse;
use crate::measure::{EFunction, PartitionOfUnity};

/// Largest admissible number of Neumann terms.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

/// Pointwise agreement required between `(Σ πₖxₖ)⁻¹` and `Σ πₖxₖ⁻¹`.
pub const MIXING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationOrder {
    Exact,
    Terms(usize),
}

impl Serialize for TruncationOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TruncationOrder::Exact => s.serialize_str("exact"),
            TruncationOrder::Terms(n) => s.serialize_u64(*n as u64),
        }
    }
}

/// An inverse together with the bookkeeping that certifies it.
#[derive(Debug, Clone)]
pub struct InverseCertificate {
    pub inverse: Section,
    /// `‖y·y⁻¹ − e‖` per atom, `y` the element inverted.
    pub residual: EFunction,
    pub truncation_order: TruncationOrder,
    /// Right-hand side of the invoked bound minus the achieved left-hand side.
    pub bound_slack: EFunction,
    pub tolerance: f64,
}

impl InverseCertificate {
    /// Check `residual ≤ tolerance` and `bound_slack ≥ −slack_tol` everywhere.
    pub fn verify(&self, slack_tol: f64) -> Result<()> {
        let space = self.residual.space();
        for i in 0..space.len() {
            let r = self.residual.at(i).re;
            if r > self.tolerance {
                return Err(Error::CheckFailed(format!(
                    "residual {r:e} exceeds {:e} at atom `{}`",
                    self.tolerance,
                    space.atom(i)
                )));
            }
            let s = self.bound_slack.at(i).re;
            if s < -slack_tol {
                return Err(Error::CheckFailed(format!(
                    "bound violated by {:e} at atom `{}`",
                    -s,
                    space.atom(i)
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let space = self.residual.space();
        let per_atom = |f: &EFunction| -> serde_json::Map<String, serde_json::Value> {
            (0..space.len())
                .map(|i| (space.atom(i).to_string(), f.at(i).re.into()))
                .collect()
        };
        serde_json::json!({
            "inverse": self.inverse.to_literal(),
            "residual": per_atom(&self.residual),
            "truncation_order": self.truncation_order,
            "bound_slack": per_atom(&self.bound_slack),
            "tolerance": self.tolerance,
        })
    }
}

/// Smallest `N` with `q^{N+1}/(1 − q) ≤ tol`.
fn truncation_terms(q: f64, tol: f64) -> Option<usize> {
    if q == 0.0 {
        return Some(0);
    }
    let tail = |n: usize| q.powi(n as i32 + 1) / (1.0 - q);
    let estimate = ((tol * (1.0 - q)).ln() / q.ln()).ceil() - 1.0;
    if estimate.is_nan() || estimate > MAX_SERIES_TERMS as f64 {
        return None;
    }
    let mut n = estimate.max(0.0) as usize;
    while n > 0 && tail(n - 1) <= tol {
        n -= 1;
    }
    while tail(n) > tol {
        n += 1;
        if n > MAX_SERIES_TERMS {
            return None;
        }
    }
    Some(n)
}

/// `(e − x)⁻¹ = Σ_{n ≤ N} xⁿ` for `‖x‖ ≪ 1`.
///
/// `N` is the largest per-atom order needed for the geometric tail
/// `‖x‖^{N+1}(1 − ‖x‖)⁻¹` to drop below `tol`; the series is summed once.
pub fn neumann_inverse(x: &Section, tol: f64) -> Result<InverseCertificate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let space = x.space().clone();
    let norm = x.norm();
    let one = EFunction::one(&space);
    if let Some(i) = norm.first_not_strictly_below(&one)? {
        return Err(Error::Precondition {
            atom: space.atom(i).to_string(),
            reason: format!("‖x‖ = {} is not < 1", norm.at(i).re),
        });
    }
    let mut order = 0;
    for i in 0..space.len() {
        let q = norm.at(i).re;
        let n = truncation_terms(q, tol).ok_or_else(|| Error::SeriesCap {
            needed: ((tol * (1.0 - q)).ln() / q.ln()).ceil(),
            cap: MAX_SERIES_TERMS,
        })?;
        order = order.max(n);
    }

    let e = Section::unit(x.bundle());
    let mut sum = e.clone();
    let mut power = e.clone();
    for _ in 0..order {
        power = power.mul(x)?;
        if power.is_zero() {
            break;
        }
        sum = sum.add(&power)?;
    }

    let residual = e.sub(x)?.mul(&sum)?.distance(&e)?;
    let achieved = sum.distance(&e)?;
    let bound = EFunction::from_real_fn(&space, |i| {
        let q = norm.at(i).re;
        q / (1.0 - q)
    });
    Ok(InverseCertificate {
        inverse: sum,
        residual,
        truncation_order: TruncationOrder::Terms(order),
        bound_slack: bound.sub(&achieved)?,
        tolerance: tol,
    })
}

/// Atomwise exact inverse; fails with the list of non-invertible atoms.
pub fn inverse(x: &Section, tol: f64) -> Result<Section> {
    let mut failing = Vec::new();
    let mut values = Vec::with_capacity(x.values().len());
    for (i, v) in x.values().iter().enumerate() {
        match v.inverse(tol) {
            FiberInverse::Invertible(b) => values.push(b),
            FiberInverse::NotInvertible { .. } => failing.push(x.space().atom(i).to_string()),
        }
    }
    if failing.is_empty() {
        Section::new(x.bundle(), values)
    } else {
        Err(Error::NotInvertible { atoms: failing })
    }
}

pub fn is_invertible(x: &Section, tol: f64) -> bool {
    x.values().iter().all(|v| v.is_invertible(tol))
}

/// Exact inverse with a certificate whose slack is `tol − residual`.
pub fn exact_inverse(x: &Section, tol: f64) -> Result<InverseCertificate> {
    let inv = inverse(x, tol)?;
    let e = Section::unit(x.bundle());
    let left = x.mul(&inv)?.distance(&e)?;
    let right = inv.mul(x)?.distance(&e)?;
    let residual = EFunction::from_real_fn(x.space(), |i| left.at(i).re.max(right.at(i).re));
    let bound_slack = residual.map(|r| Complex64::new(tol - r.re, 0.0));
    Ok(InverseCertificate {
        inverse: inv,
        residual,
        truncation_order: TruncationOrder::Exact,
        bound_slack,
        tolerance: tol,
    })
}

/// `(x + h)⁻¹` through `x + h = x(e + x⁻¹h)`, so `(x + h)⁻¹ = (e + x⁻¹h)⁻¹x⁻¹`
/// with the first factor from the Neumann series of `−x⁻¹h`.
///
/// Requires `2‖h‖ ≪ ‖x⁻¹‖⁻¹`. The certificate's slack is
/// `2‖x⁻¹‖²‖h‖ − ‖(x + h)⁻¹ − x⁻¹‖`.
pub fn perturbed_inverse(x: &Section, h: &Section, tol: f64) -> Result<InverseCertificate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let space = x.space().clone();
    let x_inv = inverse(x, crate::fiber::DEFAULT_INVERSION_TOLERANCE)?;
    let inv_norm = x_inv.norm();
    let h_norm = h.norm();
    // ‖x⁻¹‖ > 0 always; the comparison is 2‖h‖·‖x⁻¹‖ < 1.
    for i in 0..space.len() {
        let lhs = 2.0 * h_norm.at(i).re;
        let rhs = 1.0 / inv_norm.at(i).re;
        if lhs.is_nan() || lhs >= rhs {
            return Err(Error::Precondition {
                atom: space.atom(i).to_string(),
                reason: format!("2‖h‖ = {lhs} is not < ‖x⁻¹‖⁻¹ = {rhs}"),
            });
        }
    }
    let cond = x
        .norm()
        .mul(&inv_norm)?
        .re()
        .into_iter()
        .fold(1.0, f64::max);
    let y = x_inv.mul(h)?.scale(Complex64::new(-1.0, 0.0));
    let series = neumann_inverse(&y, tol / cond)?;
    let result = series.inverse.mul(&x_inv)?;

    let e = Section::unit(x.bundle());
    let residual = x.add(h)?.mul(&result)?.distance(&e)?;
    let achieved = result.distance(&x_inv)?;
    let bound = EFunction::from_real_fn(&space, |i| {
        let a = inv_norm.at(i).re;
        2.0 * a * a * h_norm.at(i).re
    });
    Ok(InverseCertificate {
        inverse: result,
        residual,
        truncation_order: series.truncation_order,
        bound_slack: bound.sub(&achieved)?,
        tolerance: tol,
    })
}

/// `(Σ πₖxₖ)⁻¹`, checked against `Σ πₖxₖ⁻¹` within [`MIXING_TOLERANCE`].
pub fn inverse_of_mix(partition: &PartitionOfUnity, xs: &[Section], tol: f64) -> Result<Section> {
    let inverses = xs
        .iter()
        .map(|x| inverse(x, tol))
        .collect::<Result<Vec<_>>>()?;
    let mixed = Section::mix(partition, xs)?;
    let direct = inverse(&mixed, tol)?;
    let glued = Section::mix(partition, &inverses)?;
    let gap = direct.max_distance(&glued)?;
    if gap > MIXING_TOLERANCE {
        return Err(Error::CheckFailed(format!(
            "inverse of mix differs from mix of inverses by {gap:e}"
        )));
    }
    Ok(direct)
}
