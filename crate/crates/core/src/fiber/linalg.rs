//! Small dense complex matrix kernels (row-major, `n ≤ 8`).

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Off-diagonal mass threshold (relative to the Frobenius norm) for Jacobi sweeps.
pub const JACOBI_THRESHOLD: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

pub const DURAND_KERNER_TOLERANCE: f64 = 1e-11;
pub const DURAND_KERNER_MAX_ITERATIONS: usize = 500;

pub fn identity(n: usize) -> Vec<Complex64> {
    let mut m = vec![ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = ONE;
    }
    m
}

pub fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut c = vec![ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// `A* A`, Hermitian positive semidefinite.
pub fn gram(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut h = vec![ZERO; n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = ZERO;
            for k in 0..n {
                s += a[k * n + i].conj() * a[k * n + j];
            }
            h[i * n + j] = s;
            h[j * n + i] = s.conj();
        }
    }
    for i in 0..n {
        h[i * n + i].im = 0.0;
    }
    h
}

fn frobenius(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_mass(h: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += h[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns the eigenvalues (unsorted) and whether the off-diagonal mass fell
/// below `JACOBI_THRESHOLD · ‖H‖_F` within `JACOBI_MAX_SWEEPS` sweeps.
pub fn hermitian_eigenvalues(h: &[Complex64], n: usize) -> (Vec<f64>, bool) {
    let mut h = h.to_vec();
    let scale = frobenius(&h);
    let mut converged = scale == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged || off_diagonal_mass(&h, n) <= JACOBI_THRESHOLD * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = h[p * n + q];
                let r = g.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = g / r;
                let (app, aqq) = (h[p * n + p].re, h[q * n + q].re);
                let zeta = (aqq - app) / (2.0 * r);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = D·P with D = diag(.., e^{-iφ} at q, ..); columns p, q of U:
                // U[p][p] = c, U[q][p] = -s e^{-iφ}, U[p][q] = s, U[q][q] = c e^{-iφ}.
                let upp = Complex64::new(c, 0.0);
                let uqp = -phase.conj() * s;
                let upq = Complex64::new(s, 0.0);
                let uqq = phase.conj() * c;
                for k in 0..n {
                    let hp = h[k * n + p];
                    let hq = h[k * n + q];
                    h[k * n + p] = hp * upp + hq * uqp;
                    h[k * n + q] = hp * upq + hq * uqq;
                }
                for k in 0..n {
                    let mp = h[p * n + k];
                    let mq = h[q * n + k];
                    h[p * n + k] = upp.conj() * mp + uqp.conj() * mq;
                    h[q * n + k] = upq.conj() * mp + uqq.conj() * mq;
                }
                h[p * n + q] = ZERO;
                h[q * n + p] = ZERO;
                h[p * n + p].im = 0.0;
                h[q * n + q].im = 0.0;
            }
        }
    }
    if !converged {
        converged = off_diagonal_mass(&h, n) <= JACOBI_THRESHOLD * scale;
    }
    ((0..n).map(|i| h[i * n + i].re).collect(), converged)
}

/// Largest singular value (operator 2-norm).
pub fn operator_norm(a: &[Complex64], n: usize) -> f64 {
    match n {
        1 => a[0].norm(),
        2 => largest_singular_value_2x2(a),
        _ => {
            let (eig, _) = hermitian_eigenvalues(&gram(a, n), n);
            eig.into_iter().fold(0.0, f64::max).max(0.0).sqrt()
        }
    }
}

/// Closed form: largest eigenvalue of the 2×2 Hermitian `A*A`.
fn largest_singular_value_2x2(a: &[Complex64]) -> f64 {
    let h = gram(a, 2);
    let (p, q, g) = (h[0].re, h[3].re, h[1]);
    let half_gap = 0.5 * (p - q);
    let lambda = 0.5 * (p + q) + (half_gap * half_gap + g.norm_sqr()).sqrt();
    lambda.max(0.0).sqrt()
}

/// Smallest singular value.
///
/// For `n ≥ 3` this runs one-sided (Hestenes) Jacobi on the columns of `A`,
/// which keeps relative accuracy for tiny singular values where `sqrt(λ_min(A*A))`
/// would not.
pub fn smallest_singular_value(a: &[Complex64], n: usize) -> f64 {
    match n {
        1 => a[0].norm(),
        2 => {
            let smax = largest_singular_value_2x2(a);
            if smax == 0.0 {
                0.0
            } else {
                (a[0] * a[3] - a[1] * a[2]).norm() / smax
            }
        }
        _ => singular_values(a, n)
            .into_iter()
            .fold(f64::INFINITY, f64::min),
    }
}

/// All singular values by one-sided Jacobi; unsorted.
pub fn singular_values(a: &[Complex64], n: usize) -> Vec<f64> {
    // Work on columns: cols[j][i] = a[i][j].
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j]).collect())
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let r = gamma.norm();
                if r == 0.0 || r <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / r).conj();
                let zeta = (beta - alpha) / (2.0 * r);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let xp = cols[p][i];
                    let xq = cols[q][i] * phase_conj;
                    cols[p][i] = xp * c - xq * s;
                    cols[q][i] = xp * s + xq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
/// `None` when a pivot is exactly zero.
pub fn inverse_gepp(a: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    let mut m = a.to_vec();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].norm().total_cmp(&m[j * n + col].norm()))
            .expect("non-empty range");
        if m[pivot * n + col] == ZERO {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
        }
        let d = ONE / m[col * n + col];
        for j in 0..n {
            m[col * n + j] *= d;
            inv[col * n + j] *= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[i * n + col];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let mcj = m[col * n + j];
                let icj = inv[col * n + j];
                m[i * n + j] -= f * mcj;
                inv[i * n + j] -= f * icj;
            }
        }
    }
    Some(inv)
}

/// Determinant by elimination with partial pivoting.
pub fn determinant(a: &[Complex64], n: usize) -> Complex64 {
    let mut m = a.to_vec();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].norm().total_cmp(&m[j * n + col].norm()))
            .expect("non-empty range");
        let pv = m[pivot * n + col];
        if pv == ZERO {
            return ZERO;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        det *= pv;
        for i in (col + 1)..n {
            let f = m[i * n + col] / pv;
            for j in col..n {
                let mcj = m[col * n + j];
                m[i * n + j] -= f * mcj;
            }
        }
    }
    det
}

/// Coefficients `c₀..cₙ` (ascending, `cₙ = 1`) of `det(λI − A)` by Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    let mut m = vec![ZERO; n * n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = matmul(a, &m, n);
        for i in 0..n {
            next[i * n + i] += coeffs[n - k + 1];
        }
        let am = matmul(a, &next, n);
        let trace: Complex64 = (0..n).map(|i| am[i * n + i]).sum();
        coeffs[n - k] = -trace / k as f64;
        m = next;
    }
    coeffs
}

pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Simultaneous root iteration for a monic polynomial (ascending coefficients).
///
/// Initial guesses sit on a circle of the given radius. On failure the last
/// iterates are returned as the error value.
pub fn durand_kerner(coeffs: &[Complex64], radius: f64) -> Result<Vec<Complex64>, Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..DURAND_KERNER_MAX_ITERATIONS {
        let mut done = true;
        for i in 0..n {
            let num = poly_eval(coeffs, z[i]);
            if num == ZERO {
                continue;
            }
            let mut den = ONE;
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den == ZERO {
                // coincident iterates: nudge apart
                let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += bump;
                done = false;
                continue;
            }
            let step = num / den;
            z[i] -= step;
            if step.norm() > DURAND_KERNER_TOLERANCE * (1.0 + z[i].norm()) {
                done = false;
            }
        }
        if done {
            return Ok(z);
        }
    }
    Err(z)
}

pub fn is_upper_triangular(a: &[Complex64], n: usize) -> bool {
    (0..n).all(|i| (0..i).all(|j| a[i * n + j] == ZERO))
}

pub fn is_lower_triangular(a: &[Complex64], n: usize) -> bool {
    (0..n).all(|i| ((i + 1)..n).all(|j| a[i * n + j] == ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jacobi_diagonalises_hermitian() {
        // eigenvalues of [[2, i],[-i, 2]] are 1 and 3
        let h = vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)];
        let (mut e, ok) = hermitian_eigenvalues(&h, 2);
        e.sort_by(f64::total_cmp);
        assert!(ok);
        assert!((e[0] - 1.0).abs() < 1e-13 && (e[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_matches_closed_form_on_3x3_block() {
        // block diag([[2,i],[-i,2]], 5)
        let mut h = vec![ZERO; 9];
        h[0] = c(2.0, 0.0);
        h[1] = c(0.0, 1.0);
        h[3] = c(0.0, -1.0);
        h[4] = c(2.0, 0.0);
        h[8] = c(5.0, 0.0);
        let (mut e, ok) = hermitian_eigenvalues(&h, 3);
        e.sort_by(f64::total_cmp);
        assert!(ok);
        for (got, want) in e.iter().zip([1.0, 3.0, 5.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_values_of_diagonal() {
        let mut a = vec![ZERO; 9];
        a[0] = c(3.0, 0.0);
        a[4] = c(0.0, -4.0);
        a[8] = c(1e-12, 0.0);
        assert!((operator_norm(&a, 3) - 4.0).abs() < 1e-12);
        assert!((smallest_singular_value(&a, 3) - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn gepp_inverts() {
        let a = vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)];
        let inv = inverse_gepp(&a, 2).unwrap();
        let p = matmul(&a, &inv, 2);
        for (x, y) in p.iter().zip(identity(2)) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!(inverse_gepp(&[ZERO; 4], 2).is_none());
    }

    #[test]
    fn char_poly_and_roots() {
        // [[0,1],[1,0]] → λ² − 1
        let a = vec![ZERO, ONE, ONE, ZERO];
        let p = characteristic_polynomial(&a, 2);
        assert_eq!(p, vec![c(-1.0, 0.0), ZERO, ONE]);
        let mut r = durand_kerner(&p, 2.0).unwrap();
        r.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((determinant(&a, 2) - c(-1.0, 0.0)).norm() < 1e-15);
    }
}
