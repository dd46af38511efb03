//! Independent eigenvalue oracle for small operators.
//!
//! The characteristic polynomial `det(λI - A)` is expanded with the
//! Faddeev–LeVerrier recurrence in double-double arithmetic. Because `A` is
//! symmetric the polynomial is real-rooted, and so is every derivative; the
//! roots of `p'` therefore separate the roots of `p`, with `p` monotone
//! between consecutive critical points. Roots are found recursively from the
//! top derivative down, bisecting on each monotone piece.

use crate::matrix::DenseMatrix;
use crate::operator::SchrodingerOperator;

use super::dd::DoubleDouble;
use super::EigenError;

/// Largest dimension accepted by [`charpoly_oracle`].
pub const ORACLE_MAX_DIM: usize = 12;

/// Coefficients of `det(λI - A)`, lowest degree first; the leading
/// coefficient is exactly one.
pub fn charpoly_coefficients(a: &DenseMatrix) -> Vec<DoubleDouble> {
    let n = a.rows();
    let dd = |v: f64| DoubleDouble::from_f64(v);
    let mut coeffs = vec![DoubleDouble::ZERO; n + 1];
    coeffs[n] = DoubleDouble::ONE;

    // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k,  M_0 = 0.
    let mut m = vec![DoubleDouble::ZERO; n * n];
    for k in 1..=n {
        let mut next = vec![DoubleDouble::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = DoubleDouble::ZERO;
                for l in 0..n {
                    let a_il = a[(i, l)];
                    if a_il != 0.0 {
                        acc = acc + dd(a_il) * m[l * n + j];
                    }
                }
                next[i * n + j] = acc;
            }
        }
        for i in 0..n {
            next[i * n + i] = next[i * n + i] + coeffs[n - k + 1];
        }
        let mut trace = DoubleDouble::ZERO;
        for i in 0..n {
            for l in 0..n {
                let a_il = a[(i, l)];
                if a_il != 0.0 {
                    trace = trace + dd(a_il) * next[l * n + i];
                }
            }
        }
        coeffs[n - k] = (-trace).div_f64(k as f64);
        m = next;
    }
    coeffs
}

/// Eigenvalues of `op`, ascending, computed without touching the QL solver.
pub fn charpoly_oracle(op: &SchrodingerOperator) -> Result<Vec<f64>, EigenError> {
    charpoly_roots(op.matrix())
}

pub fn charpoly_roots(a: &DenseMatrix) -> Result<Vec<f64>, EigenError> {
    let n = a.rows();
    if n > ORACLE_MAX_DIM {
        return Err(EigenError::TooLarge { n, max: ORACLE_MAX_DIM });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let coeffs = charpoly_coefficients(a);
    let (lo, hi) = gershgorin(a);
    let pad = 1e-6 * (1.0 + lo.abs().max(hi.abs()));
    let mut roots = real_roots(&coeffs, lo - pad, hi + pad)?;
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn gershgorin(a: &DenseMatrix) -> (f64, f64) {
    let n = a.rows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        lo = lo.min(a[(i, i)] - radius);
        hi = hi.max(a[(i, i)] + radius);
    }
    (lo, hi)
}

fn eval(coeffs: &[DoubleDouble], x: f64) -> DoubleDouble {
    let x = DoubleDouble::from_f64(x);
    coeffs.iter().rev().fold(DoubleDouble::ZERO, |acc, &c| acc * x + c)
}

/// `Σ |c_k| |x|^k`, the scale against which a near-zero value is judged.
fn magnitude(coeffs: &[DoubleDouble], x: f64) -> f64 {
    let ax = x.abs();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * ax + c.to_f64().abs())
}

fn derivative(coeffs: &[DoubleDouble]) -> Vec<DoubleDouble> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * DoubleDouble::from_f64(k as f64))
        .collect()
}

/// All roots (with multiplicity) of a real-rooted polynomial whose roots lie
/// in `[lo, hi]`.
fn real_roots(coeffs: &[DoubleDouble], lo: f64, hi: f64) -> Result<Vec<f64>, EigenError> {
    let degree = coeffs.len() - 1;
    match degree {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![(-coeffs[0] / coeffs[1]).to_f64()]),
        _ => {}
    }
    let critical = real_roots(&derivative(coeffs), lo, hi)?;
    let mut breaks = Vec::with_capacity(degree + 1);
    breaks.push(lo);
    breaks.extend(critical.iter().map(|c| c.clamp(lo, hi)));
    breaks.push(hi);

    (0..degree)
        .map(|i| root_between(coeffs, breaks[i], breaks[i + 1].max(breaks[i]), i))
        .collect()
}

/// The unique root of `p` on `[a, b]`, where `p` is monotone.
fn root_between(coeffs: &[DoubleDouble], mut a: f64, mut b: f64, index: usize) -> Result<f64, EigenError> {
    if a == b {
        return Ok(a);
    }
    let mut pa = eval(coeffs, a).signum();
    let pb = eval(coeffs, b).signum();
    if pa == 0 {
        return Ok(a);
    }
    if pb == 0 {
        return Ok(b);
    }
    if pa == pb {
        // No sign change: the root is a multiple root sitting on one of the
        // critical points bounding the piece.
        let va = eval(coeffs, a).abs().to_f64();
        let vb = eval(coeffs, b).abs().to_f64();
        let (x, v) = if va <= vb { (a, va) } else { (b, vb) };
        let tolerance = 1e-6 * magnitude(coeffs, x);
        if v <= tolerance {
            return Ok(x);
        }
        return Err(EigenError::RootIsolationFailure {
            index,
            detail: format!("no sign change on [{a}, {b}] and |p| = {v:e} at the nearer end exceeds {tolerance:e}"),
        });
    }
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let pm = eval(coeffs, mid).signum();
        if pm == 0 {
            return Ok(mid);
        }
        if pm == pa {
            a = mid;
            pa = pm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
