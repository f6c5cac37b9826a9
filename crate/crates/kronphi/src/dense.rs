//! Small dense-matrix services: matrix exponential, Hermitian/skew splits,
//! trace shift, and a guaranteed-upper 2-norm estimate.
//!
//! These run on the factor matrices `A_mu`, so everything here is sized in
//! the hundreds at most and plain `O(n^3)` dense algorithms are the right
//! tool.

use crate::error::{Error, Result};
use crate::tensor::DenseMatrix;
use num_complex::Complex64;

/// Per-factor trace shifts and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftInfo {
    /// One shift per factor matrix.
    pub per_factor: Vec<Complex64>,
    /// Sum of the per-factor shifts.
    pub total: Complex64,
}

impl ShiftInfo {
    pub fn from_per_factor(per_factor: Vec<Complex64>) -> Self {
        let total = per_factor.iter().sum();
        Self { per_factor, total }
    }
}

/// `trace(a) / n`, the mean eigenvalue.
pub fn trace_shift(a: &DenseMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(a.trace() / a.rows() as f64)
}

/// Split into Hermitian and skew-Hermitian parts, `a = h + s`.
pub fn herm_skew_split(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let adj = a.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let h = a.add(&adj).scale(half);
    let s = a.sub(&adj).scale(half);
    Ok((h, s))
}

// Pade scaling thresholds for the double-precision exponential.
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Matrix exponential by diagonal Pade approximation with 1-norm based
/// scaling and repeated squaring.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.norm_1();
    let (mut r, squarings) = if norm <= THETA_9 {
        let a2 = a.matmul(a);
        let (u, v) = if norm <= THETA_3 {
            pade_uv(a, &[a2.clone()], &B3)
        } else if norm <= THETA_5 {
            let a4 = a2.matmul(&a2);
            pade_uv(a, &[a2.clone(), a4], &B5)
        } else if norm <= THETA_7 {
            let a4 = a2.matmul(&a2);
            let a6 = a4.matmul(&a2);
            pade_uv(a, &[a2.clone(), a4, a6], &B7)
        } else {
            let a4 = a2.matmul(&a2);
            let a6 = a4.matmul(&a2);
            let a8 = a6.matmul(&a2);
            pade_uv(a, &[a2.clone(), a4, a6, a8], &B9)
        };
        (solve_pade(&u, &v)?, 0u32)
    } else {
        let s = ((norm / THETA_13).log2().ceil().max(0.0)) as u32;
        let a_s = a.scale(re(0.5f64.powi(s as i32)));
        let a2 = a_s.matmul(&a_s);
        let a4 = a2.matmul(&a2);
        let a6 = a4.matmul(&a2);
        let (u, v) = pade13_uv(&a_s, &a2, &a4, &a6);
        (solve_pade(&u, &v)?, s)
    };
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// U and V for the diagonal Pade forms of degree 3..9: powers = [A^2, A^4, ...].
fn pade_uv(a: &DenseMatrix, powers: &[DenseMatrix], b: &[f64]) -> (DenseMatrix, DenseMatrix) {
    let n = a.rows();
    let ident = DenseMatrix::identity(n);
    let mut odd = ident.scale(re(b[1]));
    let mut even = ident.scale(re(b[0]));
    for (k, p) in powers.iter().enumerate() {
        odd = odd.add(&p.scale(re(b[2 * k + 3])));
        even = even.add(&p.scale(re(b[2 * k + 2])));
    }
    (a.matmul(&odd), even)
}

fn pade13_uv(
    a: &DenseMatrix,
    a2: &DenseMatrix,
    a4: &DenseMatrix,
    a6: &DenseMatrix,
) -> (DenseMatrix, DenseMatrix) {
    let n = a.rows();
    let ident = DenseMatrix::identity(n);
    let w1 = a6
        .scale(re(B13[13]))
        .add(&a4.scale(re(B13[11])))
        .add(&a2.scale(re(B13[9])));
    let w = a6
        .matmul(&w1)
        .add(&a6.scale(re(B13[7])))
        .add(&a4.scale(re(B13[5])))
        .add(&a2.scale(re(B13[3])))
        .add(&ident.scale(re(B13[1])));
    let u = a.matmul(&w);
    let z1 = a6
        .scale(re(B13[12]))
        .add(&a4.scale(re(B13[10])))
        .add(&a2.scale(re(B13[8])));
    let v = a6
        .matmul(&z1)
        .add(&a6.scale(re(B13[6])))
        .add(&a4.scale(re(B13[4])))
        .add(&a2.scale(re(B13[2])))
        .add(&ident.scale(re(B13[0])));
    (u, v)
}

/// Solve (V - U) X = (V + U).
fn solve_pade(u: &DenseMatrix, v: &DenseMatrix) -> Result<DenseMatrix> {
    let lhs = v.sub(u);
    let rhs = v.add(u);
    lu_solve_matrix(&lhs, &rhs)
}

/// LU with partial pivoting; solves A X = B for a dense square A.
pub(crate) fn lu_solve_matrix(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    assert_eq!(b.rows(), n);
    let mut lu: Vec<Complex64> = a.data().to_vec();
    let mut piv: Vec<usize> = (0..n).collect();

    for k in 0..n {
        // pivot search in column k
        let mut p = k;
        let mut best = lu[k + k * n].norm();
        for i in (k + 1)..n {
            let v = lu[i + k * n].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::invalid("singular matrix in linear solve"));
        }
        if p != k {
            piv.swap(k, p);
            for c in 0..n {
                lu.swap(k + c * n, p + c * n);
            }
        }
        let pivot = lu[k + k * n];
        for i in (k + 1)..n {
            let m = lu[i + k * n] / pivot;
            lu[i + k * n] = m;
            if m != Complex64::ZERO {
                for c in (k + 1)..n {
                    let t = lu[k + c * n];
                    lu[i + c * n] -= m * t;
                }
            }
        }
    }

    let mut x = DenseMatrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        // apply row permutation
        let mut y: Vec<Complex64> = (0..n).map(|i| b.get(piv[i], c)).collect();
        // forward substitution (unit lower)
        for i in 1..n {
            let mut s = y[i];
            for k in 0..i {
                s -= lu[i + k * n] * y[k];
            }
            y[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= lu[i + k * n] * y[k];
            }
            y[i] = s / lu[i + i * n];
        }
        for i in 0..n {
            x.set(i, c, y[i]);
        }
    }
    Ok(x)
}

/// Upper estimate of the spectral norm.
///
/// Power iteration on `a* a` from a few deterministic starting vectors,
/// inflated by 1.01, capped by the guaranteed bounds
/// `sqrt(norm_1 * norm_inf)` and the Frobenius norm. If the iteration does
/// not converge the guaranteed cap is returned, so the result never drops
/// below the true 2-norm.
pub fn two_norm_estimate(a: &DenseMatrix) -> f64 {
    let guaranteed = (a.norm_1() * a.norm_inf()).sqrt().min(a.norm_frobenius());
    if guaranteed == 0.0 {
        return 0.0;
    }
    let n = a.cols();
    let mut best: f64 = 0.0;
    let mut converged = false;
    for start in 0..3u32 {
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| {
                let base = match start {
                    0 => 1.0,
                    1 => if i % 2 == 0 { 1.0 } else { -1.0 },
                    _ => 1.0 + i as f64 / n as f64,
                };
                Complex64::new(base, 0.0)
            })
            .collect();
        normalize(&mut x);
        let mut sigma_prev = 0.0f64;
        for _ in 0..100 {
            let ax = a.matvec(&x);
            let mut y = adjoint_matvec(a, &ax);
            let sigma = ax.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            normalize(&mut y);
            x = y;
            if (sigma - sigma_prev).abs() <= 1e-7 * sigma.max(1e-300) {
                sigma_prev = sigma;
                converged = true;
                break;
            }
            sigma_prev = sigma;
        }
        best = best.max(sigma_prev);
    }
    if converged {
        (1.01 * best).min(guaranteed)
    } else {
        guaranteed
    }
}

fn normalize(x: &mut [Complex64]) {
    let n = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

fn adjoint_matvec(a: &DenseMatrix, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.rows(), x.len());
    (0..a.cols())
        .map(|c| {
            (0..a.rows())
                .map(|r| a.get(r, c).conj() * x[r])
                .sum::<Complex64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut impl Rng, n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).max_abs() / b.max_abs().max(1e-300)
    }

    /// Scaled 60-term Taylor series, squared back: an independent reference.
    fn expm_taylor(a: &DenseMatrix) -> DenseMatrix {
        let mut s = 0i32;
        while a.norm_1() / 2f64.powi(s) > 0.25 {
            s += 1;
        }
        let a_s = a.scale(c(0.5f64.powi(s), 0.0));
        let n = a.rows();
        let mut sum = DenseMatrix::identity(n);
        let mut term = DenseMatrix::identity(n);
        for k in 1..=60 {
            term = term.matmul(&a_s).scale(c(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..s {
            sum = sum.matmul(&sum);
        }
        sum
    }

    #[test]
    fn expm_zero_is_identity() {
        let e = expm(&DenseMatrix::zeros(4, 4)).unwrap();
        assert_eq!(rel_diff(&e, &DenseMatrix::identity(4)), 0.0);
    }

    #[test]
    fn expm_diagonal() {
        let mut a = DenseMatrix::zeros(2, 2);
        a.set(0, 0, c(1.0, 0.0));
        a.set(1, 1, c(-1.0, 0.0));
        let e = expm(&a).unwrap();
        assert!((e.get(0, 0).re - 1f64.exp()).abs() <= 1e-15 * 1f64.exp());
        assert!((e.get(1, 1).re - (-1f64).exp()).abs() <= 1e-15);
        assert!(e.get(0, 1).norm() < 1e-16);
    }

    #[test]
    fn expm_matches_taylor_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = random_matrix(&mut rng, 6);
        // bring the 1-norm near 5 so the Pade-13 branch with scaling runs
        let target = 5.0;
        a = a.scale(c(target / a.norm_1(), 0.0));
        let e = expm(&a).unwrap();
        let reference = expm_taylor(&a);
        assert!(rel_diff(&e, &reference) < 1e-13);
    }

    #[test]
    fn expm_rejects_rectangular() {
        assert!(expm(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn expm_commuting_product_rule() {
        // a and b commute when both are polynomials of one matrix
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = random_matrix(&mut rng, 5).scale(c(0.6, 0.0));
        let a = m.add(&m.matmul(&m).scale(c(0.3, 0.1)));
        let b = m.scale(c(-0.8, 0.2)).add_scaled_identity(c(0.1, 0.0));
        let lhs = expm(&a.add(&b)).unwrap();
        let rhs = expm(&a).unwrap().matmul(&expm(&b).unwrap());
        assert!(rel_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn expm_half_squares_to_whole() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_matrix(&mut rng, 6);
        let half = expm(&a.scale(c(0.5, 0.0))).unwrap();
        let whole = expm(&a).unwrap();
        assert!(rel_diff(&half.matmul(&half), &whole) < 1e-12);
    }

    #[test]
    fn trace_shift_examples() {
        assert_eq!(
            trace_shift(&DenseMatrix::identity(7)).unwrap(),
            Complex64::ONE
        );
        let mut d = DenseMatrix::zeros(2, 2);
        d.set(0, 0, c(2.0, 0.0));
        d.set(1, 1, c(4.0, 0.0));
        assert_eq!(trace_shift(&d).unwrap(), c(3.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = random_matrix(&mut rng, 5);
        let loop_trace: Complex64 = (0..5).map(|i| a.get(i, i)).sum();
        assert!((trace_shift(&a).unwrap() - loop_trace / 5.0).norm() < 1e-15);
    }

    #[test]
    fn herm_skew_split_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = random_matrix(&mut rng, 5);
        let (h, s) = herm_skew_split(&a).unwrap();
        assert!(rel_diff(&h.add(&s), &a) < 1e-15);
        assert!(h.sub(&h.adjoint()).max_abs() < 1e-15);
        assert!(s.add(&s.adjoint()).max_abs() < 1e-15);

        // Hermitian input: skew part vanishes
        let herm = a.add(&a.adjoint());
        let (h2, s2) = herm_skew_split(&herm).unwrap();
        assert!(rel_diff(&h2, &herm) < 1e-15);
        assert!(s2.max_abs() < 1e-15);

        // i*I is purely skew-Hermitian
        let skew = DenseMatrix::identity(3).scale(c(0.0, 1.0));
        let (h3, s3) = herm_skew_split(&skew).unwrap();
        assert!(h3.max_abs() < 1e-16);
        assert!(rel_diff(&s3, &skew) < 1e-15);
    }

    /// Largest eigenvalue of the Hermitian matrix a* a via Jacobi sweeps on
    /// the real symmetric embedding, an independent route to sigma_max.
    fn sigma_max_reference(a: &DenseMatrix) -> f64 {
        let n = a.cols();
        let g = a.adjoint().matmul(a);
        // embed [[Re, -Im], [Im, Re]] (symmetric since g is Hermitian)
        let m = 2 * n;
        let mut s = vec![0.0f64; m * m];
        for r in 0..n {
            for c0 in 0..n {
                let v = g.get(r, c0);
                s[r + c0 * m] = v.re;
                s[r + (c0 + n) * m] = -v.im;
                s[(r + n) + c0 * m] = v.im;
                s[(r + n) + (c0 + n) * m] = v.re;
            }
        }
        // cyclic Jacobi
        for _ in 0..50 {
            let mut off = 0.0;
            for p in 0..m {
                for q in (p + 1)..m {
                    off += s[p + q * m].abs();
                }
            }
            if off < 1e-14 {
                break;
            }
            for p in 0..m {
                for q in (p + 1)..m {
                    let apq = s[p + q * m];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let app = s[p + p * m];
                    let aqq = s[q + q * m];
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        1.0 / (tau - (1.0 + tau * tau).sqrt())
                    };
                    let cth = 1.0 / (1.0 + t * t).sqrt();
                    let sth = t * cth;
                    for k in 0..m {
                        let skp = s[k + p * m];
                        let skq = s[k + q * m];
                        s[k + p * m] = cth * skp - sth * skq;
                        s[k + q * m] = sth * skp + cth * skq;
                    }
                    for k in 0..m {
                        let spk = s[p + k * m];
                        let sqk = s[q + k * m];
                        s[p + k * m] = cth * spk - sth * sqk;
                        s[q + k * m] = sth * spk + cth * sqk;
                    }
                }
            }
        }
        let lam_max = (0..m).map(|i| s[i + i * m]).fold(f64::MIN, f64::max);
        lam_max.max(0.0).sqrt()
    }

    #[test]
    fn two_norm_estimate_examples() {
        let mut d = DenseMatrix::zeros(2, 2);
        d.set(0, 0, c(3.0, 0.0));
        d.set(1, 1, c(1.0, 0.0));
        let est = two_norm_estimate(&d);
        assert!((3.0..=3.03).contains(&est), "estimate {est}");

        assert_eq!(two_norm_estimate(&DenseMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn two_norm_estimate_upper_bounds_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 8);
            let est = two_norm_estimate(&a);
            let truth = sigma_max_reference(&a);
            assert!(
                est >= truth * (1.0 - 1e-10),
                "estimate {est} below reference {truth}"
            );
            assert!(est <= truth * 1.2, "estimate {est} loose vs {truth}");
        }
    }

    #[test]
    fn herm_part_eigen_range_is_real() {
        // h Hermitian: Rayleigh quotients must be real up to rounding
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_matrix(&mut rng, 6);
        let (h, _) = herm_skew_split(&a).unwrap();
        for _ in 0..5 {
            let x: Vec<Complex64> = (0..6)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let hx = h.matvec(&x);
            let num: Complex64 = x.iter().zip(&hx).map(|(xi, yi)| xi.conj() * yi).sum();
            let den: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            assert!((num / den).im.abs() < 1e-13);
        }
    }
}
