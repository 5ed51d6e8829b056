//! Gauss-type quadrature on the unit segment and the unit triangle, and the
//! Jacobi polynomials they are built from.

use nalgebra::{DMatrix, SymmetricEigen};

/// Gamma function at a positive integer or half the orders we use; only
/// called with non-negative integer arguments here.
fn gamma_int(n: f64) -> f64 {
    debug_assert!(n >= 1.0 && n.fract() == 0.0);
    (1..n as u64).map(|i| i as f64).product()
}

/// Normalised Jacobi polynomial `P_n^{(alpha, beta)}(x)`, orthonormal with
/// respect to the weight `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
pub fn jacobi_p(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    let gamma0 = 2f64.powf(alpha + beta + 1.0) / (alpha + beta + 1.0) * gamma_int(alpha + 1.0)
        * gamma_int(beta + 1.0)
        / gamma_int(alpha + beta + 1.0);
    let p0 = 1.0 / gamma0.sqrt();
    if n == 0 {
        return p0;
    }
    let gamma1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * gamma0;
    let p1 = ((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / gamma1.sqrt();
    if n == 1 {
        return p1;
    }
    let mut aold = 2.0 / (2.0 + alpha + beta)
        * ((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0)).sqrt();
    let (mut pm1, mut p) = (p0, p1);
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + alpha + beta;
        let anew = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + alpha + beta) * (i + 1.0 + alpha) * (i + 1.0 + beta)
                / (h1 + 1.0)
                / (h1 + 3.0))
                .sqrt();
        let bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        let pn = (-aold * pm1 + (x - bnew) * p) / anew;
        pm1 = p;
        p = pn;
        aold = anew;
    }
    p
}

/// Derivative of [`jacobi_p`].
pub fn grad_jacobi_p(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf * (nf + alpha + beta + 1.0)).sqrt() * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1)
}

/// Gauss-Jacobi points and weights on `[-1, 1]` with `npts` points
/// (Golub-Welsch).
pub fn gauss_jacobi(alpha: f64, beta: f64, npts: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1);
    let scale = 2f64.powf(alpha + beta + 1.0) / (alpha + beta + 1.0) * gamma_int(alpha + 1.0)
        * gamma_int(beta + 1.0)
        / gamma_int(alpha + beta + 1.0);
    if npts == 1 {
        return (vec![(beta - alpha) / (alpha + beta + 2.0)], vec![scale]);
    }
    let n = npts - 1;
    let mut j = DMatrix::<f64>::zeros(npts, npts);
    for i in 0..=n {
        let h1 = 2.0 * i as f64 + alpha + beta;
        j[(i, i)] = if (alpha + beta).abs() < 1e-14 {
            0.0
        } else {
            -(alpha * alpha - beta * beta) / (h1 + 2.0) / h1
        };
        if i < n {
            let ip = (i + 1) as f64;
            let off = 2.0 / (h1 + 2.0)
                * (ip * (ip + alpha + beta) * (ip + alpha) * (ip + beta) / (h1 + 1.0) / (h1 + 3.0))
                    .sqrt();
            j[(i, i + 1)] = off;
            j[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..npts)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v0 * v0 * scale)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gauss-Lobatto-Legendre points on `[-1, 1]`, `npts >= 2`.
pub fn gauss_lobatto(npts: usize) -> Vec<f64> {
    assert!(npts >= 2);
    let mut x = vec![-1.0];
    if npts > 2 {
        let (inner, _) = gauss_jacobi(1.0, 1.0, npts - 2);
        x.extend(inner);
    }
    x.push(1.0);
    // enforce exact symmetry so reversed faces map nodes onto nodes
    let n = x.len();
    for i in 0..n / 2 {
        let m = 0.5 * (x[n - 1 - i] - x[i]);
        x[i] = -m;
        x[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    x
}

/// A rule with points in reference coordinates and weights summing to the
/// reference measure.
#[derive(Debug, Clone)]
pub struct Rule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
}

impl<const D: usize> Rule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss-Legendre rule on `[0, 1]` exact for polynomials of degree `degree`.
pub fn segment_rule(degree: usize) -> Rule<1> {
    let npts = degree / 2 + 1;
    let (x, w) = gauss_jacobi(0.0, 0.0, npts);
    Rule {
        points: x.iter().map(|&t| [0.5 * (t + 1.0)]).collect(),
        weights: w.iter().map(|&w| 0.5 * w).collect(),
    }
}

/// Collapsed-coordinate rule on the unit triangle `(0,0), (1,0), (0,1)`
/// exact for polynomials of total degree `degree`.
pub fn triangle_rule(degree: usize) -> Rule<2> {
    // Gauss-Legendre in the collapsed direction, Gauss-Jacobi(1,0) in the
    // other one absorbs the Duffy factor (1 - eta).
    let na = degree / 2 + 1;
    let nb = (degree + 1) / 2 + 1;
    let (xa, wa) = gauss_jacobi(0.0, 0.0, na);
    let (xb, wb) = gauss_jacobi(1.0, 0.0, nb);
    let mut points = Vec::with_capacity(na * nb);
    let mut weights = Vec::with_capacity(na * nb);
    for (&b, &wbj) in xb.iter().zip(&wb) {
        let eta = 0.5 * (b + 1.0);
        for (&a, &wai) in xa.iter().zip(&wa) {
            let xi = 0.5 * (a + 1.0);
            points.push([xi * (1.0 - eta), eta]);
            // dx dy = (1 - eta) dxi deta; the (1 - b) weight carries 2(1 - eta)
            weights.push(wai * wbj / 8.0);
        }
    }
    Rule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn jacobi_polynomials_are_orthonormal() {
        let (x, w) = gauss_jacobi(0.0, 0.0, 12);
        for (a, b) in [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)] {
            for m in 0..5 {
                for n in 0..5 {
                    let s: f64 = x
                        .iter()
                        .zip(&w)
                        .map(|(&t, &wt)| {
                            wt * (1.0 - t).powf(a)
                                * (1.0 + t).powf(b)
                                * jacobi_p(t, a, b, m)
                                * jacobi_p(t, a, b, n)
                        })
                        .sum();
                    let expect = if m == n { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12, "a={a} m={m} n={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn jacobi_derivative_matches_differences() {
        let h = 1e-6;
        for n in 0..6 {
            let x = 0.3;
            let fd = (jacobi_p(x + h, 1.0, 0.0, n) - jacobi_p(x - h, 1.0, 0.0, n)) / (2.0 * h);
            assert!((grad_jacobi_p(x, 1.0, 0.0, n) - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn segment_rule_is_exact() {
        for degree in 0..12 {
            let rule = segment_rule(degree);
            for p in 0..=degree {
                let s: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x[0].powi(p as i32))
                    .sum();
                assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn triangle_rule_is_exact_for_monomials() {
        // int_T x^a y^b = a! b! / (a + b + 2)!
        for degree in 0..13 {
            let rule = triangle_rule(degree);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 0.5).abs() < 1e-14);
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let s: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(x, w)| w * x[0].powi(a as i32) * x[1].powi(b as i32))
                        .sum();
                    let exact = factorial(a as u32) * factorial(b as u32)
                        / factorial((a + b + 2) as u32);
                    assert!((s - exact).abs() < 1e-14, "degree {degree}: x^{a} y^{b}");
                }
            }
        }
    }

    #[test]
    fn lobatto_points_are_symmetric() {
        for n in 2..9 {
            let x = gauss_lobatto(n);
            for i in 0..n {
                assert_eq!(x[i], -x[n - 1 - i]);
            }
        }
        let x = gauss_lobatto(4);
        assert!((x[2] - (1.0f64 / 5.0).sqrt()).abs() < 1e-14);
    }
}
