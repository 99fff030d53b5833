//! Gauss-Legendre quadrature nodes on [-1, 1].

use std::sync::LazyLock;

/// 64-point rule, computed once by Newton iteration on the Legendre polynomial.
pub(crate) static GL64: LazyLock<Vec<(f64, f64)>> = LazyLock::new(|| gauss_legendre(64));

/// Legendre polynomial P_n and its derivative at x, by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // derivative from P_n and P_{n-1}
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root (descending order)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // GL64 is exact for degree <= 127
        for k in [0usize, 1, 7, 32, 127] {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let got: f64 = GL64.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
            assert!((got - exact).abs() < 1e-13, "degree {k}: {got} vs {exact}");
        }
    }

    #[test]
    fn integrates_exp() {
        let exact = std::f64::consts::E - 1.0 / std::f64::consts::E;
        let got: f64 = GL64.iter().map(|&(x, w)| w * x.exp()).sum();
        assert!((got - exact).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = GL64.iter().map(|&(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }
}
