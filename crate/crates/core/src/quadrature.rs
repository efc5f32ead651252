//! Gauss-Legendre rules and composite integration.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels on `[a, b]`, each with the given
/// reference rule. Works for any accumulator type with the needed ops.
pub fn composite<T, F>(rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64, panels: usize, f: F) -> T
where
    T: Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let (x, w) = rule;
    let h = (b - a) / panels as f64;
    let mut acc = T::default();
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let mut panel = T::default();
        for (xi, wi) in x.iter().zip(w) {
            panel += f(c + 0.5 * h * xi) * *wi;
        }
        acc += panel * (0.5 * h);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 31] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        let rule = gauss_legendre(8);
        // degree 15 is integrated exactly
        let v: f64 = composite(&rule, 0.0, 2.0, 1, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn composite_exponential() {
        let rule = gauss_legendre(16);
        let v: f64 = composite(&rule, 0.0, 30.0, 60, |x| x * (-x).exp());
        let exact = 1.0 - 31.0 * (-30.0f64).exp();
        assert!((v - exact).abs() < 1e-14);
    }
}
