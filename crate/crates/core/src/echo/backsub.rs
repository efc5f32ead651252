/// Back substitution for the upper-bidiagonal system with 1 on the diagonal,
/// 2 on the superdiagonal and right-hand side `e_n`. The solution is
/// `x_j = (-2)^{n-j}`.
pub fn backsub_toy(n: usize) -> Vec<f64> {
    assert!(n >= 1, "backsub_toy needs n >= 1");
    let mut x = vec![0.0; n];
    x[n - 1] = 1.0;
    for j in (0..n - 1).rev() {
        x[j] = -2.0 * x[j + 1];
    }
    x
}
