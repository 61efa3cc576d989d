//! Gauss–Legendre quadrature and bisection helpers.

/// Gauss–Legendre nodes and weights on [-1, 1].
///
/// Nodes are found by Newton iteration from the Chebyshev initial guess;
/// accurate to machine precision for the orders used here (n ≤ a few
/// thousand).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be at least 1");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev guess for the i-th positive root of P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = d;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            // Center node is exactly zero.
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_with_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Mapped nodes and weights on [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate with one Richardson refinement: the returned value comes from
/// the two-panel composite rule, the error estimate from the difference
/// against the single-panel rule.
pub fn integrate_refined<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    mut f: F,
) -> (f64, f64) {
    let coarse = rule.integrate(a, b, &mut f);
    let mid = 0.5 * (a + b);
    let fine = rule.integrate(a, mid, &mut f) + rule.integrate(mid, b, &mut f);
    (fine, (fine - coarse).abs())
}

/// Bisection for a sign change of `f` on [lo, hi]; `f(lo)` and `f(hi)` must
/// have opposite signs. Refines until the bracket is below `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut lo: f64, mut hi: f64, tol: f64, mut f: F) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_nodes_match_tables() {
        let g2 = GaussLegendre::new(2);
        assert_abs_diff_eq!(g2.nodes[1], 1.0 / 3.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g2.weights[0], 1.0, epsilon = 1e-15);
        let g3 = GaussLegendre::new(3);
        assert_abs_diff_eq!(g3.nodes[2], (3.0_f64 / 5.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g3.weights[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g3.weights[0], 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // GL-n is exact through degree 2n-1.
        let g5 = GaussLegendre::new(5);
        let value = g5.integrate(0.0, 2.0, |x| x.powi(9) - 3.0 * x.powi(4) + 1.0);
        let exact = 2.0_f64.powi(10) / 10.0 - 3.0 * 2.0_f64.powi(5) / 5.0 + 2.0;
        assert_abs_diff_eq!(value, exact, epsilon = 1e-12);
    }

    #[test]
    fn high_order_weights_sum_to_interval() {
        for n in [16, 64, 257, 512] {
            let g = GaussLegendre::new(n);
            let total: f64 = g.weights.iter().sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn refined_integral_reports_small_error_on_smooth_integrand() {
        let g = GaussLegendre::new(32);
        let (value, err) = integrate_refined(&g, 0.0, 1.0, |x| (4.0 * x).atan());
        let exact = (4.0_f64).atan() - 0.125 * (17.0_f64).ln();
        assert!((value - exact).abs() <= 1e-12);
        assert!(err <= 1e-10);
    }

    #[test]
    fn bisect_finds_root() {
        let root = bisect(0.0, 2.0, 1e-13, |x| x * x - 2.0);
        assert_abs_diff_eq!(root, 2.0_f64.sqrt(), epsilon = 1e-12);
    }
}
