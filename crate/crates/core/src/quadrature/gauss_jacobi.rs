use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use super::spec::QuadratureSpec;

/// Nodes and weights of the `order`-point Gauss rule for `∫₀¹ g(r) 2r dr`.
///
/// Built once per order by Golub–Welsch on the Jacobi matrix of the weight
/// `(1+x)` on `[−1, 1]`, then mapped by `r = (x+1)/2`. The weights sum to 1.
pub fn radial_rule(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&order) {
        return r.clone();
    }
    let rule = Arc::new(build(order));
    cache.lock().unwrap().insert(order, rule.clone());
    rule
}

fn build(n: usize) -> Vec<(f64, f64)> {
    // Jacobi recurrence coefficients for α = 0, β = 1.
    let (alpha, beta) = (0.0_f64, 1.0_f64);
    let ab = alpha + beta;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        j[(k, k)] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + ab;
            let off = (4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mu0 = 2.0;
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            ((eig.eigenvalues[i] + 1.0) / 2.0, mu0 * v0 * v0 / 2.0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// `∫₀¹ g(r) 2r dr` with the `spec.radial_order`-point Gauss rule.
pub fn radial_integrate(g: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> f64 {
    radial_rule(spec.radial_order).iter().map(|&(r, w)| w * g(r)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn moments_are_exact() {
        let spec = QuadratureSpec { radial_order: 8, ..Default::default() };
        assert_abs_diff_eq!(radial_integrate(|_| 1.0, &spec), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(radial_integrate(|r| r * r, &spec), 0.5, epsilon = 1e-14);
        // degree up to 2·order − 1 is exact
        for k in 0..16 {
            let exact = 2.0 / (k as f64 + 2.0);
            assert_abs_diff_eq!(radial_integrate(|r| r.powi(k), &spec), exact, epsilon = 1e-13);
        }
        for n in 0..10 {
            let v = radial_integrate(|r| r.powi(2 * n), &QuadratureSpec::default());
            assert_abs_diff_eq!(v, 1.0 / (n as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn nodes_inside_unit_interval() {
        let rule = radial_rule(64);
        assert!(rule.iter().all(|&(r, w)| r > 0.0 && r < 1.0 && w > 0.0));
    }
}
