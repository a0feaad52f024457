//! Small dense complex linear algebra: Hermitian power iteration and the
//! leading singular triple built on top of it.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    /// Stop once `‖G v − λ v‖ ≤ tol · λ`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SingularTriple {
    pub sigma: f64,
    /// Unit left singular vector.
    pub u: Array1<Complex64>,
    /// Unit right singular vector; `M ≈ σ u v^*`.
    pub v: Array1<Complex64>,
}

fn norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Leading eigenpair of a Hermitian positive semidefinite matrix.
pub fn leading_eigenpair(
    gram: ArrayView2<'_, Complex64>,
    opts: PowerIteration,
) -> (f64, Array1<Complex64>) {
    let n = gram.nrows();
    assert_eq!(n, gram.ncols(), "gram matrix must be square");
    if n == 0 {
        return (0.0, Array1::zeros(0));
    }

    // start from the column with the largest diagonal, plus a flat component
    let start = (0..n)
        .max_by(|&a, &b| gram[(a, a)].re.total_cmp(&gram[(b, b)].re).then(b.cmp(&a)))
        .unwrap_or(0);
    let mut v = gram.column(start).to_owned();
    let scale = norm(&v);
    if scale == 0.0 {
        let mut e = Array1::zeros(n);
        e[start] = Complex64::new(1.0, 0.0);
        return (0.0, e);
    }
    let flat = Complex64::new(1e-3 * scale / (n as f64).sqrt(), 0.0);
    v.mapv_inplace(|z| z + flat);
    let nv = norm(&v);
    v.mapv_inplace(|z| z / nv);

    for _ in 0..opts.max_iters {
        let w = gram.dot(&v);
        let lambda = v
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        let resid = w
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let nw = norm(&w);
        if nw == 0.0 {
            return (0.0, v);
        }
        v = w.mapv(|z| z / nw);
        if resid <= opts.tol * lambda.abs() {
            break;
        }
    }
    let w = gram.dot(&v);
    let lambda = v
        .iter()
        .zip(w.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum::<f64>();
    (lambda.max(0.0), v)
}

/// Leading singular triple via power iteration on the smaller Gram matrix.
pub fn leading_singular_triple(m: ArrayView2<'_, Complex64>, opts: PowerIteration) -> SingularTriple {
    let (rows, cols) = m.dim();
    let mh = m.t().mapv(|z| z.conj());
    if rows <= cols {
        let gram = m.dot(&mh);
        let (lambda, u) = leading_eigenpair(gram.view(), opts);
        let sigma = lambda.sqrt();
        let v = if sigma > 0.0 {
            let mut v = mh.dot(&u);
            let nv = norm(&v);
            v.mapv_inplace(|z| z / nv);
            v
        } else {
            Array1::zeros(cols)
        };
        SingularTriple { sigma, u, v }
    } else {
        let gram = mh.dot(&m);
        let (lambda, v) = leading_eigenpair(gram.view(), opts);
        let sigma = lambda.sqrt();
        let u = if sigma > 0.0 {
            let mut u = m.dot(&v);
            let nu = norm(&u);
            u.mapv_inplace(|z| z / nu);
            u
        } else {
            Array1::zeros(rows)
        };
        SingularTriple { sigma, u, v }
    }
}

/// Largest singular value of `m − σ u v^*`, i.e. the second singular value of
/// `m` once the leading triple has been removed.
pub fn second_singular_value(
    m: ArrayView2<'_, Complex64>,
    lead: &SingularTriple,
    opts: PowerIteration,
) -> f64 {
    let u = lead.u.view().insert_axis(Axis(1));
    let vh = lead.v.mapv(|z| z.conj()).insert_axis(Axis(0));
    let residual: Array2<Complex64> = &m - &(u.dot(&vh) * Complex64::new(lead.sigma, 0.0));
    leading_singular_triple(residual.view(), opts).sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, cols), |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn nalgebra_singular_values(m: &Array2<Complex64>) -> Vec<f64> {
        let (r, c) = m.dim();
        let dm = DMatrix::from_fn(r, c, |i, j| m[(i, j)]);
        let mut s: Vec<f64> = dm.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    #[test]
    fn matches_nalgebra_svd() {
        for (rows, cols, seed) in [(4, 9, 1u64), (9, 4, 2), (6, 6, 3)] {
            let m = random_matrix(rows, cols, seed);
            let lead = leading_singular_triple(m.view(), PowerIteration::default());
            let s2 = second_singular_value(m.view(), &lead, PowerIteration::default());
            let oracle = nalgebra_singular_values(&m);
            assert!((lead.sigma - oracle[0]).abs() < 1e-9 * oracle[0]);
            assert!((s2 - oracle[1]).abs() < 1e-7 * oracle[0], "{s2} vs {}", oracle[1]);
            // M v = σ u
            let mv = m.dot(&lead.v);
            for (a, b) in mv.iter().zip(lead.u.iter()) {
                assert!((a - b * lead.sigma).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn zero_matrix_has_zero_sigma() {
        let m = Array2::<Complex64>::zeros((3, 5));
        let lead = leading_singular_triple(m.view(), PowerIteration::default());
        assert_eq!(lead.sigma, 0.0);
    }
}
