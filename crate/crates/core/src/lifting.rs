//! Lifted linear model for the bilinear CFO/channel problem.
//!
//! With `b` the `Np`-point spectrum of the CFO phasor and `c = vec(C^T)` the
//! beamspace channel, the unquantized measurements `z = vec(Y^T)` satisfy
//! `z = diag(G b) J c = A vec(b c^T)`, where row `i` of `A` is `J^(i) ⊗ G^(i)`,
//! `G = a_Nrx(0) ⊗ U_Np^*` and `J = (U_Nrx ⊗ U_Ntx^* T)^T`.
//!
//! Index conventions (all 0-based):
//! - measurement `i = r·Np + n` (receive antenna `r`, time `n`)
//! - channel coefficient `j = k·Ntx + t` (receive beam `k`, transmit beam `t`)
//! - lifted entry `j·Np + n'`, i.e. column-major `Np × NrxNtx`

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::channel::array_response;
use crate::dft::{dft_matrix, Dft};
use crate::error::{Error, Result};
use crate::frontend::TrainingBlock;
use crate::operator::LinearOperator;

/// `b = (1/Np) U_Np a_Np(ω_e)`, so that `U_Np^* b = a_Np(ω_e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CfoSpectrum(pub Array1<Complex64>);

impl CfoSpectrum {
    /// `U_Np^* b`
    pub fn phasor(&self) -> Array1<Complex64> {
        let mut buf = self.0.to_vec();
        Dft::new(buf.len()).inverse(&mut buf);
        Array1::from(buf)
    }
}

pub fn cfo_spectrum(omega_e: f64, n_p: usize) -> Result<CfoSpectrum> {
    if n_p < 2 {
        return Err(Error::InvalidDimension("CFO spectrum needs n_p >= 2".into()));
    }
    let mut buf = array_response(n_p, omega_e)?.to_vec();
    Dft::new(n_p).forward(&mut buf);
    let scale = 1.0 / n_p as f64;
    Ok(CfoSpectrum(buf.into_iter().map(|z| z * scale).collect()))
}

/// `vec(b c^T)` as a flat vector of length `Np · NrxNtx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector(pub Vec<Complex64>);

impl LiftedVector {
    pub fn from_factors(b: &[Complex64], c: &[Complex64]) -> Self {
        let mut x = Vec::with_capacity(b.len() * c.len());
        for cj in c {
            x.extend(b.iter().map(|bi| bi * cj));
        }
        Self(x)
    }

    /// Reshape to the column-major `n_p × (len / n_p)` matrix.
    pub fn as_matrix(&self, n_p: usize) -> Result<Array2<Complex64>> {
        if n_p == 0 || self.0.len() % n_p != 0 {
            return Err(Error::DimensionMismatch {
                what: "lifted vector length vs n_p",
                expected: n_p,
                actual: self.0.len(),
            });
        }
        let cols = self.0.len() / n_p;
        Ok(Array2::from_shape_fn((n_p, cols), |(n, j)| self.0[j * n_p + n]))
    }
}

/// Limits on what the lifted operator may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorBudget {
    /// Largest allowed lifted dimension `d = Nrx Ntx Np`.
    pub max_lifted_dim: usize,
    /// Largest `m · d` for which [`LiftedOperator::to_dense`] materializes `A`.
    pub max_dense_entries: usize,
}

impl Default for OperatorBudget {
    fn default() -> Self {
        Self {
            max_lifted_dim: 1 << 22,
            max_dense_entries: 1 << 24,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LiftedOperator {
    n_rx: usize,
    n_tx: usize,
    n_p: usize,
    g: Array2<Complex64>,
    j: Array2<Complex64>,
    /// `U_Ntx^* T`, `Ntx × Np`. Row `i = (r, n)` of `J` is `U_Nrx[·, r] ⊗ q[·, n]`.
    q: Array2<Complex64>,
    q_abs_sq: Array2<f64>,
    dft_p: Dft,
    dft_rx: Dft,
    budget: OperatorBudget,
}

pub fn build_operator(t: &TrainingBlock, n_rx: usize) -> Result<LiftedOperator> {
    build_operator_with_budget(t, n_rx, OperatorBudget::default())
}

pub fn build_operator_with_budget(
    t: &TrainingBlock,
    n_rx: usize,
    budget: OperatorBudget,
) -> Result<LiftedOperator> {
    let (n_tx, n_p) = t.symbols.dim();
    if n_rx == 0 || n_tx == 0 || n_p == 0 {
        return Err(Error::InvalidDimension("lifting needs Nrx, Ntx, Np >= 1".into()));
    }
    let d = n_rx
        .checked_mul(n_tx)
        .and_then(|v| v.checked_mul(n_p))
        .ok_or(Error::BudgetExceeded {
            requested: usize::MAX,
            budget: budget.max_lifted_dim,
        })?;
    if d > budget.max_lifted_dim {
        return Err(Error::BudgetExceeded {
            requested: d,
            budget: budget.max_lifted_dim,
        });
    }

    let u_tx_h = dft_matrix(n_tx).t().mapv(|z| z.conj());
    let q = u_tx_h.dot(&t.symbols);
    let q_abs_sq = q.mapv(|z| z.norm_sqr());
    let u_rx = dft_matrix(n_rx);
    let u_p = dft_matrix(n_p);
    let m = n_rx * n_p;

    let g = Array2::from_shape_fn((m, n_p), |(i, np)| u_p[(i % n_p, np)].conj());
    let j = Array2::from_shape_fn((m, n_rx * n_tx), |(i, col)| {
        let (r, n) = (i / n_p, i % n_p);
        let (k, tx) = (col / n_tx, col % n_tx);
        u_rx[(k, r)] * q[(tx, n)]
    });

    Ok(LiftedOperator {
        n_rx,
        n_tx,
        n_p,
        g,
        j,
        q,
        q_abs_sq,
        dft_p: Dft::new(n_p),
        dft_rx: Dft::new(n_rx),
        budget,
    })
}

impl LiftedOperator {
    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    /// Number of measurements, `Nrx Np`.
    pub fn m(&self) -> usize {
        self.n_rx * self.n_p
    }

    /// Lifted dimension, `Nrx Ntx Np`.
    pub fn d(&self) -> usize {
        self.n_rx * self.n_tx * self.n_p
    }

    pub fn g(&self) -> &Array2<Complex64> {
        &self.g
    }

    pub fn j(&self) -> &Array2<Complex64> {
        &self.j
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.d() {
            return Err(Error::DimensionMismatch {
                what: "lifted vector",
                expected: self.d(),
                actual: x.len(),
            });
        }
        Ok(self.forward(x))
    }

    pub fn apply_adjoint(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.m() {
            return Err(Error::DimensionMismatch {
                what: "measurement vector",
                expected: self.m(),
                actual: z.len(),
            });
        }
        Ok(self.adjoint(z))
    }

    /// `|A^(i)|² = |J^(i)|² ⊗ 1_Np`.
    pub fn row_power(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.m() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.m(),
            });
        }
        let mut out = Vec::with_capacity(self.d());
        for jv in self.j.row(i) {
            let p = jv.norm_sqr();
            out.extend(std::iter::repeat_n(p, self.n_p));
        }
        Ok(out)
    }

    /// Explicit `A` with rows `J^(i) ⊗ G^(i)`, subject to the dense budget.
    pub fn to_dense(&self) -> Result<Array2<Complex64>> {
        let entries = self.m() * self.d();
        if entries > self.budget.max_dense_entries {
            return Err(Error::BudgetExceeded {
                requested: entries,
                budget: self.budget.max_dense_entries,
            });
        }
        let n_p = self.n_p;
        Ok(Array2::from_shape_fn((self.m(), self.d()), |(i, col)| {
            self.j[(i, col / n_p)] * self.g[(i, col % n_p)]
        }))
    }

    /// `Σ_{k, n'} v[(k·Ntx + t)·Np + n']` for each transmit beam `t`.
    fn sum_over_tx_beam(&self, v: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.n_tx];
        for (j, chunk) in v.chunks_exact(self.n_p).enumerate() {
            s[j % self.n_tx] += chunk.iter().sum::<f64>();
        }
        s
    }
}

impl LinearOperator for LiftedOperator {
    fn rows(&self) -> usize {
        self.m()
    }

    fn cols(&self) -> usize {
        self.d()
    }

    fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.d());
        let (n_rx, n_tx, n_p) = (self.n_rx, self.n_tx, self.n_p);

        // W = U_Np^* X, one transform per column of X
        let mut w = x.to_vec();
        self.dft_p.inverse(&mut w);

        // v[n·Nrx + k] = Σ_t W[n, k·Ntx + t] q[t, n]
        let mut v = vec![Complex64::new(0.0, 0.0); n_p * n_rx];
        for k in 0..n_rx {
            for t in 0..n_tx {
                let col = &w[(k * n_tx + t) * n_p..(k * n_tx + t + 1) * n_p];
                for (n, wv) in col.iter().enumerate() {
                    v[n * n_rx + k] += wv * self.q[(t, n)];
                }
            }
        }

        // z_(r, n) = Σ_k U_Nrx[k, r] v[n, k]
        self.dft_rx.forward(&mut v);
        let mut z = vec![Complex64::new(0.0, 0.0); n_rx * n_p];
        for n in 0..n_p {
            for r in 0..n_rx {
                z[r * n_p + n] = v[n * n_rx + r];
            }
        }
        z
    }

    fn adjoint(&self, z: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(z.len(), self.m());
        let (n_rx, n_tx, n_p) = (self.n_rx, self.n_tx, self.n_p);

        let mut u = vec![Complex64::new(0.0, 0.0); n_p * n_rx];
        for r in 0..n_rx {
            for n in 0..n_p {
                u[n * n_rx + r] = z[r * n_p + n];
            }
        }
        self.dft_rx.inverse(&mut u);

        let mut x = vec![Complex64::new(0.0, 0.0); self.d()];
        for k in 0..n_rx {
            for t in 0..n_tx {
                let col = &mut x[(k * n_tx + t) * n_p..(k * n_tx + t + 1) * n_p];
                for (n, xv) in col.iter_mut().enumerate() {
                    *xv = u[n * n_rx + k] * self.q[(t, n)].conj();
                }
            }
        }
        self.dft_p.forward(&mut x);
        x
    }

    fn forward_abs_sq(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.d());
        let s = self.sum_over_tx_beam(v);
        let per_time: Vec<f64> = (0..self.n_p)
            .map(|n| (0..self.n_tx).map(|t| self.q_abs_sq[(t, n)] * s[t]).sum())
            .collect();
        let mut out = Vec::with_capacity(self.m());
        for _ in 0..self.n_rx {
            out.extend_from_slice(&per_time);
        }
        out
    }

    fn adjoint_abs_sq(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.m());
        let n_p = self.n_p;
        let mut per_time = vec![0.0; n_p];
        for (i, wi) in w.iter().enumerate() {
            per_time[i % n_p] += wi;
        }
        let per_tx: Vec<f64> = (0..self.n_tx)
            .map(|t| (0..n_p).map(|n| self.q_abs_sq[(t, n)] * per_time[n]).sum())
            .collect();
        let mut out = Vec::with_capacity(self.d());
        for j in 0..self.n_rx * self.n_tx {
            out.extend(std::iter::repeat_n(per_tx[j % self.n_tx], n_p));
        }
        out
    }

    fn frobenius_sq(&self) -> f64 {
        let q_total: f64 = self.q_abs_sq.iter().sum();
        (self.n_rx * self.n_rx * self.n_p) as f64 * q_total
    }
}
