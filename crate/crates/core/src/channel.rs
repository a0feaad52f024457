//! Clustered narrowband mmWave channel model on uniform linear arrays and the
//! 2-D DFT (beamspace) representation of the channel matrix.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dft::dft_matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelModelConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_clusters: usize,
    pub rays_per_cluster: usize,
    /// Standard deviation of the Laplacian intra-cluster angle spread, degrees.
    pub angle_spread_deg: f64,
    /// Antenna spacing over carrier wavelength.
    pub antenna_spacing_ratio: f64,
}

impl Default for ChannelModelConfig {
    fn default() -> Self {
        Self {
            n_tx: 16,
            n_rx: 16,
            n_clusters: 2,
            rays_per_cluster: 15,
            angle_spread_deg: 10.0,
            antenna_spacing_ratio: 0.5,
        }
    }
}

impl ChannelModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 || self.n_rx == 0 {
            return Err(Error::InvalidConfig("antenna counts must be at least 1".into()));
        }
        if self.n_clusters == 0 || self.rays_per_cluster == 0 {
            return Err(Error::InvalidConfig(
                "cluster and ray counts must be at least 1".into(),
            ));
        }
        if !(self.angle_spread_deg > 0.0 && self.angle_spread_deg.is_finite()) {
            return Err(Error::InvalidConfig("angle spread must be positive".into()));
        }
        if !(self.antenna_spacing_ratio > 0.0 && self.antenna_spacing_ratio.is_finite()) {
            return Err(Error::InvalidConfig("antenna spacing must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub gain: Complex64,
    /// Spatial frequency at the receive array, `2π (d/λ) sin θ_r`.
    pub aoa_spatial_freq: f64,
    /// Spatial frequency at the transmit array, `2π (d/λ) sin θ_t`.
    pub aod_spatial_freq: f64,
}

/// Rays grouped by cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySet {
    pub clusters: Vec<Vec<Ray>>,
}

impl RaySet {
    pub fn len(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rays(&self) -> impl Iterator<Item = &Ray> {
        self.clusters.iter().flatten()
    }

    /// A single-cluster, single-ray set.
    pub fn single(gain: Complex64, aoa_spatial_freq: f64, aod_spatial_freq: f64) -> Self {
        Self {
            clusters: vec![vec![Ray {
                gain,
                aoa_spatial_freq,
                aod_spatial_freq,
            }]],
        }
    }
}

/// `Nrx × Ntx` antenna-domain channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix(pub Array2<Complex64>);

/// `Nrx × Ntx` angle-domain channel `C` with `H = U_Nrx C U_Ntx^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamspaceMatrix(pub Array2<Complex64>);

impl ChannelMatrix {
    pub fn n_rx(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.0.ncols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Vandermonde vector `[1, e^{jθ}, …, e^{j(n−1)θ}]`.
pub fn array_response(n: usize, theta: f64) -> Result<Array1<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidDimension("array response needs n >= 1".into()));
    }
    Ok(Array1::from_shape_fn(n, |k| Complex64::from_polar(1.0, k as f64 * theta)))
}

fn wrap_spatial_freq(omega: f64) -> f64 {
    let w = (omega + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Zero-mean Laplacian with the given standard deviation.
fn laplacian<R: Rng + ?Sized>(rng: &mut R, std_dev: f64) -> f64 {
    let scale = std_dev / std::f64::consts::SQRT_2;
    let e: f64 = Exp1.sample(rng);
    if rng.random::<bool>() {
        scale * e
    } else {
        -scale * e
    }
}

pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// Draw cluster centers uniformly on `[−π/2, π/2)`, ray angles as center plus
/// Laplacian offset, and unit-variance circular complex Gaussian gains.
pub fn sample_rays<R: Rng + ?Sized>(config: &ChannelModelConfig, rng: &mut R) -> Result<RaySet> {
    config.validate()?;
    let spread = config.angle_spread_deg.to_radians();
    let k = 2.0 * PI * config.antenna_spacing_ratio;
    let clusters = (0..config.n_clusters)
        .map(|_| {
            let center_rx = rng.random_range(-PI / 2.0..PI / 2.0);
            let center_tx = rng.random_range(-PI / 2.0..PI / 2.0);
            (0..config.rays_per_cluster)
                .map(|_| {
                    let theta_r = center_rx + laplacian(rng, spread);
                    let theta_t = center_tx + laplacian(rng, spread);
                    Ray {
                        gain: complex_normal(rng, 1.0),
                        aoa_spatial_freq: wrap_spatial_freq(k * theta_r.sin()),
                        aod_spatial_freq: wrap_spatial_freq(k * theta_t.sin()),
                    }
                })
                .collect()
        })
        .collect();
    Ok(RaySet { clusters })
}

/// Sum of per-ray rank-one terms, each cluster normalized by `1/√K_n` and the
/// total by `1/√N_c`.
pub fn assemble_channel(rays: &RaySet, config: &ChannelModelConfig) -> Result<ChannelMatrix> {
    config.validate()?;
    let (n_rx, n_tx) = (config.n_rx, config.n_tx);
    let mut h = Array2::<Complex64>::zeros((n_rx, n_tx));
    if rays.clusters.is_empty() {
        return Ok(ChannelMatrix(h));
    }
    let cluster_norm = 1.0 / (rays.clusters.len() as f64).sqrt();
    for cluster in &rays.clusters {
        if cluster.is_empty() {
            continue;
        }
        let ray_norm = cluster_norm / (cluster.len() as f64).sqrt();
        for ray in cluster {
            if !(ray.aoa_spatial_freq.is_finite() && ray.aod_spatial_freq.is_finite()) {
                return Err(Error::NonFinite("ray spatial frequency"));
            }
            let ar = array_response(n_rx, ray.aoa_spatial_freq)?;
            let at = array_response(n_tx, ray.aod_spatial_freq)?;
            let g = ray.gain * ray_norm;
            for (r, ar_r) in ar.iter().enumerate() {
                let left = g * ar_r;
                for (t, at_t) in at.iter().enumerate() {
                    h[(r, t)] += left * at_t.conj();
                }
            }
        }
    }
    Ok(ChannelMatrix(h))
}

/// Sample rays and assemble the channel in one step.
pub fn sample_channel<R: Rng + ?Sized>(
    config: &ChannelModelConfig,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    let rays = sample_rays(config, rng)?;
    assemble_channel(&rays, config)
}

/// `C = (1/(Nrx Ntx)) U_Nrx^* H U_Ntx`.
pub fn to_beamspace(h: &ChannelMatrix) -> BeamspaceMatrix {
    let (n_rx, n_tx) = h.0.dim();
    let urx_h = dft_matrix(n_rx).t().mapv(|z| z.conj());
    let utx = dft_matrix(n_tx);
    let scale = Complex64::new(1.0 / (n_rx * n_tx) as f64, 0.0);
    BeamspaceMatrix(urx_h.dot(&h.0).dot(&utx) * scale)
}

/// `H = U_Nrx C U_Ntx^*`.
pub fn from_beamspace(c: &BeamspaceMatrix) -> ChannelMatrix {
    let (n_rx, n_tx) = c.0.dim();
    let urx = dft_matrix(n_rx);
    let utx_h = dft_matrix(n_tx).t().mapv(|z| z.conj());
    ChannelMatrix(urx.dot(&c.0).dot(&utx_h))
}
