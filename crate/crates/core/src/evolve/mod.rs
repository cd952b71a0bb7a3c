//! Spinor fields on a periodic cubic grid and their propagation by e^{−th}.
//!
//! Layout: row-major over (x¹, x², x³) with the spin index fastest; site
//! (i, j, k) sits at ((i − n/2)h, (j − n/2)h, (k − n/2)h), h = L/n.

mod fft;
pub mod io;
mod propagate;

pub use fft::Fft3;
pub use propagate::{propagate_convolution, propagate_symbol, sample_kernel, wavevector};

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

pub const FFT_CONVENTION: &str =
    "forward exp(-i xi.x) unnormalized; inverse carries 1/n^3; xi = 2 pi k / L with k in [-n/2, n/2)";
pub const SPIN_ORDER: &str = "(+1/2, -1/2)";

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorGrid {
    n: usize,
    box_length: f64,
    data: Vec<C64>,
}

impl SpinorGrid {
    pub fn zeros(n: usize, box_length: f64) -> Result<Self> {
        check_shape(n, box_length)?;
        Ok(SpinorGrid { n, box_length, data: vec![C64::new(0.0, 0.0); 2 * n * n * n] })
    }

    pub fn from_data(n: usize, box_length: f64, data: Vec<C64>) -> Result<Self> {
        check_shape(n, box_length)?;
        if data.len() != 2 * n * n * n {
            return Err(Error::InvalidParameter(format!("expected {} amplitudes, got {}", 2 * n * n * n, data.len())));
        }
        Ok(SpinorGrid { n, box_length, data })
    }

    pub fn from_fn<F: Fn([f64; 3]) -> [C64; 2]>(n: usize, box_length: f64, f: F) -> Result<Self> {
        let mut g = Self::zeros(n, box_length)?;
        for site in 0..n * n * n {
            let v = f(g.position(site));
            g.data[2 * site] = v[0];
            g.data[2 * site + 1] = v[1];
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.spacing()
    }

    pub fn position(&self, site: usize) -> [f64; 3] {
        let n = self.n;
        [site / (n * n), (site / n) % n, site % n].map(|i| self.coordinate(i))
    }

    pub fn site(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn get(&self, site: usize, spin: usize) -> C64 {
        self.data[2 * site + spin]
    }

    pub fn set(&mut self, site: usize, spin: usize, v: C64) {
        self.data[2 * site + spin] = v;
    }

    pub fn component(&self, spin: usize) -> Vec<C64> {
        self.data.iter().skip(spin).step_by(2).copied().collect()
    }

    pub fn from_components(n: usize, box_length: f64, up: &[C64], down: &[C64]) -> Result<Self> {
        let data = up.iter().zip(down).flat_map(|(a, b)| [*a, *b]).collect();
        Self::from_data(n, box_length, data)
    }

    pub fn max_abs_diff(&self, other: &SpinorGrid) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn check_shape(n: usize, box_length: f64) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::GridTooSmall(n));
    }
    if !(box_length > 0.0 && box_length.is_finite()) {
        return Err(Error::InvalidParameter(format!("box length {box_length} must be positive")));
    }
    Ok(())
}

/// Discrete L² norm, √(Σ|f|² h³).
pub fn grid_norm(f: &SpinorGrid) -> f64 {
    (f.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * f.cell_volume()).sqrt()
}
