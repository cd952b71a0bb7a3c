use super::{Fft3, SpinorGrid};
use crate::error::{Error, Result};
use crate::kernel::{propagator_kernel, symbol_exp, Coupling};
use crate::par::{for_each_chunk, map_range, Exec};
use crate::spinalg::SpinMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Centred FFT index k ∈ [−n/2, n/2) of bin i.
fn centred(i: usize, n: usize) -> f64 {
    if i < n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// ξ = 2πk/L for bin i.
pub fn wavevector(i: usize, n: usize, box_length: f64) -> f64 {
    2.0 * PI * centred(i, n) / box_length
}

fn spectra(f: &SpinorGrid, fft: &Fft3) -> (Vec<C64>, Vec<C64>) {
    let mut up = f.component(0);
    let mut down = f.component(1);
    fft.forward(&mut up);
    fft.forward(&mut down);
    (up, down)
}

/// Applies the 2×2 multiplier `m(site)` to an interleaved spectrum.
fn apply_modes<M: Fn(usize) -> SpinMatrix + Sync + Send>(exec: Exec, n: usize, spec: &mut [C64], m: M) {
    for_each_chunk(exec, spec, 2 * n * n, |i, slab| {
        for jk in 0..n * n {
            let mat = m(i * n * n + jk);
            let v = mat.apply([slab[2 * jk], slab[2 * jk + 1]]);
            slab[2 * jk] = v[0];
            slab[2 * jk + 1] = v[1];
        }
    });
}

fn back_to_grid(f: &SpinorGrid, spec: Vec<C64>, fft: &Fft3) -> Result<SpinorGrid> {
    let (mut up, mut down): (Vec<C64>, Vec<C64>) = spec.chunks(2).map(|p| (p[0], p[1])).unzip();
    fft.inverse(&mut up);
    fft.inverse(&mut down);
    SpinorGrid::from_components(f.n(), f.box_length(), &up, &down)
}

/// e^{−th} f by multiplying each Fourier mode with exp(−t ĥ(ξ)).
pub fn propagate_symbol(f: &SpinorGrid, c: &Coupling, t: C64, exec: Exec) -> Result<SpinorGrid> {
    if t.re < 0.0 {
        return Err(Error::DomainError(format!("propagation time needs Re t >= 0, got {t}")));
    }
    let n = f.n();
    let fft = Fft3::new(n, exec);
    let (up, down) = spectra(f, &fft);
    let mut spec: Vec<C64> = up.iter().zip(&down).flat_map(|(a, b)| [*a, *b]).collect();
    let l = f.box_length();
    apply_modes(exec, n, &mut spec, |mode| {
        let xi = [mode / (n * n), (mode / n) % n, mode % n].map(|i| wavevector(i, n, l));
        symbol_exp(c, t, xi)
    });
    back_to_grid(f, spec, &fft)
}

/// Kernel G_t sampled at the periodic displacements of the grid, times h³.
pub fn sample_kernel(n: usize, box_length: f64, c: &Coupling, t: C64, exec: Exec) -> Result<Vec<SpinMatrix>> {
    let h = box_length / n as f64;
    let w = h.powi(3);
    map_range(exec, n * n * n, |site| {
        let d = [site / (n * n), (site / n) % n, site % n].map(|i| centred(i, n) * h);
        propagator_kernel(c, t, d).map(|g| g.scale(C64::new(w, 0.0)))
    })
    .into_iter()
    .collect()
}

/// e^{−th} f as a periodic matrix convolution with the sampled kernel.
pub fn propagate_convolution(f: &SpinorGrid, c: &Coupling, t: C64, exec: Exec) -> Result<SpinorGrid> {
    if !(t.re > 0.0) {
        return Err(Error::DomainError(format!("real-space convolution needs Re t > 0, got {t}")));
    }
    let n = f.n();
    let fft = Fft3::new(n, exec);
    let kernel = sample_kernel(n, f.box_length(), c, t, exec)?;
    let mut khat: Vec<Vec<C64>> = Vec::with_capacity(4);
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let mut v: Vec<C64> = kernel.iter().map(|m| m.0[a][b]).collect();
        fft.forward(&mut v);
        khat.push(v);
    }
    let (up, down) = spectra(f, &fft);
    let mut spec: Vec<C64> = up.iter().zip(&down).flat_map(|(a, b)| [*a, *b]).collect();
    apply_modes(exec, n, &mut spec, |mode| {
        SpinMatrix([[khat[0][mode], khat[1][mode]], [khat[2][mode], khat[3][mode]]])
    });
    back_to_grid(f, spec, &fft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::grid_norm;

    fn gaussian(n: usize, l: f64, w: f64, spin: [C64; 2]) -> SpinorGrid {
        SpinorGrid::from_fn(n, l, |x| {
            let g = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (4.0 * w * w)).exp();
            [spin[0] * g, spin[1] * g]
        })
        .unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let f = gaussian(16, 10.0, 1.0, [C64::new(1.0, 0.0), C64::new(0.0, 0.5)]);
        let c = Coupling::new(0.5, 0.5).unwrap();
        let g = propagate_symbol(&f, &c, C64::new(0.0, 0.0), Exec::Parallel).unwrap();
        assert!(g.max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn imaginary_time_preserves_norm() {
        let f = gaussian(16, 10.0, 1.0, [C64::new(1.0, 0.0), C64::new(0.3, -0.2)]);
        let c = Coupling::new(0.5, 0.5).unwrap();
        let g = propagate_symbol(&f, &c, C64::new(0.0, 0.7), Exec::Parallel).unwrap();
        assert!((grid_norm(&g) - grid_norm(&f)).abs() < 1e-10 * grid_norm(&f));
    }

    #[test]
    fn impulse_reproduces_kernel_columns() {
        let (n, l) = (16, 8.0);
        let c = Coupling::new(0.4, 0.3).unwrap();
        let t = C64::new(0.6, 0.0);
        let mut f = SpinorGrid::zeros(n, l).unwrap();
        let origin = f.site(n / 2, n / 2, n / 2);
        f.set(origin, 0, C64::new(1.0 / f.cell_volume(), 0.0));
        let g = propagate_convolution(&f, &c, t, Exec::Sequential).unwrap();
        for site in [origin, f.site(9, 7, 8), f.site(5, 10, 12)] {
            let k = propagator_kernel(&c, t, g.position(site)).unwrap();
            assert!((g.get(site, 0) - k.0[0][0]).norm() < 1e-12);
            assert!((g.get(site, 1) - k.0[1][0]).norm() < 1e-12);
        }
    }

    #[test]
    fn convolution_rejects_imaginary_time() {
        let f = gaussian(8, 8.0, 1.0, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let c = Coupling::free();
        assert!(matches!(propagate_convolution(&f, &c, C64::new(0.0, 1.0), Exec::Sequential), Err(Error::DomainError(_))));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = gaussian(16, 10.0, 1.0, [C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let c = Coupling::new(0.7, 0.2).unwrap();
        let t = C64::new(0.3, 0.4);
        let a = propagate_symbol(&f, &c, t, Exec::Sequential).unwrap();
        let b = propagate_symbol(&f, &c, t, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
