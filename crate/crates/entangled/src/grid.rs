//! Periodic grids, the centered Fourier convention, L¹-dilations and
//! logarithmic scale quadrature.
//!
//! A [`Grid1D`] discretizes a torus of physical side `L` with `N` samples,
//! positions `x_i = -L/2 + i Δ` and dual frequencies `ω_k = (k - N/2)/L`.
//! Forward transforms carry the `Δ` quadrature weight so that they converge
//! to `f̂(ω) = ∫ f(τ) e^{-2πi τ·ω} dτ` for well-resolved decaying fields.

use crate::error::{Error, Result};
use crate::kahan::{KahanComplex, KahanSum};
use ndarray::Array2;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex};

static PLAN_CACHE: Lazy<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLAN_CACHE.lock().unwrap();
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// One axis of the periodic sampling lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    l: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "physical side must be positive, got {l}"
            )));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "sample count must be a power of two >= 2, got {n}"
            )));
        }
        Ok(Self { l, n })
    }

    pub fn side(&self) -> f64 {
        self.l
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample spacing Δ = L/N.
    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Dual-grid spacing 1/L.
    pub fn dual_spacing(&self) -> f64 {
        1.0 / self.l
    }

    /// Spatial position of sample `i`.
    pub fn pos(&self, i: usize) -> f64 {
        -0.5 * self.l + i as f64 * self.spacing()
    }

    /// Dual frequency of bin `k`.
    pub fn freq(&self, k: usize) -> f64 {
        (k as f64 - 0.5 * self.n as f64) / self.l
    }

    /// Index of the zero-frequency (and zero-position) bin.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    /// The grid on which transforms of dual-grid data live: side N/L,
    /// spacing 1/L. Its dual grid is the spatial grid itself.
    pub fn conjugate(&self) -> Grid1D {
        Grid1D {
            l: self.n as f64 / self.l,
            n: self.n,
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.pos(i))
    }

    pub fn freqs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.freq(k))
    }
}

/// Rotate a buffer by half its length; for even N this is both fftshift and
/// its inverse.
pub fn rotate_half<T: Copy>(buf: &mut [T]) {
    let n = buf.len();
    buf.rotate_left(n / 2);
}

/// Centered forward DFT in place: `F(ω_k) = Σ_i v_i e^{-2πi x_i ω_k} Δ`.
pub fn centered_fft_1d(buf: &mut [Complex64], grid: &Grid1D) {
    debug_assert_eq!(buf.len(), grid.len());
    rotate_half(buf);
    plan(grid.len(), true).process(buf);
    rotate_half(buf);
    let w = grid.spacing();
    for v in buf.iter_mut() {
        *v *= w;
    }
}

/// Centered inverse DFT in place: `v_i = Σ_k F_k e^{+2πi x_i ω_k} (1/L)`.
pub fn centered_ifft_1d(buf: &mut [Complex64], grid: &Grid1D) {
    debug_assert_eq!(buf.len(), grid.len());
    rotate_half(buf);
    plan(grid.len(), false).process(buf);
    rotate_half(buf);
    let w = grid.dual_spacing();
    for v in buf.iter_mut() {
        *v *= w;
    }
}

/// Complex samples of a function on an N×N periodic grid.
///
/// Storage is row-major with x fastest: `values[[iy, ix]]` holds the sample
/// at `(x_ix, y_iy)`. Fields flagged `real` must keep their imaginary parts
/// below 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField2D {
    grid: Grid1D,
    values: Array2<Complex64>,
    real: bool,
}

pub const REAL_FLAG_TOLERANCE: f64 = 1e-12;

impl SampledField2D {
    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: Array2::zeros((grid.len(), grid.len())),
            real: true,
        }
    }

    pub fn from_values(grid: Grid1D, values: Array2<Complex64>) -> Result<Self> {
        if values.nrows() != grid.len() || values.ncols() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.nrows().max(values.ncols()),
            });
        }
        let real = values.iter().all(|v| v.im.abs() <= REAL_FLAG_TOLERANCE);
        Ok(Self { grid, values, real })
    }

    /// Sample `f(x, y)` over the grid.
    pub fn from_fn<F: FnMut(f64, f64) -> Complex64>(grid: Grid1D, mut f: F) -> Self {
        let n = grid.len();
        let mut values = Array2::zeros((n, n));
        for iy in 0..n {
            let y = grid.pos(iy);
            for ix in 0..n {
                values[[iy, ix]] = f(grid.pos(ix), y);
            }
        }
        let real = values.iter().all(|v| v.im.abs() <= REAL_FLAG_TOLERANCE);
        Self { grid, values, real }
    }

    pub fn from_real_fn<F: FnMut(f64, f64) -> f64>(grid: Grid1D, mut f: F) -> Self {
        let n = grid.len();
        let mut values = Array2::zeros((n, n));
        for iy in 0..n {
            let y = grid.pos(iy);
            for ix in 0..n {
                values[[iy, ix]] = Complex64::new(f(grid.pos(ix), y), 0.0);
            }
        }
        Self {
            grid,
            values,
            real: true,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex64> {
        self.real = false;
        &mut self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Re-derive the real flag from the current samples.
    pub fn refresh_real_flag(&mut self) {
        self.real = self
            .values
            .iter()
            .all(|v| v.im.abs() <= REAL_FLAG_TOLERANCE);
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[[iy, ix]]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, v: Complex64) {
        self.values[[iy, ix]] = v;
    }

    pub fn same_grid(&self, other: &SampledField2D) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "(L, N) = ({}, {}) vs ({}, {})",
                self.grid.side(),
                self.grid.len(),
                other.grid.side(),
                other.grid.len()
            )));
        }
        Ok(())
    }

    /// Write the field in the "EF2D" binary format.
    pub fn write_ef2d<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"EF2D")?;
        out.write_all(&(self.grid.len() as u32).to_le_bytes())?;
        out.write_all(&self.grid.side().to_le_bytes())?;
        for iy in 0..self.grid.len() {
            for ix in 0..self.grid.len() {
                let v = self.values[[iy, ix]];
                out.write_all(&v.re.to_le_bytes())?;
                out.write_all(&v.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Read a field in the "EF2D" binary format.
    pub fn read_ef2d<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != b"EF2D" {
            return Err(Error::MalformedField(format!(
                "bad magic {:?}, expected \"EF2D\"",
                magic
            )));
        }
        let mut nbuf = [0u8; 4];
        input.read_exact(&mut nbuf)?;
        let n = u32::from_le_bytes(nbuf) as usize;
        let mut lbuf = [0u8; 8];
        input.read_exact(&mut lbuf)?;
        let l = f64::from_le_bytes(lbuf);
        let grid = Grid1D::new(l, n).map_err(|e| Error::MalformedField(e.to_string()))?;
        let mut values = Array2::zeros((n, n));
        let mut pair = [0u8; 16];
        for iy in 0..n {
            for ix in 0..n {
                input.read_exact(&mut pair)?;
                let re = f64::from_le_bytes(pair[0..8].try_into().unwrap());
                let im = f64::from_le_bytes(pair[8..16].try_into().unwrap());
                values[[iy, ix]] = Complex64::new(re, im);
            }
        }
        Self::from_values(grid, values)
    }

    pub fn save_ef2d(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_ef2d(std::io::BufWriter::new(file))
    }

    pub fn load_ef2d(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_ef2d(std::io::BufReader::new(file))
    }
}

fn fft_2d_inplace(field: &mut Array2<Complex64>, grid: &Grid1D, forward: bool) {
    let n = grid.len();
    let fft = plan(n, forward);
    // Rows (x fastest, contiguous).
    for mut row in field.rows_mut() {
        let buf = row.as_slice_mut().expect("row-major layout");
        rotate_half(buf);
        fft.process(buf);
        rotate_half(buf);
    }
    // Columns via scratch.
    let mut scratch = vec![Complex64::default(); n];
    for ix in 0..n {
        for iy in 0..n {
            scratch[iy] = field[[iy, ix]];
        }
        rotate_half(&mut scratch);
        fft.process(&mut scratch);
        rotate_half(&mut scratch);
        for iy in 0..n {
            field[[iy, ix]] = scratch[iy];
        }
    }
    let w = if forward {
        grid.spacing() * grid.spacing()
    } else {
        grid.dual_spacing() * grid.dual_spacing()
    };
    for v in field.iter_mut() {
        *v *= w;
    }
}

/// Δ²-weighted centered 2D DFT; bins live at `((k - N/2)/L, (m - N/2)/L)`.
pub fn forward_ft_2d(f: &SampledField2D) -> SampledField2D {
    let mut values = f.values.clone();
    fft_2d_inplace(&mut values, &f.grid, true);
    let mut out = SampledField2D {
        grid: f.grid,
        values,
        real: false,
    };
    out.refresh_real_flag();
    out
}

/// Inverse of [`forward_ft_2d`]; composition is the identity.
pub fn inverse_ft_2d(f: &SampledField2D) -> SampledField2D {
    let mut values = f.values.clone();
    fft_2d_inplace(&mut values, &f.grid, false);
    let mut out = SampledField2D {
        grid: f.grid,
        values,
        real: false,
    };
    out.refresh_real_flag();
    out
}

/// `(Σ |f|^p Δ²)^{1/p}`.
pub fn lp_norm(f: &SampledField2D, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lp_norm requires p >= 1, got {p}"
        )));
    }
    let mut acc = KahanSum::new();
    for v in f.values.iter() {
        acc.add(v.norm().powf(p));
    }
    let dx = f.grid.spacing();
    Ok((acc.value() * dx * dx).powf(1.0 / p))
}

/// Discrete ℓ² pairing `Σ a conj(b) Δ²` in fixed row-major order.
pub fn inner_product(a: &SampledField2D, b: &SampledField2D) -> Result<Complex64> {
    a.same_grid(b)?;
    let mut acc = KahanComplex::new();
    for (x, y) in a.values.iter().zip(b.values.iter()) {
        acc.add(x * y.conj());
    }
    let dx = a.grid.spacing();
    Ok(acc.value() * dx * dx)
}

/// Log-midpoint quadrature for `∫ dt/t` over `[t_min, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleQuadrature {
    t_min: f64,
    t_max: f64,
    nodes: Vec<f64>,
    weight: f64,
}

impl ScaleQuadrature {
    pub fn new(t_min: f64, t_max: f64, m: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("node count must be positive".into()));
        }
        let h = (t_max / t_min).ln() / m as f64;
        let nodes = (0..m)
            .map(|j| t_min * ((j as f64 + 0.5) * h).exp())
            .collect();
        Ok(Self {
            t_min,
            t_max,
            nodes,
            weight: h,
        })
    }

    /// Default range `[4Δ, L]` on which sampled windows stay resolved.
    pub fn default_for_grid(grid: &Grid1D, m: usize) -> Result<Self> {
        Self::new(4.0 * grid.spacing(), grid.side(), m)
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weight per node, `ln(t_max/t_min)/M`.
    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// `Σ_j w · samples(t_j)`, the log-midpoint rule for `∫ dt/t`.
pub fn scale_integral(samples: &[f64], quad: &ScaleQuadrature) -> Result<f64> {
    if samples.len() != quad.len() {
        return Err(Error::QuadratureMismatch {
            nodes: quad.len(),
            values: samples.len(),
        });
    }
    Ok(KahanSum::sum_iter(samples.iter().copied()) * quad.weight())
}

/// Complex-valued variant of [`scale_integral`].
pub fn scale_integral_complex(samples: &[Complex64], quad: &ScaleQuadrature) -> Result<Complex64> {
    if samples.len() != quad.len() {
        return Err(Error::QuadratureMismatch {
            nodes: quad.len(),
            values: samples.len(),
        });
    }
    Ok(KahanComplex::sum_iter(samples.iter().copied()) * quad.weight())
}

/// A real 1D window held as samples on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWindow1D {
    grid: Grid1D,
    values: Vec<f64>,
}

impl SampledWindow1D {
    pub fn from_fn<F: FnMut(f64) -> f64>(grid: Grid1D, mut f: F) -> Self {
        let values = grid.positions().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Discrete mass `Σ w Δ`.
    pub fn mass(&self) -> f64 {
        KahanSum::sum_iter(self.values.iter().copied()) * self.grid.spacing()
    }

    /// Periodic Catmull-Rom evaluation at an arbitrary position.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len() as isize;
        let dx = self.grid.spacing();
        let s = (x + 0.5 * self.grid.side()) / dx;
        let i0 = s.floor();
        let frac = s - i0;
        let idx = |i: isize| -> f64 {
            let j = (i.rem_euclid(n)) as usize;
            self.values[j]
        };
        let i = i0 as isize;
        let (p0, p1, p2, p3) = (idx(i - 1), idx(i), idx(i + 1), idx(i + 2));
        let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let c = -0.5 * p0 + 0.5 * p2;
        ((a * frac + b) * frac + c) * frac + p1
    }

    /// Width of the smallest centered interval holding samples above
    /// `1e-8 · max|w|`.
    pub fn effective_support(&self) -> f64 {
        let max = self
            .values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            return 0.0;
        }
        let thresh = 1e-8 * max;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > thresh {
                let x = self.grid.pos(i);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (hi - lo).max(0.0)
    }
}

/// Result of [`dilate_l1`]; carries a resolution warning when the dilated
/// window spans fewer than 4 samples.
#[derive(Debug, Clone)]
pub struct Dilated {
    pub window: SampledWindow1D,
    pub resolution_warning: bool,
}

/// L¹-dilation `[w]_t(x) = t^{-1} w(t^{-1} x)` resampled on the same grid.
pub fn dilate_l1(w: &SampledWindow1D, t: f64) -> Result<Dilated> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonPositiveScale(t));
    }
    let grid = *w.grid();
    let values = grid
        .positions()
        .map(|x| w.eval(x / t) / t)
        .collect::<Vec<_>>();
    let window = SampledWindow1D { grid, values };
    let resolution_warning = w.effective_support() * t < 4.0 * grid.spacing();
    Ok(Dilated {
        window,
        resolution_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn direct_centered_dft_2d(f: &SampledField2D) -> Array2<Complex64> {
        let g = f.grid();
        let n = g.len();
        let dx = g.spacing();
        let mut out = Array2::zeros((n, n));
        for ky in 0..n {
            for kx in 0..n {
                let (xi, eta) = (g.freq(kx), g.freq(ky));
                let mut acc = Complex64::default();
                for iy in 0..n {
                    for ix in 0..n {
                        let phase = -2.0 * std::f64::consts::PI * (g.pos(ix) * xi + g.pos(iy) * eta);
                        acc += f.get(ix, iy) * Complex64::from_polar(1.0, phase);
                    }
                }
                out[[ky, kx]] = acc * dx * dx;
            }
        }
        out
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let grid = Grid1D::new(16.0, 16).unwrap();
        let f = SampledField2D::zeros(grid);
        let s = forward_ft_2d(&f);
        assert!(s.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn fft_matches_direct_dft_at_n8() {
        let grid = Grid1D::new(16.0, 8).unwrap();
        let f = SampledField2D::from_fn(grid, |x, y| {
            Complex64::new((0.3 * x - 0.1 * y).sin(), 0.2 * (x * y * 0.05).cos())
        });
        let fast = forward_ft_2d(&f);
        let direct = direct_centered_dft_2d(&f);
        for (a, b) in fast.values().iter().zip(direct.iter()) {
            assert!((a - b).norm() < 1e-10, "fast {a} vs direct {b}");
        }
    }

    #[test]
    fn pure_mode_gives_single_spike() {
        // e^{2πi(x+y)/L} -> Δ²-weighted mass L² at bin (1/L, 1/L)
        let grid = Grid1D::new(16.0, 8).unwrap();
        let f = SampledField2D::from_fn(grid, |x, y| {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (x + y) / grid.side())
        });
        let s = forward_ft_2d(&f);
        let c = grid.center();
        let l2 = grid.side() * grid.side();
        for ky in 0..grid.len() {
            for kx in 0..grid.len() {
                let v = s.values()[[ky, kx]];
                if kx == c + 1 && ky == c + 1 {
                    assert_relative_eq!(v.re, l2, max_relative = 1e-12);
                    assert!(v.im.abs() < 1e-9);
                } else {
                    assert!(v.norm() < 1e-9 * l2, "leak at ({kx},{ky}): {v}");
                }
            }
        }
    }

    #[test]
    fn gaussian_spectrum_matches_closed_form() {
        // g_1 ⊗ g_1 transforms to e^{-π²(ξ²+η²)}; interior bins to 1e-8.
        let grid = Grid1D::new(16.0, 256).unwrap();
        let inv_pi = 1.0 / std::f64::consts::PI;
        let f = SampledField2D::from_real_fn(grid, |x, y| inv_pi * (-(x * x + y * y)).exp());
        let s = forward_ft_2d(&f);
        for ky in 0..grid.len() {
            for kx in 0..grid.len() {
                let (xi, eta) = (grid.freq(kx), grid.freq(ky));
                if xi.abs() <= 2.0 && eta.abs() <= 2.0 {
                    let expect = (-std::f64::consts::PI.powi(2) * (xi * xi + eta * eta)).exp();
                    let got = s.values()[[ky, kx]];
                    assert!(
                        (got.re - expect).abs() <= 1e-8 * expect && got.im.abs() <= 1e-12,
                        "bin ({xi},{eta}): got {got}, want {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn forward_inverse_roundtrip() {
        let grid = Grid1D::new(16.0, 32).unwrap();
        let f = SampledField2D::from_fn(grid, |x, y| {
            Complex64::new((x * 0.7).cos() * (-y * y / 9.0).exp(), (y * 0.3).sin())
        });
        let back = inverse_ft_2d(&forward_ft_2d(&f));
        for (a, b) in back.values().iter().zip(f.values().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn discrete_parseval() {
        let grid = Grid1D::new(16.0, 32).unwrap();
        let f = SampledField2D::from_fn(grid, |x, y| {
            Complex64::new((0.4 * x + 0.2 * y).sin(), (0.1 * x * y).cos())
        });
        let s = forward_ft_2d(&f);
        let dx2 = grid.spacing() * grid.spacing();
        let dk2 = grid.dual_spacing() * grid.dual_spacing();
        let space: f64 = KahanSum::sum_iter(f.values().iter().map(|v| v.norm_sqr())) * dx2;
        let freq: f64 = KahanSum::sum_iter(s.values().iter().map(|v| v.norm_sqr())) * dk2;
        assert_relative_eq!(space, freq, max_relative = 1e-12);
    }

    #[test]
    fn lp_norm_examples() {
        let grid = Grid1D::new(16.0, 64).unwrap();
        // indicator of one cell at p = 4: Δ^{1/2} · |value|
        let mut f = SampledField2D::zeros(grid);
        f.set(3, 5, Complex64::new(2.0, 0.0));
        let got = lp_norm(&f, 4.0).unwrap();
        assert_relative_eq!(got, 2.0 * grid.spacing().sqrt(), max_relative = 1e-14);

        // Gaussian L² norm: (1/(2π))^{1/2}
        let grid = Grid1D::new(16.0, 256).unwrap();
        let inv_pi = 1.0 / std::f64::consts::PI;
        let g = SampledField2D::from_real_fn(grid, |x, y| inv_pi * (-(x * x + y * y)).exp());
        let got = lp_norm(&g, 2.0).unwrap();
        let expect = (1.0 / (2.0 * std::f64::consts::PI)).sqrt();
        assert_relative_eq!(got, expect, max_relative = 1e-8);

        // homogeneity
        let mut h = g.clone();
        for v in h.values_mut().iter_mut() {
            *v *= -3.5;
        }
        assert_relative_eq!(
            lp_norm(&h, 3.0).unwrap(),
            3.5 * lp_norm(&g, 3.0).unwrap(),
            max_relative = 1e-13
        );

        assert!(lp_norm(&g, 0.5).is_err());
    }

    #[test]
    fn scale_quadrature_basics() {
        let q = ScaleQuadrature::new(1.0, std::f64::consts::E, 128).unwrap();
        let ones = vec![1.0; q.len()];
        assert_relative_eq!(scale_integral(&ones, &q).unwrap(), 1.0, epsilon = 1e-14);
        assert!(q.nodes().iter().all(|&t| t >= 1.0 && t <= std::f64::consts::E));

        // weight sum equals ln(t_max/t_min)
        let q2 = ScaleQuadrature::new(0.5, 4.0, 77).unwrap();
        assert_relative_eq!(
            q2.weight() * q2.len() as f64,
            (4.0f64 / 0.5).ln(),
            epsilon = 1e-14
        );

        // mismatched lengths
        assert!(scale_integral(&[1.0, 2.0], &q2).is_err());
    }

    #[test]
    fn scale_integral_indicator() {
        let q = ScaleQuadrature::new(0.5, 4.0, 4096).unwrap();
        let samples: Vec<f64> = q
            .nodes()
            .iter()
            .map(|&t| if (1.0..=2.0).contains(&t) { 1.0 } else { 0.0 })
            .collect();
        let got = scale_integral(&samples, &q).unwrap();
        assert!((got - std::f64::consts::LN_2).abs() < 1e-3);
    }

    #[test]
    fn scale_integral_dilation_invariance() {
        // ∫ ŵ(t r) dt/t does not depend on r for profiles supported away from 0.
        let profile = |s: f64| {
            if (1.0..=2.0).contains(&s) {
                let u = (s - 1.0) * (2.0 - s);
                u * u
            } else {
                0.0
            }
        };
        let q = ScaleQuadrature::new(0.01, 10.0, 16384).unwrap();
        let eval = |r: f64| {
            let samples: Vec<f64> = q.nodes().iter().map(|&t| profile(t * r)).collect();
            scale_integral(&samples, &q).unwrap()
        };
        assert!((eval(1.0) - eval(3.0)).abs() < 1e-6);
    }

    #[test]
    fn dilate_identity_and_gaussian() {
        let grid = Grid1D::new(16.0, 256).unwrap();
        let g1 = SampledWindow1D::from_fn(grid, |x| (-(x * x)).exp() / std::f64::consts::PI.sqrt());
        let same = dilate_l1(&g1, 1.0).unwrap();
        for (a, b) in same.window.values().iter().zip(g1.values()) {
            assert!((a - b).abs() < 1e-12);
        }

        // Gaussian scale covariance: [g_1]_t = g_t
        let t = 1.7;
        let d = dilate_l1(&g1, t).unwrap();
        assert!(!d.resolution_warning);
        for (i, v) in d.window.values().iter().enumerate() {
            let x = grid.pos(i);
            let expect = (-(x / t) * (x / t)).exp() / (std::f64::consts::PI.sqrt() * t);
            assert!(
                (v - expect).abs() < 1e-6,
                "x = {x}: got {v}, want {expect}"
            );
        }
    }

    #[test]
    fn dilate_preserves_mass() {
        let grid = Grid1D::new(16.0, 512).unwrap();
        let w = SampledWindow1D::from_fn(grid, |x| (-(x * x)).exp() * (1.0 + 0.3 * x));
        let base = w.mass();
        for &t in &[0.25, 0.5, 1.0, 2.0, 4.0] {
            let d = dilate_l1(&w, t).unwrap();
            assert!(
                (d.window.mass() - base).abs() < 1e-8,
                "mass drift at t = {t}: {} vs {base}",
                d.window.mass()
            );
        }
    }

    #[test]
    fn dilate_composition() {
        let grid = Grid1D::new(16.0, 512).unwrap();
        let w = SampledWindow1D::from_fn(grid, |x| (-(x * x) / 2.0).exp());
        for &(s, t) in &[(0.5, 2.0), (0.7, 1.3), (2.0, 0.6)] {
            let a = dilate_l1(&dilate_l1(&w, s).unwrap().window, t).unwrap().window;
            let b = dilate_l1(&w, s * t).unwrap().window;
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-8, "composition mismatch at (s,t)=({s},{t})");
            }
        }
    }

    #[test]
    fn dilate_rejects_bad_scale_and_warns_when_unresolved() {
        let grid = Grid1D::new(16.0, 64).unwrap();
        let w = SampledWindow1D::from_fn(grid, |x| (-(x * x)).exp());
        assert!(dilate_l1(&w, 0.0).is_err());
        assert!(dilate_l1(&w, -1.0).is_err());
        let d = dilate_l1(&w, 1e-3).unwrap();
        assert!(d.resolution_warning);
    }

    #[test]
    fn ef2d_roundtrip() {
        let grid = Grid1D::new(8.0, 16).unwrap();
        let f = SampledField2D::from_fn(grid, |x, y| Complex64::new(x * y, x - y));
        let mut buf = Vec::new();
        f.write_ef2d(&mut buf).unwrap();
        assert_eq!(&buf[0..4], b"EF2D");
        let back = SampledField2D::read_ef2d(buf.as_slice()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn ef2d_rejects_bad_magic() {
        let buf = b"NOPE\x10\x00\x00\x00".to_vec();
        assert!(SampledField2D::read_ef2d(buf.as_slice()).is_err());
    }
}
