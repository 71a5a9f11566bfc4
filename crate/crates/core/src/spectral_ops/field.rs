use super::Grid;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// In-place forward transform normalized to Fourier-series coefficients.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    let n = buf.len();
    forward_plan(n).process(buf);
    let s = 1.0 / n as f64;
    for c in buf.iter_mut() {
        *c *= s;
    }
}

/// In-place inverse of [`fft_forward`].
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    inverse_plan(buf.len()).process(buf);
}

/// Periodic function stored by its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.n()], real: true }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(c, 0.0);
        f
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>, real: bool) -> Self {
        assert_eq!(coeffs.len(), grid.n(), "coefficient count must match grid");
        let mut f = Self { grid, coeffs, real };
        if real {
            f.enforce_realness();
        }
        f
    }

    pub fn from_real(grid: Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::GridMismatch(format!("{} samples for n = {}", samples.len(), grid.n())));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_forward(&mut buf);
        Ok(Self::from_coeffs(grid, buf, true))
    }

    pub fn from_complex(grid: Grid, samples: &[Complex64]) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::GridMismatch(format!("{} samples for n = {}", samples.len(), grid.n())));
        }
        let mut buf = samples.to_vec();
        fft_forward(&mut buf);
        Ok(Self { grid, coeffs: buf, real: false })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Self {
        let samples: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        Self::from_real(grid, &samples).expect("sample count matches grid")
    }

    pub fn from_complex_fn<F: Fn(f64) -> Complex64>(grid: Grid, f: F) -> Self {
        let samples: Vec<Complex64> = grid.nodes().into_iter().map(f).collect();
        Self::from_complex(grid, &samples).expect("sample count matches grid")
    }

    /// Real field with a single cosine/sine pair: `a cos(kx) + b sin(kx)` for
    /// integer mode `k`.
    pub fn mode(grid: Grid, k: i64, a: f64, b: f64) -> Self {
        let kx = grid.k0() * k as f64;
        Self::from_fn(grid, |x| a * (kx * x).cos() + b * (kx * x).sin())
    }

    pub fn complex_from_parts(re: &SpectralField, im: &SpectralField) -> Self {
        assert_eq!(re.grid, im.grid);
        let i = Complex64::new(0.0, 1.0);
        let coeffs = re.coeffs.iter().zip(&im.coeffs).map(|(a, b)| a + i * b).collect();
        Self { grid: re.grid, coeffs, real: false }
    }

    fn enforce_realness(&mut self) {
        let n = self.grid.n();
        self.coeffs[0].im = 0.0;
        self.coeffs[n / 2].im = 0.0;
        for j in 1..n / 2 {
            let a = self.coeffs[j];
            let b = self.coeffs[n - j];
            let avg = 0.5 * (a + b.conj());
            self.coeffs[j] = avg;
            self.coeffs[n - j] = avg.conj();
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Coefficient of signed mode `m` (zero if not representable).
    pub fn coeff_of_mode(&self, m: i64) -> Complex64 {
        self.grid.slot(m).map(|j| self.coeffs[j]).unwrap_or_default()
    }

    pub fn samples(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        fft_inverse(&mut buf);
        buf
    }

    pub fn real_samples(&self) -> Vec<f64> {
        self.samples().into_iter().map(|c| c.re).collect()
    }

    pub fn imag_samples(&self) -> Vec<f64> {
        self.samples().into_iter().map(|c| c.im).collect()
    }

    /// Real part as a real field.
    pub fn re(&self) -> SpectralField {
        if self.real {
            return self.clone();
        }
        let n = self.grid.n();
        let coeffs = (0..n)
            .map(|j| {
                let jm = (n - j) % n;
                0.5 * (self.coeffs[j] + self.coeffs[jm].conj())
            })
            .collect();
        Self::from_coeffs(self.grid, coeffs, true)
    }

    /// Imaginary part as a real field.
    pub fn im(&self) -> SpectralField {
        if self.real {
            return Self::zeros(self.grid);
        }
        let n = self.grid.n();
        let coeffs = (0..n)
            .map(|j| {
                let jm = (n - j) % n;
                Complex64::new(0.0, -0.5) * (self.coeffs[j] - self.coeffs[jm].conj())
            })
            .collect();
        Self::from_coeffs(self.grid, coeffs, true)
    }

    pub fn conj(&self) -> SpectralField {
        if self.real {
            return self.clone();
        }
        let n = self.grid.n();
        let coeffs = (0..n).map(|j| self.coeffs[(n - j) % n].conj()).collect();
        Self { grid: self.grid, coeffs, real: false }
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn without_mean(&self) -> SpectralField {
        let mut f = self.clone();
        f.coeffs[0] = Complex64::new(0.0, 0.0);
        f
    }

    pub fn add_constant(&self, c: f64) -> SpectralField {
        let mut f = self.clone();
        f.coeffs[0] += c;
        f
    }

    pub fn add_imag_constant(&self, c: f64) -> SpectralField {
        let mut f = self.clone();
        f.coeffs[0] += Complex64::new(0.0, c);
        f.real = f.real && c == 0.0;
        f
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, other.grid);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { grid: self.grid, coeffs, real: self.real && other.real }
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, other.grid);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self { grid: self.grid, coeffs, real: self.real && other.real }
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        let coeffs = self.coeffs.iter().map(|a| a * s).collect();
        Self { grid: self.grid, coeffs, real: self.real }
    }

    pub fn scale_complex(&self, s: Complex64) -> SpectralField {
        let coeffs = self.coeffs.iter().map(|a| a * s).collect();
        Self { grid: self.grid, coeffs, real: self.real && s.im == 0.0 }
    }

    /// Pointwise product on the grid (no dealiasing).
    pub fn mul(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, other.grid);
        let a = self.samples();
        let b = other.samples();
        let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let mut f = Self::from_complex(self.grid, &prod).expect("same grid");
        if self.real && other.real {
            f.real = true;
            f.enforce_realness();
        }
        f
    }

    /// Applies `op` to the samples and transforms back.
    pub fn map_samples<F: Fn(Complex64) -> Complex64>(&self, op: F, real: bool) -> SpectralField {
        let s: Vec<Complex64> = self.samples().into_iter().map(op).collect();
        let mut f = Self::from_complex(self.grid, &s).expect("same grid");
        if real {
            f.real = true;
            f.enforce_realness();
        }
        f
    }

    /// ‖f‖_{L²(period)} from the coefficients (Parseval).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.period() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// ‖f‖_{L²} from grid samples (trapezoid rule).
    pub fn l2_norm_samples(&self) -> f64 {
        let dx = self.grid.spacing();
        (dx * self.samples().iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// ℓ¹ norm of the coefficients, an upper bound for the sup norm.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// ∫ f dx over one period.
    pub fn integral(&self) -> Complex64 {
        self.coeffs[0] * self.grid.period()
    }

    /// Real inner product ∫ Re(f·conj g) dx.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.grid.period() * self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum::<f64>()
    }

    /// Evaluates the trigonometric interpolant at arbitrary points, the
    /// Nyquist coefficient acting as a cosine.
    pub fn eval_many(&self, xs: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let k0 = self.grid.k0();
        let half = n / 2;
        xs.iter()
            .map(|&x| {
                let step = Complex64::from_polar(1.0, k0 * x);
                let mut ph = Complex64::new(1.0, 0.0);
                let mut acc = self.coeffs[0];
                for j in 1..half {
                    ph *= step;
                    acc += self.coeffs[j] * ph + self.coeffs[n - j] * ph.conj();
                }
                acc + self.coeffs[half] * (k0 * half as f64 * x).cos()
            })
            .collect()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_many(&[x])[0]
    }

    /// Largest |coefficient| difference, relative to the larger field.
    pub fn rel_diff(&self, other: &SpectralField) -> f64 {
        let d = self.sub(other).l2_norm();
        let s = self.l2_norm().max(other.l2_norm());
        if s == 0.0 {
            d
        } else {
            d / s
        }
    }

    /// Largest modulus of a coefficient with |mode| > `k`.
    pub fn tail_above(&self, k: i64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| self.grid.mode(*j).abs() > k)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Resamples onto a grid with the same period and `n_new` points by
    /// zero-padding or truncation of the spectrum.
    pub fn resample(&self, n_new: usize) -> Result<SpectralField> {
        let grid = Grid::new(n_new, self.grid.period())?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_new];
        let lim = (self.grid.n().min(n_new) / 2) as i64;
        for m in -lim + 1..lim {
            if let (Some(a), Some(b)) = (self.grid.slot(m), grid.slot(m)) {
                coeffs[b] = self.coeffs[a];
            }
        }
        Ok(Self::from_coeffs(grid, coeffs, self.real))
    }
}
