//! Bilinear Fourier multipliers by direct double sum.

use super::{Grid, SpectralField};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Signed modes with their coefficient, the Nyquist coefficient split evenly
/// between ±n/2 so it acts as a cosine.
fn signed_spectrum(f: &SpectralField) -> Vec<(i64, Complex64)> {
    let grid = f.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(n + 1);
    for (j, c) in f.coeffs().iter().enumerate() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        if j == grid.nyquist_slot() {
            let m = (n / 2) as i64;
            out.push((-m, 0.5 * c));
            out.push((m, 0.5 * c));
        } else {
            out.push((grid.mode(j), *c));
        }
    }
    out
}

fn accumulate<B>(grid: Grid, b: B, f: &SpectralField, g: &SpectralField) -> Result<(Vec<Complex64>, bool)>
where
    B: Fn(f64, f64) -> Complex64,
{
    let n = grid.n();
    let k0 = grid.k0();
    let half = (n / 2) as i64;
    let fs = signed_spectrum(f);
    let gs = signed_spectrum(g);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut hermitian = true;
    for &(mf, cf) in &fs {
        let xi = k0 * mf as f64;
        for &(mg, cg) in &gs {
            let m = mf + mg;
            if m <= -half || m >= half {
                continue;
            }
            let zeta = k0 * mg as f64;
            let s = b(xi, zeta);
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(Error::SingularBilinear { xi, zeta });
            }
            if hermitian {
                let r = b(-xi, -zeta);
                if (r - s.conj()).norm() > 1e-12 * (1.0 + s.norm()) {
                    hermitian = false;
                }
            }
            out[m.rem_euclid(n as i64) as usize] += s * cf * cg;
        }
    }
    Ok((out, hermitian))
}

/// `B(f, g)(α) = Σ_{ξ,ζ} e^{iα(ξ+ζ)} b(ξ,ζ) f̂(ξ) ĝ(ζ)`.
///
/// Output frequencies outside the open band (−ξ_max, ξ_max) are dropped
/// rather than aliased. When `f` and `g` are the same field the symbol is
/// symmetrized first.
pub fn bilinear_multiplier<B>(b: B, f: &SpectralField, g: &SpectralField) -> Result<SpectralField>
where
    B: Fn(f64, f64) -> Complex64,
{
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("bilinear multiplier inputs".into()));
    }
    if f == g {
        return bilinear_multiplier_sym(b, f);
    }
    let grid = f.grid();
    let (out, herm) = accumulate(grid, b, f, g)?;
    Ok(SpectralField::from_coeffs(grid, out, herm && f.is_real() && g.is_real()))
}

/// Quadratic form `B(f, f)` with the symmetrized symbol ½(b(ξ,ζ) + b(ζ,ξ)).
pub fn bilinear_multiplier_sym<B>(b: B, f: &SpectralField) -> Result<SpectralField>
where
    B: Fn(f64, f64) -> Complex64,
{
    let sym = |x: f64, z: f64| 0.5 * (b(x, z) + b(z, x));
    let grid = f.grid();
    let (out, herm) = accumulate(grid, sym, f, f)?;
    Ok(SpectralField::from_coeffs(grid, out, herm && f.is_real()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_ops::{dealias, derivative};

    fn grid() -> Grid {
        Grid::new(32, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn unit_symbol_is_product() {
        let g = grid();
        let f = dealias(&SpectralField::from_fn(g, |x| (x.sin() + 0.3 * (3.0 * x).cos()).exp() - 1.0));
        let h = SpectralField::from_fn(g, |x| (2.0 * x).cos());
        let b = bilinear_multiplier(|_, _| Complex64::new(1.0, 0.0), &f, &h).unwrap();
        let direct = f.mul(&h);
        // the grid product aliases only onto modes |m| > n/3 here
        let ok = (0..g.n()).filter(|&j| g.mode(j).abs() < 10).all(|j| (b.coeffs()[j] - direct.coeffs()[j]).norm() < 1e-12);
        assert!(ok);
    }

    #[test]
    fn derivative_symbol() {
        let g = grid();
        let f = SpectralField::mode(g, 2, 1.0, 0.5);
        let h = SpectralField::mode(g, 3, 0.2, -1.0);
        let b = bilinear_multiplier(|x, _| Complex64::new(0.0, x), &f, &h).unwrap();
        let direct = derivative(&f).mul(&h);
        assert!(b.rel_diff(&direct) < 1e-12);
        assert!(b.is_real());
    }

    #[test]
    fn singular_sample_is_reported() {
        let g = grid();
        let f = SpectralField::mode(g, 1, 1.0, 0.0);
        let err = bilinear_multiplier_sym(|x, z| Complex64::new(1.0 / (x + z), 0.0), &f).unwrap_err();
        assert!(matches!(err, Error::SingularBilinear { .. }));
    }
}
