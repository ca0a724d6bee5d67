//! Periodic Fourier collocation.
//!
//! The line is replaced by the box `[-L/2, L/2)` with `N` equispaced points
//! `x_i = -L/2 + i h`, `h = L/N`. Spectra are stored in FFT order (mode `k`
//! at index `k` for `k >= 0`, at `k + N` for `k < 0`), with the transform
//! normalised so that coefficients approximate the continuum Fourier
//! transform:
//!
//! ```text
//!     F_k = h Σ_i f(x_i) e^{-i ξ_k x_i},      f(x_i) = (1/L) Σ_k F_k e^{i ξ_k x_i},      ξ_k = 2πk/L
//! ```
//!
//! With this convention `Σ_i h f_i² = (1/L) Σ_k |F_k|²` and Sobolev norms need
//! no extra factors.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative imaginary residue above which an inverse transform is rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

struct GridInner {
    length: f64,
    points: usize,
    spacing: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("length", &self.inner.length)
            .field("points", &self.inner.points)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl PeriodicGrid {
    /// Builds a grid of `points` collocation points on a box of size `length`.
    ///
    /// `points` must be a power of two and at least 8.
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config(format!("box length must be positive, got {length}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::config(format!(
                "grid size must be a power of two >= 8, got {points}"
            )));
        }
        let dk = 2.0 * PI / length;
        let wavenumbers = (0..points)
            .map(|i| signed_mode(i, points) as f64 * dk)
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        Ok(Self {
            inner: Arc::new(GridInner {
                length,
                points,
                spacing: length / points as f64,
                wavenumbers,
                forward,
                inverse,
            }),
        })
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    pub fn points(&self) -> usize {
        self.inner.points
    }

    pub fn spacing(&self) -> f64 {
        self.inner.spacing
    }

    /// Collocation point `x_i`.
    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.inner.length + i as f64 * self.inner.spacing
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points()).map(|i| self.x(i)).collect()
    }

    /// Angular frequencies `ξ_k` in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// Signed mode number `k` stored at FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        signed_mode(i, self.points())
    }

    /// FFT index of the signed mode `k`.
    pub fn index_of_mode(&self, k: i64) -> usize {
        k.rem_euclid(self.points() as i64) as usize
    }

    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.inner.length
    }

    /// Index of the unpaired mode `k = -N/2`.
    pub fn nyquist_index(&self) -> usize {
        self.points() / 2
    }

    /// Largest resolved frequency magnitude `πN/L`.
    pub fn xi_max(&self) -> f64 {
        PI * self.points() as f64 / self.inner.length
    }

    /// Upper edge of the band kept by two-thirds dealiasing.
    pub fn retained_cutoff(&self) -> f64 {
        2.0 / 3.0 * self.xi_max()
    }

    /// Whether FFT index `i` survives two-thirds dealiasing (`3|k| <= N`).
    pub fn is_retained(&self, i: usize) -> bool {
        3 * self.mode(i).unsigned_abs() as usize <= self.points()
    }

    pub fn same_as(&self, other: &PeriodicGrid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.points() == other.points() && self.length() == other.length())
    }

    /// Reduces `x` modulo `L` into `[-L/2, L/2)`.
    pub fn reduce(&self, x: f64) -> f64 {
        let l = self.inner.length;
        x - l * ((x + 0.5 * l) / l).floor()
    }

    pub(crate) fn forward_transform(&self, samples: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.points());
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.inner.forward.process(&mut buf);
        let h = self.inner.spacing;
        for (i, c) in buf.iter_mut().enumerate() {
            // e^{-iξ_k x_i} = (-1)^k e^{-2πi k i/N} for x_0 = -L/2
            *c *= if i % 2 == 0 { h } else { -h };
        }
        buf
    }

    pub(crate) fn inverse_transform(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(coeffs.len(), self.points());
        let inv_l = 1.0 / self.inner.length;
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c * inv_l } else { -c * inv_l })
            .collect();
        self.inner.inverse.process(&mut buf);
        buf
    }

    /// Inverse transform keeping only the real part.
    pub(crate) fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.inverse_transform(coeffs).into_iter().map(|c| c.re).collect()
    }

    /// Tabulates a multiplier on the grid frequencies.
    ///
    /// The multiplier must be finite and satisfy `m(-ξ) = conj(m(ξ))`. The
    /// unpaired Nyquist mode receives `Re m(ξ_{-N/2})`, which zeroes it for odd
    /// multipliers such as `iξ` and keeps it for even real ones.
    pub fn symbol<M>(&self, m: M) -> Result<Vec<Complex64>>
    where
        M: Fn(f64) -> Complex64,
    {
        let n = self.points();
        let mut table: Vec<Complex64> = self.wavenumbers().iter().map(|&xi| m(xi)).collect();
        if let Some(bad) = table.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Numeric(format!(
                "multiplier is not finite at ξ = {}",
                self.wavenumbers()[bad]
            )));
        }
        for k in 1..n / 2 {
            let (pos, neg) = (table[k], table[n - k]);
            let scale = pos.norm().max(1.0);
            if (neg - pos.conj()).norm() > 1e-12 * scale {
                return Err(Error::Precondition(format!(
                    "multiplier is not Hermitian at ξ = {}",
                    self.wavenumbers()[k]
                )));
            }
        }
        let nyq = self.nyquist_index();
        table[nyq] = Complex64::new(table[nyq].re, 0.0);
        Ok(table)
    }
}

fn signed_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Fourier coefficients of a field under the crate's DFT convention.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: PeriodicGrid,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: PeriodicGrid, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.points() {
            return Err(Error::config(format!(
                "spectrum has {} coefficients, grid has {} points",
                coefficients.len(),
                grid.points()
            )));
        }
        Ok(Self { grid, coefficients })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self {
            coefficients: vec![Complex64::new(0.0, 0.0); grid.points()],
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Coefficients in FFT order.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    /// Coefficient of the signed mode `k`.
    pub fn mode(&self, k: i64) -> Complex64 {
        self.coefficients[self.grid.index_of_mode(k)]
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }
}

/// A real function sampled on a periodic grid, with a lazily cached spectrum.
#[derive(Clone)]
pub struct Field {
    grid: PeriodicGrid,
    samples: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid)
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl Field {
    /// Wraps samples; rejects wrong lengths and non-finite values.
    pub fn new(grid: &PeriodicGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(Error::config(format!(
                "field has {} samples, grid has {} points",
                samples.len(),
                grid.points()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("sample {i} is {}", samples[i])));
        }
        Ok(Self::from_parts(grid, samples, None))
    }

    pub(crate) fn from_parts(
        grid: &PeriodicGrid,
        samples: Vec<f64>,
        spectrum: Option<Vec<Complex64>>,
    ) -> Self {
        let cache = OnceLock::new();
        if let Some(s) = spectrum {
            let _ = cache.set(s);
        }
        Self { grid: grid.clone(), samples, spectrum: cache }
    }

    /// Builds a field from spectral coefficients without a symmetry check.
    pub(crate) fn from_coefficients(grid: &PeriodicGrid, coeffs: Vec<Complex64>) -> Self {
        let samples = grid.inverse_real(&coeffs);
        Self::from_parts(grid, samples, Some(coeffs))
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &PeriodicGrid, f: F) -> Self {
        let samples = (0..grid.points()).map(|i| f(grid.x(i))).collect();
        Self::from_parts(grid, samples, None)
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &PeriodicGrid, value: f64) -> Self {
        Self::from_parts(grid, vec![value; grid.points()], None)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Cached spectral coefficients in FFT order.
    pub fn coefficients(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| self.grid.forward_transform(&self.samples))
    }

    pub fn to_spectrum(&self) -> Spectrum {
        Spectrum { grid: self.grid.clone(), coefficients: self.coefficients().to_vec() }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at the box edge `x = -L/2` relative to the field maximum.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            0.0
        } else {
            self.samples[0].abs() / max
        }
    }

    /// Value at the grid point nearest to `x`.
    pub fn sample_at(&self, x: f64) -> f64 {
        let g = &self.grid;
        let i = ((g.reduce(x) + 0.5 * g.length()) / g.spacing()).round() as usize % g.points();
        self.samples[i]
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.check_grid(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::from_parts(&self.grid, samples, None))
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Field {
        let samples = self.samples.iter().map(|v| c * v).collect();
        let spectrum = self.spectrum.get().map(|s| s.iter().map(|z| z * c).collect());
        Self::from_parts(&self.grid, samples, spectrum)
    }

    /// Pointwise product on the collocation points (no dealiasing).
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(x, y)| x * y).collect();
        Ok(Self::from_parts(&self.grid, samples, None))
    }

    /// Circular shift by `cells` grid points: `out[i] = self[i - cells]`.
    pub fn shift(&self, cells: isize) -> Field {
        let n = self.samples.len() as isize;
        let samples = (0..n)
            .map(|i| self.samples[(i - cells).rem_euclid(n) as usize])
            .collect();
        Self::from_parts(&self.grid, samples, None)
    }
}

pub fn make_grid(length: f64, points: usize) -> Result<PeriodicGrid> {
    PeriodicGrid::new(length, points)
}

pub fn to_spectrum(f: &Field) -> Spectrum {
    f.to_spectrum()
}

/// Inverse transform with a Hermitian-symmetry check.
///
/// Imaginary residue up to [`SYMMETRY_TOLERANCE`] of the field magnitude is
/// discarded; anything larger is an error.
pub fn from_spectrum(s: &Spectrum) -> Result<Field> {
    let values = s.grid.inverse_transform(&s.coefficients);
    let magnitude = values.iter().fold(0.0_f64, |m, c| m.max(c.re.abs()));
    let residue = values.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
    if residue > SYMMETRY_TOLERANCE * magnitude.max(f64::MIN_POSITIVE) && residue > 0.0 {
        return Err(Error::SymmetryViolation { residue, magnitude });
    }
    if let Some(c) = values.iter().find(|c| !c.re.is_finite()) {
        return Err(Error::Numeric(format!("inverse transform produced {}", c.re)));
    }
    let samples = values.into_iter().map(|c| c.re).collect();
    Ok(Field::from_parts(&s.grid, samples, Some(s.coefficients.clone())))
}

/// Applies a precomputed symbol table (see [`PeriodicGrid::symbol`]).
pub fn apply_symbol(f: &Field, symbol: &[Complex64]) -> Field {
    let coeffs = f.coefficients().iter().zip(symbol).map(|(c, m)| c * m).collect();
    Field::from_coefficients(f.grid(), coeffs)
}

/// Applies the Fourier multiplier `m(ξ)`: `G_k = m(ξ_k) F_k`.
pub fn apply_multiplier<M>(f: &Field, m: M) -> Result<Field>
where
    M: Fn(f64) -> Complex64,
{
    let table = f.grid().symbol(m)?;
    let out = apply_symbol(f, &table);
    if out.samples().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("multiplier output is not finite".into()));
    }
    Ok(out)
}

/// Common multipliers.
pub mod symbols {
    use num_complex::Complex64;

    /// `∂ₓ`: `iξ`.
    pub fn derivative(xi: f64) -> Complex64 {
        Complex64::new(0.0, xi)
    }

    /// `∂ₓΛ⁻²`: `iξ / (1 + ξ²)`.
    pub fn nonlocal_wave(xi: f64) -> Complex64 {
        Complex64::new(0.0, xi / (1.0 + xi * xi))
    }

    /// `Λ^σ`: `(1 + ξ²)^{σ/2}`.
    pub fn bessel_potential(sigma: f64) -> impl Fn(f64) -> Complex64 {
        move |xi| Complex64::new((1.0 + xi * xi).powf(0.5 * sigma), 0.0)
    }
}

/// Spectral derivative `∂ₓ f`.
pub fn derivative(f: &Field) -> Field {
    let table = f.grid().symbol(symbols::derivative).expect("iξ is Hermitian and finite");
    apply_symbol(f, &table)
}

/// The nonlocal operator `∂ₓΛ⁻² f`.
pub fn nonlocal_wave_operator(f: &Field) -> Field {
    let table = f.grid().symbol(symbols::nonlocal_wave).expect("iξ/(1+ξ²) is Hermitian and finite");
    apply_symbol(f, &table)
}

/// Two-thirds rule: zeroes every mode with `|ξ_k| > (2/3) ξ_max`.
pub fn dealias(f: &Field) -> Field {
    let g = f.grid();
    let coeffs = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, &c)| if g.is_retained(i) { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    Field::from_coefficients(g, coeffs)
}

pub(crate) fn dealias_in_place(grid: &PeriodicGrid, coeffs: &mut [Complex64]) {
    for (i, c) in coeffs.iter_mut().enumerate() {
        if !grid.is_retained(i) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Evaluates the trigonometric interpolant of a Hermitian spectrum at `x`.
pub(crate) fn interpolate_coefficients(grid: &PeriodicGrid, coeffs: &[Complex64], x: f64) -> f64 {
    const REANCHOR: usize = 64;
    let n = grid.points();
    let half = n / 2;
    let theta = grid.frequency_spacing() * grid.reduce(x);
    let step = Complex64::from_polar(1.0, theta);
    let mut w = step;
    let mut acc = coeffs[0].re;
    for (k, c) in coeffs.iter().enumerate().take(half).skip(1) {
        if k % REANCHOR == 0 {
            w = Complex64::from_polar(1.0, theta * k as f64);
        }
        acc += 2.0 * (c * w).re;
        w *= step;
    }
    acc += (coeffs[half] * Complex64::from_polar(1.0, -theta * half as f64)).re;
    acc / grid.length()
}

/// Value of the trigonometric interpolant `(1/L) Σ F_k e^{iξ_k x}` at any `x`.
pub fn fourier_interpolate(f: &Field, x: f64) -> f64 {
    interpolate_coefficients(f.grid(), f.coefficients(), x)
}

pub(crate) fn tail_fraction_of(grid: &PeriodicGrid, coeffs: &[Complex64]) -> Option<f64> {
    let kr = (grid.points() / 3) as f64;
    let (mut top, mut retained, mut total) = (0.0, 0.0, 0.0);
    for (i, c) in coeffs.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        let k = grid.mode(i).unsigned_abs() as f64;
        if k <= kr {
            retained += e;
            if 2.0 * k > kr {
                top += e;
            }
        }
    }
    if total == 0.0 {
        None
    } else if retained == 0.0 {
        Some(1.0)
    } else {
        Some(top / retained)
    }
}

/// Share of the retained-band energy carried by its top octave.
///
/// The retained band is `|k| <= N/3`; its top octave is `N/6 < |k| <= N/3`.
/// A field whose energy lies entirely above the retained band reports 1.
pub fn spectral_tail_fraction(f: &Field) -> Result<f64> {
    tail_fraction_of(f.grid(), f.coefficients())
        .ok_or_else(|| Error::UndefinedRatio("tail fraction of a zero field".into()))
}
