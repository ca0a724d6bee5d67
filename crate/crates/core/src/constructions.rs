//! Closed-form generators: smooth cutoffs, the two-parameter approximate
//! solutions and their residuals, the norm-inflation data and wave-breaking
//! data with its admissibility certificate.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{lebesgue_norm, sobolev_norm, sobolev_norm_of};
use crate::spectral::{derivative, fourier_interpolate, nonlocal_wave_operator, Field, PeriodicGrid};

/// The C^∞ step `S(x) = g(x) / (g(x) + g(1-x))`, `g(x) = e^{-1/x}` for `x > 0`.
///
/// `S = 0` on `x <= 0`, `S = 1` on `x >= 1`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let g = |t: f64| (-1.0 / t).exp();
        let (a, b) = (g(x), g(1.0 - x));
        a / (a + b)
    }
}

/// Even cutoff equal to 1 on `|x| <= a` and 0 on `|x| >= b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpProfile {
    pub plateau: f64,
    pub support: f64,
}

impl BumpProfile {
    pub fn new(plateau: f64, support: f64) -> Result<Self> {
        if !(plateau > 0.0 && support > plateau && support.is_finite()) {
            return Err(Error::config(format!(
                "bump needs 0 < a < b, got a = {plateau}, b = {support}"
            )));
        }
        Ok(Self { plateau, support })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let r = x.abs();
        if r <= self.plateau {
            1.0
        } else if r >= self.support {
            0.0
        } else {
            smooth_step((self.support - r) / (self.support - self.plateau))
        }
    }

    pub fn on_grid(&self, grid: &PeriodicGrid) -> Field {
        Field::from_fn(grid, |x| self.eval(x))
    }

    /// Samples `x ↦ bump(x / scale)`.
    pub fn dilated(&self, grid: &PeriodicGrid, scale: f64) -> Field {
        Field::from_fn(grid, |x| self.eval(x / scale))
    }
}

pub fn bump(plateau: f64, support: f64) -> Result<BumpProfile> {
    BumpProfile::new(plateau, support)
}

/// Envelope of the oscillatory packet: 1 on `|x| < 1`, 0 on `|x| >= 2`.
pub fn packet_envelope() -> BumpProfile {
    BumpProfile { plateau: 1.0, support: 2.0 }
}

/// Profile of the slow component: 1 on `|x| < 2`, 0 on `|x| >= 3`.
pub fn slow_profile() -> BumpProfile {
    BumpProfile { plateau: 2.0, support: 3.0 }
}

/// Smallest `2π·2^m >= min_length`.
pub fn dyadic_box_length(min_length: f64) -> f64 {
    let mut l = 2.0 * PI;
    while l < min_length {
        l *= 2.0;
    }
    l
}

/// Smallest power of two `N >= 8` with `πN/L >= xi`.
pub fn points_for_frequency(length: f64, xi: f64) -> usize {
    let need = (xi * length / PI).ceil().max(8.0) as usize;
    need.next_power_of_two()
}

/// Parameters of the family
/// `u = (α/n) ψ(x/n^δ) + n^{-s-δ/2} φ(x/n^δ) cos(nx − αt)`, `η = (α/n) ψ(x/n^δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxSolutionParams {
    pub alpha: u8,
    pub n: u32,
    pub delta: f64,
    pub s: f64,
}

impl ApproxSolutionParams {
    pub fn new(alpha: u8, n: u32, delta: f64, s: f64) -> Result<Self> {
        if alpha > 1 {
            return Err(Error::config(format!("alpha must be 0 or 1, got {alpha}")));
        }
        if n < 1 {
            return Err(Error::config("n must be at least 1"));
        }
        if !(delta > 0.5 && delta < 1.0) {
            return Err(Error::config(format!("delta must lie in (1/2, 1), got {delta}")));
        }
        if !(s > 1.5 && s.is_finite()) {
            return Err(Error::config(format!("s must exceed 3/2, got {s}")));
        }
        Ok(Self { alpha, n, delta, s })
    }

    pub fn with_alpha(&self, alpha: u8) -> Self {
        Self { alpha, ..*self }
    }

    /// `n^δ`, the dilation of both profiles.
    pub fn dilation(&self) -> f64 {
        (self.n as f64).powf(self.delta)
    }

    /// `n^{-s-δ/2}`, the packet amplitude.
    pub fn amplitude(&self) -> f64 {
        (self.n as f64).powf(-self.s - 0.5 * self.delta)
    }

    /// Default box: the smallest `2π·2^m >= 8 n^δ`.
    pub fn box_length(&self) -> f64 {
        dyadic_box_length(8.0 * self.dilation())
    }

    /// Grid with four points per carrier wavelength (`πN/L >= 2n`).
    pub fn packet_grid(&self) -> Result<PeriodicGrid> {
        let l = self.box_length();
        PeriodicGrid::new(l, points_for_frequency(l, 2.0 * self.n as f64))
    }

    /// Grid on which quadratic products of the packet are alias-free (`πN/L >= 3n`).
    pub fn residual_grid(&self) -> Result<PeriodicGrid> {
        let l = self.box_length();
        PeriodicGrid::new(l, points_for_frequency(l, 3.0 * self.n as f64))
    }

    pub fn check_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        let n = self.n as f64;
        if grid.length() < 8.0 * self.dilation() * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "box length {} is below 8 n^δ = {:.3}",
                grid.length(),
                8.0 * self.dilation()
            )));
        }
        if grid.xi_max() < 2.0 * n * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "grid resolves |ξ| <= {:.3}, packet needs 2n = {}",
                grid.xi_max(),
                2.0 * n
            )));
        }
        Ok(())
    }

    fn check_residual_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        self.check_grid(grid)?;
        if grid.xi_max() < 3.0 * self.n as f64 * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "residuals need |ξ| <= 3n = {} resolved, grid has {:.3}",
                3 * self.n,
                grid.xi_max()
            )));
        }
        Ok(())
    }
}

fn family_fields(p: &ApproxSolutionParams, t: f64, grid: &PeriodicGrid) -> (Field, Field, Field) {
    let (phi, psi) = (packet_envelope(), slow_profile());
    let (d, amp, n, a) = (p.dilation(), p.amplitude(), p.n as f64, p.alpha as f64);
    let at = a * t;
    let u = Field::from_fn(grid, |x| {
        a / n * psi.eval(x / d) + amp * phi.eval(x / d) * (n * x - at).cos()
    });
    let eta = Field::from_fn(grid, |x| a / n * psi.eval(x / d));
    let u_t = Field::from_fn(grid, |x| a * amp * phi.eval(x / d) * (n * x - at).sin());
    (u, eta, u_t)
}

/// Samples the approximate solution `(u^{α,n}, η^{α,n})` at time `t`.
pub fn approx_solution(p: &ApproxSolutionParams, t: f64, grid: &PeriodicGrid) -> Result<(Field, Field)> {
    p.check_grid(grid)?;
    let (u, eta, _) = family_fields(p, t, grid);
    Ok((u, eta))
}

/// Residuals of the approximate solution in both equations:
/// `E = u_t + u u_x − ∂ₓΛ⁻²(η − u)`, `F = η_t + (η u)_x`.
///
/// Time derivatives are closed-form; spatial operators are spectral. The grid
/// must resolve `|ξ| <= 3n` so that quadratic products do not alias.
pub fn approx_residuals(p: &ApproxSolutionParams, t: f64, grid: &PeriodicGrid) -> Result<(Field, Field)> {
    p.check_residual_grid(grid)?;
    let (u, eta, u_t) = family_fields(p, t, grid);
    let e = residual_e(&u, &eta, &u_t)?;
    let f = if p.alpha == 0 {
        Field::zeros(grid)
    } else {
        derivative(&eta.mul(&u)?)
    };
    Ok((e, f))
}

/// `u_t + u u_x − ∂ₓΛ⁻²(η − u)` for given `u, η` and time derivative `u_t`.
pub(crate) fn residual_e(u: &Field, eta: &Field, u_t: &Field) -> Result<Field> {
    let advection = u.mul(&derivative(u))?;
    let forcing = nonlocal_wave_operator(&eta.sub(u)?);
    u_t.add(&advection)?.sub(&forcing)
}

/// Initial data of the actual solutions paired with the approximate family.
pub fn nonuniform_initial_data(p: &ApproxSolutionParams, grid: &PeriodicGrid) -> Result<(Field, Field)> {
    approx_solution(p, 0.0, grid)
}

/// Parameters of the frequency-shell data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InflationDataParams {
    pub epsilon: f64,
    pub shells: u32,
    pub band: [f64; 2],
    /// Width of the Gaussian η-profile `e^{-x²/(2w²)}`.
    pub eta_width: f64,
}

impl InflationDataParams {
    pub fn new(epsilon: f64, shells: u32, band: [f64; 2]) -> Result<Self> {
        let p = Self { epsilon, shells, band, eta_width: 1.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.band;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.shells < 1 {
            return Err(Error::config("at least one shell is required"));
        }
        if !(0.5 < a && a < b && b < 1.0) {
            return Err(Error::config(format!("band [{a}, {b}] must lie inside (1/2, 1)")));
        }
        if 2.0 * a <= b {
            return Err(Error::config(format!("band [{a}, {b}] overlaps its dilate by 2")));
        }
        if !(self.eta_width > 0.0) {
            return Err(Error::config("eta width must be positive"));
        }
        Ok(())
    }

    /// Box length at which every shell holds many grid frequencies.
    pub fn default_box_length() -> f64 {
        2.0 * PI * 512.0
    }

    /// Smallest grid on `length` whose retained band reaches `2^shells · b`.
    pub fn grid(&self, length: f64) -> Result<PeriodicGrid> {
        let top = 2f64.powi(self.shells as i32) * self.band[1];
        PeriodicGrid::new(length, points_for_frequency(length, 1.5 * top))
    }

    /// `(b³ − a³) / (3π)`, the per-shell slope magnitude of the unnormalised data.
    pub fn shell_slope(&self) -> f64 {
        let [a, b] = self.band;
        (b.powi(3) - a.powi(3)) / (3.0 * PI)
    }
}

pub fn harmonic_number(n: u32) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct InflationReport {
    pub epsilon: f64,
    pub shells: u32,
    /// `‖P_{≤N}‖_{H^{3/2}}` on the grid, before normalisation.
    pub raw_h32: f64,
    pub h32_u0: f64,
    pub h12_eta0: f64,
    /// `u₀'(0)` evaluated spectrally.
    pub slope_measured: f64,
    /// `−ε (b³−a³) H_N / (3π ‖P_{≤N}‖_{H^{3/2}})`.
    pub slope_predicted: f64,
    /// Unnormalised `P'_{≤N}(0)` on the grid and its closed form.
    pub raw_slope_measured: f64,
    pub raw_slope_predicted: f64,
    /// Continuum estimate of the `H^{3/2}` norm carried by shells beyond `N`.
    pub h32_tail_estimate: f64,
    /// Grid frequencies in each shell, `j = 1..=N`.
    pub shell_counts: Vec<usize>,
}

/// Frequency-shell data `u₀ = ε P_{≤N} / ‖P_{≤N}‖_{H^{3/2}}`, where
/// `P_{≤N}` has Fourier transform `iξ / (j 2^{3j})` on `|ξ| ∈ 2^j [a, b]`,
/// `j = 1..=N`, and zero elsewhere; `η₀` is a Gaussian scaled to
/// `‖η₀‖_{H^{1/2}} = ε`.
pub fn inflation_data(p: &InflationDataParams, grid: &PeriodicGrid) -> Result<(Field, Field, InflationReport)> {
    p.validate()?;
    let [a, b] = p.band;
    let shells = p.shells as i32;
    let top = 2f64.powi(shells) * b;
    if top > grid.retained_cutoff() {
        return Err(Error::config(format!(
            "outermost shell reaches |ξ| = {top:.3}, retained band ends at {:.3}",
            grid.retained_cutoff()
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    let mut counts = vec![0usize; p.shells as usize];
    for (i, &xi) in grid.wavenumbers().iter().enumerate() {
        let r = xi.abs();
        if r == 0.0 {
            continue;
        }
        let j = (r / a).log2().floor() as i32;
        if j < 1 || j > shells {
            continue;
        }
        let scale = 2f64.powi(j);
        if r >= a * scale && r <= b * scale {
            coeffs[i] = Complex64::new(0.0, xi / (j as f64 * 2f64.powi(3 * j)));
            if xi > 0.0 {
                counts[(j - 1) as usize] += 1;
            }
        }
    }
    let sparse: Vec<u32> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c < 4)
        .map(|(j, _)| j as u32 + 1)
        .collect();
    if !sparse.is_empty() {
        return Err(Error::config(format!(
            "shells {sparse:?} hold fewer than 4 grid frequencies; enlarge the box"
        )));
    }
    let raw_h32 = sobolev_norm_of(grid, &coeffs, 1.5);
    let raw_slope_measured = slope_at_origin(grid, &coeffs);
    let scale = p.epsilon / raw_h32;
    let scaled: Vec<Complex64> = coeffs.iter().map(|c| c * scale).collect();
    let u0 = Field::from_coefficients(grid, scaled);

    let w = p.eta_width;
    let profile = Field::from_fn(grid, |x| (-x * x / (2.0 * w * w)).exp());
    let eta0 = profile.scale(p.epsilon / sobolev_norm(&profile, 0.5));

    let h_n = harmonic_number(p.shells);
    let raw_slope_predicted = -p.shell_slope() * h_n;
    let [a6, b6] = [a.powi(6), b.powi(6)];
    let tail_sum = PI * PI / 6.0 - (1..=p.shells).map(|j| 1.0 / (j as f64).powi(2)).sum::<f64>();
    let report = InflationReport {
        epsilon: p.epsilon,
        shells: p.shells,
        raw_h32,
        h32_u0: sobolev_norm(&u0, 1.5),
        h12_eta0: sobolev_norm(&eta0, 0.5),
        slope_measured: slope_at_origin(grid, u0.coefficients()),
        slope_predicted: p.epsilon * raw_slope_predicted / raw_h32,
        raw_slope_measured,
        raw_slope_predicted,
        h32_tail_estimate: ((b6 - a6) / (6.0 * PI) * tail_sum).sqrt(),
        shell_counts: counts,
    };
    Ok((u0, eta0, report))
}

/// `f'(0) = (1/L) Σ_k Re(iξ_k F_k)`.
fn slope_at_origin(grid: &PeriodicGrid, coeffs: &[Complex64]) -> f64 {
    let s: f64 = grid
        .wavenumbers()
        .iter()
        .zip(coeffs)
        .map(|(&xi, c)| -xi * c.im)
        .sum();
    s / grid.length()
}

/// Wave-breaking admissibility of initial data at a point `x₀`.
#[derive(Clone, Debug, Serialize)]
pub struct BreakingCertificate {
    pub x0: f64,
    pub slope: f64,
    pub l2_u0: f64,
    pub linf_u0: f64,
    pub l1_eta0: f64,
    pub eta0_min: f64,
    pub admissible: bool,
    /// `−2 / u₀'(x₀)`; infinite when the slope is not negative.
    pub t_bound: f64,
}

impl BreakingCertificate {
    pub fn evaluate(u0: &Field, eta0: &Field, x0: f64) -> Self {
        let slope = fourier_interpolate(&derivative(u0), x0);
        let l2_u0 = lebesgue_norm(u0, 2.0);
        let linf_u0 = lebesgue_norm(u0, f64::INFINITY);
        let l1_eta0 = lebesgue_norm(eta0, 1.0);
        let eta0_min = eta0.min();
        let mut cert = Self {
            x0,
            slope,
            l2_u0,
            linf_u0,
            l1_eta0,
            eta0_min,
            admissible: false,
            t_bound: if slope < 0.0 { -2.0 / slope } else { f64::INFINITY },
        };
        cert.admissible = cert.failed_clauses().is_empty();
        cert
    }

    /// Human-readable list of the admissibility conditions that fail.
    pub fn failed_clauses(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.slope < -2.0) {
            out.push(format!("u0'(x0) = {:.6} is not below -2", self.slope));
        }
        let budget = 4.0 * (self.l2_u0 + self.linf_u0 + self.l1_eta0);
        if !(self.slope * self.slope > budget) {
            out.push(format!(
                "u0'(x0)^2 = {:.6} does not exceed 4(|u0|_L2 + |u0|_Linf + |eta0|_L1) = {:.6}",
                self.slope * self.slope,
                budget
            ));
        }
        if self.eta0_min < 0.0 {
            out.push(format!("eta0 takes the negative value {:.3e}", self.eta0_min));
        }
        out
    }
}

/// `u₀ = −a x e^{−x²/2}`, `η₀ = A e^{−x²/(2w²)}`, certified at `x₀ = 0`.
pub fn breaking_data(
    a_slope: f64,
    eta_amp: f64,
    eta_width: f64,
    grid: &PeriodicGrid,
) -> Result<(Field, Field, BreakingCertificate)> {
    if !(a_slope > 0.0) || !(eta_amp >= 0.0) || !(eta_width > 0.0) {
        return Err(Error::config(format!(
            "breaking data needs a > 0, amplitude >= 0, width > 0; got ({a_slope}, {eta_amp}, {eta_width})"
        )));
    }
    let u0 = Field::from_fn(grid, |x| -a_slope * x * (-0.5 * x * x).exp());
    let eta0 = Field::from_fn(grid, |x| eta_amp * (-x * x / (2.0 * eta_width * eta_width)).exp());
    let cert = BreakingCertificate::evaluate(&u0, &eta0, 0.0);
    Ok((u0, eta0, cert))
}

/// Box and grid used for the breaking data by default.
pub fn breaking_grid(points: usize) -> Result<PeriodicGrid> {
    PeriodicGrid::new(2.0 * PI * 8.0, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dealias;

    #[test]
    fn smooth_step_values() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((smooth_step(x) + smooth_step(1.0 - x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bump_examples() {
        let phi = bump(1.0, 2.0).unwrap();
        assert_eq!(phi.eval(0.0), 1.0);
        assert_eq!(phi.eval(2.5), 0.0);
        assert_eq!(phi.eval(-2.0), 0.0);
        let psi = bump(2.0, 3.0).unwrap();
        let v = psi.eval(2.5);
        assert!(v > 0.0 && v < 1.0);
        let mut prev = 1.0;
        for i in 0..=200 {
            let x = 2.0 + i as f64 / 200.0;
            let y = psi.eval(x);
            assert!(y <= prev && (0.0..=1.0).contains(&y));
            prev = y;
        }
        assert!(bump(2.0, 2.0).is_err());
        assert!(bump(0.0, 1.0).is_err());
    }

    #[test]
    fn bump_derivative_matches_finite_differences() {
        let psi = slow_profile();
        let mut errs = Vec::new();
        for &n in &[256usize, 512] {
            let g = PeriodicGrid::new(12.0, n).unwrap();
            let f = psi.on_grid(&g);
            let d = derivative(&f);
            let h = g.spacing();
            let fd = |x: f64| (psi.eval(x + h) - psi.eval(x - h)) / (2.0 * h);
            let err = (0..n).map(|i| (d.samples()[i] - fd(g.x(i))).abs()).fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
    }

    #[test]
    fn approx_solution_alpha_zero() {
        let p = ApproxSolutionParams::new(0, 16, 0.75, 2.0).unwrap();
        let g = p.packet_grid().unwrap();
        let (u, eta) = approx_solution(&p, 0.0, &g).unwrap();
        assert_eq!(eta.max_abs(), 0.0);
        let (d, amp) = (p.dilation(), p.amplitude());
        for i in 0..g.points() {
            let x = g.x(i);
            let expected = amp * packet_envelope().eval(x / d) * (16.0 * x).cos();
            assert!((u.samples()[i] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn approx_solution_vanishes_outside_supports() {
        let p = ApproxSolutionParams::new(1, 32, 0.75, 2.0).unwrap();
        let g = p.packet_grid().unwrap();
        let (u, eta) = approx_solution(&p, 0.3, &g).unwrap();
        let r = 3.0 * p.dilation();
        for i in 0..g.points() {
            if g.x(i).abs() >= r {
                assert_eq!(u.samples()[i], 0.0);
                assert_eq!(eta.samples()[i], 0.0);
            }
        }
    }

    #[test]
    fn dilation_bound_for_eta() {
        let big = PeriodicGrid::new(2.0 * PI * 64.0, 1 << 14).unwrap();
        let psi_norm = sobolev_norm(&slow_profile().on_grid(&big), 1.0);
        for &n in &[4u32, 16, 64, 256] {
            let p = ApproxSolutionParams::new(1, n, 0.75, 2.0).unwrap();
            let (_, eta) = approx_solution(&p, 0.0, &p.packet_grid().unwrap()).unwrap();
            let bound = (n as f64).powf(-1.0 + 0.375) * psi_norm;
            assert!(sobolev_norm(&eta, 1.0) <= bound * (1.0 + 1e-9), "n = {n}");
        }
    }

    #[test]
    fn resolution_is_checked() {
        let p = ApproxSolutionParams::new(1, 64, 0.75, 2.0).unwrap();
        let coarse = PeriodicGrid::new(p.box_length(), 256).unwrap();
        assert!(matches!(approx_solution(&p, 0.0, &coarse), Err(Error::Config(_))));
        let small = PeriodicGrid::new(10.0, 4096).unwrap();
        assert!(matches!(approx_solution(&p, 0.0, &small), Err(Error::Config(_))));
        let g = p.packet_grid().unwrap();
        assert!(approx_solution(&p, 0.0, &g).is_ok());
        assert!(matches!(approx_residuals(&p, 0.0, &g), Err(Error::Config(_))));
        assert!(ApproxSolutionParams::new(1, 4, 0.5, 2.0).is_err());
        assert!(ApproxSolutionParams::new(1, 4, 0.75, 1.5).is_err());
        assert!(ApproxSolutionParams::new(2, 4, 0.75, 2.0).is_err());
    }

    #[test]
    fn residual_f_vanishes_without_slow_component() {
        let p = ApproxSolutionParams::new(0, 32, 0.75, 2.0).unwrap();
        let (_, f) = approx_residuals(&p, 0.5, &p.residual_grid().unwrap()).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn residual_e_matches_time_differences() {
        let p = ApproxSolutionParams::new(1, 16, 0.75, 2.0).unwrap();
        let g = p.residual_grid().unwrap();
        let t = 0.4;
        let (e, _) = approx_residuals(&p, t, &g).unwrap();
        let fd_error = |dt: f64| {
            let (up, _) = approx_solution(&p, t + dt, &g).unwrap();
            let (um, _) = approx_solution(&p, t - dt, &g).unwrap();
            let (u, eta) = approx_solution(&p, t, &g).unwrap();
            let u_t = up.sub(&um).unwrap().scale(0.5 / dt);
            let e_fd = residual_e(&u, &eta, &u_t).unwrap();
            lebesgue_norm(&e.sub(&e_fd).unwrap(), 2.0)
        };
        let (a, b) = (fd_error(0.02), fd_error(0.01));
        let order = (a / b).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn pair_distance_at_time_zero() {
        let p = ApproxSolutionParams::new(1, 128, 0.75, 2.0).unwrap();
        let g = p.packet_grid().unwrap();
        let (u1, _) = nonuniform_initial_data(&p, &g).unwrap();
        let (u0, _) = nonuniform_initial_data(&p.with_alpha(0), &g).unwrap();
        let dist = sobolev_norm(&u1.sub(&u0).unwrap(), 2.0);
        let big = PeriodicGrid::new(2.0 * PI * 64.0, 1 << 14).unwrap();
        let psi_h2 = sobolev_norm(&slow_profile().on_grid(&big), 2.0);
        let rate = 128f64.powf(-0.625);
        assert!((rate - 0.0482).abs() < 1e-4);
        assert!(dist <= rate * psi_h2);
    }

    fn small_inflation() -> (InflationDataParams, PeriodicGrid) {
        let p = InflationDataParams::new(0.1, 4, [0.55, 0.65]).unwrap();
        let g = p.grid(InflationDataParams::default_box_length()).unwrap();
        (p, g)
    }

    #[test]
    fn inflation_band_checks() {
        assert!(InflationDataParams::new(0.1, 4, [0.55, 0.65]).is_ok());
        assert!(InflationDataParams::new(0.1, 4, [0.45, 0.65]).is_err());
        assert!(InflationDataParams::new(0.1, 4, [0.7, 0.6]).is_err());
        assert!(InflationDataParams::new(0.0, 4, [0.55, 0.65]).is_err());
    }

    #[test]
    fn inflation_normalisation_and_support() {
        let (p, g) = small_inflation();
        let (u0, eta0, rep) = inflation_data(&p, &g).unwrap();
        assert!((rep.h32_u0 - 0.1).abs() < 1e-10 * 0.1);
        assert!((rep.h12_eta0 - 0.1).abs() < 1e-10 * 0.1);
        assert!(eta0.min() >= 0.0);
        for (i, c) in u0.coefficients().iter().enumerate() {
            let r = g.wavenumbers()[i].abs();
            let inside = (1..=4).any(|j| {
                let s = 2f64.powi(j);
                r >= 0.55 * s && r <= 0.65 * s
            });
            if !inside {
                assert!(c.norm() <= 1e-14, "ξ = {r}");
            }
        }
    }

    #[test]
    fn inflation_slope_against_quadrature_oracle() {
        // independent quadrature of (1/2π) ∫ −ξ²/(j 2^{3j}) over the shells
        let (a, b) = (0.55f64, 0.65f64);
        let mut integral = 0.0;
        let m = 20000;
        for j in 1..=8 {
            let s = 2f64.powi(j);
            let (lo, hi) = (a * s, b * s);
            let dx = (hi - lo) / m as f64;
            let mut acc = 0.0;
            for k in 0..m {
                let x = lo + (k as f64 + 0.5) * dx;
                acc += x * x * dx;
            }
            integral += 2.0 * acc / (j as f64 * s.powi(3));
        }
        let oracle = -integral / (2.0 * PI);
        let p = InflationDataParams::new(1.0, 8, [a, b]).unwrap();
        assert!((p.shell_slope() * harmonic_number(8) + oracle).abs() < 1e-9);
        assert!((oracle + 0.031217).abs() < 1e-5, "{oracle}");
        let g = p.grid(InflationDataParams::default_box_length()).unwrap();
        let (_, _, rep) = inflation_data(&p, &g).unwrap();
        assert!((rep.raw_slope_measured / oracle - 1.0).abs() < 0.01);
        assert!((rep.slope_measured / rep.slope_predicted - 1.0).abs() < 0.01);
    }

    #[test]
    fn inflation_rejects_sparse_shells() {
        let p = InflationDataParams::new(0.1, 3, [0.55, 0.65]).unwrap();
        let g = PeriodicGrid::new(2.0 * PI * 4.0, 256).unwrap();
        assert!(matches!(inflation_data(&p, &g), Err(Error::Config(_))));
    }

    #[test]
    fn breaking_certificate_examples() {
        let g = breaking_grid(4096).unwrap();
        let (u0, eta0, cert) = breaking_data(8.0, 0.1, 1.0, &g).unwrap();
        let l2 = 8.0 * (PI.sqrt() / 2.0).sqrt();
        let linf = 8.0 * (-0.5f64).exp();
        let l1 = 0.1 * (2.0 * PI).sqrt();
        assert!((cert.l2_u0 - l2).abs() < 1e-9);
        assert!((cert.linf_u0 - linf).abs() < 1e-3);
        assert!((cert.l1_eta0 - l1).abs() < 1e-12);
        assert!((cert.slope + 8.0).abs() < 1e-9);
        assert!(cert.admissible);
        assert!((cert.t_bound - 0.25).abs() < 1e-9);
        assert!(u0.boundary_ratio() < 1e-10 && eta0.boundary_ratio() < 1e-10);

        let (_, _, weak) = breaking_data(1.0, 0.1, 1.0, &g).unwrap();
        assert!(!weak.admissible);
        assert!(weak.failed_clauses()[0].contains("not below -2"));

        let (_, eta_zero, flat) = breaking_data(8.0, 0.0, 1.0, &g).unwrap();
        assert_eq!(eta_zero.max_abs(), 0.0);
        assert!(flat.admissible);
    }

    #[test]
    fn breaking_data_is_well_resolved() {
        let g = breaking_grid(2048).unwrap();
        let (u0, _, _) = breaking_data(8.0, 0.1, 1.0, &g).unwrap();
        assert!(dealias(&u0).sub(&u0).unwrap().max_abs() < 1e-12);
    }
}
