//! Lebesgue, Sobolev and Besov norms on periodic fields, the smooth dyadic
//! partition of unity behind the Besov norms, and log-log slope fitting.

use num_complex::Complex64;

use crate::constructions::smooth_step;
use crate::error::{Error, Result};
use crate::spectral::{Field, PeriodicGrid};

/// Discrete `L^p` norm by the rectangle rule; `p = ∞` is the sample maximum.
///
/// Panics if `p < 1`.
pub fn lebesgue_norm(f: &Field, p: f64) -> f64 {
    lebesgue_norm_of(f.samples(), f.grid().spacing(), p)
}

pub(crate) fn lebesgue_norm_of(samples: &[f64], h: f64, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
    if p.is_infinite() {
        samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        h * samples.iter().map(|v| v.abs()).sum::<f64>()
    } else if p == 2.0 {
        (h * samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    } else {
        (h * samples.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

/// `‖f‖_{H^s} = ((1/L) Σ_k (1+ξ_k²)^s |F_k|²)^{1/2}`.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    sobolev_norm_of(f.grid(), f.coefficients(), s)
}

pub(crate) fn sobolev_norm_of(grid: &PeriodicGrid, coeffs: &[Complex64], s: f64) -> f64 {
    let sum: f64 = grid
        .wavenumbers()
        .iter()
        .zip(coeffs)
        .map(|(&xi, c)| weight(xi, s) * c.norm_sqr())
        .sum();
    (sum / grid.length()).sqrt()
}

/// `(1+ξ²)^s` with the common integer cases kept exact.
fn weight(xi: f64, s: f64) -> f64 {
    let b = 1.0 + xi * xi;
    if s == 0.0 {
        1.0
    } else if s == 1.0 {
        b
    } else if s == 2.0 {
        b * b
    } else if s == -1.0 {
        1.0 / b
    } else {
        b.powf(s)
    }
}

/// Low-frequency cutoff: 1 on `|ξ| <= 1`, 0 on `|ξ| >= 4/3`, smooth and
/// monotone in between.
pub fn chi(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 4.0 / 3.0 {
        0.0
    } else {
        smooth_step(3.0 * (4.0 / 3.0 - a))
    }
}

/// Dyadic ring function `φ(ξ) = χ(ξ/2) − χ(ξ)`, supported in `3/4 <= |ξ| <= 8/3`.
pub fn phi(xi: f64) -> f64 {
    chi(0.5 * xi) - chi(xi)
}

/// The partition `χ(ξ) + Σ_{j=0}^{j_max} φ(2^{-j}ξ)` tabulated on a grid.
///
/// Each block is stored sparsely as `(fft index, weight)` pairs; block 0 is
/// `χ` (dyadic index −1). `j_max` is the smallest index whose telescoped sum
/// `χ(2^{-j_max-1}ξ)` equals 1 on every grid frequency, so the partition is
/// exact on the whole spectrum.
#[derive(Clone, Debug)]
pub struct LpPartition {
    grid: PeriodicGrid,
    j_max: i32,
    blocks: Vec<Vec<(usize, f64)>>,
}

impl LpPartition {
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        -1
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Dyadic indices `-1..=j_max`.
    pub fn indices(&self) -> impl Iterator<Item = i32> {
        -1..=self.j_max
    }

    /// Nonzero weights of block `j` as `(fft index, weight)`.
    pub fn block(&self, j: i32) -> &[(usize, f64)] {
        &self.blocks[(j + 1) as usize]
    }

    /// Weight of block `j` at FFT index `i`.
    pub fn weight(&self, j: i32, i: usize) -> f64 {
        let xi = self.grid.wavenumbers()[i];
        if j < 0 {
            chi(xi)
        } else {
            phi(xi / 2f64.powi(j))
        }
    }

    /// Sum of all block weights at FFT index `i`.
    pub fn total_weight(&self, i: usize) -> f64 {
        self.indices().map(|j| self.weight(j, i)).sum()
    }

    /// Largest deviation of the partition sum from 1 over the retained band.
    pub fn unity_error(&self) -> f64 {
        let mut sums = vec![0.0; self.grid.points()];
        for b in &self.blocks {
            for &(i, w) in b {
                sums[i] += w;
            }
        }
        (0..self.grid.points())
            .filter(|&i| self.grid.is_retained(i))
            .map(|i| (sums[i] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `‖Δ_j f‖_{L²}` for every block, from the spectrum alone.
    pub(crate) fn block_l2_norms(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let inv_l = 1.0 / self.grid.length();
        self.blocks
            .iter()
            .map(|b| {
                let e: f64 = b.iter().map(|&(i, w)| w * w * coeffs[i].norm_sqr()).sum();
                (e * inv_l).sqrt()
            })
            .collect()
    }

    pub(crate) fn block_coefficients(&self, j: i32, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len()];
        for &(i, w) in self.block(j) {
            out[i] = coeffs[i] * w;
        }
        out
    }

    /// `‖Δ_j f‖_{L^p}` for every block.
    pub(crate) fn block_norms(&self, coeffs: &[Complex64], p: f64) -> Vec<f64> {
        if p == 2.0 {
            return self.block_l2_norms(coeffs);
        }
        let h = self.grid.spacing();
        self.indices()
            .map(|j| {
                if self.block(j).iter().all(|&(i, _)| coeffs[i].norm_sqr() == 0.0) {
                    return 0.0;
                }
                let samples = self.grid.inverse_real(&self.block_coefficients(j, coeffs));
                lebesgue_norm_of(&samples, h, p)
            })
            .collect()
    }
}

/// Tabulates the dyadic partition on `grid`.
///
/// The grid must resolve the first ring, i.e. `ξ_max >= 4`.
pub fn build_lp_partition(grid: &PeriodicGrid) -> Result<LpPartition> {
    let xi_max = grid.xi_max();
    if xi_max < 4.0 {
        return Err(Error::config(format!(
            "Littlewood-Paley partition needs ξ_max >= 4, grid has {xi_max:.3}"
        )));
    }
    // smallest J with 2^{J+1} >= ξ_max
    let mut j_max = 0;
    while 2f64.powi(j_max + 1) < xi_max {
        j_max += 1;
    }
    let mut blocks: Vec<Vec<(usize, f64)>> = vec![Vec::new(); (j_max + 2) as usize];
    for (i, &xi) in grid.wavenumbers().iter().enumerate() {
        let c = chi(xi);
        if c != 0.0 {
            blocks[0].push((i, c));
        }
        let a = xi.abs();
        if a < 0.75 {
            continue;
        }
        // φ(2^{-j}ξ) ≠ 0 only for 2^j ∈ (3|ξ|/8, 4|ξ|/3)
        let lo = ((3.0 * a / 8.0).log2().floor() as i32).max(0);
        let hi = ((4.0 * a / 3.0).log2().ceil() as i32).min(j_max);
        for j in lo..=hi {
            let w = phi(a / 2f64.powi(j));
            if w != 0.0 {
                blocks[(j + 1) as usize].push((i, w));
            }
        }
    }
    Ok(LpPartition { grid: grid.clone(), j_max, blocks })
}

/// The blocks `Δ_j f` for `j = -1..=j_max`.
#[derive(Clone, Debug)]
pub struct LpDecomposition {
    pub blocks: Vec<Field>,
}

impl LpDecomposition {
    /// Block `Δ_j f`.
    pub fn block(&self, j: i32) -> &Field {
        &self.blocks[(j + 1) as usize]
    }

    /// `Σ_j Δ_j f`.
    pub fn reconstruct(&self) -> Result<Field> {
        let mut acc = Field::zeros(self.blocks[0].grid());
        for b in &self.blocks {
            acc = acc.add(b)?;
        }
        Ok(acc)
    }
}

pub fn lp_blocks(f: &Field, partition: &LpPartition) -> Result<LpDecomposition> {
    if !f.grid().same_as(partition.grid()) {
        return Err(Error::GridMismatch);
    }
    let coeffs = f.coefficients();
    let blocks = partition
        .indices()
        .map(|j| Field::from_coefficients(f.grid(), partition.block_coefficients(j, coeffs)))
        .collect();
    Ok(LpDecomposition { blocks })
}

/// `‖(2^{js} ‖Δ_j f‖_{L^p})_j‖_{ℓ^r}` with the `j = -1` block weighted `2^{-s}`.
pub fn besov_norm(f: &Field, s: f64, p: f64, r: f64) -> Result<f64> {
    let partition = build_lp_partition(f.grid())?;
    besov_norm_with(f, &partition, s, p, r)
}

/// [`besov_norm`] with a prebuilt partition.
pub fn besov_norm_with(f: &Field, partition: &LpPartition, s: f64, p: f64, r: f64) -> Result<f64> {
    if !f.grid().same_as(partition.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(besov_from_coefficients(partition, f.coefficients(), s, p, r))
}

pub(crate) fn besov_from_coefficients(
    partition: &LpPartition,
    coeffs: &[Complex64],
    s: f64,
    p: f64,
    r: f64,
) -> f64 {
    assert!(p >= 1.0 && r >= 1.0, "Besov norm needs p, r >= 1");
    let norms = partition.block_norms(coeffs, p);
    let weighted = partition
        .indices()
        .zip(norms)
        .map(|(j, n)| 2f64.powf(j as f64 * s) * n);
    if r.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        weighted.map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// A norm selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormSpec {
    Lebesgue { p: f64 },
    Sobolev { s: f64 },
    Besov { s: f64, p: f64, r: f64 },
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NormSpec::Lebesgue { p } => p >= 1.0,
            NormSpec::Sobolev { s } => s.is_finite(),
            NormSpec::Besov { s, p, r } => s.is_finite() && p >= 1.0 && r >= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid norm parameters {self:?}")))
        }
    }

    pub fn evaluate(&self, f: &Field) -> Result<f64> {
        self.validate()?;
        match *self {
            NormSpec::Lebesgue { p } => Ok(lebesgue_norm(f, p)),
            NormSpec::Sobolev { s } => Ok(sobolev_norm(f, s)),
            NormSpec::Besov { s, p, r } => besov_norm(f, s, p, r),
        }
    }
}

/// Both sides of `‖f‖_{H^s} <= ‖f‖_{H^{s1}}^θ ‖f‖_{H^{s2}}^{1-θ}`, `θ = (s2-s)/(s2-s1)`.
pub fn interpolation_check(f: &Field, s1: f64, s: f64, s2: f64) -> Result<(f64, f64)> {
    if !(s1 < s && s < s2) {
        return Err(Error::Precondition(format!(
            "interpolation needs s1 < s < s2, got ({s1}, {s}, {s2})"
        )));
    }
    let theta = (s2 - s) / (s2 - s1);
    let lhs = sobolev_norm(f, s);
    let rhs = sobolev_norm(f, s1).powf(theta) * sobolev_norm(f, s2).powf(1.0 - theta);
    Ok((lhs, rhs))
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log residuals.
    pub residual: f64,
}

pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.len() < 3 {
        return Err(Error::Precondition(format!(
            "power-law fit needs at least 3 points, got {}",
            pairs.len()
        )));
    }
    if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::Precondition(format!(
            "power-law fit needs positive finite data, got ({x}, {y})"
        )));
    }
    let n = pairs.len() as f64;
    let logs: Vec<(f64, f64)> = pairs.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("power-law fit needs distinct abscissae".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit { slope, intercept, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(2.0 * PI, n).unwrap()
    }

    fn field_from(g: &PeriodicGrid, v: Vec<f64>) -> Field {
        Field::new(g, v).unwrap()
    }

    #[test]
    fn lebesgue_examples() {
        let g = grid(64);
        assert_eq!(lebesgue_norm(&Field::zeros(&g), 2.0), 0.0);
        assert!((lebesgue_norm(&Field::constant(&g, 2.0), 1.0) - 4.0 * PI).abs() < 1e-12);
        for k in 1..10 {
            let f = Field::from_fn(&g, |x| (k as f64 * x).cos());
            assert!((lebesgue_norm(&f, 2.0) - PI.sqrt()).abs() < 1e-12);
            assert!((lebesgue_norm(&f, f64::INFINITY) - 1.0).abs() < 1e-12);
        }
        let f = Field::from_fn(&g, |x| x.sin());
        // ∫|sin|³ over a period is 8/3
        assert!((lebesgue_norm(&f, 3.0) - (8.0f64 / 3.0).cbrt()).abs() < 1e-6);
    }

    #[test]
    fn sobolev_examples() {
        let g = grid(32);
        assert_eq!(sobolev_norm(&Field::zeros(&g), 1.5), 0.0);
        let f = Field::from_fn(&g, |x| (3.0 * x).cos());
        assert!((sobolev_norm(&f, 1.0) - (10.0 * PI).sqrt()).abs() < 1e-12);
        assert!((sobolev_norm(&f, 1.0) - 5.6050).abs() < 1e-4);
    }

    #[test]
    fn chi_phi_plateaus_and_supports() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(-1.0), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert!(chi(1.2) > 0.0 && chi(1.2) < 1.0);
        assert_eq!(phi(1.5), 1.0);
        assert_eq!(phi(0.74), 0.0);
        assert_eq!(phi(2.7), 0.0);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = chi(1.0 + i as f64 / 300.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn partition_is_exact_and_blocks_nearly_orthogonal() {
        for &(l, n) in &[(2.0 * PI, 64usize), (40.0, 1024), (2.0 * PI * 64.0, 4096)] {
            let g = PeriodicGrid::new(l, n).unwrap();
            let p = build_lp_partition(&g).unwrap();
            assert!(p.unity_error() <= 1e-12);
            for i in 0..n {
                assert!((p.total_weight(i) - 1.0).abs() <= 1e-12);
                for j in p.indices() {
                    for jp in p.indices() {
                        if (j - jp).abs() >= 2 {
                            assert_eq!(p.weight(j, i) * p.weight(jp, i), 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn partition_rejects_tiny_band() {
        let g = PeriodicGrid::new(4.0 * PI, 8).unwrap();
        assert!(matches!(build_lp_partition(&g), Err(Error::Config(_))));
    }

    #[test]
    fn single_block_cosine() {
        let g = grid(256);
        let p = build_lp_partition(&g).unwrap();
        for j in 1..6 {
            let k = 3.0 * 2f64.powi(j - 1);
            let f = Field::from_fn(&g, |x| (k * x).cos());
            let d = lp_blocks(&f, &p).unwrap();
            for jj in p.indices() {
                let b = d.block(jj);
                if jj == j {
                    assert!(b.sub(&f).unwrap().max_abs() < 1e-12);
                } else {
                    assert!(b.max_abs() < 1e-12);
                }
            }
            let s = 1.5;
            let expected = 2f64.powf(j as f64 * s) * PI.sqrt();
            let b = besov_norm_with(&f, &p, s, 2.0, f64::INFINITY).unwrap();
            assert!((b - expected).abs() < 1e-10 * expected);
        }
        let c = lp_blocks(&Field::constant(&g, 2.0), &p).unwrap();
        assert!(c.block(-1).max_abs() > 1.0);
        for j in 0..=p.j_max() {
            assert!(c.block(j).max_abs() < 1e-14);
        }
    }

    #[test]
    fn besov_infinity_norm_of_blocks() {
        let g = grid(256);
        let p = build_lp_partition(&g).unwrap();
        let f = Field::from_fn(&g, |x| (6.0 * x).cos());
        let b = besov_norm_with(&f, &p, 0.0, f64::INFINITY, f64::INFINITY).unwrap();
        assert!((b - 1.0).abs() < 1e-12);
        assert_eq!(besov_norm(&Field::zeros(&g), 1.0, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn interpolation_single_mode_equality() {
        let g = grid(64);
        let f = Field::from_fn(&g, |x| (7.0 * x).cos());
        let (l, r) = interpolation_check(&f, 0.0, 1.0, 2.0).unwrap();
        assert!((l - r).abs() < 1e-12 * l);
        assert_eq!(interpolation_check(&Field::zeros(&g), 0.0, 1.0, 2.0).unwrap(), (0.0, 0.0));
        assert!(matches!(interpolation_check(&f, 1.0, 1.0, 2.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn fit_examples() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, (i * i) as f64)).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 5.0 * (i as f64).powf(-1.5))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.intercept - 5f64.ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert!(fit_power_law(&pts[..2]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sobolev_zero_is_l2(v in prop::collection::vec(-5.0f64..5.0, 64)) {
            let f = field_from(&grid(64), v);
            let a = sobolev_norm(&f, 0.0);
            let b = lebesgue_norm(&f, 2.0);
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }

        #[test]
        fn sobolev_monotone_in_s(v in prop::collection::vec(-5.0f64..5.0, 64), s in -2.0f64..2.0, ds in 0.0f64..2.0) {
            let f = field_from(&grid(64), v);
            prop_assert!(sobolev_norm(&f, s) <= sobolev_norm(&f, s + ds) * (1.0 + 1e-14));
        }

        #[test]
        fn interpolation_inequality(v in prop::collection::vec(-5.0f64..5.0, 64), s1 in -1.0f64..1.0, a in 0.01f64..1.0, b in 0.01f64..1.0) {
            let f = field_from(&grid(64), v);
            let (l, r) = interpolation_check(&f, s1, s1 + a, s1 + a + b).unwrap();
            prop_assert!(l <= r * (1.0 + 1e-10));
        }

        #[test]
        fn lp_reconstruction(v in prop::collection::vec(-5.0f64..5.0, 128)) {
            let g = PeriodicGrid::new(20.0, 128).unwrap();
            let p = build_lp_partition(&g).unwrap();
            let f = field_from(&g, v);
            let back = lp_blocks(&f, &p).unwrap().reconstruct().unwrap();
            let err = back.sub(&f).unwrap().max_abs();
            prop_assert!(err <= 1e-10 * f.max_abs());
        }

        #[test]
        fn besov_sobolev_equivalence(v in prop::collection::vec(-5.0f64..5.0, 128), s in 0.0f64..2.0) {
            let g = grid(128);
            let p = build_lp_partition(&g).unwrap();
            let f = field_from(&g, v);
            let ratio = besov_norm_with(&f, &p, s, 2.0, 2.0).unwrap() / sobolev_norm(&f, s);
            prop_assert!((0.125..=8.0).contains(&ratio), "ratio {}", ratio);
        }

        #[test]
        fn fit_tolerates_small_noise(noise in prop::collection::vec(-0.01f64..0.01, 8)) {
            let pts: Vec<(f64, f64)> = noise.iter().enumerate()
                .map(|(i, e)| { let x = 2f64.powi(i as i32 + 1); (x, x * x * (1.0 + e)) })
                .collect();
            let fit = fit_power_law(&pts).unwrap();
            prop_assert!((1.95..=2.05).contains(&fit.slope));
        }
    }
}
