//! Experiment configuration: the TOML schema, per-experiment defaults, and
//! the fully resolved form that is echoed next to every result.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    VerifyNorms,
    Residuals,
    Nonuniform,
    Holder,
    Blowup,
    Inflation,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::VerifyNorms,
        ExperimentId::Residuals,
        ExperimentId::Nonuniform,
        ExperimentId::Holder,
        ExperimentId::Blowup,
        ExperimentId::Inflation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::VerifyNorms => "verify-norms",
            ExperimentId::Residuals => "residuals",
            ExperimentId::Nonuniform => "nonuniform",
            ExperimentId::Holder => "holder",
            ExperimentId::Blowup => "blowup",
            ExperimentId::Inflation => "inflation",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown experiment '{s}'")))
    }
}

/// A scalar or a list in the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shells: Option<OneOrMany<u32>>,
    #[serde(rename = "C_band", skip_serializing_if = "Option::is_none")]
    pub c_band: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaltSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ux_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_frac: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dealias: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halt: Option<HaltSection>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

/// The config file as written by users; every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub box_l: Option<f64>,
    pub quick: bool,
    pub seed: Option<u64>,
}

/// Fully resolved parameters of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub seed: u64,
    pub grid_length: Option<f64>,
    pub grid_points: Option<usize>,
    pub s: f64,
    pub delta: f64,
    pub n_list: Vec<u32>,
    pub r: Vec<f64>,
    pub epsilon_list: Vec<f64>,
    pub shells: Vec<u32>,
    pub band: [f64; 2],
    pub cfl: f64,
    /// `None` lets the experiment choose (the blow-up run stops at its certified bound).
    pub t_final: Option<f64>,
    pub dealias: bool,
    pub ux_factor: f64,
    pub tail_frac: f64,
    pub out_dir: PathBuf,
    pub stride: usize,
}

impl ExperimentConfig {
    /// Built-in parameters; `quick` shrinks lists and grids for CI.
    pub fn defaults(id: ExperimentId, quick: bool) -> Self {
        let mut c = ExperimentConfig {
            id,
            seed: 0,
            grid_length: None,
            grid_points: None,
            s: 2.0,
            delta: 0.75,
            n_list: Vec::new(),
            r: Vec::new(),
            epsilon_list: Vec::new(),
            shells: Vec::new(),
            band: [0.55, 0.65],
            cfl: 0.5,
            t_final: Some(1.0),
            dealias: true,
            ux_factor: 1e3,
            tail_frac: 0.1,
            out_dir: PathBuf::from("results"),
            stride: 10,
        };
        match id {
            ExperimentId::VerifyNorms => {
                c.delta = 0.7;
                c.n_list = if quick { vec![16, 64, 256] } else { vec![16, 32, 64, 128, 256] };
            }
            ExperimentId::Residuals => {
                c.n_list = if quick { vec![16, 32, 64, 128] } else { vec![16, 32, 64, 128, 256, 512] };
                c.r = vec![1.0];
            }
            ExperimentId::Nonuniform => {
                c.n_list = if quick { vec![16, 32, 64] } else { vec![16, 32, 64, 128] };
                // the carrier sits in the top octave of the retained band by design
                c.tail_frac = 1.0;
                c.stride = 50;
            }
            ExperimentId::Holder => {
                c.r = vec![1.0, 1.5];
                c.epsilon_list = vec![1e-6, 1e-5, 1e-4, 1e-3];
                c.t_final = Some(0.5);
                c.grid_length = Some(2.0 * PI * 8.0);
                c.grid_points = Some(if quick { 4096 } else { 8192 });
                c.stride = 20;
            }
            ExperimentId::Blowup => {
                c.grid_length = Some(2.0 * PI * 8.0);
                c.grid_points = Some(if quick { 1 << 14 } else { 1 << 15 });
                c.t_final = None;
                c.ux_factor = 10.0;
                c.tail_frac = 1e-6;
                c.stride = 5;
            }
            ExperimentId::Inflation => {
                c.epsilon_list = vec![0.1, 0.01];
                c.shells = if quick { vec![4, 8] } else { vec![4, 8, 12] };
                c.grid_length = Some(2.0 * PI * 512.0);
                c.grid_points = Some(if quick { 1 << 14 } else { 1 << 15 });
                c.t_final = None;
                c.ux_factor = 10.0;
                // Besov growth is read off the last resolved sample, so run until resolution is lost
                c.tail_frac = 0.1;
                c.stride = 5;
            }
        }
        c
    }

    /// Defaults, then the file, then command-line overrides.
    pub fn resolve(id: ExperimentId, file: Option<&ConfigFile>, ov: &Overrides) -> Result<Self> {
        let mut c = Self::defaults(id, ov.quick);
        if let Some(f) = file {
            if let Some(e) = &f.experiment {
                let named: ExperimentId = e.parse()?;
                if named != id {
                    return Err(Error::config(format!("config is for '{named}', requested '{id}'")));
                }
            }
            if let Some(seed) = f.seed {
                c.seed = seed;
            }
            if let Some(g) = &f.grid {
                c.grid_length = g.length.or(c.grid_length);
                c.grid_points = g.points.or(c.grid_points);
            }
            if let Some(fam) = &f.family {
                c.s = fam.s.unwrap_or(c.s);
                c.delta = fam.delta.unwrap_or(c.delta);
                if let Some(v) = &fam.n_list {
                    c.n_list = v.clone();
                }
                if let Some(v) = &fam.r {
                    c.r = v.to_vec();
                }
                if let Some(v) = &fam.epsilon_list {
                    c.epsilon_list = v.clone();
                }
                if let Some(v) = &fam.shells {
                    c.shells = v.to_vec();
                }
                c.band = fam.c_band.unwrap_or(c.band);
            }
            if let Some(sol) = &f.solver {
                c.cfl = sol.cfl.unwrap_or(c.cfl);
                if sol.t_final.is_some() {
                    c.t_final = sol.t_final;
                }
                c.dealias = sol.dealias.unwrap_or(c.dealias);
                if let Some(h) = &sol.halt {
                    c.ux_factor = h.ux_factor.unwrap_or(c.ux_factor);
                    c.tail_frac = h.tail_frac.unwrap_or(c.tail_frac);
                }
            }
            if let Some(out) = &f.output {
                if let Some(d) = &out.dir {
                    c.out_dir = PathBuf::from(d);
                }
                c.stride = out.stride.unwrap_or(c.stride);
            }
        }
        if let Some(d) = &ov.out {
            c.out_dir = d.clone();
        }
        if ov.grid_n.is_some() {
            c.grid_points = ov.grid_n;
        }
        if ov.box_l.is_some() {
            c.grid_length = ov.box_l;
        }
        if let Some(seed) = ov.seed {
            c.seed = seed;
        }
        if id == ExperimentId::Residuals && c.r.is_empty() {
            c.r = vec![c.s - 1.0];
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::config(m));
        if !(self.s > 1.5 && self.s.is_finite()) {
            return bad(format!("s must exceed 3/2, got {}", self.s));
        }
        if !(self.delta > 0.5 && self.delta < 1.0) {
            return bad(format!("delta must lie in (1/2, 1), got {}", self.delta));
        }
        if let Some(l) = self.grid_length {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("grid.L must be positive, got {l}"));
            }
        }
        if let Some(n) = self.grid_points {
            if n < 8 || !n.is_power_of_two() {
                return bad(format!("grid.N must be a power of two >= 8, got {n}"));
            }
        }
        if self.n_list.contains(&0) {
            return bad("n_list entries must be positive".into());
        }
        if self.epsilon_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("epsilon_list entries must be positive".into());
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("t_final must be positive, got {t}"));
            }
        }
        if !(self.ux_factor > 0.0 && self.tail_frac > 0.0) {
            return bad("halt thresholds must be positive".into());
        }
        if self.stride == 0 {
            return bad("output.stride must be positive".into());
        }
        match self.id {
            ExperimentId::VerifyNorms | ExperimentId::Nonuniform if self.n_list.len() < 3 => {
                bad(format!("{} needs at least 3 values of n", self.id))
            }
            ExperimentId::Residuals => {
                if self.n_list.len() < 3 {
                    return bad("residuals need at least 3 values of n".into());
                }
                if self.r.len() != 1 || self.r[0] > self.s - 1.0 {
                    return bad(format!("residuals take one s1 <= s - 1, got {:?}", self.r));
                }
                Ok(())
            }
            ExperimentId::Holder => {
                if self.r.is_empty() || self.r.iter().any(|&r| !(self.s - 1.0 <= r && r < self.s)) {
                    return bad(format!("holder needs s - 1 <= r < s for every r, got {:?}", self.r));
                }
                if self.epsilon_list.len() < 3 {
                    return bad("holder needs at least 3 perturbation sizes".into());
                }
                Ok(())
            }
            ExperimentId::Inflation => {
                let [a, b] = self.band;
                if !(0.5 < a && a < b && b < 1.0 && 2.0 * a > b) {
                    return bad(format!("C_band [{a}, {b}] must lie in (1/2, 1) and miss its dilate"));
                }
                if self.shells.is_empty() || self.shells.contains(&0) || self.epsilon_list.is_empty() {
                    return bad("inflation needs nonempty shells and epsilon_list".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The config file that reproduces this configuration exactly.
    pub fn echo(&self) -> ConfigFile {
        ConfigFile {
            experiment: Some(self.id.as_str().to_string()),
            seed: Some(self.seed),
            grid: Some(GridSection { length: self.grid_length, points: self.grid_points }),
            family: Some(FamilySection {
                s: Some(self.s),
                delta: Some(self.delta),
                n_list: Some(self.n_list.clone()),
                r: Some(OneOrMany::Many(self.r.clone())),
                epsilon_list: Some(self.epsilon_list.clone()),
                shells: Some(OneOrMany::Many(self.shells.clone())),
                c_band: Some(self.band),
            }),
            solver: Some(SolverSection {
                cfl: Some(self.cfl),
                t_final: self.t_final,
                dealias: Some(self.dealias),
                halt: Some(HaltSection { ux_factor: Some(self.ux_factor), tail_frac: Some(self.tail_frac) }),
            }),
            output: Some(OutputSection {
                dir: Some(self.out_dir.to_string_lossy().into_owned()),
                stride: Some(self.stride),
            }),
        }
    }

    /// Directory receiving this experiment's files.
    pub fn experiment_dir(&self) -> PathBuf {
        self.out_dir.join(self.id.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_schema() {
        let text = r#"
experiment = "holder"
seed = 3
[grid]
L = 50.0
N = 4096
[family]
s = 2.0
delta = 0.75
n_list = [16, 32, 64]
r = 1.5
epsilon_list = [1e-6, 1e-5, 1e-4]
shells = [4, 8]
C_band = [0.55, 0.65]
[solver]
cfl = 0.4
t_final = 0.5
dealias = true
[solver.halt]
ux_factor = 100.0
tail_frac = 0.2
[output]
dir = "out"
stride = 7
"#;
        let f = ConfigFile::parse(text).unwrap();
        let c = ExperimentConfig::resolve(ExperimentId::Holder, Some(&f), &Overrides::default()).unwrap();
        assert_eq!(c.r, vec![1.5]);
        assert_eq!(c.grid_points, Some(4096));
        assert_eq!(c.stride, 7);
        assert_eq!(c.tail_frac, 0.2);
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("[grid]\nM = 3").is_err());
        assert!(ConfigFile::parse("[solver.halt]\nfoo = 3").is_err());
    }

    #[test]
    fn mismatched_experiment_is_an_error() {
        let f = ConfigFile::parse("experiment = \"blowup\"").unwrap();
        assert!(ExperimentConfig::resolve(ExperimentId::Holder, Some(&f), &Overrides::default()).is_err());
        let f = ConfigFile::parse("experiment = \"nope\"").unwrap();
        assert!(ExperimentConfig::resolve(ExperimentId::Holder, Some(&f), &Overrides::default()).is_err());
    }

    #[test]
    fn hypotheses_are_validated() {
        let f = ConfigFile::parse("[family]\ns = 1.2").unwrap();
        assert!(ExperimentConfig::resolve(ExperimentId::Residuals, Some(&f), &Overrides::default()).is_err());
        let f = ConfigFile::parse("[family]\nr = [0.5]").unwrap();
        assert!(ExperimentConfig::resolve(ExperimentId::Holder, Some(&f), &Overrides::default()).is_err());
        let ov = Overrides { grid_n: Some(1000), ..Default::default() };
        assert!(ExperimentConfig::resolve(ExperimentId::Blowup, None, &ov).is_err());
    }

    #[test]
    fn echo_round_trips() {
        for id in ExperimentId::ALL {
            for quick in [false, true] {
                let ov = Overrides { quick, seed: Some(9), ..Default::default() };
                let c = ExperimentConfig::resolve(id, None, &ov).unwrap();
                let text = c.echo().to_toml().unwrap();
                let back = ConfigFile::parse(&text).unwrap();
                let again = ExperimentConfig::resolve(id, Some(&back), &Overrides::default()).unwrap();
                assert_eq!(c, again, "{id}: {text}");
            }
        }
    }
}
