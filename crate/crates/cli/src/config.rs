//! Run configuration: a TOML file with `KAMTORUS_<SECTION>_<KEY>` environment overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use kamtorus::certificate::{ConditionNumbers, ControlConstants, RussmannMode};
use kamtorus::fourier::{best_gamma, verify_diophantine, DiophantineData, FourierSpace, StripSchedule};
use kamtorus::newton::{NewtonConfig, UpdateRule};
use kamtorus::systems::{OscillatorFamily, RotationalFamily};

use crate::CliError;

const PHI: f64 = 1.618_033_988_749_895;
const ENV_PREFIX: &str = "KAMTORUS_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Oscillator,
    Rotational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub family: Family,
    /// Twist coefficients `b_i`, one per plane.
    pub b: Vec<f64>,
    /// Radii of the starting torus; the planes are tuned so it rotates with `omega`.
    pub radii: Vec<f64>,
    #[serde(default)]
    pub coupling: f64,
    /// Rotational family only: coefficient of `q_1^2 I_3`.
    #[serde(default)]
    pub coupling3: f64,
    /// Rotational family only: linear coefficient of `h_3`.
    #[serde(default = "default_a3")]
    pub a3: f64,
    /// Amplitude of a random perturbation added to the starting torus.
    #[serde(default)]
    pub perturbation: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_a3() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrequencyConfig {
    pub omega: Vec<f64>,
    /// `None` takes 0.9 times the best constant up to `gamma_order`.
    pub gamma: Option<f64>,
    pub gamma_order: usize,
    pub tau: f64,
    /// Order up to which the Diophantine inequality is verified.
    pub k_max: usize,
}

impl Default for FrequencyConfig {
    fn default() -> Self {
        Self { omega: vec![1.0, PHI], gamma: None, gamma_order: 16, tau: 1.0, k_max: 400 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourierConfig {
    pub cutoff: usize,
    pub grid: usize,
}

impl Default for FourierConfig {
    fn default() -> Self {
        Self { cutoff: 8, grid: 32 }
    }
}

/// A number or the string `"auto"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Delta {
    Value(f64),
    Keyword(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StripConfig {
    pub rho: f64,
    pub rho_inf: f64,
    /// `"auto"` resolves to `(rho - rho_inf) / 6`.
    pub delta: Delta,
}

impl Default for StripConfig {
    fn default() -> Self {
        Self { rho: 0.1, rho_inf: 0.04, delta: Delta::Value(0.01) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonSection {
    pub max_iter: usize,
    pub tol: f64,
    pub update: UpdateRule,
}

impl Default for NewtonSection {
    fn default() -> Self {
        let c = NewtonConfig::default();
        Self { max_iter: c.max_iter, tol: c.tol, update: c.update }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaConfig {
    pub sigma_dk: f64,
    pub sigma_dkt: f64,
    pub sigma_b: f64,
    pub sigma_n: f64,
    pub sigma_nt: f64,
    pub sigma_tinv: f64,
}

impl From<SigmaConfig> for ConditionNumbers {
    fn from(s: SigmaConfig) -> Self {
        Self { sigma_dk: s.sigma_dk, sigma_dkt: s.sigma_dkt, sigma_b: s.sigma_b, sigma_n: s.sigma_n, sigma_nt: s.sigma_nt, sigma_tinv: s.sigma_tinv }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateConfig {
    /// Polydisc radius of the domain where the system bounds hold.
    pub domain_radius: f64,
    pub time_radius: f64,
    /// Used when `sigma` is absent: each condition number is `sigma_margin` times the measured norm.
    pub sigma_margin: f64,
    pub sigma: Option<SigmaConfig>,
    pub mu: f64,
    pub mu_e: f64,
    pub mu_eta_n: f64,
    pub russmann: RussmannMode,
    pub m: Option<usize>,
    /// Torus artifact (`.fmd` or `.csv`); the starting torus when absent.
    pub torus: Option<PathBuf>,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            domain_radius: 1.0,
            time_radius: 0.5,
            sigma_margin: 2.0,
            sigma: None,
            mu: 0.5,
            mu_e: 0.5,
            mu_eta_n: 1.0,
            russmann: RussmannMode::Sharp,
            m: None,
            torus: None,
        }
    }
}

impl CertificateConfig {
    pub fn controls(&self) -> ControlConstants {
        ControlConstants { mu: self.mu, mu_e: self.mu_e, mu_eta_n: self.mu_eta_n }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiftConfig {
    /// Grid points per moment axis of the lifted torus.
    pub s_nodes: usize,
    /// Flow times of the cylinder slices.
    pub slices: Vec<f64>,
    pub tol: f64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self { s_nodes: 32, slices: vec![0.0, 0.5, 1.0, 2.0, 4.0], tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    /// Couplings to sweep with both update rules.
    pub couplings: Vec<f64>,
    /// Grid steps of the bite scan over `(0, (rho - rho_inf) / 3)`.
    pub delta_steps: usize,
    /// Also evaluate the certificate on every converged torus.
    pub certify: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { couplings: Vec::new(), delta_steps: 60, certify: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("kamtorus-out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub frequency: FrequencyConfig,
    #[serde(default)]
    pub fourier: FourierConfig,
    #[serde(default)]
    pub strip: StripConfig,
    #[serde(default)]
    pub newton: NewtonSection,
    #[serde(default)]
    pub certificate: CertificateConfig,
    #[serde(default)]
    pub lift: LiftConfig,
    #[serde(default)]
    pub bench: BenchConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn env_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Applies `KAMTORUS_SECTION_KEY=value` pairs; the section is the text up to the first underscore.
pub fn apply_overrides(table: &mut toml::Table, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), CliError> {
    for (name, raw) in vars {
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else { continue };
        let rest = rest.to_ascii_lowercase();
        let Some((section, key)) = rest.split_once('_') else {
            return Err(CliError::Config(format!("environment override {name} needs a section and a key")));
        };
        let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(t) = entry else {
            return Err(CliError::Config(format!("{section} is not a section")));
        };
        t.insert(key.to_string(), env_value(&raw));
    }
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str, vars: impl IntoIterator<Item = (String, String)>) -> Result<Self, CliError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        apply_overrides(&mut table, vars)?;
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, std::env::vars())
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Delta::Keyword(k) = &self.strip.delta {
            if k != "auto" {
                return Err(CliError::Config(format!("strip.delta must be a number or \"auto\", got {k:?}")));
            }
        }
        if self.certificate.sigma_margin.is_nan() || self.certificate.sigma_margin <= 1.0 {
            return Err(CliError::Config(format!("certificate.sigma_margin = {} must exceed 1", self.certificate.sigma_margin)));
        }
        Ok(())
    }

    /// Resolves `"auto"`; the result is echoed in every summary.
    pub fn delta(&self) -> f64 {
        match self.strip.delta {
            Delta::Value(v) => v,
            Delta::Keyword(_) => (self.strip.rho - self.strip.rho_inf) / 6.0,
        }
    }

    pub fn schedule(&self) -> Result<StripSchedule, CliError> {
        Ok(StripSchedule::new(self.strip.rho, self.strip.rho_inf, self.delta())?)
    }

    pub fn space(&self) -> Result<FourierSpace, CliError> {
        Ok(FourierSpace::uniform(self.frequency.omega.len(), self.fourier.cutoff, self.fourier.grid)?)
    }

    pub fn diophantine(&self) -> Result<DiophantineData, CliError> {
        let f = &self.frequency;
        let gamma = match f.gamma {
            Some(g) => g,
            None => 0.9 * best_gamma(&f.omega, f.tau, f.gamma_order)?.0,
        };
        Ok(verify_diophantine(&f.omega, gamma, f.tau, f.k_max)?)
    }

    pub fn newton(&self) -> NewtonConfig {
        NewtonConfig { max_iter: self.newton.max_iter, tol: self.newton.tol, update: self.newton.update }
    }

    pub fn family(&self) -> Result<FamilyInstance, CliError> {
        let s = &self.system;
        let omega = &self.frequency.omega;
        Ok(match s.family {
            Family::Oscillator => FamilyInstance::Oscillator(OscillatorFamily::tuned(omega, s.b.clone(), &s.radii, s.coupling)?),
            Family::Rotational => FamilyInstance::Rotational(RotationalFamily::tuned(omega, s.b.clone(), &s.radii, s.a3, s.coupling, s.coupling3)?),
        })
    }
}

pub enum FamilyInstance {
    Oscillator(OscillatorFamily),
    Rotational(RotationalFamily),
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[system]\nfamily = \"oscillator\"\nb = [0.5, 0.3]\nradii = [0.05, 0.04]\n";

    #[test]
    fn defaults_fill_missing_sections() {
        let c = RunConfig::parse(BASE, []).unwrap();
        assert_eq!(c.fourier, FourierConfig::default());
        assert_eq!(c.delta(), 0.01);
        assert_eq!(c.diophantine().unwrap().checked_cutoff, 400);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::parse(&format!("{BASE}colour = 1\n"), []), Err(CliError::Config(_))));
        assert!(RunConfig::parse(&format!("{BASE}[strip]\nrho = 0.1\nwidth = 2\n"), []).is_err());
    }

    #[test]
    fn auto_delta_and_env_overrides() {
        let text = format!("{BASE}[strip]\ndelta = \"auto\"\n");
        let env = [("KAMTORUS_STRIP_RHO_INF".to_string(), "0.01".to_string()), ("KAMTORUS_SYSTEM_COUPLING".to_string(), "1e-3".to_string()), ("HOME".into(), "/".into())];
        let c = RunConfig::parse(&text, env).unwrap();
        assert_eq!(c.strip.rho_inf, 0.01);
        assert_eq!(c.system.coupling, 1e-3);
        assert!((c.delta() - 0.015).abs() < 1e-15);
        assert!(RunConfig::parse(&format!("{BASE}[strip]\ndelta = \"small\"\n"), []).is_err());
        assert!(RunConfig::parse(BASE, [("KAMTORUS_BOGUS_KEY".to_string(), "1".to_string())]).is_err());
    }
}
