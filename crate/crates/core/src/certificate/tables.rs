use serde::{Deserialize, Serialize};

use super::ledger::ConstantLedger;
use super::russmann::RussmannInputs;
use crate::fourier::DiophantineData;
use crate::geometry::SystemBounds;
use crate::{KamError, Result};

/// Upper bounds for the frame objects on the initial torus (hypothesis H2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionNumbers {
    pub sigma_dk: f64,
    pub sigma_dkt: f64,
    pub sigma_b: f64,
    pub sigma_n: f64,
    pub sigma_nt: f64,
    pub sigma_tinv: f64,
}

impl ConditionNumbers {
    pub fn sigma_l(&self, bounds: &SystemBounds) -> f64 {
        self.sigma_dk + bounds.c_xp
    }

    pub fn sigma_lt(&self, bounds: &SystemBounds) -> f64 {
        self.sigma_dkt.max(bounds.c_xpt)
    }

    /// Notes where the product bounds `c_J sigma_L sigma_B` and `c_JT sigma_LT sigma_B`
    /// are tighter than the supplied `sigma_N`, `sigma_NT`. The supplied values are still used.
    pub fn warnings(&self, bounds: &SystemBounds) -> Vec<String> {
        let derived_n = bounds.c_j * self.sigma_l(bounds) * self.sigma_b;
        let derived_nt = bounds.c_jt * self.sigma_lt(bounds) * self.sigma_b;
        let mut out = Vec::new();
        if self.sigma_n > derived_n {
            out.push(format!("sigma_N = {:.6e} exceeds c_J sigma_L sigma_B = {derived_n:.6e}", self.sigma_n));
        }
        if self.sigma_nt > derived_nt {
            out.push(format!("sigma_NT = {:.6e} exceeds c_JT sigma_LT sigma_B = {derived_nt:.6e}", self.sigma_nt));
        }
        out
    }

    pub fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("sigma_DK", self.sigma_dk),
            ("sigma_DKT", self.sigma_dkt),
            ("sigma_B", self.sigma_b),
            ("sigma_N", self.sigma_n),
            ("sigma_NT", self.sigma_nt),
            ("sigma_Tinv", self.sigma_tinv),
        ]
    }
}

/// `mu`, `mu_E` in (0, 1) and `mu_etaN > 0` (hypothesis H3).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlConstants {
    pub mu: f64,
    pub mu_e: f64,
    pub mu_eta_n: f64,
}

impl ControlConstants {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64, range: &str| KamError::Hypothesis { name: name.into(), detail: format!("{v} not in {range}") };
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(bad("mu", self.mu, "(0, 1)"));
        }
        if !(self.mu_e > 0.0 && self.mu_e < 1.0) {
            return Err(bad("mu_E", self.mu_e, "(0, 1)"));
        }
        if !(self.mu_eta_n > 0.0 && self.mu_eta_n.is_finite()) {
            return Err(bad("mu_etaN", self.mu_eta_n, "(0, inf)"));
        }
        Ok(())
    }
}

/// Torus and phase-space dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub d: usize,
    pub n: usize,
}

fn sum(v: &[f64]) -> f64 {
    v.iter().sum()
}

/// Reads the inputs into a fresh ledger and evaluates Tables 1 to 3 row by row.
///
/// `C_L`, `C_N`, `C_LT`, `C_NT` are bound to `sigma_L`, `sigma_N`, `sigma_LT`, `sigma_NT`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_tables(
    bounds: &SystemBounds,
    sigma: &ConditionNumbers,
    controls: &ControlConstants,
    dio: &DiophantineData,
    dims: Dimensions,
    rho: f64,
    delta: f64,
    russ: &RussmannInputs,
) -> Result<ConstantLedger> {
    controls.validate()?;
    for (name, v) in sigma.fields() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(KamError::Hypothesis { name: name.into(), detail: format!("condition number {v} must be positive") });
        }
    }
    if !(delta > 0.0 && rho > delta) {
        return Err(KamError::Invalid(format!("need 0 < delta < rho, got delta = {delta}, rho = {rho}")));
    }
    if dims.d != dio.dim() || dims.n < dims.d {
        return Err(KamError::Shape(format!("torus dimension {} with {} frequencies and {} degrees of freedom", dims.d, dio.dim(), dims.n)));
    }

    let mut l = ConstantLedger::new();
    l.input("d", dims.d as f64)?;
    l.input("n", dims.n as f64)?;
    l.input("gamma", dio.gamma)?;
    l.input("tau", dio.tau)?;
    l.input("rho", rho)?;
    l.input("delta", delta)?;
    l.input("gamma*delta^tau", dio.gamma * delta.powf(dio.tau))?;
    for (name, v) in bounds.fields() {
        l.input(name, v)?;
    }
    for (name, v) in sigma.fields() {
        l.input(name, v)?;
    }
    l.input("mu", controls.mu)?;
    l.input("mu_E", controls.mu_e)?;
    l.input("mu_etaN", controls.mu_eta_n)?;
    l.input("c_R(delta)", russ.c_delta)?;
    l.input("c1_R(delta)", russ.c1_delta)?;
    l.input("c_R(rho)", russ.c_rho)?;
    l.def("input", "sigma_L", &["sigma_DK", "c_Xp"], sum)?;
    l.def("input", "sigma_LT", &["sigma_DKT", "c_XpT"], |v| v[0].max(v[1]))?;
    l.def("input", "C_L", &["sigma_L"], |v| v[0])?;
    l.def("input", "C_N", &["sigma_N"], |v| v[0])?;
    l.def("input", "C_LT", &["sigma_LT"], |v| v[0])?;
    l.def("input", "C_NT", &["sigma_NT"], |v| v[0])?;

    table1(&mut l)?;
    table2(&mut l)?;
    table3(&mut l)?;
    Ok(l)
}

const G: &str = "gamma*delta^tau";

fn table1(l: &mut ConstantLedger) -> Result<()> {
    let t = "table1";
    l.def(t, "C_OmegaL^N", &["d", "n", "c1_R(delta)"], |v| (v[0] + v[1] - 2.0) * v[2])?;
    l.def(t, "C_OmegaN^N", &["sigma_B", "C_OmegaL^N"], |v| v[0] * v[0] * v[1])?;
    l.def(t, "C_sym", &["C_OmegaL^N", "C_OmegaN^N"], |v| v[0].max(v[1]))?;

    l.def(t, "C_E^L", &["C_L", "C_N", "mu"], |v| (v[0] + v[1] * v[2]) / (1.0 - v[2] * v[2]))?;
    l.def(t, "C_E^N", &["C_N", "C_L", "mu"], |v| (v[0] + v[1] * v[2]) / (1.0 - v[2] * v[2]))?;
    l.def(t, "C_E", &["C_E^L", G, "C_E^N"], |v| v[0] + v[1] * v[2])?;

    l.def(t, "C_ET^L", &["n", "C_LT", "mu", "C_NT"], |v| v[0] * (v[1] + v[2] * v[3]) / (1.0 - v[2] * v[2]))?;
    l.def(t, "C_ET^N", &["n", "C_NT", "mu", "C_LT"], |v| v[0] * (v[1] + v[2] * v[3]) / (1.0 - v[2] * v[2]))?;
    l.def(t, "C_ET", &["C_ET^L", G, "C_ET^N"], |v| v[0] + v[1] * v[2])?;

    let de = ["d", "c_Omega", "C_NT", "C_E^L", "C_LT", "C_E^N"];
    l.def(t, "C_DE^L", &de, |v| v[0] * (1.0 + v[1] * (v[2] * v[3] + v[4] * v[5])) * v[3])?;
    l.def(t, "C_DE^N", &de, |v| v[0] * (1.0 + v[1] * (v[2] * v[3] + v[4] * v[5])) * v[5])?;
    l.def(t, "C_DE", &["C_DE^L", G, "C_DE^N"], |v| v[0] + v[1] * v[2])?;

    let det = ["n", "c_Omega", "C_N", "C_ET^L", "C_L", "C_ET^N"];
    l.def(t, "C_DET^L", &det, |v| v[0] * (1.0 + v[1] * (v[2] * v[3] + v[4] * v[5])) * v[3])?;
    l.def(t, "C_DET^N", &det, |v| v[0] * (1.0 + v[1] * (v[2] * v[3] + v[4] * v[5])) * v[5])?;
    l.def(t, "C_DET", &["C_DET^L", G, "C_DET^N"], |v| v[0] + v[1] * v[2])?;

    l.def(t, "C_LieK", &["C_E", "delta", "mu", "c_Xh"], |v| v[0] * v[1] * v[2] + v[3])?;
    l.def(t, "C_LieL", &["C_DE", "mu", "c_DXp", "C_E", "delta", "c_DXh", "C_L"], |v| v[0] * v[1] + v[2] * v[3] * v[4] * v[1] + v[5] * v[6])?;
    l.def(t, "C_LieLT", &["C_DET", "mu", "c_DXpT", "C_E", "delta", "C_LT", "c_DXhT"], |v| (v[0] * v[1]).max(v[2] * v[3] * v[4] * v[1]) + v[5] * v[6])?;
    l.def(t, "C_LieGL", &["C_LieLT", "c_G", "C_L", "C_LT", "c_DG", "C_LieK", "C_LieL"], |v| v[0] * v[1] * v[2] + v[3] * v[4] * v[5] * v[2] + v[3] * v[1] * v[6])?;
    l.def(t, "C_LieB", &["sigma_B", "C_LieGL"], |v| v[0] * v[0] * v[1])?;
    l.def(t, "C_LieN", &["c_DJ", "C_LieK", "C_L", "sigma_B", "c_J", "C_LieL", "C_LieB"], |v| v[0] * v[1] * v[2] * v[3] + v[4] * v[5] * v[3] + v[4] * v[2] * v[6])?;

    l.def(t, "C_T", &["C_NT", "c_Th", "C_N"], |v| v[0] * v[1] * v[2])?;

    let red = ["d", "delta", "c_DXp", "C_NT", "c_Omega"];
    l.def(t, "C_EredLL^L", &[&red[..], &["C_E^L"]].concat(), |v| v[0] + (v[0] + v[1] * v[2]) * v[3] * v[4] * v[5])?;
    l.def(t, "C_EredLL^N", &[&red[..], &["C_E^N"]].concat(), |v| (v[0] + v[1] * v[2]) * v[3] * v[4] * v[5])?;
    let red = ["d", "delta", "c_DXp", "C_LT", "c_Omega"];
    l.def(t, "C_EredNL^L", &[&red[..], &["C_E^L"]].concat(), |v| (v[0] + v[1] * v[2]) * v[3] * v[4] * v[5])?;
    l.def(t, "C_EredNL^N", &[&red[..], &["C_E^N"]].concat(), |v| v[0] + (v[0] + v[1] * v[2]) * v[3] * v[4] * v[5])?;

    l.def(t, "C_EredNN^L", &["delta", "C_LT", "c_DOmega", "C_E^L", "C_N", "n", "d", "c_Omega", "C_NT", "c_DXpT"], |v| {
        v[0] * v[1] * v[2] * v[3] * v[4] + (v[5] + v[6] * v[3] * v[7] * v[8]).max(v[0] * v[9] * v[3] * v[7] * v[4])
    })?;
    l.def(t, "C_EredNN^N", &["delta", "C_LT", "c_DOmega", "C_E^N", "C_N", "d", "c_Omega", "C_NT", "c_DXpT"], |v| {
        v[0] * v[1] * v[2] * v[3] * v[4] + (v[5] * v[3] * v[6] * v[7]).max(v[0] * v[8] * v[3] * v[6] * v[4])
    })?;
    l.def(t, "C_EredNN", &["C_EredNN^L", G, "C_EredNN^N"], |v| v[0] + v[1] * v[2])?;

    l.def(t, "C_EredLN^L", &["delta", "sigma_B", "C_LT", "c_G", "c_DJ", "C_L", "C_E^L", "C_EredNL^L"], |v| {
        v[0] * v[1] * v[1] * v[2] * v[3] * v[4] * v[5] * v[6] + v[1] * v[1] * v[7]
    })?;
    l.def(t, "C_EredLN^N", &[G, "delta", "sigma_B", "C_LT", "c_G", "c_DJ", "C_L", "C_E^N", "C_EredNL^N", "C_OmegaL^N", "C_LieB"], |v| {
        let b2 = v[2] * v[2];
        v[0] * v[1] * b2 * v[3] * v[4] * v[5] * v[6] * v[7] + v[0] * b2 * v[8] + v[2] * v[9] * v[10]
    })?;
    l.def(t, "C_EredLN", &["C_EredLN^L", "C_EredLN^N"], sum)?;
    Ok(())
}

fn table2(l: &mut ConstantLedger) -> Result<()> {
    let t = "table2";
    l.def(t, "C_avg_xiN^L", &["sigma_Tinv"], |v| v[0])?;
    l.def(t, "C_avg_xiN^N", &["delta", "rho", "tau", "sigma_Tinv", "C_T", "c_R(rho)"], |v| (v[0] / v[1]).powf(v[2]) * v[3] * v[4] * v[5])?;
    l.def(t, "C_avg_xiN", &["C_avg_xiN^L", "C_avg_xiN^N"], sum)?;

    l.def(t, "C_xiN^L", &["C_avg_xiN^L"], |v| v[0])?;
    l.def(t, "C_xiN^N", &["C_avg_xiN^N", "c_R(delta)"], sum)?;
    l.def(t, "C_xiN", &["C_xiN^L", "C_xiN^N"], sum)?;

    l.def(t, "C_DeltaKi^L", &["C_N", "C_xiN^L"], |v| v[0] * v[1])?;
    l.def(t, "C_DeltaKi^N", &["C_N", "C_xiN^N"], |v| v[0] * v[1])?;
    l.def(t, "C_DeltaKi", &["C_DeltaKi^L", "C_DeltaKi^N"], sum)?;

    l.def(t, "C_DeltaDKi^L", &["d", "C_N", "C_avg_xiN^L"], |v| v[0] * v[1] * v[2])?;
    l.def(t, "C_DeltaDKi^N", &["d", "C_N", "C_avg_xiN^N", "c1_R(delta)"], |v| v[0] * v[1] * (v[2] + v[3]))?;
    l.def(t, "C_DeltaDKi", &["C_DeltaDKi^L", "C_DeltaDKi^N"], sum)?;

    l.def(t, "C_DeltaDKiT^L", &["n", "C_NT", "C_avg_xiN^L"], |v| v[0] * v[1] * v[2])?;
    l.def(t, "C_DeltaDKiT^N", &["n", "C_NT", "C_avg_xiN^N", "c1_R(delta)"], |v| v[0] * v[1] * (v[2] + v[3]))?;
    l.def(t, "C_DeltaDKiT", &["C_DeltaDKiT^L", "C_DeltaDKiT^N"], sum)?;

    for p in ["L", "N"] {
        l.def(t, &format!("C_DeltaLi^{p}"), &[&format!("C_DeltaDKi^{p}"), "delta", "c_DXp", &format!("C_DeltaKi^{p}")], |v| v[0] + v[1] * v[2] * v[3])?;
    }
    l.def(t, "C_DeltaLi", &["C_DeltaLi^L", "C_DeltaLi^N"], sum)?;
    for p in ["L", "N"] {
        l.def(t, &format!("C_DeltaLiT^{p}"), &[&format!("C_DeltaDKiT^{p}"), "delta", "c_DXpT", &format!("C_DeltaKi^{p}")], |v| v[0].max(v[1] * v[2] * v[3]))?;
    }
    l.def(t, "C_DeltaLiT", &["C_DeltaLiT^L", "C_DeltaLiT^N"], sum)?;

    l.def(t, "C_Ei^L", &["C_E^L", "c_DXh", "C_DeltaKi^L", "C_LieN", "C_xiN^L"], |v| v[0] + v[1] * v[2] + v[3] * v[4])?;
    l.def(t, "C_Ei^N", &[G, "C_E^N", "sigma_N", "c_DXh", "C_DeltaKi^N", "C_LieN", "C_xiN^N"], |v| v[0] * (v[1] + v[2]) + v[3] * v[4] + v[5] * v[6])?;
    l.def(t, "C_Ei", &["C_Ei^L", "C_Ei^N"], sum)?;

    l.def(t, "Q_etaiN", &["C_DeltaLiT", "c_Omega", "delta", "C_LT", "c_DOmega", "C_DeltaKi", "C_Ei", "C_EredNN", "C_xiN", "c_D2Xh"], |v| {
        (v[0] * v[1] + v[2] * v[3] * v[4] * v[5]) * v[6] + v[7] * v[8] + v[2] * v[3] * v[1] * 0.5 * v[9] * v[5] * v[5]
    })?;
    Ok(())
}

fn table3(l: &mut ConstantLedger) -> Result<()> {
    let t = "table3";
    l.def(t, "C_xiL^L", &["c_R(delta)", "C_T", "C_xiN^L"], |v| v[0] * (1.0 + v[1] * v[2]))?;
    l.def(t, "C_xiL^N", &["c_R(delta)", "C_T", "C_xiN^N"], |v| v[0] * v[1] * v[2])?;
    l.def(t, "C_xiL", &["C_xiL^L", "C_xiL^N"], sum)?;

    for p in ["L", "N"] {
        let xi = format!("C_xiL^{p}");
        l.def(t, &format!("C_DeltaKn^{p}"), &["c_DPhi", "C_L", &xi, G, &format!("C_DeltaKi^{p}")], |v| v[0] * v[1] * v[2] + v[3] * v[4])?;
    }
    l.def(t, "C_DeltaKn", &["C_DeltaKn^L", "C_DeltaKn^N"], sum)?;
    for p in ["L", "N"] {
        let xi = format!("C_xiL^{p}");
        l.def(t, &format!("C_DeltaDKn^{p}"), &["d", "c_DPhi", "C_L", &xi, G, &format!("C_DeltaDKi^{p}")], |v| v[0] * v[1] * v[2] * v[3] + v[4] * v[5])?;
    }
    l.def(t, "C_DeltaDKn", &["C_DeltaDKn^L", "C_DeltaDKn^N"], sum)?;
    for p in ["L", "N"] {
        let xi = format!("C_xiL^{p}");
        l.def(t, &format!("C_DeltaDKnT^{p}"), &["n", "c_DPhi", "C_L", &xi, G, &format!("C_DeltaDKiT^{p}")], |v| 2.0 * v[0] * v[1] * v[2] * v[3] + v[4] * v[5])?;
    }
    l.def(t, "C_DeltaDKnT", &["C_DeltaDKnT^L", "C_DeltaDKnT^N"], sum)?;

    for p in ["L", "N"] {
        l.def(t, &format!("C_DeltaLn^{p}"), &[&format!("C_DeltaDKn^{p}"), "delta", "c_DXp", &format!("C_DeltaKn^{p}")], |v| v[0] + v[1] * v[2] * v[3])?;
    }
    l.def(t, "C_DeltaLn", &["C_DeltaLn^L", "C_DeltaLn^N"], sum)?;
    for p in ["L", "N"] {
        l.def(t, &format!("C_DeltaLnT^{p}"), &[&format!("C_DeltaDKnT^{p}"), "delta", "c_DXpT", &format!("C_DeltaKn^{p}")], |v| v[0].max(v[1] * v[2] * v[3]))?;
    }
    l.def(t, "C_DeltaLnT", &["C_DeltaLnT^L", "C_DeltaLnT^N"], sum)?;

    for p in ["L", "N"] {
        l.def(
            t,
            &format!("C_DeltaGLn^{p}"),
            &[&format!("C_DeltaLnT^{p}"), "c_G", "C_L", "delta", "C_LT", "c_DG", &format!("C_DeltaKn^{p}"), &format!("C_DeltaLn^{p}")],
            |v| v[0] * v[1] * v[2] + v[3] * v[4] * v[5] * v[6] * v[2] + v[4] * v[1] * v[7],
        )?;
    }
    l.def(t, "C_DeltaGLn", &["C_DeltaGLn^L", "C_DeltaGLn^N"], sum)?;

    for p in ["L", "N"] {
        l.def(t, &format!("C_DeltaBn^{p}"), &["sigma_B", &format!("C_DeltaGLn^{p}")], |v| v[0] * v[0] * v[1])?;
    }
    l.def(t, "C_DeltaBn", &["sigma_B", "C_DeltaGLn"], |v| v[0] * v[0] * v[1])?;

    for p in ["L", "N"] {
        l.def(
            t,
            &format!("C_DeltaNn^{p}"),
            &["delta", "c_DJ", &format!("C_DeltaKn^{p}"), "C_L", "sigma_B", "c_J", &format!("C_DeltaLn^{p}"), &format!("C_DeltaBn^{p}")],
            |v| v[0] * v[1] * v[2] * v[3] * v[4] + v[5] * v[6] * v[4] + v[5] * v[3] * v[7],
        )?;
    }
    l.def(t, "C_DeltaNn", &["C_DeltaNn^L", "C_DeltaNn^N"], sum)?;

    for p in ["L", "N"] {
        l.def(
            t,
            &format!("C_DeltaNnT^{p}"),
            &["delta", "sigma_B", "C_L", "c_DJT", &format!("C_DeltaKn^{p}"), &format!("C_DeltaLn^{p}"), "c_JT", &format!("C_DeltaBn^{p}")],
            |v| v[0] * v[1] * v[2] * v[3] * v[4] + v[1] * v[5] * v[6] + v[7] * v[2] * v[6],
        )?;
    }
    l.def(t, "C_DeltaNnT", &["C_DeltaNnT^L", "C_DeltaNnT^N"], sum)?;

    for p in ["L", "N"] {
        l.def(
            t,
            &format!("C_DeltaTn^{p}"),
            &[&format!("C_DeltaNnT^{p}"), "c_Th", "C_N", "delta", "C_NT", "c_DTh", &format!("C_DeltaKn^{p}"), &format!("C_DeltaNn^{p}")],
            |v| v[0] * v[1] * v[2] + v[3] * v[4] * v[5] * v[6] * v[2] + v[4] * v[1] * v[7],
        )?;
    }
    l.def(t, "C_DeltaTn", &["C_DeltaTn^L", "C_DeltaTn^N"], sum)?;

    for p in ["L", "N"] {
        l.def(t, &format!("C_DeltaiTn^{p}"), &["sigma_Tinv", &format!("C_DeltaTn^{p}")], |v| v[0] * v[0] * v[1])?;
    }
    l.def(t, "C_DeltaiTn", &["sigma_Tinv", "C_DeltaTn"], |v| v[0] * v[0] * v[1])?;

    l.def(t, "C_LiexiL^L", &["C_T", "C_xiN^L"], |v| 1.0 + v[0] * v[1])?;
    l.def(t, "C_LiexiL^N", &["C_T", "C_xiN^N"], |v| v[0] * v[1])?;
    l.def(t, "C_LiexiL", &["C_LiexiL^L", "C_LiexiL^N"], sum)?;

    for p in ["L", "N"] {
        l.def(t, &format!("C_En^{p}"), &["c_DPhi", &format!("C_Ei^{p}"), "sigma_L", &format!("C_LiexiL^{p}")], |v| v[0] * (v[1] + v[2] * v[3]))?;
    }
    l.def(t, "C_En", &["C_En^L", "C_En^N"], sum)?;

    l.def(t, "Q_etanN", &["n", "C_OmegaL^N", "C_LiexiL", "mu_etaN", "Q_etaiN"], |v| (1.0 + v[0]) * (1.0 + v[1] * v[2] * v[3]) * v[4])?;

    l.def(t, "Q_etanL1", &["C_EredLN", "C_xiN", "delta", "C_NT", "c_Omega", "c_D2Xh", "C_DeltaKi", G, "C_OmegaN^N"], |v| {
        v[0] * v[1] + v[2] * v[3] * v[4] * 0.5 * v[5] * v[6] * v[6] + v[7] * v[8]
    })?;
    l.def(t, "Q_etanL2", &["C_NT", "c_Omega", "d", "C_Ei", "C_xiL"], |v| v[0] * v[1] * v[2] * v[3] * v[4])?;
    l.def(t, "Q_etanL3", &["C_NT", "c_Omega", "d", "sigma_L", "C_xiL", G, "C_DeltaLi", "C_LiexiL"], |v| v[0] * v[1] * (v[2] * v[3] * v[4] + v[5] * v[6]) * v[7])?;
    l.def(t, "Q_etanL4", &["C_NT", "c_Omega", "c_DXp", "c_DPhi", "C_xiL", "C_Ei", "sigma_L", "C_LiexiL"], |v| v[0] * v[1] * v[2] * v[3] * v[4] * (v[5] + v[6] * v[7]))?;
    l.def(t, "Q_etanL5", &["C_DeltaNnT", "c_Omega", "delta", "C_NT", "c_DOmega", "C_DeltaKn", "C_En"], |v| (v[0] * v[1] + v[2] * v[3] * v[4] * v[5]) * v[6])?;
    l.def(t, "Q_etanL", &[G, "Q_etanL1", "Q_etanL2", "Q_etanL3", "delta", "Q_etanL4", "Q_etanL5"], |v| v[0] * v[1] + v[2] + v[3] + v[4] * v[5] + v[6])?;
    Ok(())
}
