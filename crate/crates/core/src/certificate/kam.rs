use serde::{Deserialize, Serialize};

use super::ledger::ConstantLedger;
use super::tables::{ConditionNumbers, ControlConstants};
use crate::fourier::StripSchedule;
use crate::linalg::{inverse, row_norm};
use crate::newton::TorusState;
use crate::{KamError, Result};

/// Norms of the initial objects on the strip `rho`, the right-hand sides of H2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredNorms {
    pub rho: f64,
    pub k: f64,
    pub dk: f64,
    pub dkt: f64,
    pub b: f64,
    pub n: f64,
    pub nt: f64,
    pub tinv: f64,
    /// `dist(K(T_rho), boundary of B0) = R - |K|_rho`.
    pub dist: f64,
}

impl MeasuredNorms {
    /// `radius` is the polydisc radius of the bounds domain.
    pub fn of(state: &TorusState, radius: f64) -> Result<Self> {
        let rho = state.weighted_error.rho;
        let dk = state.k.jacobian()?;
        let k = state.k.strip_norm(rho)?;
        Ok(Self {
            rho,
            k,
            dk: dk.strip_norm(rho)?,
            dkt: dk.strip_norm_transpose(rho)?,
            b: state.bundle.b.strip_norm(rho)?,
            n: state.bundle.n.strip_norm(rho)?,
            nt: state.bundle.n.strip_norm_transpose(rho)?,
            tinv: row_norm(&inverse(&state.bundle.torsion.average())?),
            dist: radius - k,
        })
    }
}

impl ConditionNumbers {
    /// `factor` times each measured norm.
    pub fn with_margin(measured: &MeasuredNorms, factor: f64) -> Self {
        Self {
            sigma_dk: factor * measured.dk,
            sigma_dkt: factor * measured.dkt,
            sigma_b: factor * measured.b,
            sigma_n: factor * measured.n,
            sigma_nt: factor * measured.nt,
            sigma_tinv: factor * measured.tinv,
        }
    }
}

pub const INNER_TERMS: [&str; 11] = [
    "gamma*delta^tau*max(1,C_sym)/mu",
    "C_xiL",
    "delta*C*_DeltaK/dist(K,dB0)",
    "C*_DeltaDK/(sigma_DK-|DK|)",
    "C*_DeltaDKT/(sigma_DKT-|DKT|)",
    "C*_DeltaB/(sigma_B-|B|)",
    "C*_DeltaN/(sigma_N-|N|)",
    "C*_DeltaNT/(sigma_NT-|NT|)",
    "C*_DeltaiT/(sigma_Tinv-|<T>^-1|)",
    "1/mu_etaN",
    "a^(tau+1)*Q_etan/kappa",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalConstants {
    pub a: f64,
    pub q_etan: f64,
    pub c_theo_e: f64,
    /// Values of [`INNER_TERMS`], in order.
    pub inner: Vec<f64>,
    pub measured: MeasuredNorms,
}

fn gap(name: &str, sigma: f64, norm: f64) -> Result<f64> {
    let g = sigma - norm;
    if !(g > 0.0) {
        return Err(KamError::Hypothesis { name: name.into(), detail: format!("condition number {sigma:.6e} does not exceed the measured norm {norm:.6e}") });
    }
    Ok(g)
}

/// Appends Table 4 and `C_theoE` to a ledger from [`super::assemble_tables`].
///
/// `kappa` in the last inner term is `mu_E`.
pub fn final_constants(ledger: &mut ConstantLedger, schedule: &StripSchedule, controls: &ControlConstants, measured: &MeasuredNorms) -> Result<FinalConstants> {
    let (rho, delta) = (ledger.get("rho")?, ledger.get("delta")?);
    if schedule.rho0 != rho || schedule.delta0 != delta {
        return Err(KamError::Invalid(format!(
            "schedule (rho0 = {}, delta0 = {}) does not match the ledger (rho = {rho}, delta = {delta})",
            schedule.rho0, schedule.delta0
        )));
    }
    if !(3.0 * delta < rho - schedule.rho_inf) {
        return Err(KamError::Hypothesis { name: "delta".into(), detail: format!("delta = {delta} must be below (rho - rho_inf)/3") });
    }
    if controls.mu != ledger.get("mu")? || controls.mu_e != ledger.get("mu_E")? || controls.mu_eta_n != ledger.get("mu_etaN")? {
        return Err(KamError::Invalid("control constants differ from the ones in the ledger".into()));
    }
    if measured.rho != rho {
        return Err(KamError::StaleNorms { measured: measured.rho, measured_delta: delta, expected: rho, expected_delta: delta });
    }

    let t = "table4";
    let l = ledger;
    l.input("rho_inf", schedule.rho_inf)?;
    l.def(t, "a", &["rho", "rho_inf", "delta"], |v| (v[0] - v[1]) / (v[0] - 3.0 * v[2] - v[1]))?;
    let q_etan = l.def(t, "Q_etan", &["Q_etanL", "a", "tau", "Q_etanN"], |v| v[0].max(v[1].powf(v[2]) * v[3]))?;
    l.def(t, "C*_DeltaK", &["a", "mu_E", "C_DeltaKn"], |v| v[0] / (v[0] - v[1]) * v[2])?;
    for (star, n) in [
        ("C*_DeltaDK", "C_DeltaDKn"),
        ("C*_DeltaDKT", "C_DeltaDKnT"),
        ("C*_DeltaB", "C_DeltaBn"),
        ("C*_DeltaN", "C_DeltaNn"),
        ("C*_DeltaNT", "C_DeltaNnT"),
        ("C*_DeltaiT", "C_DeltaiTn"),
    ] {
        l.def(t, star, &["mu_E", n], |v| v[1] / (1.0 - v[0]))?;
    }

    let m = measured;
    if !(m.dist > 0.0) {
        return Err(KamError::Hypothesis { name: "dist(K,dB0)".into(), detail: format!("torus norm {:.6e} reaches the bounds domain", m.k) });
    }
    let gaps = [
        ("gap_DK", gap("sigma_DK", l.get("sigma_DK")?, m.dk)?),
        ("gap_DKT", gap("sigma_DKT", l.get("sigma_DKT")?, m.dkt)?),
        ("gap_B", gap("sigma_B", l.get("sigma_B")?, m.b)?),
        ("gap_N", gap("sigma_N", l.get("sigma_N")?, m.n)?),
        ("gap_NT", gap("sigma_NT", l.get("sigma_NT")?, m.nt)?),
        ("gap_Tinv", gap("sigma_Tinv", l.get("sigma_Tinv")?, m.tinv)?),
    ];
    l.input("dist(K,dB0)", m.dist)?;
    for (name, g) in gaps {
        l.input(name, g)?;
    }

    let inner = vec![
        l.def(t, INNER_TERMS[0], &["gamma*delta^tau", "C_sym", "mu"], |v| v[0] * v[1].max(1.0) / v[2])?,
        l.get(INNER_TERMS[1])?,
        l.def(t, INNER_TERMS[2], &["delta", "C*_DeltaK", "dist(K,dB0)"], |v| v[0] * v[1] / v[2])?,
        l.def(t, INNER_TERMS[3], &["C*_DeltaDK", "gap_DK"], |v| v[0] / v[1])?,
        l.def(t, INNER_TERMS[4], &["C*_DeltaDKT", "gap_DKT"], |v| v[0] / v[1])?,
        l.def(t, INNER_TERMS[5], &["C*_DeltaB", "gap_B"], |v| v[0] / v[1])?,
        l.def(t, INNER_TERMS[6], &["C*_DeltaN", "gap_N"], |v| v[0] / v[1])?,
        l.def(t, INNER_TERMS[7], &["C*_DeltaNT", "gap_NT"], |v| v[0] / v[1])?,
        l.def(t, INNER_TERMS[8], &["C*_DeltaiT", "gap_Tinv"], |v| v[0] / v[1])?,
        l.def(t, INNER_TERMS[9], &["mu_etaN"], |v| 1.0 / v[0])?,
        l.def(t, INNER_TERMS[10], &["a", "tau", "Q_etan", "mu_E"], |v| v[0].powf(v[1] + 1.0) * v[2] / v[3])?,
    ];
    let c_theo_e = l.def(t, "C_theoE", &INNER_TERMS, |v| v.iter().copied().fold(0.0, f64::max))?;
    Ok(FinalConstants { a: l.get("a")?, q_etan, c_theo_e, inner, measured: *m })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerTerm {
    pub label: String,
    pub value: f64,
    /// `value * eps / (gamma delta^{tau+1})`.
    pub condition: f64,
}

/// Upper bounds for the distance between the limit objects and the initial ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessRadii {
    pub k: f64,
    pub dk: f64,
    pub dkt: f64,
    pub b: f64,
    pub n: f64,
    pub nt: f64,
    pub tinv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KamReport {
    pub epsilon: f64,
    pub rho: f64,
    pub delta: f64,
    pub c_theo_e: f64,
    /// `C_theoE eps / (gamma delta^{tau+1})`.
    pub v: f64,
    pub pass: bool,
    pub inner: Vec<InnerTerm>,
    pub binding: String,
    pub radii: Option<ClosenessRadii>,
    /// Constants that were set equal to the condition numbers.
    pub bound_constants: Vec<String>,
    /// False when the system bounds were sampled.
    pub rigorous: bool,
}

/// Evaluates the KAM condition for `state`, whose norms must be measured on the ledger's strip.
pub fn check_kam(state: &TorusState, ledger: &ConstantLedger, fin: &FinalConstants, rigorous: bool) -> Result<KamReport> {
    let (rho, delta) = (ledger.get("rho")?, ledger.get("delta")?);
    let w = &state.weighted_error;
    if w.rho != rho || w.delta != delta || fin.measured.rho != rho {
        return Err(KamError::StaleNorms { measured: w.rho, measured_delta: w.delta, expected: rho, expected_delta: delta });
    }
    let eps = w.value;
    let gd = ledger.get("gamma*delta^tau")?;
    let scale = eps / (gd * delta);
    let inner: Vec<InnerTerm> = INNER_TERMS.iter().zip(&fin.inner).map(|(l, &v)| InnerTerm { label: l.to_string(), value: v, condition: v * scale }).collect();
    let binding = inner.iter().max_by(|a, b| a.value.total_cmp(&b.value)).map(|t| t.label.clone()).unwrap_or_default();
    let v = fin.c_theo_e * scale;
    let pass = v < 1.0;
    let radii = if pass {
        Some(ClosenessRadii {
            k: ledger.get("C*_DeltaK")? * eps / gd,
            dk: ledger.get("C*_DeltaDK")? * scale,
            dkt: ledger.get("C*_DeltaDKT")? * scale,
            b: ledger.get("C*_DeltaB")? * scale,
            n: ledger.get("C*_DeltaN")? * scale,
            nt: ledger.get("C*_DeltaNT")? * scale,
            tinv: ledger.get("C*_DeltaiT")? * scale,
        })
    } else {
        None
    };
    Ok(KamReport {
        epsilon: eps,
        rho,
        delta,
        c_theo_e: fin.c_theo_e,
        v,
        pass,
        inner,
        binding,
        radii,
        bound_constants: ["C_L = sigma_L", "C_N = sigma_N", "C_LT = sigma_LT", "C_NT = sigma_NT"].map(String::from).to_vec(),
        rigorous,
    })
}
