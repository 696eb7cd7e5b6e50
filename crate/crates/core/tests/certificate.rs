mod common;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use kamtorus::certificate::*;
use kamtorus::fourier::StripSchedule;
use kamtorus::linalg::{inverse, row_norm};
use kamtorus::KamError;

const CATALAN: f64 = 0.915_965_594_177_219;

#[test]
fn hurwitz_zeta_quarter_points() {
    // zeta(2, 1/4) = pi^2 + 8G, zeta(2, 3/4) = pi^2 - 8G
    assert!((hurwitz_zeta(2.0, 0.25) - (PI * PI + 8.0 * CATALAN)).abs() < 1e-12);
    assert!((hurwitz_zeta(2.0, 0.75) - (PI * PI - 8.0 * CATALAN)).abs() < 1e-12);
    assert!((hurwitz_zeta(2.0, 1.0) - 1.644_934_066_848_226).abs() < 1e-12);
    // zeta(3, 1) is Apery's constant
    assert!((hurwitz_zeta(3.0, 1.0) - 1.202_056_903_159_594).abs() < 1e-12);
}

#[test]
fn incomplete_gamma_against_statrs() {
    for &a in &[0.0, 1.0, 2.0, 1.5, 2.5, 3.7] {
        for &x in &[0.0, 0.1, 1.0, 3.0, 7.5, 25.0, 60.0] {
            let ours = upper_incomplete_gamma_integral(x, a);
            let s = a + 1.0;
            let oracle = if x == 0.0 { statrs::function::gamma::gamma(s) } else { statrs::function::gamma::gamma_ur(s, x) * statrs::function::gamma::gamma(s) };
            assert!((ours - oracle).abs() <= 1e-12 * oracle.abs().max(1e-300) + 1e-300, "a = {a}, x = {x}: {ours} vs {oracle}");
        }
    }
    assert_eq!(upper_incomplete_gamma_integral(0.0, 2.0), 2.0);
}

#[test]
fn uniform_russmann_constant() {
    let c = russmann_hat(2, 1.0);
    let closed = (2.0 * (PI * PI / 6.0 - 1.0) * 2.0 / PI.powi(4)).sqrt();
    assert!((c - closed).abs() < 1e-14);
    assert!((c - 0.16274).abs() < 1e-4);
    assert_eq!(derivative_factor(1.0), 4.0);
    for tau in [1.0, 1.5, 2.0, 3.0] {
        assert!(derivative_factor(tau) <= 2f64.powf(tau + 1.0) + 1e-12);
    }
}

/// Finite part of `c_R(delta, m)^2` by a box loop over all `k`.
fn direct_sum(delta: f64, m: i64, gamma: f64, tau: f64, omega: &[f64]) -> f64 {
    let mut s = 0.0;
    for k1 in -m..=m {
        for k2 in -m..=m {
            let o = k1.abs() + k2.abs();
            if o == 0 || o > m {
                continue;
            }
            let kw = k1 as f64 * omega[0] + k2 as f64 * omega[1];
            s += (-4.0 * PI * o as f64 * delta).exp() / (2.0 * PI * kw).powi(2);
        }
    }
    gamma * gamma * delta.powf(2.0 * tau) * 4.0 * s
}

#[test]
fn sharp_constant_matches_direct_summation() {
    let dio = diophantine_to(2000);
    let shells = ShellSums::new(&dio, 60).unwrap();
    for delta in [0.005, 0.01, 0.05] {
        let b = c_r(delta, 60, &dio, &shells).unwrap();
        let oracle = direct_sum(delta, 60, dio.gamma, dio.tau, &dio.omega);
        assert!((b.finite_sum - oracle).abs() <= 1e-12 * oracle, "{} vs {oracle}", b.finite_sum);
        assert!((b.value - (b.finite_sum + b.tail).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn sharp_constant_nonincreasing_and_below_uniform() {
    let dio = diophantine_to(2000);
    let shells = ShellSums::new(&dio, 2000).unwrap();
    let hat = russmann_hat(2, 1.0);
    for delta in [0.005, 0.01, 0.1] {
        let mut prev = f64::INFINITY;
        for m in [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000] {
            let c = c_r(delta, m, &dio, &shells).unwrap().value;
            assert!(c <= prev * (1.0 + 1e-12), "delta = {delta}: c_R({m}) = {c} > {prev}");
            prev = c;
        }
        assert!(prev <= hat, "delta = {delta}: {prev} > {hat}");
    }
    let r = compute_russmann(0.01, Some(2000), &dio).unwrap();
    assert!(r.c1_r <= r.c1_hat && r.c1_hat == 4.0 * r.c_hat);
    assert!(c_r(0.01, 10, &dio, &shells).unwrap().value >= r.c_r);
}

#[test]
fn small_bites_break_monotonicity_at_resonant_shells() {
    // the tail of order m + 1 is smaller than the shell of the near-resonant k = (-3, 2)
    let dio = diophantine_to(2000);
    let shells = ShellSums::new(&dio, 2000).unwrap();
    let at = |m| c_r(0.001, m, &dio, &shells).unwrap();
    assert!(at(5).value > at(4).value);
    // every truncation still dominates the converged sum
    let full = at(2000).finite_sum.sqrt();
    for m in 1..2000 {
        assert!(at(m).value >= full, "m = {m}");
    }
}

#[test]
fn default_m_is_the_first_with_a_small_tail() {
    let dio = diophantine_to(2000);
    let m = default_m(0.01, &dio).unwrap();
    let shells = ShellSums::new(&dio, m).unwrap();
    let at = c_r(0.01, m, &dio, &shells).unwrap();
    let before = c_r(0.01, m - 1, &dio, &shells).unwrap();
    assert!(at.tail < 1e-2 * at.finite_sum);
    assert!(before.tail >= 1e-2 * before.finite_sum);
    assert_eq!(default_m(0.01, &diophantine_to(20)).unwrap(), 20);
}

#[test]
fn russmann_refuses_unverified_orders() {
    let dio = diophantine_to(50);
    assert!(matches!(compute_russmann(0.01, Some(51), &dio), Err(KamError::BeyondCutoff { order: 51, cutoff: 50 })));
}

fn oscillator_scenario(russ_mode: RussmannMode) -> Certified {
    static SHARP: OnceLock<Certified> = OnceLock::new();
    static UNIFORM: OnceLock<Certified> = OnceLock::new();
    let cell = if russ_mode == RussmannMode::Sharp { &SHARP } else { &UNIFORM };
    cell.get_or_init(|| evaluate_scenario(russ_mode)).clone()
}

fn evaluate_scenario(russ_mode: RussmannMode) -> Certified {
    let fam = small_oscillator(1e-3);
    let (k0, _) = fam.exact_torus(&space(8, 32), &SMALL[..2]).unwrap();
    let dio = diophantine_to(400);
    let russ = RussmannInputs::new(russ_mode, 0.01, 0.1, None, &dio).unwrap();
    certify(&k0, &fam.system(), &dio, &russ, 2.0).unwrap()
}

/// Second evaluation of Tables 1 to 4 from the ledger inputs, written out long-hand.
fn spreadsheet(input: impl Fn(&str) -> f64) -> HashMap<&'static str, f64> {
    let (d, n, tau, gamma, rho, delta, rho_inf) = (input("d"), input("n"), input("tau"), input("gamma"), input("rho"), input("delta"), input("rho_inf"));
    let gd = gamma * delta.powf(tau);
    let c = |s: &str| input(s);
    let (c_omega, c_g, c_j, c_jt, c_domega, c_dg, c_dj, c_djt) = (c("c_Omega"), c("c_G"), c("c_J"), c("c_JT"), c("c_DOmega"), c("c_DG"), c("c_DJ"), c("c_DJT"));
    let (c_xh, c_dxh, c_dxht, c_d2xh, c_th, c_dth) = (c("c_Xh"), c("c_DXh"), c("c_DXhT"), c("c_D2Xh"), c("c_Th"), c("c_DTh"));
    let (c_xp, c_dxp, c_xpt, c_dxpt, c_dphi) = (c("c_Xp"), c("c_DXp"), c("c_XpT"), c("c_DXpT"), c("c_DPhi"));
    let (s_dk, s_dkt, s_b, s_n, s_nt, s_ti) = (c("sigma_DK"), c("sigma_DKT"), c("sigma_B"), c("sigma_N"), c("sigma_NT"), c("sigma_Tinv"));
    let (mu, mu_e, mu_en) = (c("mu"), c("mu_E"), c("mu_etaN"));
    let (cr, c1r, crr) = (c("c_R(delta)"), c("c1_R(delta)"), c("c_R(rho)"));
    let s_l = s_dk + c_xp;
    let s_lt = s_dkt.max(c_xpt);
    let (cl, cn, clt, cnt) = (s_l, s_n, s_lt, s_nt);
    let mut o = HashMap::new();

    // Table 1
    let comega_l = (d + n - 2.0) * c1r;
    let comega_n = s_b * s_b * comega_l;
    o.insert("C_sym", comega_l.max(comega_n));
    let cle = (cl + cn * mu) / (1.0 - mu * mu);
    let cne = (cn + cl * mu) / (1.0 - mu * mu);
    let ce = cle + gd * cne;
    let clet = n * (clt + mu * cnt) / (1.0 - mu * mu);
    let cnet = n * (cnt + mu * clt) / (1.0 - mu * mu);
    o.insert("C_ET", clet + gd * cnet);
    let f_de = d * (1.0 + c_omega * (cnt * cle + clt * cne));
    let cde = f_de * cle + gd * f_de * cne;
    let f_det = n * (1.0 + c_omega * (cn * clet + cl * cnet));
    let cdet = f_det * clet + gd * f_det * cnet;
    let clie_k = ce * delta * mu + c_xh;
    let clie_l = cde * mu + c_dxp * ce * delta * mu + c_dxh * cl;
    let clie_lt = (cdet * mu).max(c_dxpt * ce * delta * mu) + clt * c_dxht;
    let clie_gl = clie_lt * c_g * cl + clt * c_dg * clie_k * cl + clt * c_g * clie_l;
    let clie_b = s_b * s_b * clie_gl;
    let clie_n = c_dj * clie_k * cl * s_b + c_j * clie_l * s_b + c_j * cl * clie_b;
    let ct = cnt * c_th * cn;
    let w = d + delta * c_dxp;
    o.insert("C_EredLL^L", d + w * cnt * c_omega * cle);
    let cnl_l = w * clt * c_omega * cle;
    let cnl_n = d + w * clt * c_omega * cne;
    let cnn_l = delta * clt * c_domega * cle * cn + (n + d * cle * c_omega * cnt).max(delta * c_dxpt * cle * c_omega * cn);
    let cnn_n = delta * clt * c_domega * cne * cn + (d * cne * c_omega * cnt).max(delta * c_dxpt * cne * c_omega * cn);
    let cnn = cnn_l + gd * cnn_n;
    let cln_l = delta * s_b * s_b * clt * c_g * c_dj * cl * cle + s_b * s_b * cnl_l;
    let cln_n = gamma * delta.powf(tau + 1.0) * s_b * s_b * clt * c_g * c_dj * cl * cne + gd * s_b * s_b * cnl_n + s_b * comega_l * clie_b;
    let cln = cln_l + cln_n;
    o.insert("C_EredLN", cln);
    o.insert("C_LieN", clie_n);

    // Table 2
    let avg_l = s_ti;
    let avg_n = (delta / rho).powf(tau) * s_ti * ct * crr;
    let xin_l = avg_l;
    let xin_n = avg_n + cr;
    let xin = xin_l + xin_n;
    let dki_l = cn * xin_l;
    let dki_n = cn * xin_n;
    let dki = dki_l + dki_n;
    let ddki_l = d * cn * avg_l;
    let ddki_n = d * cn * (avg_n + c1r);
    let ddkit_l = n * cnt * avg_l;
    let ddkit_n = n * cnt * (avg_n + c1r);
    let dli = (ddki_l + delta * c_dxp * dki_l) + (ddki_n + delta * c_dxp * dki_n);
    let dlit = ddkit_l.max(delta * c_dxpt * dki_l) + ddkit_n.max(delta * c_dxpt * dki_n);
    let ei_l = cle + c_dxh * dki_l + clie_n * xin_l;
    let ei_n = gd * (cne + s_n) + c_dxh * dki_n + clie_n * xin_n;
    let ei = ei_l + ei_n;
    let q_etai_n = (dlit * c_omega + delta * clt * c_domega * dki) * ei + cnn * xin + delta * clt * c_omega * 0.5 * c_d2xh * dki * dki;
    o.insert("Q_etaiN", q_etai_n);

    // Table 3
    let xil_l = cr * (1.0 + ct * xin_l);
    let xil_n = cr * ct * xin_n;
    let xil = xil_l + xil_n;
    let dkn_l = c_dphi * cl * xil_l + gd * dki_l;
    let dkn_n = c_dphi * cl * xil_n + gd * dki_n;
    let ddkn_l = d * c_dphi * cl * xil_l + gd * ddki_l;
    let ddkn_n = d * c_dphi * cl * xil_n + gd * ddki_n;
    let ddknt_l = 2.0 * n * c_dphi * cl * xil_l + gd * ddkit_l;
    let ddknt_n = 2.0 * n * c_dphi * cl * xil_n + gd * ddkit_n;
    let dln_l = ddkn_l + delta * c_dxp * dkn_l;
    let dln_n = ddkn_n + delta * c_dxp * dkn_n;
    let dlnt_l = ddknt_l.max(delta * c_dxpt * dkn_l);
    let dlnt_n = ddknt_n.max(delta * c_dxpt * dkn_n);
    let dgl = |lnt: f64, kn: f64, ln: f64| lnt * c_g * cl + delta * clt * c_dg * kn * cl + clt * c_g * ln;
    let (dgl_l, dgl_n) = (dgl(dlnt_l, dkn_l, dln_l), dgl(dlnt_n, dkn_n, dln_n));
    let (dbn_l, dbn_n) = (s_b * s_b * dgl_l, s_b * s_b * dgl_n);
    let dbn = s_b * s_b * (dgl_l + dgl_n);
    let dnn_f = |kn: f64, ln: f64, bn: f64| delta * c_dj * kn * cl * s_b + c_j * ln * s_b + c_j * cl * bn;
    let (dnn_l, dnn_n) = (dnn_f(dkn_l, dln_l, dbn_l), dnn_f(dkn_n, dln_n, dbn_n));
    let dnnt_f = |kn: f64, ln: f64, bn: f64| delta * s_b * cl * c_djt * kn + s_b * ln * c_jt + bn * cl * c_jt;
    let (dnnt_l, dnnt_n) = (dnnt_f(dkn_l, dln_l, dbn_l), dnnt_f(dkn_n, dln_n, dbn_n));
    let dtn_f = |nnt: f64, kn: f64, nn: f64| nnt * c_th * cn + delta * cnt * c_dth * kn * cn + cnt * c_th * nn;
    let dtn = dtn_f(dnnt_l, dkn_l, dnn_l) + dtn_f(dnnt_n, dkn_n, dnn_n);
    let ditn = s_ti * s_ti * dtn;
    let liexil_l = 1.0 + ct * xin_l;
    let liexil_n = ct * xin_n;
    let liexil = liexil_l + liexil_n;
    let en = c_dphi * (ei_l + s_l * liexil_l) + c_dphi * (ei_n + s_l * liexil_n);
    let q_etan_n = (1.0 + n) * (1.0 + comega_l * liexil * mu_en) * q_etai_n;
    let dkn = dkn_l + dkn_n;
    let dnnt = dnnt_l + dnnt_n;
    let q1 = cln * xin + delta * cnt * c_omega * 0.5 * c_d2xh * dki * dki + gd * comega_n;
    let q2 = cnt * c_omega * d * ei * xil;
    let q3 = cnt * c_omega * (d * s_l * xil + gd * dli) * liexil;
    let q4 = cnt * c_omega * c_dxp * c_dphi * xil * (ei + s_l * liexil);
    let q5 = (dnnt * c_omega + delta * cnt * c_domega * dkn) * en;
    let q_etan_l = gd * q1 + q2 + q3 + delta * q4 + q5;
    o.insert("C_xiL", xil);
    o.insert("C_DeltaiTn", ditn);
    o.insert("C_En", en);
    o.insert("Q_etanN", q_etan_n);
    o.insert("Q_etanL", q_etan_l);

    // Table 4
    let a = (rho - rho_inf) / (rho - 3.0 * delta - rho_inf);
    let q_hat = q_etan_l.max(a.powf(tau) * q_etan_n);
    let star = 1.0 / (1.0 - mu_e);
    let (dist, g_dk, g_dkt, g_b, g_n, g_nt, g_ti) = (c("dist(K,dB0)"), c("gap_DK"), c("gap_DKT"), c("gap_B"), c("gap_N"), c("gap_NT"), c("gap_Tinv"));
    let terms = [
        gd * comega_l.max(comega_n).max(1.0) / mu,
        xil,
        delta * a / (a - mu_e) * dkn / dist,
        star * (ddkn_l + ddkn_n) / g_dk,
        star * (ddknt_l + ddknt_n) / g_dkt,
        star * dbn / g_b,
        star * (dnn_l + dnn_n) / g_n,
        star * dnnt / g_nt,
        star * ditn / g_ti,
        1.0 / mu_en,
        a.powf(tau + 1.0) * q_hat / mu_e,
    ];
    o.insert("a", a);
    o.insert("Q_etan", q_hat);
    o.insert("C*_DeltaK", a / (a - mu_e) * dkn);
    o.insert("C_theoE", terms.iter().copied().fold(0.0, f64::max));
    o
}

#[test]
fn ledger_agrees_with_spreadsheet_oracle() {
    for mode in [RussmannMode::Sharp, RussmannMode::Uniform] {
        let c = oscillator_scenario(mode);
        let sheet = spreadsheet(|label| {
            let e = c.ledger.entry(label).unwrap_or_else(|| panic!("missing input {label}"));
            assert_eq!(e.table, "input", "{label} is not an input");
            e.value
        });
        for (label, v) in sheet {
            let ours = c.ledger.get(label).unwrap();
            assert!((ours - v).abs() <= 1e-12 * v.abs(), "{label}: ledger {ours} vs oracle {v}");
        }
    }
}

#[test]
fn ledger_rows_are_finite_and_topologically_ordered() {
    let c = oscillator_scenario(RussmannMode::Sharp);
    let mut seen = std::collections::HashSet::new();
    for (label, e) in c.ledger.iter() {
        assert!(e.value.is_finite() && e.value >= 0.0, "{label} = {}", e.value);
        for dep in &e.deps {
            assert!(seen.contains(dep.as_str()), "{label} reads {dep} before it is defined");
        }
        assert_eq!(e.deps.is_empty(), e.table == "input" && !label.starts_with("sigma_L") && !label.starts_with("C_"), "{label}");
        seen.insert(label);
    }
    for label in [
        "C_OmegaL^N", "C_OmegaN^N", "C_sym", "C_E^L", "C_E^N", "C_ET", "C_DE", "C_DET", "C_LieK", "C_LieL", "C_LieLT", "C_LieGL", "C_LieB", "C_LieN", "C_T",
        "C_EredLL^L", "C_EredNL^N", "C_EredNN", "C_EredLN", "C_avg_xiN", "C_xiN", "C_DeltaKi", "C_DeltaDKi", "C_DeltaLi", "C_Ei", "Q_etaiN", "C_xiL",
        "C_DeltaKn", "C_DeltaDKn", "C_DeltaDKnT", "C_DeltaLn", "C_DeltaLnT", "C_DeltaGLn", "C_DeltaBn", "C_DeltaNn", "C_DeltaNnT", "C_DeltaTn",
        "C_DeltaiTn", "C_LiexiL", "C_En", "Q_etanN", "Q_etanL1", "Q_etanL5", "Q_etanL", "a", "Q_etan", "C*_DeltaK", "C*_DeltaDK", "C*_DeltaDKT",
        "C*_DeltaB", "C*_DeltaN", "C*_DeltaNT", "C*_DeltaiT", "C_theoE",
    ] {
        assert!(c.ledger.contains(label), "missing {label}");
    }
    assert_eq!(c.ledger.entry("C_sym").unwrap().deps, ["C_OmegaL^N", "C_OmegaN^N"]);
    let json: serde_json::Value = serde_json::from_str(&c.ledger.to_json().unwrap()).unwrap();
    assert_eq!(json["Q_etanL"]["value"].as_f64().unwrap(), c.ledger.get("Q_etanL").unwrap());
}

#[test]
fn ledger_is_bit_identical_on_repeat() {
    let a = evaluate_scenario(RussmannMode::Sharp);
    let b = evaluate_scenario(RussmannMode::Sharp);
    for ((la, ea), (lb, eb)) in a.ledger.iter().zip(b.ledger.iter()) {
        assert_eq!(la, lb);
        assert_eq!(ea.value.to_bits(), eb.value.to_bits(), "{la}");
    }
}

#[test]
fn uniform_omega_row_and_small_mu_limit() {
    let c = oscillator_scenario(RussmannMode::Uniform);
    let row = c.ledger.get("C_OmegaL^N").unwrap();
    assert!((row - 2.0 * 4.0 * russmann_hat(2, 1.0)).abs() < 1e-14);
    assert!(row <= 1.3020);

    let fam = small_oscillator(1e-3);
    let sys = fam.system();
    let bounds = bounds_for(&sys);
    let sigma = ConditionNumbers { sigma_dk: 2.0, sigma_dkt: 3.0, sigma_b: 4.0, sigma_n: 5.0, sigma_nt: 6.0, sigma_tinv: 7.0 };
    let dio = diophantine_to(16);
    let russ = RussmannInputs::new(RussmannMode::Uniform, 0.01, 0.1, None, &dio).unwrap();
    let tiny = ControlConstants { mu: 1e-300, mu_e: 0.5, mu_eta_n: 1.0 };
    let l = assemble_tables(&bounds, &sigma, &tiny, &dio, Dimensions { d: 2, n: 2 }, 0.1, 0.01, &russ).unwrap();
    assert_eq!(l.get("C_E^L").unwrap(), l.get("C_L").unwrap());
    assert_eq!(l.get("C_E^N").unwrap(), l.get("C_N").unwrap());
    let bad = ControlConstants { mu: 1.0, ..tiny };
    assert!(matches!(assemble_tables(&bounds, &sigma, &bad, &dio, Dimensions { d: 2, n: 2 }, 0.1, 0.01, &russ), Err(KamError::Hypothesis { .. })));
}

#[test]
fn table_four_limits_and_strip_checks() {
    let mut c = oscillator_scenario(RussmannMode::Sharp);
    assert!((c.fin.a - 2.0).abs() < 1e-14);
    assert_eq!(c.ledger.get("a").unwrap(), c.fin.a);

    // mu_E -> 0 leaves C*_DeltaK = C_DeltaKn
    let fam = small_oscillator(1e-3);
    let sys = fam.system();
    let bounds = bounds_for(&sys);
    let sigma = ConditionNumbers::with_margin(&c.fin.measured, 2.0);
    let controls = ControlConstants { mu_e: 1e-12, ..CONTROLS };
    let dio = diophantine_to(400);
    let russ = RussmannInputs::new(RussmannMode::Sharp, 0.01, 0.1, None, &dio).unwrap();
    let mut l = assemble_tables(&bounds, &sigma, &controls, &dio, Dimensions { d: 2, n: 2 }, 0.1, 0.01, &russ).unwrap();
    final_constants(&mut l, &schedule(), &controls, &c.fin.measured).unwrap();
    let (star, kn) = (l.get("C*_DeltaK").unwrap(), l.get("C_DeltaKn").unwrap());
    assert!((star - kn).abs() <= 1e-11 * kn);

    let wide = StripSchedule { rho0: 0.1, rho_inf: 0.04, delta0: 0.01, ratio_a: 2.0 };
    let mut narrow_ledger = assemble_tables(&bounds, &sigma, &CONTROLS, &dio, Dimensions { d: 2, n: 2 }, 0.1, 0.01, &russ).unwrap();
    let narrow = StripSchedule { rho_inf: 0.075, ..wide };
    assert!(matches!(final_constants(&mut narrow_ledger, &narrow, &CONTROLS, &c.fin.measured), Err(KamError::Hypothesis { .. })));

    // a condition number below its measured norm
    let tight = ConditionNumbers { sigma_b: 0.5 * c.fin.measured.b, ..sigma };
    let mut l = assemble_tables(&bounds, &tight, &CONTROLS, &dio, Dimensions { d: 2, n: 2 }, 0.1, 0.01, &russ).unwrap();
    match final_constants(&mut l, &schedule(), &CONTROLS, &c.fin.measured) {
        Err(KamError::Hypothesis { name, .. }) => assert_eq!(name, "sigma_B"),
        other => panic!("expected a hypothesis failure, got {other:?}"),
    }

    // norms from another strip
    c.state.weighted_error.rho = 0.07;
    assert!(matches!(check_kam(&c.state, &c.ledger, &c.fin, true), Err(KamError::StaleNorms { .. })));
}

#[test]
fn zero_error_passes_with_zero_radii() {
    let mut c = oscillator_scenario(RussmannMode::Sharp);
    c.state.weighted_error.value = 0.0;
    let r = check_kam(&c.state, &c.ledger, &c.fin, true).unwrap();
    assert_eq!(r.v, 0.0);
    assert!(r.pass);
    let radii = r.radii.unwrap();
    assert_eq!([radii.k, radii.dk, radii.dkt, radii.b, radii.n, radii.nt, radii.tinv], [0.0; 7]);
    assert_eq!(r.inner.len(), 11);
    assert_eq!(r.bound_constants.len(), 4);
}

#[test]
fn report_exposes_the_binding_term() {
    let c = oscillator_scenario(RussmannMode::Sharp);
    let r = &c.report;
    let max = r.inner.iter().map(|t| t.value).fold(0.0, f64::max);
    assert_eq!(max, r.c_theo_e);
    assert_eq!(r.inner.iter().find(|t| t.value == max).unwrap().label, r.binding);
    let gd1 = c.ledger.get("gamma").unwrap() * 0.01f64.powi(2);
    assert!((r.v - r.c_theo_e * r.epsilon / gd1).abs() <= 1e-12 * r.v);
    assert_eq!(r.pass, r.v < 1.0);
    assert_eq!(r.pass, r.inner.iter().all(|t| t.condition < 1.0));
    let json: serde_json::Value = serde_json::to_value(r).unwrap();
    assert!(json["v"].is_number() && json["inner"].as_array().unwrap().len() == 11);
}

#[test]
fn loose_normal_sigma_is_only_a_warning() {
    let sys = small_oscillator(1e-3).system();
    let bounds = bounds_for(&sys);
    let tight = ConditionNumbers { sigma_dk: 1.0, sigma_dkt: 1.0, sigma_b: 1.0, sigma_n: 0.0, sigma_nt: 0.0, sigma_tinv: 1.0 };
    assert!(tight.warnings(&bounds).is_empty());
    let derived = bounds.c_j * tight.sigma_l(&bounds) * tight.sigma_b;
    let loose = ConditionNumbers { sigma_n: 2.0 * derived, ..tight };
    let w = loose.warnings(&bounds);
    assert_eq!(w.len(), 1);
    assert!(w[0].starts_with("sigma_N"));
}

#[test]
fn neumann_examples() {
    let m = DMatrix::<f64>::identity(3, 3);
    match neumann_inverse_check(&m, &(1.1 * &m), 2.0).unwrap() {
        NeumannVerdict::Invertible { inverse_bound, difference_bound } => {
            assert_eq!(inverse_bound, 2.0);
            assert!((difference_bound - 0.2).abs() < 1e-15);
            assert!(1.0 / 1.1 < inverse_bound);
        }
        v => panic!("{v:?}"),
    }
    match neumann_inverse_check(&m, &m, 2.0).unwrap() {
        NeumannVerdict::Invertible { difference_bound, .. } => assert_eq!(difference_bound, 0.0),
        v => panic!("{v:?}"),
    }
    assert!(matches!(neumann_inverse_check(&m, &(3.0 * &m), 2.0).unwrap(), NeumannVerdict::Indeterminate { .. }));
    assert!(matches!(neumann_inverse_check(&DMatrix::zeros(3, 3), &m, 2.0), Err(KamError::Singular)));
    assert!(matches!(neumann_inverse_check(&m, &m, 0.5), Err(KamError::Hypothesis { .. })));
}

#[test]
fn neumann_indeterminate_near_the_edge() {
    // |M^-1||dM| close to 1: the lemma gives up even when M_bar is invertible
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut indeterminate = 0;
    for _ in 0..200 {
        let m = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 } + rng.gen_range(-0.3..0.3));
        let Ok(inv) = inverse(&m) else { continue };
        let dm = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let dm = dm.scale(0.95 / (row_norm(&inv) * row_norm(&dm)));
        if let NeumannVerdict::Indeterminate { smallness } = neumann_inverse_check(&m, &(&m + dm), 1.5 * row_norm(&inv)).unwrap() {
            assert!(smallness >= 1.0);
            indeterminate += 1;
        }
    }
    assert!(indeterminate > 150);
}

fn matrix(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| DMatrix::from_vec(n, n, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn neumann_bounds_hold_when_claimed(base in matrix(3), pert in matrix(3), scale in 1e-4f64..0.5, slack in 1.01f64..4.0) {
        let m = DMatrix::<f64>::identity(3, 3) * 2.0 + base;
        prop_assume!(inverse(&m).is_ok());
        let inv = inverse(&m).unwrap();
        let sigma = slack * row_norm(&inv);
        let m_bar = &m + pert * scale;
        if let NeumannVerdict::Invertible { inverse_bound, difference_bound } = neumann_inverse_check(&m, &m_bar, sigma).unwrap() {
            let inv_bar = inverse(&m_bar).unwrap();
            prop_assert!(row_norm(&inv_bar) < inverse_bound);
            prop_assert!(row_norm(&(inv_bar - inv)) <= difference_bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sharp_constant_nonincreasing_in_m(delta in 0.005f64..0.2, m in 1usize..150, step in 1usize..50) {
        let dio = diophantine_to(200);
        let shells = ShellSums::new(&dio, 200).unwrap();
        let a = c_r(delta, m, &dio, &shells).unwrap().value;
        let b = c_r(delta, m + step, &dio, &shells).unwrap().value;
        prop_assert!(b <= a * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn smaller_error_never_flips_a_pass(s in 0.0f64..1.0, boost in -40.0f64..0.0) {
        let mut c = oscillator_scenario(RussmannMode::Uniform);
        c.state.weighted_error.value = 10f64.powf(boost);
        let r = check_kam(&c.state, &c.ledger, &c.fin, true).unwrap();
        c.state.weighted_error.value *= s;
        let smaller = check_kam(&c.state, &c.ledger, &c.fin, true).unwrap();
        prop_assert!(smaller.v <= r.v);
        prop_assert!(!r.pass || smaller.pass);
    }
}
