//! One runner per scenario. Each fills a series table, the reported
//! quantities and the measured value for every checkable tolerance key.

use std::collections::BTreeMap;

use resonance::friedrichs::{
    characteristic_times, exact_pole, perturbative_pole, pole_background_split, survival_amplitude, FormFactor,
    FriedrichsError, FriedrichsModel, ResonancePole, SpectralOptions,
};
use resonance::leefriedrichs::{
    basis_convergence, decoherence_time_lf, gamma_eff_lf_truncated, offdiagonal_closed, offdiagonal_series, overlap,
    reduced_density, CoherentAmplitude, EffectiveModel, LeeFriedrichsError, SuperpositionState,
};
use resonance::multipole::{
    full_expectation, linearized_f, model2_modes, model2_offdiagonal, preferred_expectation, timescales, Mode,
    ModeSum,
};
use resonance::numerics::{fit_exponential_rate, fit_power_law, C64};
use resonance::oracle::{discretize, oracle_survival};

use crate::config::{time_grid, ComplexValue, Family, ModelConfig, Scenario, ScenarioConfig};
use crate::output::{complex, number, time, Quantities, Table};
use crate::CliError;

pub struct Outcome {
    pub table: Table,
    pub quantities: Quantities,
    /// Measured value per tolerance key; a check passes when value ≤ tolerance.
    pub measured: BTreeMap<&'static str, f64>,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Self { table, quantities: Quantities::default(), measured: BTreeMap::new() }
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let times = time_grid(&cfg.time);
    let result = match cfg.scenario {
        Scenario::Pole => pole(cfg, &times),
        Scenario::Survival => survival(cfg, &times),
        Scenario::OracleCheck => oracle_check(cfg, &times),
        Scenario::Multipole => multipole(cfg, &times),
        Scenario::TwoPole => two_pole(cfg, &times),
        Scenario::LeeFriedrichs => lee_friedrichs(cfg, &times),
        Scenario::BasisConvergence => basis(cfg, &times),
    };
    result.map_err(|e| match e {
        Failure::Cli(c) => c,
        Failure::Msg(message) => CliError::Scenario { scenario: cfg.scenario.name(), message },
    })
}

enum Failure {
    Cli(CliError),
    Msg(String),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

macro_rules! impl_failure {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Msg(e.to_string())
            }
        }
    )*};
}
impl_failure!(
    FriedrichsError,
    LeeFriedrichsError,
    resonance::multipole::MultipoleError,
    resonance::oracle::OracleError,
    resonance::numerics::NumericsError
);

type Run = Result<Outcome, Failure>;

fn build_model(m: &ModelConfig) -> Result<FriedrichsModel, FriedrichsError> {
    let ff = match m.family {
        Family::ThresholdLorentzian => FormFactor::threshold_lorentzian(m.g, m.omega_c)?,
        Family::FlatCutoff => FormFactor::flat_cutoff(m.g, m.omega_c)?,
    };
    FriedrichsModel::new(m.omega0, ff)
}

fn spectral_options(m: &ModelConfig) -> SpectralOptions {
    let mut opts = SpectralOptions::default();
    if let Some(w) = m.omega_max {
        opts.omega_max = w;
    }
    opts
}

fn pole_json(p: &ResonancePole) -> serde_json::Value {
    serde_json::json!({
        "z0": complex(p.z()),
        "omega_prime": number(p.omega_prime),
        "gamma": number(p.gamma),
        "residue": complex(p.residue),
    })
}

/// Exact pole when the form factor continues analytically, else the second-order one.
fn best_pole(model: &FriedrichsModel) -> Result<ResonancePole, FriedrichsError> {
    match exact_pole(model) {
        Err(FriedrichsError::ContinuationUnavailable) => perturbative_pole(model),
        other => other,
    }
}

fn pole(cfg: &ScenarioConfig, times: &[f64]) -> Run {
    let model = build_model(cfg.model()?)?;
    let mut out = Outcome::new(Table::new(&[]));
    if model.is_free() {
        out.quantities.set("non_decaying", true);
        for &t in times {
            out.table.push(t, C64::new(0.0, -model.omega0 * t).exp(), &[]);
        }
        return Ok(out);
    }
    out.quantities.set("non_decaying", false);
    let pert = perturbative_pole(&model)?;
    out.quantities.set("perturbative", pole_json(&pert));
    let used = match exact_pole(&model) {
        Ok(exact) => {
            let gap = (exact.z() - pert.z()).norm();
            out.quantities.set("exact", pole_json(&exact));
            out.quantities.num("gap", gap);
            out.measured.insert("pole_gap", gap);
            exact
        }
        Err(FriedrichsError::ContinuationUnavailable) => {
            out.quantities.set("exact", serde_json::Value::Null);
            pert
        }
        Err(e) => return Err(e.into()),
    };
    // Probability decays at 2γ.
    let ct = characteristic_times(2.0 * used.gamma)?;
    out.quantities.set("characteristic_times", ct.iter().map(|&t| time(t)).collect::<Vec<_>>());
    for &t in times {
        out.table.push(t, used.pole_term(t), &[]);
    }
    Ok(out)
}

fn survival(cfg: &ScenarioConfig, times: &[f64]) -> Run {
    let mc = cfg.model()?;
    let model = build_model(mc)?;
    let opts = spectral_options(mc);
    let free = model.is_free();
    let split_available = !free && mc.family == Family::ThresholdLorentzian;
    let series = if split_available {
        pole_background_split(&model, times, &opts)?
    } else {
        survival_amplitude(&model, times, &opts)?
    };
    let extra: &[&str] = if split_available { &["pole_re", "pole_im", "background_re", "background_im"] } else { &[] };
    let mut out = Outcome::new(Table::new(extra));
    for (k, (&t, &a)) in times.iter().zip(&series.amplitude).enumerate() {
        match &series.split {
            Some(s) => {
                let (p, b) = (s.pole_part[k], s.background_part[k]);
                out.table.push(t, a, &[p.re, p.im, b.re, b.im]);
            }
            None => out.table.push(t, a, &[]),
        }
    }
    let deviation = series.amplitude.iter().map(|a| (a.norm() - 1.0).abs()).fold(0.0, f64::max);
    out.quantities.num("max_modulus_deviation", deviation);
    out.measured.insert("unit_modulus", deviation);
    if free {
        out.quantities.set("non_decaying", true);
        return Ok(out);
    }
    let pole = best_pole(&model)?;
    out.quantities.set("pole", pole_json(&pole));
    let probability: Vec<(f64, f64)> = times.iter().zip(&series.amplitude).map(|(&t, a)| (t, a.norm_sqr())).collect();
    if let Ok(fit) = fit_exponential_rate(&probability, (0.5 / pole.gamma, 3.0 / pole.gamma)) {
        let rel = (fit.rate_or_exponent / (2.0 * pole.gamma) - 1.0).abs();
        out.quantities.num("fitted_rate", fit.rate_or_exponent);
        out.quantities.num("fitted_rate_rel_error", rel);
        out.measured.insert("rate_rel", rel);
    }
    let khalfin = (30.0 / pole.gamma, 300.0 / pole.gamma);
    if let Ok(fit) = fit_power_law(&probability, khalfin) {
        out.quantities.num("khalfin_exponent", fit.rate_or_exponent);
        out.measured.insert("khalfin_slope", (fit.rate_or_exponent + 3.0).abs());
        if let Some(s) = &series.split {
            let inside = times.iter().enumerate().filter(|(_, &t)| t >= khalfin.0 && t <= khalfin.1);
            let dominated = inside.clone().all(|(k, _)| s.background_part[k].norm() > s.pole_part[k].norm());
            out.quantities.set("background_dominates_khalfin_window", dominated);
        }
    }
    Ok(out)
}

fn oracle_check(cfg: &ScenarioConfig, times: &[f64]) -> Run {
    let mc = cfg.model()?;
    let model = build_model(mc)?;
    let (modes, omega_max) = (mc.modes.unwrap_or_default(), mc.omega_max.unwrap_or_default());
    let d = discretize(&model, modes, omega_max)?;
    let orc = oracle_survival(&d, times)?;
    // The reference keeps its own (wider) truncation.
    let quad = survival_amplitude(&model, times, &SpectralOptions::default())?;
    let mut out = Outcome::new(Table::new(&["quad_re", "quad_im", "diff", "beyond_recurrence"]));
    let mut max_diff: f64 = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let (a, q) = (orc.amplitude[k], quad.amplitude[k]);
        let diff = (a - q).norm();
        if !orc.beyond_recurrence[k] {
            max_diff = max_diff.max(diff);
        }
        out.table.push(t, a, &[q.re, q.im, diff, f64::from(u8::from(orc.beyond_recurrence[k]))]);
    }
    out.quantities.set("modes", modes);
    out.quantities.num("omega_max", omega_max);
    out.quantities.num("recurrence_time", d.recurrence_time);
    out.quantities.set("samples_beyond_recurrence", orc.beyond_recurrence.iter().filter(|b| **b).count());
    out.quantities.num("max_diff", max_diff);
    out.measured.insert("max_diff", max_diff);
    Ok(out)
}

fn mode_sum(cfg: &ScenarioConfig) -> Result<ModeSum, Failure> {
    let modes = cfg.modes()?.iter().map(|m| Mode::new(m.c.get(), m.omega, m.gamma)).collect();
    let eq = cfg.equilibrium.map_or(C64::new(0.0, 0.0), ComplexValue::get);
    Ok(ModeSum::new(eq, modes)?)
}

fn report_timescales(out: &mut Outcome, ms: &ModeSum) -> Result<(f64, f64), Failure> {
    let r = timescales(ms)?;
    out.quantities.set("t_R", time(r.t_r));
    out.quantities.set("t_D", time(r.t_d));
    out.quantities.num("gamma_eff", r.gamma_eff);
    out.quantities.set("slow_count", r.slow_count);
    out.quantities.set("fast_count", r.fast_count);
    Ok((r.t_r.value(), r.t_d.value()))
}

fn multipole(cfg: &ScenarioConfig, times: &[f64]) -> Run {
    let ms = mode_sum(cfg)?;
    let mut out = Outcome::new(Table::new(&["preferred_re", "preferred_im", "linearized_re", "linearized_im"]));
    let (_, t_d) = report_timescales(&mut out, &ms)?;
    let mut worst: f64 = 0.0;
    let eq = ms.equilibrium();
    for &t in times {
        let full = full_expectation(&ms, t);
        let pref = preferred_expectation(&ms, t)?;
        let lin = eq + linearized_f(&ms, t)?;
        if t <= t_d / 20.0 {
            worst = worst.max((lin - full).norm() / full.norm());
        }
        out.table.push(t, full, &[pref.re, pref.im, lin.re, lin.im]);
    }
    out.quantities.num("linearization_max_rel_error", worst);
    out.measured.insert("linearization_rel", worst);
    Ok(out)
}

fn two_pole(cfg: &ScenarioConfig, times: &[f64]) -> Run {
    let ms = mode_sum(cfg)?;
    let mut out = Outcome::new(Table::new(&["preferred_re", "preferred_im", "model2_re", "model2_im"]));
    let (t_r, t_d) = report_timescales(&mut out, &ms)?;
    let m2 = model2_modes(&ms)?;
    out.quantities.set("model2_rates", m2.modes().iter().map(|m| number(m.gamma)).collect::<Vec<_>>());
    let gamma_fast = ms.modes().last().map_or(0.0, |m| m.gamma);
    if gamma_fast > 0.0 {
        let t = 5.0 / gamma_fast;
        let gap = (full_expectation(&ms, t) - preferred_expectation(&ms, t)?).norm();
        let ratio = gap / full_expectation(&ms, 0.0).norm();
        out.quantities.num("tail_ratio", ratio);
        out.measured.insert("tail_ratio", ratio);
    }
    out.quantities.num("timescale_ratio", t_d / t_r);
    out.measured.insert("timescale_ratio", t_d / t_r);
    for &t in times {
        let full = full_expectation(&ms, t);
        let pref = preferred_expectation(&ms, t)?;
        let m2v = model2_offdiagonal(&ms, t)?;
        out.table.push(t, full, &[pref.re, pref.im, m2v.re, m2v.im]);
    }
    Ok(out)
}

fn lf_setup(cfg: &ScenarioConfig) -> Result<(SuperpositionState, EffectiveModel, usize), Failure> {
    let s = cfg.state()?;
    let state = match (s.alpha2, s.l0) {
        (Some(a2), _) => SuperpositionState::new(
            s.a.get(),
            s.b.get(),
            s.alpha1.map_or(C64::new(0.0, 0.0), ComplexValue::get),
            a2.get(),
        )?,
        (None, Some(l0)) => {
            if s.alpha1.is_some() {
                return Err(CliError::ConfigInvalid("field `state.alpha1` cannot be combined with `state.l0`".into()).into());
            }
            SuperpositionState::displaced(s.a.get(), s.b.get(), s.mass_omega.unwrap_or_default(), 1.0, l0)?
        }
        (None, None) => unreachable!("validated"),
    };
    let z0 = match &cfg.effective {
        Some(e) => e.z0.get(),
        None => best_pole(&build_model(cfg.model()?)?)?.z(),
    };
    let em = EffectiveModel::new(z0)?;
    let widest = state.alpha1.mean_photons().max(state.alpha2.mean_photons());
    let n_max = s.n_max.unwrap_or_else(|| CoherentAmplitude::new(C64::new(widest.sqrt(), 0.0)).default_cutoff());
    Ok((state, em, n_max))
}

/// Decoherence and relaxation times, with infinite markers where nothing decays.
fn lf_times(out: &mut Outcome, state: &SuperpositionState, em: &EffectiveModel) -> Result<Option<f64>, Failure> {
    match decoherence_time_lf(state, em) {
        Ok(r) => {
            out.quantities.num("t_D", r.t_d);
            out.quantities.num("t_R", r.t_r);
            out.quantities.num("probability_rate", r.probability_rate);
            Ok(Some(r.t_d))
        }
        Err(LeeFriedrichsError::NoSuperposition | LeeFriedrichsError::NonDecaying) => {
            out.quantities.num("t_D", f64::INFINITY);
            out.quantities.num("t_R", if em.gamma0() > 0.0 { 1.0 / em.gamma0() } else { f64::INFINITY });
            Ok(None)
        }
        Err(LeeFriedrichsError::ConventionViolation { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn lee_friedrichs(cfg: &ScenarioConfig, times: &[f64]) -> Run {
    let (state, em, n_max) = lf_setup(cfg)?;
    let mut out = Outcome::new(Table::new(&["series_re", "series_im"]));
    out.quantities.set("z0", complex(em.z0));
    out.quantities.num("alpha2_sq", state.alpha2.mean_photons());
    out.quantities.set("n_max", n_max);
    let t_d = lf_times(&mut out, &state, &em)?;
    let series_rate = gamma_eff_lf_truncated(&state, &em, n_max)?;
    let closed_rate = em.gamma0() * state.alpha2.mean_photons();
    out.quantities.num("gamma_eff", series_rate);
    out.quantities.num("gamma_eff_closed", closed_rate);
    out.measured.insert("gamma_identity", (series_rate - closed_rate).abs());
    let mut worst: f64 = 0.0;
    let mut modulus = Vec::with_capacity(times.len());
    for &t in times {
        let closed = offdiagonal_closed(&state, &em, t)?;
        let series = offdiagonal_series(&state, &em, t, n_max)?;
        worst = worst.max((closed - series).norm());
        modulus.push((t, closed.norm()));
        out.table.push(t, closed, &[series.re, series.im]);
    }
    out.quantities.num("closed_vs_series", worst);
    out.measured.insert("closed_vs_series", worst);
    if let Some(t_d) = t_d {
        if let Ok(fit) = fit_exponential_rate(&modulus, (0.0, 0.2 * t_d)) {
            let rel = (fit.rate_or_exponent * t_d - 1.0).abs();
            out.quantities.num("initial_slope", fit.rate_or_exponent);
            out.quantities.num("initial_slope_rel_error", rel);
            out.measured.insert("slope_rel", rel);
        }
    }
    Ok(out)
}

fn basis(cfg: &ScenarioConfig, times: &[f64]) -> Run {
    let (state, em, n_max) = lf_setup(cfg)?;
    let report = basis_convergence(&state, &em, times, n_max)?;
    let mut out = Outcome::new(Table::new(&["eigen_overlap", "trace_raw"]));
    out.quantities.set("z0", complex(em.z0));
    out.quantities.set("n_max", n_max);
    out.quantities.num("frame_overlap", overlap(state.alpha1.alpha, state.alpha2.alpha).norm());
    let t_d = lf_times(&mut out, &state, &em)?;
    for (k, &t) in times.iter().enumerate() {
        let rd = reduced_density(&state, &em, t, n_max)?;
        out.table.push(t, rd.coeffs[(0, 1)], &[report.eigen_overlap[k], rd.trace_raw]);
    }
    let o = &report.eigen_overlap;
    let q = (o.len() / 4).max(1);
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    out.quantities.num("initial_overlap", o[0]);
    out.quantities.num("first_quartile_mean", mean(&o[..q]));
    out.quantities.num("last_quartile_mean", mean(&o[o.len() - q..]));
    out.measured.insert("initial_overlap", o[0]);
    if let Some(t_d) = t_d {
        let late: Vec<f64> = times.iter().zip(o).filter(|(&t, _)| t >= 5.0 * t_d).map(|(_, &v)| v).collect();
        if let Some(min) = late.iter().copied().reduce(f64::min) {
            out.quantities.num("min_overlap_after_5_t_D", min);
            out.measured.insert("late_overlap", 1.0 - min);
        }
    }
    Ok(out)
}
