//! One function per experiment. Inputs arrive in Hz and are converted to
//! angular frequencies here; outputs are ratios or Hz again.

use std::f64::consts::TAU;

use phononet_core::Complex64;
use phononet_core::cascaded_me::{
    default_fock_cutoff, reduced_two_qubit_model, transfer_fidelity, CascadedModel, CavitySpec, QubitState,
};
use phononet_core::linear_network::{
    closed_form_filter, fit_lorentzian_dip, internal_spectrum, CoolingChain, FitOptions, NoiseSpectrum,
    OptomechanicalFilter,
};
use phononet_core::nonreciprocal::{
    circulator_response, effective_coupling, solve_drives_for_target, CirculatorSpec, DriveConstraints,
};
use phononet_core::qubit_interface::{effective_spin_phonon, RamanParams};
use phononet_core::transfer::{
    dark_state_residual, design_pulses_iterative, effective_occupation_closed, evolve_amplitudes, DesignOptions,
    PulseSchedule,
};
use phononet_core::waveguide::{continuum_parameters, propagate_spectrum, simulate_lossy_chain, ChainSpec};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{
    CirculatorParams, DesignParams, FidelityModel, FidelityParams, FilterParams, InitialState, MultimodeParams,
    NvParams, Parameters, PulseKind, RunConfig, TransferParams, WaveguideParams,
};
use crate::output::Report;
use crate::CliError;

pub fn run_experiment(config: &RunConfig) -> Result<Report, CliError> {
    match &config.parameters {
        Parameters::Filter(p) => filter(p),
        Parameters::Multimode(p) => multimode(p),
        Parameters::Transfer(p) => transfer(p),
        Parameters::Fidelity(p) => fidelity(p),
        Parameters::Circulator(p) => circulator(p),
        Parameters::Waveguide(p) => waveguide(p),
        Parameters::Design(p) => design(p),
        Parameters::Nv(p) => nv(p),
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    NoiseSpectrum::uniform_grid(lo, hi, points)
}

fn filter(p: &FilterParams) -> Result<Report, CliError> {
    let f = OptomechanicalFilter {
        omega_m: TAU * p.omega_m,
        gamma: TAU * p.gamma,
        gamma0: TAU * p.gamma0,
        kappa: TAU * p.kappa,
        g_alpha: Complex64::new(TAU * p.g_alpha.unwrap_or(0.0), 0.0),
        delta: TAU * p.detuning.unwrap_or(-p.omega_m),
        n_th: p.n_th,
        rotating_wave: p.rotating_wave,
    };
    let omegas = grid(f.omega_m - p.span * f.gamma, f.omega_m + p.span * f.gamma, p.points);
    let spec = f.spectrum(&omegas)?;
    let cf = f.closed_form_params();

    let mut r = Report::new(&["omega_over_gamma", "N_F", "N_F_closed_form"]);
    for (&w, &n) in omegas.iter().zip(&spec.values) {
        r.push_row(vec![w / f.gamma, n, closed_form_filter(&cf, w)]);
    }
    if let Some((i, v)) = spec.minimum() {
        r.note("min_N_F", v);
        r.note("min_N_F_over_N_th", if f.n_th > 0.0 { v / f.n_th } else { f64::NAN });
        r.note("argmin_omega_over_gamma", omegas[i] / f.gamma);
    }
    r.note("gamma_op_over_gamma", f.gamma_op() / f.gamma);
    r.note("intrinsic_floor_estimate", f.intrinsic_floor_estimate());
    r.note("counter_rotating_floor_estimate", f.counter_rotating_floor_estimate());
    r.note("sideband_floor_estimate", f.sideband_floor_estimate());
    r.note("dip_shift_estimate_over_gamma", f.dip_shift_estimate() / f.gamma);
    if p.fit {
        match fit_lorentzian_dip(&spec, &FitOptions::default()) {
            Ok(fit) => {
                r.note("fit_center_offset_over_gamma", (fit.center - f.omega_m) / f.gamma);
                r.note("fit_width_over_gamma", fit.width / f.gamma);
                r.note("fit_floor", fit.floor);
                r.note("fit_baseline", fit.baseline);
                r.note("fit_rms", fit.rms);
            }
            Err(e) => r.note("fit_error", e.to_string()),
        }
    }
    Ok(r)
}

fn multimode(p: &MultimodeParams) -> Result<Report, CliError> {
    let k = TAU * p.coupling_k;
    if !(k > 0.0) {
        return Err(CliError::Config("parameters.coupling_k must be positive for the multimode spectrum".into()));
    }
    let omega_m = TAU * p.omega_m;
    let site = CoolingChain::site_label(p.site.unwrap_or(p.n_sites));
    let omegas = grid(omega_m - p.span * k, omega_m + p.span * k, p.points);
    let couplings = p.g_alpha.values();
    let spectra: Vec<NoiseSpectrum> = couplings
        .par_iter()
        .map(|&ga| {
            let chain = CoolingChain {
                n_sites: p.n_sites,
                omega_m,
                coupling_k: k,
                gamma0: TAU * p.gamma0,
                kappa: TAU * p.kappa,
                g_alpha: Complex64::new(TAU * ga, 0.0),
                delta: -omega_m,
                n_th: p.n_th,
            };
            internal_spectrum(&chain.network()?, &omegas, &site)
        })
        .collect::<phononet_core::Result<_>>()?;

    let mut r = Report::new(&["g_alpha_over_k", "delta_over_k", "S_times_k"]);
    for (&ga, s) in couplings.iter().zip(&spectra) {
        for (&w, &v) in omegas.iter().zip(&s.values) {
            r.push_row(vec![TAU * ga / k, (w - omega_m) / k, v * k]);
        }
    }
    let modes: Vec<f64> = (1..=p.n_sites)
        .map(|n| (phononet_core::linear_network::chain_mode_frequency(n, p.n_sites, omega_m, k) - omega_m) / k)
        .collect();
    r.note("site", site);
    r.note("mode_detunings_over_k", json!(modes));
    Ok(r)
}

fn transfer(p: &TransferParams) -> Result<Report, CliError> {
    let gm = TAU * p.gamma_max;
    let analytic = PulseSchedule::analytic_with_window(gm, p.window / gm).with_cutoff_floor(p.cutoff_floor * gm);
    let schedule = match p.pulse {
        PulseKind::Analytic => analytic,
        PulseKind::Iterative => {
            let times = analytic.fine_grid(1e-2 / gm);
            let g1: Vec<f64> = times.iter().map(|&t| analytic.gamma1(t)).collect();
            design_pulses_iterative(&times, &g1, &DesignOptions::default())?
        }
    };
    let (a, b) = schedule.window;
    let times = grid(a, b, p.samples);
    let amps = evolve_amplitudes(&schedule, &times)?;
    let mut r = Report::new(&[
        "t_gamma_max",
        "gamma1_over_gamma_max",
        "gamma2_over_gamma_max",
        "v1_abs2",
        "v2_abs2",
        "transfer",
        "dark_state_residual",
    ]);
    let mut worst = 0.0f64;
    for (k, &t) in times.iter().enumerate() {
        let res = dark_state_residual(&amps, &schedule, t) / gm.sqrt();
        if t >= -1.0 / gm {
            worst = worst.max(res);
        }
        r.push_row(vec![
            t * gm,
            amps.g1[k] / gm,
            amps.g2[k] / gm,
            amps.v1[k].norm_sqr(),
            amps.v2[k].norm_sqr(),
            amps.transfer[k],
            res,
        ]);
    }
    r.note("final_transfer", *amps.transfer.last().unwrap_or(&f64::NAN));
    r.note("norm_defect", amps.norm_defect());
    r.note("max_dark_state_residual_after_minus_one", worst);
    Ok(r)
}

fn fidelity(p: &FidelityParams) -> Result<Report, CliError> {
    let gamma = TAU * p.gamma;
    let gamma0 = TAU * p.gamma0;
    let gamma_op = TAU * p.gamma_op.unwrap_or(0.0);
    let q = match p.state {
        InitialState::Plus => QubitState::plus(),
        InitialState::Excited => QubitState::excited(),
        InitialState::Ground => QubitState::ground(),
    };
    let runs: Vec<(f64, f64)> = p
        .gamma_max
        .values()
        .into_iter()
        .flat_map(|g| p.n_th.values().into_iter().map(move |n| (g, n)))
        .collect();
    let results: Vec<(f64, f64)> = runs
        .par_iter()
        .map(|&(g_hz, n_th)| {
            let gm = TAU * g_hz;
            let schedule = PulseSchedule::analytic(gm);
            let damping = gamma_op + gamma0;
            let n0 = if damping > 0.0 { n_th * gamma0 / damping } else { n_th };
            let n_eff = if p.filter { effective_occupation_closed(n_th, n0, gamma, gm) } else { n_th };
            let model = match p.model {
                FidelityModel::Reduced => reduced_two_qubit_model(n_eff, schedule),
                FidelityModel::Full => {
                    let (op, g0) = if p.filter { (gamma_op, gamma0) } else { (0.0, 0.0) };
                    let fock_cutoff = p.fock_cutoff.unwrap_or_else(|| default_fock_cutoff(n_th));
                    CascadedModel { schedule, n_th, cavity: Some(CavitySpec { gamma, gamma_op: op, gamma0: g0, fock_cutoff }) }
                }
            };
            let tr = model.run_transfer(&q, 3)?;
            Ok((n_eff, transfer_fidelity(&tr, &q)?))
        })
        .collect::<phononet_core::Result<_>>()?;

    let mut r = Report::new(&["n_th", "gamma_max_over_gamma", "n_eff", "fidelity"]);
    for (&(g_hz, n_th), &(n_eff, f)) in runs.iter().zip(&results) {
        r.push_row(vec![n_th, g_hz / p.gamma, n_eff, f]);
    }
    r.note("runs", runs.len());
    Ok(r)
}

fn circulator(p: &CirculatorParams) -> Result<Report, CliError> {
    let gamma = TAU * p.gamma;
    let spec = CirculatorSpec { t: TAU * p.t.unwrap_or(p.gamma / 2.0), phi: p.phi, gamma, gamma0: TAU * p.gamma0, omega_m: 0.0 };
    let mut r = Report::new(&["delta_omega_over_gamma", "P_11", "P_12", "P_13"]);
    let mut flux = 0.0f64;
    for x in grid(-p.span, p.span, p.points) {
        let resp = circulator_response(&spec, x * gamma)?;
        for to in 0..3 {
            let row: f64 = (0..3).map(|from| resp.probability(from, to)).sum::<f64>() + resp.loss[to];
            flux = flux.max((row - 1.0).abs());
        }
        r.push_row(vec![x, resp.probability(0, 0), resp.probability(0, 1), resp.probability(0, 2)]);
    }
    let res = circulator_response(&spec, 0.0)?;
    for (from, to) in [(0, 1), (0, 2), (1, 2), (2, 1), (2, 0), (1, 0)] {
        r.note(&format!("resonant_P_{}{}", from + 1, to + 1), res.probability(from, to));
    }
    r.note("max_flux_defect", flux);
    Ok(r)
}

fn waveguide(p: &WaveguideParams) -> Result<Report, CliError> {
    if !(p.gamma0 > 0.0) {
        return Err(CliError::Config("parameters.gamma0 must be positive: distances are in mean free paths".into()));
    }
    let chain = ChainSpec {
        n_sites: p.n_sites,
        omega0: TAU * p.omega0,
        coupling_k: TAU * p.coupling_k,
        lattice_a: p.lattice_a,
        intrinsic_gamma0: TAU * p.gamma0,
        bath_occupation: p.n_th,
    };
    chain.validate()?;
    let channel = continuum_parameters(&chain);
    let width = TAU * p.dip_width.unwrap_or(p.coupling_k / 100.0);
    let center = chain.omega0 + chain.coupling_k;
    let omegas = grid(center - 5.0 * width, center + 5.0 * width, p.points);
    let values =
        omegas.iter().map(|w| p.n_th - (p.n_th - p.dip_floor) * width * width / ((w - center).powi(2) + width * width)).collect();
    let drive = NoiseSpectrum::new(omegas.clone(), values)?;

    let mut columns = vec!["z_over_l", "delta_over_width", "N_input", "N_propagated"];
    if p.simulate_chain {
        columns.push("N_chain");
    }
    let mut r = Report::new(&columns);
    for &frac in &p.distances {
        let z = frac * channel.mean_free_path;
        let out = propagate_spectrum(&drive, z, &channel)?;
        let micro = if p.simulate_chain {
            let sites = (z / chain.lattice_a).round() as usize;
            Some(simulate_lossy_chain(&chain, &drive, sites)?)
        } else {
            None
        };
        for k in 0..omegas.len() {
            let mut row = vec![frac, (omegas[k] - center) / width, drive.values[k], out.values[k]];
            if let Some(m) = &micro {
                row.push(m.values[k]);
            }
            r.push_row(row);
        }
    }
    r.note("sound_speed_m_per_s", channel.sound_speed_c);
    r.note("mean_free_path_m", channel.mean_free_path);
    r.note("mean_free_path_sites", channel.mean_free_path / chain.lattice_a);
    r.note("bandwidth_hz", channel.bandwidth / TAU);
    r.note("omega_offset_hz", channel.omega_offset / TAU);
    r.note("warnings", json!(channel.warnings));
    Ok(r)
}

fn design(p: &DesignParams) -> Result<Report, CliError> {
    let omega_m = TAU * p.omega_m;
    let gamma = TAU * p.gamma;
    let target = TAU * p.t.unwrap_or(p.gamma / 2.0);
    let fixed = DriveConstraints {
        delta1: TAU * p.delta1.unwrap_or(-p.omega_m),
        delta2: TAU * p.delta2.unwrap_or(-p.omega_m),
        j: TAU * p.j,
        kappa: TAU * p.kappa,
        g: TAU * p.g,
        omega_m,
        alpha_max: p.alpha_max,
    };
    let d = solve_drives_for_target(target, p.phi, &fixed)?;
    let ec = effective_coupling(&d, omega_m)?;
    let mut r = Report::new(&[
        "drive1_hz",
        "phase1",
        "drive2_hz",
        "phase2",
        "alpha1_abs",
        "alpha2_abs",
        "t_eff_over_gamma",
        "phi_eff",
        "gamma_op_over_gamma",
    ]);
    r.push_row(vec![
        d.drive1 / TAU,
        d.phase1,
        d.drive2 / TAU,
        d.phase2,
        ec.alpha1.norm(),
        ec.alpha2.norm(),
        ec.t_eff / gamma,
        ec.phi,
        ec.gamma_op / gamma,
    ]);
    r.note("round_trip_t_error", ((ec.t_eff - target) / target).abs());
    r.note("delta_plus_hz", ec.delta_plus / TAU);
    r.note("delta_minus_hz", ec.delta_minus / TAU);
    r.note("warnings", json!(ec.warnings));
    Ok(r)
}

fn nv(p: &NvParams) -> Result<Report, CliError> {
    let base = RamanParams {
        lambda: TAU * p.lambda,
        omega_m: TAU * p.omega_m,
        omega0: TAU * p.rabi0,
        omega1: TAU * p.rabi1,
        delta: 0.0,
        gamma_e: TAU * p.gamma_e,
    };
    let mut r = Report::new(&[
        "delta_over_omega_m",
        "lambda_eff_hz",
        "gamma_eff0_hz",
        "gamma_eff1_hz",
        "gamma_eff_mean_hz",
        "figure_of_merit",
    ]);
    let (mut skipped, mut flagged) = (0usize, 0usize);
    for x in grid(-p.span, p.span, p.points) {
        match effective_spin_phonon(&RamanParams { delta: x * base.omega_m, ..base }) {
            Ok(c) => {
                flagged += usize::from(!c.warnings.is_empty());
                r.push_row(vec![
                    x,
                    c.lambda_eff / TAU,
                    c.gamma_eff0 / TAU,
                    c.gamma_eff1 / TAU,
                    c.gamma_eff_mean / TAU,
                    c.figure_of_merit,
                ]);
            }
            Err(phononet_core::Error::Resonance(_)) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let at_zero = effective_spin_phonon(&base)?;
    r.note("lambda_eff_at_zero_hz", at_zero.lambda_eff / TAU);
    r.note("figure_of_merit_at_zero", at_zero.figure_of_merit);
    r.note("lambda_over_gamma_e", p.lambda / p.gamma_e);
    r.note("scaling_estimate_hz", 4.0 * p.lambda * p.rabi0 * p.rabi1 / (p.omega_m * p.omega_m));
    r.note("resonant_points_skipped", skipped);
    r.note("points_below_detuning_ratio", flagged);
    Ok(r)
}
