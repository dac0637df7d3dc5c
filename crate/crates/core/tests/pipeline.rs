use phononet_core::cascaded_me::{reduced_two_qubit_model, transfer_fidelity, QubitState};
use phononet_core::linear_network::{fit_lorentzian_dip, FitOptions, OptomechanicalFilter};
use phononet_core::transfer::{
    design_pulses_iterative, effective_occupation_integral, evolve_amplitudes, ChannelNoiseModel,
    DesignOptions, PulseSchedule,
};

#[test]
fn fitted_filter_feeds_the_qubit_occupation() {
    let f = OptomechanicalFilter::matched(1200.0, 1.0, 0.005, 300.0, 2.0);
    let fit = fit_lorentzian_dip(&f.spectrum(&f.default_grid()).unwrap(), &FitOptions::default()).unwrap();
    let noise = ChannelNoiseModel::Filtered {
        n_th: fit.baseline,
        n0: fit.floor,
        width: fit.width,
        detuning: fit.center - f.omega_m,
    };
    let s = PulseSchedule::analytic(0.05);
    let n_eff = effective_occupation_integral(&s, &noise).unwrap();
    assert!(n_eff < 0.1 * f.n_th, "N_eff = {n_eff}");

    let q = QubitState::plus();
    let filtered = transfer_fidelity(&reduced_two_qubit_model(n_eff, s.clone()).run_transfer(&q, 3).unwrap(), &q).unwrap();
    let raw = transfer_fidelity(&reduced_two_qubit_model(f.n_th, s).run_transfer(&q, 3).unwrap(), &q).unwrap();
    assert!(filtered > raw + 0.2, "{filtered} vs {raw}");
}

#[test]
fn iterative_design_for_a_gaussian_emission_rate() {
    // ∫Γ1 = 20, so 𝒢1(t_f) = e^{-10}
    let times: Vec<f64> = (0..=560).map(|k| -14.0 + 0.05 * k as f64).collect();
    let g1: Vec<f64> = times.iter().map(|&t| 4.0 * (-t * t / 8.0).exp()).collect();
    let s = design_pulses_iterative(&times, &g1, &DesignOptions::default()).unwrap();
    let a = evolve_amplitudes(&s, &s.fine_grid(0.01)).unwrap();
    assert!(a.transfer.last().unwrap().abs() > 1.0 - 1e-3);
    assert!(a.norm_defect() < 1e-4);
}
