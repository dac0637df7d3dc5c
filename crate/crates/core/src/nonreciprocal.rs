//! Three-port phonon circulator and the optomechanical synthesis of its
//! complex tunneling amplitude.
//!
//! Port `j` is the waveguide attached to mode `b_j`. The probability for a
//! phonon entering at port `i` to leave at port `j` is `|S[j][i]|²`.

use crate::error::{Error, Result};
use crate::linear_network::{scattering, CouplingSpec, LinearNetwork, ModeSpec, PortSpec};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Ratio `|Δ±| / gα` below which the perturbative elimination is flagged.
pub const DETUNING_RATIO_WARNING: f64 = 5.0;
/// Relative `|α1|` vs `|α2|` mismatch that is flagged.
pub const AMPLITUDE_MISMATCH_WARNING: f64 = 0.05;

/// Three mechanical modes coupled in a ring, one with a complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirculatorSpec {
    pub t: f64,
    pub phi: f64,
    /// Waveguide coupling of every mode.
    pub gamma: f64,
    pub gamma0: f64,
    pub omega_m: f64,
}

impl CirculatorSpec {
    /// Matched circulator `t = γ/2`.
    pub fn matched(gamma: f64, phi: f64, omega_m: f64) -> Self {
        CirculatorSpec { t: 0.5 * gamma, phi, gamma, gamma0: 0.0, omega_m }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 0.0) || !(self.gamma > 0.0) || !(self.gamma0 >= 0.0) {
            return Err(Error::Validation("circulator needs t >= 0, gamma > 0, gamma0 >= 0".into()));
        }
        if !self.phi.is_finite() || !self.omega_m.is_finite() {
            return Err(Error::Validation("circulator phase and frequency must be finite".into()));
        }
        Ok(())
    }
}

pub fn circulator_network(spec: &CirculatorSpec) -> Result<LinearNetwork> {
    spec.validate()?;
    let modes = (1..=3).map(|j| ModeSpec::mechanical(format!("b{j}"), spec.omega_m, spec.gamma0, 0.0)).collect();
    let couplings = vec![
        // t e^{iφ} b2† b1 + h.c.
        CouplingSpec::beam_splitter("b2", "b1", C64::from_polar(spec.t, spec.phi)),
        CouplingSpec::beam_splitter("b3", "b2", C64::new(spec.t, 0.0)),
        CouplingSpec::beam_splitter("b1", "b3", C64::new(spec.t, 0.0)),
    ];
    let ports = (1..=3).map(|j| PortSpec::new(format!("b{j}"), spec.gamma, 0.0)).collect();
    LinearNetwork::new(modes, couplings, ports)
}

/// Port scattering matrix `S[to][from]` and the intrinsic-loss flux per
/// input port at frequency `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculatorResponse {
    pub omega: f64,
    pub s: [[C64; 3]; 3],
    /// `Σ_k |S'[j][k]|²` for each output port `j`.
    pub loss: [f64; 3],
}

impl CirculatorResponse {
    /// `|S_{from→to}|²`.
    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.s[to][from].norm_sqr()
    }
}

pub fn circulator_response(spec: &CirculatorSpec, omega: f64) -> Result<CirculatorResponse> {
    let net = circulator_network(spec)?;
    let sc = scattering(&net, omega)?;
    let mut s = [[C64::new(0.0, 0.0); 3]; 3];
    let mut loss = [0.0; 3];
    for (to, row) in s.iter_mut().enumerate() {
        for (from, entry) in row.iter_mut().enumerate() {
            *entry = sc.amplitude(from, to);
        }
        loss[to] = (0..sc.s_intrinsic.ncols()).map(|k| sc.s_intrinsic[(2 * to, k)].norm_sqr()).sum();
    }
    Ok(CirculatorResponse { omega, s, loss })
}

/// `|S_{1→j}(ω)|²` for `j = 1, 2, 3` on a grid.
pub fn scattering_probabilities(spec: &CirculatorSpec, omega_grid: &[f64]) -> Result<Vec<[f64; 3]>> {
    omega_grid
        .par_iter()
        .map(|&w| {
            let r = circulator_response(spec, w)?;
            Ok([r.probability(0, 0), r.probability(0, 1), r.probability(0, 2)])
        })
        .collect()
}

/// Two driven, tunnel-coupled optical cavities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalDriveDesign {
    pub delta1: f64,
    pub delta2: f64,
    pub j: f64,
    pub kappa: f64,
    pub g: f64,
    pub drive1: f64,
    pub drive2: f64,
    pub phase1: f64,
    pub phase2: f64,
}

impl OpticalDriveDesign {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !(self.j >= 0.0) {
            return Err(Error::Validation("optical design needs kappa > 0 and J >= 0".into()));
        }
        let all = [self.delta1, self.delta2, self.g, self.drive1, self.drive2, self.phase1, self.phase2];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("optical design parameters must be finite".into()));
        }
        Ok(())
    }

    fn coupling_matrix(&self) -> Matrix2<C64> {
        let ij = C64::new(0.0, -self.j);
        Matrix2::new(C64::new(self.kappa, -self.delta1), ij, ij, C64::new(self.kappa, -self.delta2))
    }
}

/// Steady fields `α1, α2` of the two cavities.
pub fn steady_state_amplitudes(design: &OpticalDriveDesign) -> Result<(C64, C64)> {
    design.validate()?;
    let k1 = C64::new(design.kappa, -design.delta1);
    let k2 = C64::new(design.kappa, -design.delta2);
    let det = k1 * k2 + design.j * design.j;
    if det.norm() <= 1e-14 * (k1.norm() * k2.norm() + design.j * design.j) {
        return Err(Error::Resonance("(κ - iδ1)(κ - iδ2) + J² vanishes".into()));
    }
    let e1 = C64::from_polar(design.drive1, design.phase1);
    let e2 = C64::from_polar(design.drive2, design.phase2);
    let ij = C64::new(0.0, design.j);
    Ok(((k2 * e1 + ij * e2) / det, (k1 * e2 + ij * e1) / det))
}

/// Result of eliminating the optical modes.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveCoupling {
    pub alpha1: C64,
    pub alpha2: C64,
    pub t_eff: f64,
    /// `arg α1 - arg α2`, wrapped to `(-π, π]`.
    pub phi: f64,
    pub gamma_op: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    /// Validity notes (weak detuning, amplitude mismatch).
    pub warnings: Vec<String>,
}

fn wrap_phase(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let y = x.rem_euclid(tau);
    if y > std::f64::consts::PI {
        y - tau
    } else {
        y
    }
}

/// Sideband detunings `Δ± = δ̄ ± J + ω_m` with `δ̄` the mean laser detuning.
fn sideband_detunings(delta1: f64, delta2: f64, j: f64, omega_m: f64) -> (f64, f64) {
    let d = 0.5 * (delta1 + delta2);
    (d + j + omega_m, d - j + omega_m)
}

/// `t_eff = (g²α²/2)(1/Δ+ - 1/Δ-)` and `γ_op = g²α²κ(Δ+⁻² + Δ-⁻²)`.
pub fn sideband_rates(g2a2: f64, kappa: f64, delta_plus: f64, delta_minus: f64) -> (f64, f64) {
    let t_eff = 0.5 * g2a2 * (1.0 / delta_plus - 1.0 / delta_minus);
    (t_eff, g2a2 * kappa * (delta_plus.powi(-2) + delta_minus.powi(-2)))
}

/// Eliminates the optical modes with `α² = |α1||α2|`.
pub fn effective_coupling(design: &OpticalDriveDesign, omega_m: f64) -> Result<EffectiveCoupling> {
    let (alpha1, alpha2) = steady_state_amplitudes(design)?;
    let (dp, dm) = sideband_detunings(design.delta1, design.delta2, design.j, omega_m);
    if dp == 0.0 || dm == 0.0 {
        return Err(Error::Resonance(format!("sideband detuning vanishes (Δ+ = {dp:e}, Δ- = {dm:e})")));
    }
    let g2a2 = design.g * design.g * alpha1.norm() * alpha2.norm();
    let (t_eff, gamma_op) = sideband_rates(g2a2, design.kappa, dp, dm);

    let mut warnings = Vec::new();
    let ga = g2a2.sqrt();
    let ratio = dp.abs().min(dm.abs()) / ga;
    if ga > 0.0 && ratio < DETUNING_RATIO_WARNING {
        warnings.push(format!("min |Δ±| / gα = {ratio:.3} is below {DETUNING_RATIO_WARNING}"));
    }
    let (m1, m2) = (alpha1.norm(), alpha2.norm());
    let mismatch = (m1 - m2).abs() / m1.max(m2).max(f64::MIN_POSITIVE);
    if mismatch > AMPLITUDE_MISMATCH_WARNING {
        warnings.push(format!("|α1| and |α2| differ by {:.1}%", 100.0 * mismatch));
    }
    Ok(EffectiveCoupling {
        alpha1,
        alpha2,
        t_eff,
        phi: wrap_phase(alpha1.arg() - alpha2.arg()),
        gamma_op,
        delta_plus: dp,
        delta_minus: dm,
        warnings,
    })
}

/// Parameters held fixed while solving for the drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConstraints {
    pub delta1: f64,
    pub delta2: f64,
    pub j: f64,
    pub kappa: f64,
    pub g: f64,
    pub omega_m: f64,
    /// Largest allowed `|α|`.
    pub alpha_max: f64,
}

/// Drives producing `t_eff = t_target` and `φ = phi_target` with
/// `|α1| = |α2|`.
///
/// The target fixes the fields directly, `α1,2 = α e^{±iφ/2}` with
/// `α² = 2 t / (g² (1/Δ+ - 1/Δ-))`; the drives then follow from the linear
/// steady-state relation `(κ - iδ1)α1 - iJα2 = ℰ1 e^{iφ1}` and its mirror.
/// With this gauge, reversing `φ` exchanges the two drives.
pub fn solve_drives_for_target(t_target: f64, phi_target: f64, fixed: &DriveConstraints) -> Result<OpticalDriveDesign> {
    if !(t_target > 0.0) || !phi_target.is_finite() {
        return Err(Error::Validation("target tunneling must be positive with a finite phase".into()));
    }
    let (dp, dm) = sideband_detunings(fixed.delta1, fixed.delta2, fixed.j, fixed.omega_m);
    if dp == 0.0 || dm == 0.0 || fixed.g == 0.0 {
        return Err(Error::Resonance("sideband detuning or coupling vanishes".into()));
    }
    let lever = 0.5 * fixed.g * fixed.g * (1.0 / dp - 1.0 / dm);
    let alpha_sq = t_target / lever;
    if !(alpha_sq > 0.0) || !alpha_sq.is_finite() {
        return Err(Error::Solver {
            message: format!("detunings give t_eff of the wrong sign (Δ+ = {dp:e}, Δ- = {dm:e})"),
            residual: t_target,
        });
    }
    let alpha = alpha_sq.sqrt();
    if alpha > fixed.alpha_max {
        return Err(Error::Solver {
            message: format!("required |α| = {alpha:.4e} exceeds the bound {:.4e}", fixed.alpha_max),
            residual: alpha - fixed.alpha_max,
        });
    }
    let mut design = OpticalDriveDesign {
        delta1: fixed.delta1,
        delta2: fixed.delta2,
        j: fixed.j,
        kappa: fixed.kappa,
        g: fixed.g,
        drive1: 0.0,
        drive2: 0.0,
        phase1: 0.0,
        phase2: 0.0,
    };
    design.validate()?;
    let fields = Vector2::new(C64::from_polar(alpha, 0.5 * phi_target), C64::from_polar(alpha, -0.5 * phi_target));
    let drives = design.coupling_matrix() * fields;
    design.drive1 = drives[0].norm();
    design.phase1 = drives[0].arg();
    design.drive2 = drives[1].norm();
    design.phase2 = drives[1].arg();

    let check = effective_coupling(&design, fixed.omega_m)?;
    let residual = ((check.t_eff - t_target) / t_target).abs().max(wrap_phase(check.phi - phi_target).abs());
    if residual > 1e-9 {
        return Err(Error::Solver { message: "drive inversion did not reproduce the target".into(), residual });
    }
    Ok(design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn decoupled_ports_reflect_with_minus_one() {
        let spec = CirculatorSpec { t: 0.0, phi: 0.0, gamma: 1.0, gamma0: 0.0, omega_m: 10.0 };
        let r = circulator_response(&spec, 10.0).unwrap();
        for j in 0..3 {
            assert!((r.s[j][j] + 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn matched_circulator_routes_one_way() {
        let spec = CirculatorSpec::matched(1.0, FRAC_PI_2, 10.0);
        let r = circulator_response(&spec, 10.0).unwrap();
        let i = C64::new(0.0, 1.0);
        let expect = [[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(0.0, 0.0), i], [i, C64::new(0.0, 0.0), C64::new(0.0, 0.0)]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((r.s[a][b] - expect[a][b]).norm() < 1e-10, "S[{a}][{b}] = {}", r.s[a][b]);
            }
        }
        let rev = circulator_response(&CirculatorSpec::matched(1.0, -FRAC_PI_2, 10.0), 10.0).unwrap();
        assert!(rev.probability(0, 1) > 0.999);
        assert!(rev.probability(1, 2) > 0.999);
        assert!(rev.probability(2, 0) > 0.999);
    }

    #[test]
    fn lossless_rows_conserve_flux() {
        let spec = CirculatorSpec { t: 0.4, phi: 1.1, gamma: 1.0, gamma0: 0.0, omega_m: 5.0 };
        let grid: Vec<f64> = (0..41).map(|k| 3.0 + 0.1 * k as f64).collect();
        for p in scattering_probabilities(&spec, &grid).unwrap() {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn far_detuned_input_is_reflected() {
        let spec = CirculatorSpec::matched(1.0, FRAC_PI_2, 10.0);
        let p = scattering_probabilities(&spec, &[10.0 + 1e4]).unwrap();
        assert!(p[0][0] > 1.0 - 1e-6);
    }

    #[test]
    fn lossy_circulator_balances_flux() {
        let spec = CirculatorSpec { gamma0: 0.05, ..CirculatorSpec::matched(1.0, FRAC_PI_2, 10.0) };
        let r = circulator_response(&spec, 10.0).unwrap();
        for to in 0..3 {
            let row: f64 = (0..3).map(|from| r.probability(from, to)).sum::<f64>() + r.loss[to];
            assert!((row - 1.0).abs() < 1e-12);
        }
        assert!(r.probability(0, 2) < 0.999);
    }

    fn sample_design() -> OpticalDriveDesign {
        OpticalDriveDesign { delta1: -3.0, delta2: -2.0, j: 0.7, kappa: 0.3, g: 0.01, drive1: 2.0, drive2: 1.5, phase1: 0.4, phase2: -1.0 }
    }

    #[test]
    fn uncoupled_cavities() {
        let d = OpticalDriveDesign { j: 0.0, ..sample_design() };
        let (a1, a2) = steady_state_amplitudes(&d).unwrap();
        assert!((a1 - C64::from_polar(2.0, 0.4) / C64::new(0.3, 3.0)).norm() < 1e-14);
        assert!((a2 - C64::from_polar(1.5, -1.0) / C64::new(0.3, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn single_drive_leaks_through_tunneling() {
        let d = OpticalDriveDesign { drive2: 0.0, ..sample_design() };
        let (_, a2) = steady_state_amplitudes(&d).unwrap();
        let det = C64::new(0.3, 3.0) * C64::new(0.3, 2.0) + 0.49;
        assert!((a2 - C64::new(0.0, 0.7) * C64::from_polar(2.0, 0.4) / det).norm() < 1e-14);
    }

    #[test]
    fn symmetric_drive_gives_equal_fields() {
        let d = OpticalDriveDesign { delta2: -3.0, drive2: 2.0, phase2: 0.4, ..sample_design() };
        let (a1, a2) = steady_state_amplitudes(&d).unwrap();
        assert!((a1 - a2).norm() < 1e-14);
    }

    #[test]
    fn lossless_cavity_is_rejected() {
        // with κ > 0 the determinant has real part κ² - δ1δ2 + J² and imaginary part -κ(δ1 + δ2), never both zero
        let d = OpticalDriveDesign { kappa: 0.0, ..sample_design() };
        assert!(matches!(steady_state_amplitudes(&d), Err(Error::Validation(_))));
    }

    #[test]
    fn red_detuned_operating_point() {
        let w = |x: f64| 2.0 * PI * x;
        let (omega_m, j, kappa, ga) = (w(4e3), w(1e3), w(50.0), w(110.0));
        let g = 1e-3;
        let alpha = ga / g;
        let fixed = DriveConstraints { delta1: -omega_m, delta2: -omega_m, j, kappa, g, omega_m, alpha_max: f64::INFINITY };
        let design = solve_drives_for_target(ga * ga / j, FRAC_PI_2, &fixed).unwrap();
        let ec = effective_coupling(&design, omega_m).unwrap();
        assert!((ec.alpha1.norm() - alpha).abs() / alpha < 1e-9);
        assert!((ec.delta_plus - j).abs() < 1e-6 && (ec.delta_minus + j).abs() < 1e-6);
        assert!((ec.gamma_op - 2.0 * ga * ga * kappa / (j * j)).abs() / ec.gamma_op < 1e-9);
        assert!(ec.warnings.is_empty(), "{:?}", ec.warnings);
    }

    #[test]
    fn round_trip_and_phase_mirror() {
        let fixed = DriveConstraints { delta1: -10.0, delta2: -10.0, j: 2.0, kappa: 0.3, g: 0.05, omega_m: 10.0, alpha_max: 1e6 };
        let plus = solve_drives_for_target(0.25, FRAC_PI_2, &fixed).unwrap();
        let minus = solve_drives_for_target(0.25, -FRAC_PI_2, &fixed).unwrap();
        for (d, phi) in [(plus, FRAC_PI_2), (minus, -FRAC_PI_2)] {
            let ec = effective_coupling(&d, 10.0).unwrap();
            assert!((ec.t_eff - 0.25).abs() / 0.25 < 1e-6);
            assert!((ec.phi - phi).abs() < 1e-6);
            assert!((ec.alpha1.norm() - ec.alpha2.norm()).abs() / ec.alpha1.norm() < 1e-6);
        }
        // equal detunings: reversing φ swaps the drives between the cavities
        assert!((plus.drive1 - minus.drive2).abs() < 1e-9 * plus.drive1);
        assert!((plus.drive2 - minus.drive1).abs() < 1e-9 * plus.drive2);
        assert!((wrap_phase(plus.phase1 - plus.phase2) + wrap_phase(minus.phase1 - minus.phase2)).abs() < 1e-9);
    }

    #[test]
    fn unreachable_targets_fail() {
        let fixed = DriveConstraints { delta1: -10.0, delta2: -10.0, j: 2.0, kappa: 0.3, g: 0.05, omega_m: 10.0, alpha_max: 1.0 };
        assert!(matches!(solve_drives_for_target(0.25, 0.0, &fixed), Err(Error::Solver { .. })));
        // both sidebands on the same side of resonance: t_eff < 0 for every α
        let same_side = DriveConstraints { delta1: 0.0, delta2: 0.0, alpha_max: 1e9, ..fixed };
        assert!(matches!(solve_drives_for_target(0.25, 0.0, &same_side), Err(Error::Solver { .. })));
    }

    #[test]
    fn weak_detuning_is_flagged() {
        let d = OpticalDriveDesign { delta1: -10.0, delta2: -10.0, j: 0.5, kappa: 0.3, g: 0.05, drive1: 100.0, drive2: 100.0, phase1: 0.0, phase2: 0.0 };
        let ec = effective_coupling(&d, 10.0).unwrap();
        assert!(ec.warnings.iter().any(|w| w.contains("Δ±")), "{:?}", ec.warnings);
    }

    #[test]
    fn common_phase_is_a_gauge() {
        let d = sample_design();
        let shifted = OpticalDriveDesign { phase1: d.phase1 + 0.9, phase2: d.phase2 + 0.9, ..d };
        let (a, b) = (effective_coupling(&d, 2.5).unwrap(), effective_coupling(&shifted, 2.5).unwrap());
        assert!((a.t_eff - b.t_eff).abs() < 1e-14 * a.t_eff.abs().max(1e-300));
        assert!((a.phi - b.phi).abs() < 1e-12);
        assert!((a.gamma_op - b.gamma_op).abs() < 1e-14 * a.gamma_op);
    }

    #[test]
    fn t_eff_odd_under_sideband_exchange() {
        let (t, g) = sideband_rates(2.0, 0.3, 1.5, -0.7);
        let (t_swapped, g_swapped) = sideband_rates(2.0, 0.3, -0.7, 1.5);
        assert_eq!(t, -t_swapped);
        assert_eq!(g, g_swapped);
    }
}
