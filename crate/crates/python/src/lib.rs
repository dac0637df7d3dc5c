//! Python bindings. Frequencies are angular and in whatever unit the caller
//! chooses, as in the Rust library.

use phononet_core::cascaded_me::{reduced_two_qubit_model, transfer_fidelity as core_fidelity, CascadedModel, QubitState};
use phononet_core::linear_network::{self as ln, FitOptions};
use phononet_core::transfer::{self as tr};
use phononet_core::{nonreciprocal as nr, qubit_interface as qi, waveguide as wg, Complex64};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: phononet_core::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// Optomechanical filter: driven cavity coupled to a waveguide-loaded mechanical mode.
#[pyclass(name = "OptomechanicalFilter", from_py_object)]
#[derive(Clone)]
struct PyFilter {
    inner: ln::OptomechanicalFilter,
}

#[pymethods]
impl PyFilter {
    /// `g_alpha` defaults to the impedance-matched value, `delta` to `-omega_m`.
    #[new]
    #[pyo3(signature = (omega_m, gamma, gamma0, kappa, n_th, g_alpha=None, delta=None, rotating_wave=true))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        omega_m: f64,
        gamma: f64,
        gamma0: f64,
        kappa: f64,
        n_th: f64,
        g_alpha: Option<f64>,
        delta: Option<f64>,
        rotating_wave: bool,
    ) -> Self {
        let mut inner = ln::OptomechanicalFilter::matched(omega_m, gamma, gamma0, kappa, n_th);
        if let Some(g) = g_alpha {
            inner.g_alpha = Complex64::new(g, 0.0);
        }
        if let Some(d) = delta {
            inner.delta = d;
        }
        inner.rotating_wave = rotating_wave;
        PyFilter { inner }
    }

    #[staticmethod]
    fn reference() -> Self {
        PyFilter { inner: ln::OptomechanicalFilter::reference() }
    }

    #[getter]
    fn gamma_op(&self) -> f64 {
        self.inner.gamma_op()
    }

    #[getter]
    fn omega_m(&self) -> f64 {
        self.inner.omega_m
    }

    #[getter]
    fn n_th(&self) -> f64 {
        self.inner.n_th
    }

    fn default_grid(&self) -> Vec<f64> {
        self.inner.default_grid()
    }

    /// Filtered occupation N_F on `grid`.
    fn spectrum(&self, grid: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.spectrum(&grid).map_err(to_py)?.values)
    }

    fn closed_form(&self, grid: Vec<f64>) -> Vec<f64> {
        let p = self.inner.closed_form_params();
        grid.iter().map(|&w| ln::closed_form_filter(&p, w)).collect()
    }

    /// Lorentzian dip fit: center, width, floor, baseline, rms.
    fn fit_dip<'py>(&self, py: Python<'py>, grid: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.spectrum(&grid).map_err(to_py)?;
        let fit = ln::fit_lorentzian_dip(&s, &FitOptions::default()).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("center", fit.center)?;
        d.set_item("width", fit.width)?;
        d.set_item("floor", fit.floor)?;
        d.set_item("baseline", fit.baseline)?;
        d.set_item("rms", fit.rms)?;
        Ok(d)
    }

    fn floor_estimates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("intrinsic", self.inner.intrinsic_floor_estimate())?;
        d.set_item("counter_rotating", self.inner.counter_rotating_floor_estimate())?;
        d.set_item("sideband", self.inner.sideband_floor_estimate())?;
        d.set_item("dip_shift", self.inner.dip_shift_estimate())?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let f = &self.inner;
        format!(
            "OptomechanicalFilter(omega_m={}, gamma={}, gamma0={}, kappa={}, n_th={}, g_alpha={}, rotating_wave={})",
            f.omega_m, f.gamma, f.gamma0, f.kappa, f.n_th, f.g_alpha.re, f.rotating_wave
        )
    }
}

/// Γ1(t), Γ2(t) pulse pair for the state transfer.
#[pyclass(name = "PulseSchedule", from_py_object)]
#[derive(Clone)]
struct PySchedule {
    inner: tr::PulseSchedule,
}

#[pymethods]
impl PySchedule {
    /// Analytic pulses; `window` is the total window times gamma_max.
    #[new]
    #[pyo3(signature = (gamma_max, window=None, cutoff_floor=0.0))]
    fn new(gamma_max: f64, window: Option<f64>, cutoff_floor: f64) -> PyResult<Self> {
        let s = match window {
            Some(w) => tr::PulseSchedule::analytic_with_window(gamma_max, w / gamma_max),
            None => tr::PulseSchedule::analytic(gamma_max),
        }
        .with_cutoff_floor(cutoff_floor);
        s.validate().map_err(to_py)?;
        Ok(PySchedule { inner: s })
    }

    /// Designs Γ2 for a tabulated emission rate Γ1.
    #[staticmethod]
    fn design(times: Vec<f64>, gamma1: Vec<f64>) -> PyResult<Self> {
        let inner = tr::design_pulses_iterative(&times, &gamma1, &tr::DesignOptions::default()).map_err(to_py)?;
        Ok(PySchedule { inner })
    }

    #[getter]
    fn gamma_max(&self) -> f64 {
        self.inner.gamma_max
    }

    #[getter]
    fn window(&self) -> (f64, f64) {
        self.inner.window
    }

    fn gamma1(&self, t: f64) -> f64 {
        self.inner.gamma1(t)
    }

    fn gamma2(&self, t: f64) -> f64 {
        self.inner.gamma2(t)
    }

    fn fine_grid(&self, step: f64) -> Vec<f64> {
        self.inner.fine_grid(step)
    }

    /// Transfer amplitudes on `times`: keys times, g1, g2, transfer, norm_defect.
    fn evolve<'py>(&self, py: Python<'py>, times: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        let a = tr::evolve_amplitudes(&self.inner, &times).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("norm_defect", a.norm_defect())?;
        d.set_item("times", a.times)?;
        d.set_item("g1", a.g1)?;
        d.set_item("g2", a.g2)?;
        d.set_item("transfer", a.transfer)?;
        Ok(d)
    }
}

/// Closed-form N_eff for a Lorentzian dip of width `gamma` under the analytic pulse.
#[pyfunction]
fn effective_occupation(n_th: f64, n0: f64, gamma: f64, gamma_max: f64) -> f64 {
    tr::effective_occupation_closed(n_th, n0, gamma, gamma_max)
}

fn qubit(state: &str) -> PyResult<QubitState> {
    match state {
        "plus" => Ok(QubitState::plus()),
        "excited" => Ok(QubitState::excited()),
        "ground" => Ok(QubitState::ground()),
        other => Err(PyValueError::new_err(format!("unknown state `{other}`"))),
    }
}

/// State-transfer fidelity. Without `gamma` the two qubits see white noise
/// `n_th`; with it a cooled cavity of coupling `gamma` sits upstream.
#[pyfunction]
#[pyo3(signature = (schedule, n_th, state="plus", gamma=None, gamma_op=0.0, gamma0=0.0))]
fn transfer_fidelity(
    py: Python<'_>,
    schedule: &PySchedule,
    n_th: f64,
    state: &str,
    gamma: Option<f64>,
    gamma_op: f64,
    gamma0: f64,
) -> PyResult<f64> {
    let q = qubit(state)?;
    let model = match gamma {
        None => reduced_two_qubit_model(n_th, schedule.inner.clone()),
        Some(g) => CascadedModel::filtered(schedule.inner.clone(), n_th, g, gamma_op, gamma0),
    };
    py.detach(|| {
        let t = model.run_transfer(&q, 3)?;
        core_fidelity(&t, &q)
    })
    .map_err(to_py)
}

/// Three-port circulator: `[from][to]` scattering probabilities at `omega`.
#[pyfunction]
#[pyo3(signature = (t, phi, gamma, omega, gamma0=0.0))]
fn circulator_probabilities(t: f64, phi: f64, gamma: f64, omega: f64, gamma0: f64) -> PyResult<Vec<Vec<f64>>> {
    let spec = nr::CirculatorSpec { t, phi, gamma, gamma0, omega_m: 0.0 };
    let r = nr::circulator_response(&spec, omega).map_err(to_py)?;
    Ok((0..3).map(|from| (0..3).map(|to| r.probability(from, to)).collect()).collect())
}

/// Drive amplitudes and phases giving a target hopping `t` and phase `phi`.
#[pyfunction]
#[pyo3(signature = (t, phi, omega_m, j, kappa, g, alpha_max, delta1=None, delta2=None))]
#[allow(clippy::too_many_arguments)]
fn design_drives<'py>(
    py: Python<'py>,
    t: f64,
    phi: f64,
    omega_m: f64,
    j: f64,
    kappa: f64,
    g: f64,
    alpha_max: f64,
    delta1: Option<f64>,
    delta2: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let fixed = nr::DriveConstraints {
        delta1: delta1.unwrap_or(-omega_m),
        delta2: delta2.unwrap_or(-omega_m),
        j,
        kappa,
        g,
        omega_m,
        alpha_max,
    };
    let design = nr::solve_drives_for_target(t, phi, &fixed).map_err(to_py)?;
    let ec = nr::effective_coupling(&design, omega_m).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("drive1", design.drive1)?;
    d.set_item("phase1", design.phase1)?;
    d.set_item("drive2", design.drive2)?;
    d.set_item("phase2", design.phase2)?;
    d.set_item("t_eff", ec.t_eff)?;
    d.set_item("phi", ec.phi)?;
    d.set_item("gamma_op", ec.gamma_op)?;
    d.set_item("warnings", ec.warnings)?;
    Ok(d)
}

/// Resonator chain seen as a phonon waveguide.
#[pyclass(name = "Chain", from_py_object)]
#[derive(Clone)]
struct PyChain {
    inner: wg::ChainSpec,
}

#[pymethods]
impl PyChain {
    #[new]
    fn new(n_sites: usize, omega0: f64, coupling_k: f64, lattice_a: f64, gamma0: f64, n_th: f64) -> PyResult<Self> {
        let inner =
            wg::ChainSpec { n_sites, omega0, coupling_k, lattice_a, intrinsic_gamma0: gamma0, bath_occupation: n_th };
        inner.validate().map_err(to_py)?;
        Ok(PyChain { inner })
    }

    fn dispersion(&self, n: i64) -> PyResult<f64> {
        wg::dispersion_exact(&self.inner, n).map_err(to_py)
    }

    /// Sound speed, band offset, bandwidth, mean free path and warnings.
    fn continuum<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = wg::continuum_parameters(&self.inner);
        let d = PyDict::new(py);
        d.set_item("sound_speed", c.sound_speed_c)?;
        d.set_item("omega_offset", c.omega_offset)?;
        d.set_item("bandwidth", c.bandwidth)?;
        d.set_item("mean_free_path", c.mean_free_path)?;
        d.set_item("warnings", c.warnings)?;
        Ok(d)
    }

    /// Spectrum after a distance `z` along the lossy continuum.
    fn propagate(&self, grid: Vec<f64>, values: Vec<f64>, z: f64) -> PyResult<Vec<f64>> {
        let s = ln::NoiseSpectrum::new(grid, values).map_err(to_py)?;
        let c = wg::continuum_parameters(&self.inner);
        Ok(wg::propagate_spectrum(&s, z, &c).map_err(to_py)?.values)
    }

    /// Same as `propagate` but from the discrete chain, read at `site`.
    fn simulate(&self, grid: Vec<f64>, values: Vec<f64>, site: usize) -> PyResult<Vec<f64>> {
        let s = ln::NoiseSpectrum::new(grid, values).map_err(to_py)?;
        Ok(wg::simulate_lossy_chain(&self.inner, &s, site).map_err(to_py)?.values)
    }
}

/// Phonon-assisted Raman coupling of a three-level defect.
#[pyfunction]
fn spin_phonon_coupling<'py>(
    py: Python<'py>,
    lambda_: f64,
    omega_m: f64,
    omega0: f64,
    omega1: f64,
    delta: f64,
    gamma_e: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let p = qi::RamanParams { lambda: lambda_, omega_m, omega0, omega1, delta, gamma_e };
    let c = qi::effective_spin_phonon(&p).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("lambda_eff", c.lambda_eff)?;
    d.set_item("gamma_eff0", c.gamma_eff0)?;
    d.set_item("gamma_eff1", c.gamma_eff1)?;
    d.set_item("gamma_eff_mean", c.gamma_eff_mean)?;
    d.set_item("figure_of_merit", c.figure_of_merit)?;
    d.set_item("warnings", c.warnings)?;
    Ok(d)
}

#[pymodule]
fn phononet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFilter>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyChain>()?;
    m.add_function(wrap_pyfunction!(effective_occupation, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(circulator_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(design_drives, m)?)?;
    m.add_function(wrap_pyfunction!(spin_phonon_coupling, m)?)?;
    Ok(())
}
