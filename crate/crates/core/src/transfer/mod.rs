//! Two-node state transfer through a phonon channel with qubits whose decay
//! rates into the channel are switched in time.

mod amplitudes;
mod design;
mod occupation;
mod pulse;

pub use amplitudes::{dark_state_residual, evolve_amplitudes, evolve_amplitudes_from, TransferAmplitudes};
pub use design::{design_pulses_iterative, DesignOptions};
pub use occupation::{
    effective_occupation_closed, effective_occupation_integral, effective_occupation_integral_with_step,
    pulse_spectrum_f, spectral_fraction, ChannelNoiseModel,
};
pub use pulse::{pulse_eq31, PulseSchedule, PulseShape, TabulatedPulse, DEFAULT_WINDOW};
