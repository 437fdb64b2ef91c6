//! Detection, location, and quantification of stiffness loss in multi-story
//! shear frames from story acceleration records.
//!
//! The pipeline decomposes each record with ensemble empirical mode
//! decomposition, extracts instantaneous amplitude and frequency through the
//! Hilbert transform, reads the first natural frequency off a frequency
//! histogram and the mode shape off amplitude ratios, and feeds those modal
//! estimates to radial basis function networks: one family of networks
//! emulates healthy story responses to expose damage onset in prediction
//! residuals, another maps modal data back to story stiffness fractions.
//! A nonlinear shear-frame simulator (Newmark integration over bilinear
//! hysteretic stories with stiffness degradation) generates validation data.

pub mod decomposition;
pub mod detection;
pub mod error;
pub mod hilbert;
pub mod modal;
pub mod rbf;
pub mod signal;
pub mod simulator;
mod spline;

pub use decomposition::{emd, eemd, envelopes, DecompMeta, EemdSettings, ImfSet, SiftSettings};
pub use detection::{
    build_lag_features, detect_onset, residual_traces, train_emulator, DetectConfig, Emulator,
    LagSpec, OnsetReport, ResidualTraces,
};
pub use error::{Error, Result};
pub use modal::{
    estimate_modal, frequency_histogram, mode_shape, select_first_mode_imfs, FrequencyHistogram,
    ModalConfig, ModalEstimate, Selection,
};
pub use rbf::{train, RbfNet, Scaler, TrainConfig};
pub use hilbert::{
    hilbert_transform, instantaneous, instantaneous_with, unwrapped_phase, AnalyticSignal,
    InstantOptions, InstantTrace,
};
pub use signal::{child_seed, gaussian_noise, std_dev, synth_three_tone, NoiseSpec, TimeSeries};
pub use simulator::{
    calibrate, eigen_modes, rayleigh_coefficients, simulate, simulate_from, Excursion,
    InitialState, MaterialLaw, ModeSet, RayleighSpec, ShearFrameModel, SimResult,
};
