//! Simulation of single-qubit decoherence channels realised by measurement on
//! a four-qubit cluster state, with process tomography and noise modelling.

pub mod channels;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod linalg;
pub mod mbqc;
pub mod noise;
pub mod tomography;

pub use channels::{ChannelMode, DampingParams, KrausChannel};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityState, C64};
pub use mbqc::{MbqcEngine, MeasurementPattern};
pub use noise::NoiseSpec;
pub use tomography::{ProbeSet, ProcessMatrix};
