//! omx — modeling and data-reduction toolkit for piezo-optomechanical
//! microwave↔optical transducers.
//!
//! The crate covers four jobs:
//!
//! * **Forward models** ([`device`], [`scattering`], [`aom`]): intracavity
//!   fields, conversion scattering parameters, two- and three-mode
//!   conversion efficiencies, acousto-optic reflection spectra and the
//!   transduction figures of merit (V_π, g_µ, E_qubit).
//! * **Bit-cost calculus** ([`bitcost`]): waveform overlaps, encoding
//!   fidelity, the Helstrom–Holevo error bound and the driven phonon
//!   number / energy needed per classical bit.
//! * **Parameter extraction** ([`fit`]): damped Gauss–Newton fits that
//!   recover device rates from measured or synthetic traces, plus the
//!   synthetic-trace generator used to validate them.
//! * **Calibration** ([`calibration`]): measurement-chain arithmetic that
//!   turns raw instrument readings into photon fluxes and end-to-end
//!   efficiencies.
//!
//! Conventions: configuration files and serialized outputs carry ordinary
//! frequencies in Hz; every function in this crate takes and returns
//! angular rates in rad/s. Detuning is Δ = ω_c − ω_p (blue pump ⇒ Δ < 0).
//!
//! ```
//! use omx::device::{DeviceParams, MechanicalMode, OpticalCavity};
//! use omx::units::angular;
//!
//! let cavity = OpticalCavity::from_hz(1.934e14, 1.21e9, 0.80e9).unwrap();
//! let mech = MechanicalMode::from_hz(1.85e9, 1.93e6, 8.6e3).unwrap();
//! let dev = DeviceParams::new(cavity, mech, angular(70e3), 0.652).unwrap();
//! assert!((dev.c0() - 8.4e-6).abs() / 8.4e-6 < 0.02);
//! ```

// validations use `!(x > 0.0)` on purpose: it rejects NaN along with the
// out-of-range values, which `x <= 0.0` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aom;
pub mod bessel;
pub mod bitcost;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod device;
pub mod error;
pub mod fit;
pub mod fom;
pub mod ioutil;
pub mod scattering;
pub mod trace;
pub mod units;

pub use device::{DeviceParams, MechanicalMode, OpticalCavity, PumpSide, PumpState, ThreeModeParams};
pub use error::{Error, Result};

// Every code block in the guide runs as a doc-test, keeping the book's
// numbers in lockstep with the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }
    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Units, "../../../book/src/units.md");
    chapter!(DeviceModel, "../../../book/src/device-model.md");
    chapter!(Scattering, "../../../book/src/scattering.md");
    chapter!(Modulation, "../../../book/src/modulation.md");
    chapter!(BitCost, "../../../book/src/bit-cost.md");
    chapter!(Extraction, "../../../book/src/extraction.md");
    chapter!(Calibration, "../../../book/src/calibration.md");
    chapter!(FiguresOfMerit, "../../../book/src/figures-of-merit.md");
    chapter!(CliReference, "../../../book/src/cli.md");
}
