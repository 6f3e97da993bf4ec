//! Simulation and optimization of indoor visible-light links assisted by a
//! wall-mounted mirror array and a liquid-crystal receiver.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod objectives;
pub mod optics;
pub mod sca;
pub mod scenario;
pub mod system;

pub use channel::{total_gain, ChannelGain, LosMode, PathSet};
pub use error::{Error, Result};
pub use geometry::{CylinderBlocker, Vec3};
pub use optics::{LcState, Receiver};
pub use system::{MirrorArray, Scene, SystemParams, UserState, WallPanel};
