//! Model parameters: attachment functions, delay laws and run configuration.

mod attachment;
mod config;
mod delay;

pub use attachment::{AttachmentKernel, KernelKind, TailModel, TailRule};
pub use config::{preset, GrowthConfig, RunSettings, SamplerStrategy, PRESETS};
pub use delay::{snapshot_time, DelayKind, DelayLaw};
