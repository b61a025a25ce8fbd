//! Growth-rate media: periodic profiles, phase maps, their composition and
//! two-value interval media.

mod medium;
mod phase;
mod profile;
mod regime;
mod sequences;

pub use medium::{Medium, MediumDescriptor};
pub use phase::{PhaseKind, PhaseMap};
pub use profile::{PeriodicProfile, Plateau, ProfileKind};
pub use regime::{classify_regime, default_probes, Regime};
pub use sequences::{geometric_sequences, sequences_from_phase, sequences_from_plateau, TwoValueSequences};
