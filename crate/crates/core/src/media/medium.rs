use serde::{Deserialize, Serialize};

use super::{PeriodicProfile, PhaseMap, TwoValueSequences};
use crate::error::{param, Error, Result};

/// JSON form of a medium: either `{"profile": .., "phase": ..}` or
/// `{"two_value": {..}}`. An optional `left` fixes the rate left of the
/// construction's validity region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor", into = "RawDescriptor")]
pub enum MediumDescriptor {
    Composed {
        profile: PeriodicProfile,
        phase: PhaseMap,
        left: Option<f64>,
    },
    TwoValue {
        two_value: TwoValueSequences,
        left: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<PeriodicProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<PhaseMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    two_value: Option<TwoValueSequences>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<f64>,
}

impl TryFrom<RawDescriptor> for MediumDescriptor {
    type Error = String;
    fn try_from(r: RawDescriptor) -> std::result::Result<Self, String> {
        match (r.profile, r.phase, r.two_value) {
            (Some(profile), Some(phase), None) => Ok(Self::Composed {
                profile,
                phase,
                left: r.left,
            }),
            (None, None, Some(two_value)) => Ok(Self::TwoValue {
                two_value,
                left: r.left,
            }),
            (Some(_), None, None) => Err("medium has `profile` but no `phase`".into()),
            (None, Some(_), None) => Err("medium has `phase` but no `profile`".into()),
            (None, None, None) => {
                Err("medium needs either `profile` + `phase` or `two_value`".into())
            }
            _ => Err("medium cannot mix `two_value` with `profile`/`phase`".into()),
        }
    }
}

impl From<MediumDescriptor> for RawDescriptor {
    fn from(d: MediumDescriptor) -> Self {
        match d {
            MediumDescriptor::Composed {
                profile,
                phase,
                left,
            } => RawDescriptor {
                profile: Some(profile),
                phase: Some(phase),
                two_value: None,
                left,
            },
            MediumDescriptor::TwoValue { two_value, left } => RawDescriptor {
                profile: None,
                phase: None,
                two_value: Some(two_value),
                left,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Variant {
    Composed {
        profile: PeriodicProfile,
        phase: PhaseMap,
        left_value: f64,
    },
    TwoValue {
        sequences: TwoValueSequences,
        left_value: f64,
    },
}

/// Spatial growth rate `mu(x)` on `[0, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    variant: Variant,
    x_max: f64,
}

impl Medium {
    /// `mu0(phi(x))` for `x >= x_left`, frozen at `mu0(phi(x_left))` (or
    /// `left` when given) below.
    pub fn composed(
        profile: PeriodicProfile,
        phase: PhaseMap,
        left: Option<f64>,
        x_max: f64,
    ) -> Result<Self> {
        check_x_max(x_max)?;
        let left_value = left.unwrap_or_else(|| profile.evaluate(phase.value(phase.x_left())));
        if !(left_value >= profile.min() && left_value <= profile.max()) {
            return Err(param(format!(
                "left value {left_value} outside [{}, {}]",
                profile.min(),
                profile.max()
            )));
        }
        Ok(Self {
            variant: Variant::Composed {
                profile,
                phase,
                left_value,
            },
            x_max,
        })
    }

    /// Two-value medium, `mu_minus` (or `left`) left of `x_0`.
    pub fn two_value(sequences: TwoValueSequences, left: Option<f64>, x_max: f64) -> Result<Self> {
        check_x_max(x_max)?;
        let left_value = left.unwrap_or(sequences.mu_minus());
        if left_value != sequences.mu_minus() && left_value != sequences.mu_plus() {
            return Err(param("left value of a two-value medium must be mu_plus or mu_minus"));
        }
        Ok(Self {
            variant: Variant::TwoValue {
                sequences,
                left_value,
            },
            x_max,
        })
    }

    pub fn from_descriptor(desc: &MediumDescriptor, x_max: f64) -> Result<Self> {
        match desc.clone() {
            MediumDescriptor::Composed {
                profile,
                phase,
                left,
            } => Self::composed(profile, phase, left, x_max),
            MediumDescriptor::TwoValue { two_value, left } => {
                Self::two_value(two_value, left, x_max)
            }
        }
    }

    pub fn descriptor(&self) -> MediumDescriptor {
        match &self.variant {
            Variant::Composed {
                profile,
                phase,
                left_value,
            } => {
                let default = profile.evaluate(phase.value(phase.x_left()));
                MediumDescriptor::Composed {
                    profile: profile.clone(),
                    phase: phase.clone(),
                    left: (*left_value != default).then_some(*left_value),
                }
            }
            Variant::TwoValue {
                sequences,
                left_value,
            } => MediumDescriptor::TwoValue {
                two_value: sequences.clone(),
                left: (*left_value != sequences.mu_minus()).then_some(*left_value),
            },
        }
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn profile(&self) -> Option<&PeriodicProfile> {
        match &self.variant {
            Variant::Composed { profile, .. } => Some(profile),
            Variant::TwoValue { .. } => None,
        }
    }

    pub fn phase(&self) -> Option<&PhaseMap> {
        match &self.variant {
            Variant::Composed { phase, .. } => Some(phase),
            Variant::TwoValue { .. } => None,
        }
    }

    pub fn sequences(&self) -> Option<&TwoValueSequences> {
        match &self.variant {
            Variant::TwoValue { sequences, .. } => Some(sequences),
            Variant::Composed { .. } => None,
        }
    }

    pub fn min_rate(&self) -> f64 {
        match &self.variant {
            Variant::Composed { profile, .. } => profile.min(),
            Variant::TwoValue { sequences, .. } => sequences.mu_minus(),
        }
    }

    pub fn max_rate(&self) -> f64 {
        match &self.variant {
            Variant::Composed { profile, .. } => profile.max(),
            Variant::TwoValue { sequences, .. } => sequences.mu_plus(),
        }
    }

    /// `mu(x)`; errors outside `[0, x_max]`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0 && x <= self.x_max) {
            return Err(Error::Domain(format!(
                "position {x} outside [0, {}]",
                self.x_max
            )));
        }
        Ok(self.rate(x))
    }

    pub(crate) fn rate(&self, x: f64) -> f64 {
        match &self.variant {
            Variant::Composed {
                profile,
                phase,
                left_value,
            } => {
                if x >= phase.x_left() {
                    profile.evaluate(phase.value(x))
                } else {
                    *left_value
                }
            }
            Variant::TwoValue {
                sequences,
                left_value,
            } => sequences.rate_at(x).unwrap_or(*left_value),
        }
    }
}

fn check_x_max(x_max: f64) -> Result<()> {
    if x_max.is_finite() && x_max > 0.0 {
        Ok(())
    } else {
        Err(param(format!("X_max must be positive, got {x_max}")))
    }
}
