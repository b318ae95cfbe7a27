//! Bounded integer sampling for structural parameters (state counts, alphabet
//! sizes, out-degrees).
//!
//! The default draw is a skew-normal centred on the middle of `[min, max]`
//! with `scale = (max - min) / 6`, so roughly three standard deviations
//! span the range. The real draw is rounded to the nearest integer and
//! clamped into the range.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, SkewNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("invalid sampler spec: {0}")]
    InvalidSpec(String),
}

/// A user-supplied source of real values, rounded and clamped like the
/// default skew-normal draw.
pub trait CountSampler: Send + Sync {
    fn draw(&self, rng: &mut dyn RngCore) -> f64;

    /// Recorded in serialized specs in place of the sampler itself.
    fn label(&self) -> String {
        "custom".to_owned()
    }
}

/// A custom sampler attached to a [`SamplerSpec`].
///
/// Serializes as its label. A deserialized handle carries the label only and
/// refuses to sample until a sampler is attached again.
#[derive(Clone)]
pub struct CustomSampler {
    label: String,
    inner: Option<Arc<dyn CountSampler>>,
}

impl CustomSampler {
    pub fn new(sampler: impl CountSampler + 'static) -> Self {
        CustomSampler {
            label: sampler.label(),
            inner: Some(Arc::new(sampler)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_attached(&self) -> bool {
        self.inner.is_some()
    }
}

impl fmt::Debug for CustomSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSampler")
            .field("label", &self.label)
            .field("attached", &self.inner.is_some())
            .finish()
    }
}

impl PartialEq for CustomSampler {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

impl Serialize for CustomSampler {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label)
    }
}

impl<'de> Deserialize<'de> for CustomSampler {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(CustomSampler {
            label: String::deserialize(d)?,
            inner: None,
        })
    }
}

/// Recipe for drawing one bounded count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub min: usize,
    pub max: usize,
    #[serde(default)]
    pub skewness: f64,
    /// Replaces the skew-normal draw; `skewness` is then ignored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_sampler: Option<CustomSampler>,
}

impl SamplerSpec {
    pub fn new(min: usize, max: usize) -> Self {
        SamplerSpec {
            min,
            max,
            skewness: 0.0,
            custom_sampler: None,
        }
    }

    pub fn skewed(min: usize, max: usize, skewness: f64) -> Self {
        SamplerSpec {
            skewness,
            ..SamplerSpec::new(min, max)
        }
    }

    pub fn with_sampler(mut self, sampler: impl CountSampler + 'static) -> Self {
        self.custom_sampler = Some(CustomSampler::new(sampler));
        self
    }

    pub fn check(&self) -> Result<(), SamplingError> {
        if self.min > self.max {
            return Err(SamplingError::InvalidSpec(format!(
                "min {} exceeds max {}",
                self.min, self.max
            )));
        }
        if self.custom_sampler.is_none() && !self.skewness.is_finite() {
            return Err(SamplingError::InvalidSpec(format!(
                "skewness {} is not finite",
                self.skewness
            )));
        }
        if let Some(c) = &self.custom_sampler {
            if !c.is_attached() {
                return Err(SamplingError::InvalidSpec(format!(
                    "custom sampler {:?} has no implementation attached",
                    c.label
                )));
            }
        }
        Ok(())
    }

    /// Location and scale of the default skew-normal draw.
    pub fn skew_normal_parameters(&self) -> (f64, f64) {
        let location = (self.min as f64 + self.max as f64) / 2.0;
        let scale = if self.min == self.max {
            1.0
        } else {
            (self.max - self.min) as f64 / 6.0
        };
        (location, scale)
    }
}

/// Rounds a real draw to the nearest integer and clamps it into `[min, max]`.
pub fn round_clamp(value: f64, min: usize, max: usize) -> usize {
    if value.is_nan() {
        return min;
    }
    let rounded = value.round();
    if rounded <= min as f64 {
        min
    } else if rounded >= max as f64 {
        max
    } else {
        rounded as usize
    }
}

/// Draws one count in `[spec.min, spec.max]`.
pub fn sample_count<R: Rng + ?Sized>(spec: &SamplerSpec, rng: &mut R) -> Result<usize, SamplingError> {
    spec.check()?;
    let real = match &spec.custom_sampler {
        Some(custom) => {
            let sampler = custom.inner.as_ref().expect("checked above");
            let mut rng = rng;
            sampler.draw(&mut rng)
        }
        None => {
            let (location, scale) = spec.skew_normal_parameters();
            SkewNormal::new(location, scale, spec.skewness)
                .map_err(|e| SamplingError::InvalidSpec(e.to_string()))?
                .sample(rng)
        }
    };
    Ok(round_clamp(real, spec.min, spec.max))
}
