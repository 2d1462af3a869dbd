//! Lotteries over alternatives and point evaluation of distortion.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cardinal::{MetricSpace, UtilityProfile};
use crate::{tol, Error, Result};

/// A probability distribution over `m` alternatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lottery {
    prob: Vec<f64>,
}

impl Lottery {
    pub fn new(prob: Vec<f64>) -> Result<Self> {
        if prob.is_empty() {
            return Err(Error::InvalidParameter("empty lottery".into()));
        }
        if prob.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidParameter("lottery entries must be nonnegative".into()));
        }
        let s: f64 = prob.iter().sum();
        if (s - 1.0).abs() > tol::LOTTERY {
            return Err(Error::InvalidParameter(format!("lottery sums to {s}")));
        }
        Ok(Self { prob })
    }

    /// Scales nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if s.is_nan() || s <= 0.0 || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative with positive sum".into()));
        }
        let mut prob: Vec<f64> = weights.into_iter().map(|w| w / s).collect();
        // absorb rounding so the sum is within the lottery tolerance
        let drift: f64 = 1.0 - prob.iter().sum::<f64>();
        if let Some(k) = (0..prob.len()).max_by(|&a, &b| prob[a].total_cmp(&prob[b])) {
            prob[k] += drift;
        }
        Self::new(prob)
    }

    pub fn point_mass(m: usize, alt: usize) -> Self {
        let mut prob = vec![0.0; m];
        prob[alt] = 1.0;
        Self { prob }
    }

    pub fn uniform(m: usize) -> Self {
        Self { prob: vec![1.0 / m as f64; m] }
    }

    pub fn m(&self) -> usize {
        self.prob.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn get(&self, alt: usize) -> f64 {
        self.prob[alt]
    }

    /// The alternative carrying all the mass, if any.
    pub fn as_point_mass(&self) -> Option<usize> {
        self.prob.iter().position(|&p| p == 1.0)
    }

    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.prob.iter().zip(values).map(|(p, v)| p * v).sum()
    }
}

/// A distortion: a finite ratio at least one, or unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistortionValue {
    Finite(f64),
    Unbounded,
}

impl DistortionValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            DistortionValue::Finite(x) => Some(x),
            DistortionValue::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, DistortionValue::Unbounded)
    }

    /// `Finite(x)` as `x`, `Unbounded` as infinity.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// True when `self` exceeds `other` by more than `tol`.
    pub fn exceeds(self, other: DistortionValue, tol: f64) -> bool {
        match (self, other) {
            (DistortionValue::Unbounded, DistortionValue::Unbounded) => false,
            (DistortionValue::Unbounded, _) => true,
            (_, DistortionValue::Unbounded) => false,
            (DistortionValue::Finite(a), DistortionValue::Finite(b)) => a > b + tol,
        }
    }

    /// Agreement within `tol`; unbounded only agrees with unbounded.
    pub fn agrees(self, other: DistortionValue, tol: f64) -> bool {
        match (self, other) {
            (DistortionValue::Unbounded, DistortionValue::Unbounded) => true,
            (DistortionValue::Finite(a), DistortionValue::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }

    /// Cell text used in CSV output.
    pub fn to_csv(self) -> String {
        match self {
            DistortionValue::Finite(x) => format!("{x:.9}"),
            DistortionValue::Unbounded => "inf".into(),
        }
    }
}

impl fmt::Display for DistortionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistortionValue::Finite(x) => write!(f, "{x}"),
            DistortionValue::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for DistortionValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DistortionValue::Finite(x) => s.serialize_f64(*x),
            DistortionValue::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for DistortionValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(DistortionValue::Finite(x)),
            Raw::Text(s) if s == "unbounded" => Ok(DistortionValue::Unbounded),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("unexpected distortion `{s}`"))),
        }
    }
}

// Below this an objective is treated as zero.
const ZERO: f64 = 1e-12;

fn ratio(num: f64, den: f64) -> DistortionValue {
    if den <= ZERO {
        if num > ZERO {
            DistortionValue::Unbounded
        } else {
            DistortionValue::Finite(1.0)
        }
    } else {
        DistortionValue::Finite(num / den)
    }
}

/// A cardinal instance against which a lottery can be scored.
pub trait Cardinal {
    fn distortion(&self, lot: &Lottery) -> DistortionValue;
}

impl Cardinal for MetricSpace {
    /// `E[sc] / min_X sc(X)`.
    fn distortion(&self, lot: &Lottery) -> DistortionValue {
        let sc = self.social_costs();
        let best = sc.iter().copied().fold(f64::INFINITY, f64::min);
        ratio(lot.expectation(&sc), best)
    }
}

impl Cardinal for UtilityProfile {
    /// `max_X sw(X) / E[sw]`.
    fn distortion(&self, lot: &Lottery) -> DistortionValue {
        let sw = self.social_welfares();
        let best = sw.iter().copied().fold(0.0, f64::max);
        ratio(best, lot.expectation(&sw))
    }
}

pub fn eval_distortion<C: Cardinal + ?Sized>(lot: &Lottery, cardinal: &C) -> DistortionValue {
    cardinal.distortion(lot)
}
