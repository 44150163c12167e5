use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::grid::Peak;
use crate::params::Regime;

/// Relative tolerance for components summing to the total.
pub const COMPONENT_SUM_TOL: f64 = 1e-12;

/// Reference frame of a trace's frequency axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Frame {
    /// Two-sided lab frame: peaks at `±f_m`.
    Lab,
    /// Rotating quadrature frame: one peak at zero frequency.
    Rotating,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Rotating => "rotating",
        })
    }
}

/// Labelled contributions to a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Vacuum,
    Thermal,
    /// Quantum backaction.
    Qba,
    /// Classical backaction from thermal cavity noise.
    Classical,
    /// Amplifier floor.
    Floor,
}

impl Component {
    pub const ALL: [Component; 5] =
        [Component::Vacuum, Component::Thermal, Component::Qba, Component::Classical, Component::Floor];

    pub fn name(self) -> &'static str {
        match self {
            Component::Vacuum => "vacuum",
            Component::Thermal => "thermal",
            Component::Qba => "qba",
            Component::Classical => "classical",
            Component::Floor => "floor",
        }
    }
}

/// Per-point decomposition; every vector has the length of the grid.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Components {
    pub vacuum: Vec<f64>,
    pub thermal: Vec<f64>,
    pub qba: Vec<f64>,
    pub classical: Vec<f64>,
    pub floor: Vec<f64>,
}

impl Components {
    pub fn zeros(n: usize) -> Self {
        Self {
            vacuum: alloc::vec![0.0; n],
            thermal: alloc::vec![0.0; n],
            qba: alloc::vec![0.0; n],
            classical: alloc::vec![0.0; n],
            floor: alloc::vec![0.0; n],
        }
    }

    pub fn get(&self, c: Component) -> &[f64] {
        match c {
            Component::Vacuum => &self.vacuum,
            Component::Thermal => &self.thermal,
            Component::Qba => &self.qba,
            Component::Classical => &self.classical,
            Component::Floor => &self.floor,
        }
    }

    pub fn get_mut(&mut self, c: Component) -> &mut Vec<f64> {
        match c {
            Component::Vacuum => &mut self.vacuum,
            Component::Thermal => &mut self.thermal,
            Component::Qba => &mut self.qba,
            Component::Classical => &mut self.classical,
            Component::Floor => &mut self.floor,
        }
    }

    /// Pointwise sum of all components.
    pub fn sum(&self) -> Vec<f64> {
        (0..self.vacuum.len())
            .map(|i| self.vacuum[i] + self.thermal[i] + self.qba[i] + self.classical[i] + self.floor[i])
            .collect()
    }
}

/// Provenance carried alongside a trace.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceMeta {
    pub regime: Option<Regime>,
    pub params_hash: Option<u64>,
    pub seed: Option<u64>,
    /// Peaks the trace is built around; used by the Lorentzian tail model.
    pub peaks: Vec<Peak>,
}

/// A sampled power spectral density in quanta per unit `ω`, on a grid in Hz.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumTrace {
    pub freq_hz: Vec<f64>,
    pub total: Vec<f64>,
    pub components: Option<Components>,
    pub frame: Frame,
    pub meta: TraceMeta,
}

impl SpectrumTrace {
    /// Trace without a decomposition. The grid must be strictly increasing
    /// and all values finite.
    pub fn new(freq_hz: Vec<f64>, total: Vec<f64>, frame: Frame) -> Result<Self> {
        let t = Self { freq_hz, total, components: None, frame, meta: TraceMeta::default() };
        t.validate()?;
        Ok(t)
    }

    /// Trace whose total is the sum of `components`.
    pub fn from_components(freq_hz: Vec<f64>, components: Components, frame: Frame) -> Result<Self> {
        let total = components.sum();
        let t = Self { freq_hz, total, components: Some(components), frame, meta: TraceMeta::default() };
        t.validate()?;
        Ok(t)
    }

    pub fn with_meta(mut self, meta: TraceMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }

    /// Checks grid monotonicity, lengths, finiteness and that any components
    /// sum to the total.
    pub fn validate(&self) -> Result<()> {
        let n = self.freq_hz.len();
        if n < 2 {
            return Err(Error::InvalidTrace(format!("need at least 2 points, got {n}")));
        }
        if self.total.len() != n {
            return Err(Error::InvalidTrace(format!("{} values for {n} frequencies", self.total.len())));
        }
        if let Some(k) = self.freq_hz.iter().position(|f| !f.is_finite()) {
            return Err(Error::InvalidTrace(format!("non-finite frequency at index {k}")));
        }
        if let Some(k) = self.freq_hz.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrace(format!("grid not strictly increasing at index {}", k + 1)));
        }
        if let Some(k) = self.total.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTrace(format!("non-finite value at index {k}")));
        }
        if let Some(c) = &self.components {
            for comp in Component::ALL {
                let v = c.get(comp);
                if v.len() != n {
                    return Err(Error::InvalidTrace(format!("component {} has {} points", comp.name(), v.len())));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidTrace(format!("non-finite {} component", comp.name())));
                }
            }
            let sum = c.sum();
            for (k, (s, t)) in sum.iter().zip(&self.total).enumerate() {
                if (s - t).abs() > COMPONENT_SUM_TOL * t.abs().max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidTrace(format!("components do not sum to total at index {k}")));
                }
            }
        }
        Ok(())
    }

    /// `gain·(S + n_add)`: the trace after a measurement chain. The offset is
    /// booked into the floor component.
    pub fn through_chain(&self, gain: f64, n_add: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.total {
            *v = gain * (*v + n_add);
        }
        if let Some(c) = &mut out.components {
            for comp in Component::ALL {
                for v in c.get_mut(comp).iter_mut() {
                    *v *= gain;
                }
            }
            for v in &mut c.floor {
                *v += gain * n_add;
            }
            out.total = c.sum();
        }
        out
    }

    pub fn component(&self, c: Component) -> Option<&[f64]> {
        self.components.as_ref().map(|cs| cs.get(c))
    }
}
