//! JSON configuration records. Every rate and frequency is in Hz here and is
//! converted to rad/s on the way into the model.

use std::path::Path;

use optomech_core::constants::{hz_to_rad, rad_to_hz, TWO_PI};
use optomech_core::pipeline::PipelineConfig;
use optomech_core::synth::{
    Analyzer, HeatingModel, MeasurementChain, PowerSweepConfig, PumpSweepConfig, TemperatureSweepConfig,
};
use optomech_core::{validate_params, BathState, CheckedConfig, CoolingTone, DriveScheme, Regime, SystemParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Device, drive and baths in one flat record.
///
/// Only the six device fields are required. A bath is given either as
/// `temperature_K` or as `n_m_T`, not both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ModelConfig {
    pub omega_c_hz: f64,
    pub omega_m_hz: f64,
    pub kappa_e_hz: f64,
    pub kappa_i_hz: f64,
    pub gamma_hz: f64,
    pub g0_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    /// Enhanced coupling per tone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub G_hz: Option<f64>,
    /// Pump detuning of the unresolved-sideband tone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_hz: Option<f64>,
    /// Measured BAE quadrature angle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooling_G_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooling_delta_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_m_T: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_I_T: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_K: Option<f64>,
}

impl ModelConfig {
    /// Record holding only the device fields of `p`.
    pub fn device(p: &SystemParams) -> Self {
        Self {
            omega_c_hz: rad_to_hz(p.omega_c),
            omega_m_hz: rad_to_hz(p.omega_m),
            kappa_e_hz: rad_to_hz(p.kappa_e),
            kappa_i_hz: rad_to_hz(p.kappa_i),
            gamma_hz: rad_to_hz(p.gamma),
            g0_hz: rad_to_hz(p.g0),
            regime: None,
            G_hz: None,
            delta_hz: None,
            theta_rad: None,
            cooling_G_hz: None,
            cooling_delta_hz: None,
            n_m_T: None,
            n_I_T: None,
            temperature_K: None,
        }
    }

    /// Full record for a drive and bath.
    pub fn from_model(p: &SystemParams, drive: &DriveScheme, baths: &BathState) -> Self {
        let mut c = Self::device(p);
        c.regime = Some(drive.regime().name().to_string());
        c.G_hz = Some(rad_to_hz(drive.coupling()));
        match *drive {
            DriveScheme::BadCavitySingleTone { detuning, .. } => c.delta_hz = Some(rad_to_hz(detuning)),
            DriveScheme::RedSidebandSingleTone { .. } => {}
            DriveScheme::TwoToneBae { theta, cooling, .. } => {
                c.theta_rad = Some(theta);
                if let Some(tone) = cooling {
                    c.cooling_G_hz = Some(rad_to_hz(tone.coupling));
                    c.cooling_delta_hz = Some(rad_to_hz(tone.delta));
                }
            }
        }
        match baths.temperature {
            Some(t) => c.temperature_K = Some(t),
            None => c.n_m_T = Some(baths.n_m_T),
        }
        c.n_I_T = Some(baths.n_I_T);
        c
    }

    pub fn params(&self) -> Result<SystemParams> {
        Ok(SystemParams::from_hz(
            self.omega_c_hz,
            self.omega_m_hz,
            self.kappa_e_hz,
            self.kappa_i_hz,
            self.gamma_hz,
            self.g0_hz,
        )?)
    }

    pub fn regime(&self) -> Result<Regime> {
        let name = self.regime.as_deref().ok_or_else(|| Error::Config("missing field 'regime'".into()))?;
        name.parse().map_err(|e: optomech_core::Error| Error::Config(e.to_string()))
    }

    pub fn drive(&self) -> Result<DriveScheme> {
        let coupling = hz_to_rad(self.G_hz.unwrap_or(0.0));
        Ok(match self.regime()? {
            Regime::BadCavitySingleTone => {
                DriveScheme::BadCavitySingleTone { coupling, detuning: hz_to_rad(self.delta_hz.unwrap_or(0.0)) }
            }
            Regime::RedSidebandSingleTone => DriveScheme::RedSidebandSingleTone { coupling },
            Regime::TwoToneBae => {
                let cooling = match (self.cooling_G_hz, self.cooling_delta_hz) {
                    (None, None) => None,
                    (Some(g), Some(d)) => Some(CoolingTone { coupling: hz_to_rad(g), delta: hz_to_rad(d) }),
                    _ => {
                        return Err(Error::Config("cooling_G_hz and cooling_delta_hz must be given together".into()))
                    }
                };
                DriveScheme::TwoToneBae { coupling, theta: self.theta_rad.unwrap_or(0.0), cooling }
            }
        })
    }

    pub fn baths(&self, params: &SystemParams) -> Result<BathState> {
        let n_i = self.n_I_T.unwrap_or(0.0);
        Ok(match (self.temperature_K, self.n_m_T) {
            (Some(_), Some(_)) => return Err(Error::Config("give temperature_K or n_m_T, not both".into())),
            (Some(t), None) => BathState::at_temperature(params, t, n_i)?,
            (None, n) => BathState::new(n.unwrap_or(0.0), n_i)?,
        })
    }

    /// Parameters and drive after every model check.
    pub fn checked(&self) -> Result<CheckedConfig> {
        let params = self.params()?;
        Ok(validate_params(&params, &self.drive()?)?)
    }
}

/// Auxiliary cooling tone given by the total linewidth it produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingConfig {
    pub linewidth_hz: f64,
    /// Offset of the tone from the red sideband.
    #[serde(default = "default_cooling_delta_hz")]
    pub delta_hz: f64,
}

fn default_cooling_delta_hz() -> f64 {
    400.0
}

impl CoolingConfig {
    pub fn tone(&self, params: &SystemParams) -> Result<CoolingTone> {
        Ok(CoolingTone::for_linewidth(params, hz_to_rad(self.linewidth_hz), hz_to_rad(self.delta_hz))?)
    }
}

/// Single red-sideband tone stepped in power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct PumpSection {
    pub cooperativities: Vec<f64>,
    /// `𝒥/(2π)²`: squared coupling in Hz² per generator power unit.
    pub coupling_per_power_hz2: f64,
    pub temperature_K: f64,
    #[serde(default)]
    pub n_I_T: f64,
}

/// BAE readout while the cryostat temperature is stepped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct TemperatureSection {
    pub cooperativity: f64,
    pub temperatures_K: Vec<f64>,
    #[serde(default)]
    pub t_floor_K: Option<f64>,
    #[serde(default)]
    pub n_I_T: f64,
    #[serde(default)]
    pub cooling: Option<CoolingConfig>,
}

/// BAE readout while both tones are stepped in power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct PowerSection {
    pub cooperativities: Vec<f64>,
    pub coupling_per_power_hz2: f64,
    pub temperature_K: f64,
    #[serde(default)]
    pub n_I_T: f64,
    /// Fixed cooling tone; `null` switches it off.
    #[serde(default = "default_power_cooling")]
    pub cooling: Option<CoolingConfig>,
    #[serde(default)]
    pub heating: HeatingModel,
}

/// Cooling that broadens the mode to 2.9 Hz during the power sweep.
pub fn default_power_cooling() -> Option<CoolingConfig> {
    Some(CoolingConfig { linewidth_hz: 2.9, delta_hz: default_cooling_delta_hz() })
}

/// A synthetic experiment: device, detection chain and up to three sweeps.
/// `pipeline` holds the analysis settings `calibrate` should use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub device: ModelConfig,
    pub chain: MeasurementChain,
    #[serde(default)]
    pub analyzer: Analyzer,
    #[serde(default)]
    pub jitter_hz: f64,
    #[serde(default)]
    pub pump: Option<PumpSection>,
    #[serde(default)]
    pub temperature: Option<TemperatureSection>,
    #[serde(default)]
    pub power: Option<PowerSection>,
    #[serde(default)]
    pub pipeline: Option<PipelineConfig>,
}

fn rad2(hz2: f64) -> f64 {
    TWO_PI * TWO_PI * hz2
}

impl ScenarioConfig {
    pub fn pump_sweep(&self) -> Result<Option<PumpSweepConfig>> {
        let params = self.device.params()?;
        Ok(self.pump.as_ref().map(|s| PumpSweepConfig {
            params,
            cooperativities: s.cooperativities.clone(),
            coupling_per_power: rad2(s.coupling_per_power_hz2),
            temperature_k: s.temperature_K,
            n_I_T: s.n_I_T,
            chain: self.chain,
            analyzer: self.analyzer,
            jitter_hz: self.jitter_hz,
        }))
    }

    pub fn temperature_sweep(&self) -> Result<Option<TemperatureSweepConfig>> {
        let params = self.device.params()?;
        self.temperature
            .as_ref()
            .map(|s| {
                Ok(TemperatureSweepConfig {
                    params,
                    cooperativity: s.cooperativity,
                    cooling: s.cooling.map(|c| c.tone(&params)).transpose()?,
                    temperatures_k: s.temperatures_K.clone(),
                    t_floor_k: s.t_floor_K,
                    n_I_T: s.n_I_T,
                    chain: self.chain,
                    analyzer: self.analyzer,
                    jitter_hz: self.jitter_hz,
                })
            })
            .transpose()
    }

    pub fn power_sweep(&self) -> Result<Option<PowerSweepConfig>> {
        let params = self.device.params()?;
        self.power
            .as_ref()
            .map(|s| {
                Ok(PowerSweepConfig {
                    params,
                    cooperativities: s.cooperativities.clone(),
                    coupling_per_power: rad2(s.coupling_per_power_hz2),
                    temperature_k: s.temperature_K,
                    n_I_T: s.n_I_T,
                    cooling: s.cooling.map(|c| c.tone(&params)).transpose()?,
                    heating: s.heating,
                    chain: self.chain,
                    analyzer: self.analyzer,
                    jitter_hz: self.jitter_hz,
                })
            })
            .transpose()
    }
}

/// Reads a JSON configuration file; any failure is a configuration error
/// naming the file.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
