//! Scenario files: JSON, angles in degrees, unknown keys rejected.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::coords::{cart_to_mean, kep_to_cart, KeplerianElements};
use crate::dynamics::{Propagator, SolarGeometry, SpacecraftConfig};
use crate::error::{Error, Result};
use crate::guidance::{GuidanceConfig, Mission, ThrustErrorModel, TransferTarget};
use crate::reference::{DriftSearch, ReferenceConfig};
use crate::socp::SolverSettings;
use crate::tracker::SegmentConfig;

/// Osculating initial elements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialElements {
    pub a_km: f64,
    pub e: f64,
    pub i_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
    pub ta_deg: f64,
}

/// Mean target elements at the scenario epoch. Without `i_deg` and
/// `raan_deg` only the semi-major axis is targeted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetElements {
    pub a_km: f64,
    #[serde(default)]
    pub i_deg: Option<f64>,
    #[serde(default)]
    pub raan_deg: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GuidanceSpec {
    /// m/s.
    pub epsilon: f64,
    pub dc_ref: f64,
    pub nodes_per_orbit: usize,
    pub n_orbits: usize,
    pub dv_prime_weight: f64,
    pub adjust_reference: bool,
    /// s.
    pub profile_step: f64,
    pub max_recomputations: usize,
    pub search: DriftSearch,
    pub solver: SolverSettings,
}

impl Default for GuidanceSpec {
    fn default() -> Self {
        let g = GuidanceConfig::default();
        GuidanceSpec {
            epsilon: g.epsilon,
            dc_ref: g.reference.dc_ref,
            nodes_per_orbit: g.segment.nodes_per_orbit,
            n_orbits: g.segment.n_orbits,
            dv_prime_weight: g.segment.dv_prime_weight,
            adjust_reference: g.reference.adjust,
            profile_step: g.reference.profile_step,
            max_recomputations: g.max_recomputations,
            search: g.reference.search,
            solver: g.solver,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorSpec {
    /// Probability per segment, 0..1.
    pub p_misthrust: f64,
    /// Fractional thrust magnitude standard deviation.
    pub sigma_t: f64,
    pub sigma_beta_deg: f64,
    pub seed: u64,
    pub forced_off_segments: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub prefix: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    /// RFC 3339 UTC epoch of scenario time zero.
    pub epoch: String,
    pub spacecraft: SpacecraftConfig,
    pub initial: InitialElements,
    pub target: TargetElements,
    #[serde(default)]
    pub guidance: GuidanceSpec,
    #[serde(default)]
    pub errors: ErrorSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioFile {
    pub fn from_json(s: &str) -> Result<Self> {
        let sc: ScenarioFile =
            serde_json::from_str(s).map_err(|e| Error::Scenario(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ScenarioFile::from_json(&text).map_err(|e| match e {
            Error::Scenario(msg) => Error::Scenario(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn epoch(&self) -> Result<DateTime<Utc>> {
        DateTime::parse_from_rfc3339(&self.epoch)
            .map(|t| t.with_timezone(&Utc))
            .map_err(|e| Error::Scenario(format!("epoch {:?}: {e}", self.epoch)))
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Scenario(e.to_string());
        self.spacecraft.validate().map_err(wrap)?;
        self.epoch()?;
        let i = &self.initial;
        if !(i.a_km > 0.0 && (0.0..1.0).contains(&i.e)) {
            return Err(Error::Scenario(format!(
                "initial: a_km = {} and e = {} must describe an ellipse",
                i.a_km, i.e
            )));
        }
        if !(self.target.a_km > 0.0) {
            return Err(Error::Scenario(format!(
                "target.a_km must be positive, got {}",
                self.target.a_km
            )));
        }
        if self.target.raan_deg.is_some() && self.target.i_deg.is_none() {
            return Err(Error::Scenario(
                "target.raan_deg requires target.i_deg".into(),
            ));
        }
        let g = &self.guidance;
        if !(g.dc_ref > 0.0 && g.dc_ref <= self.spacecraft.duty_cycle) {
            return Err(Error::Scenario(format!(
                "guidance.dc_ref = {} must lie in (0, duty_cycle = {}]",
                g.dc_ref, self.spacecraft.duty_cycle
            )));
        }
        self.guidance_config().validate().map_err(wrap)?;
        Ok(())
    }

    pub fn error_model(&self) -> ThrustErrorModel {
        ThrustErrorModel {
            p_misthrust: self.errors.p_misthrust,
            sigma_t: self.errors.sigma_t,
            sigma_beta: self.errors.sigma_beta_deg.to_radians(),
            seed: self.errors.seed,
            forced_off_segments: self.errors.forced_off_segments,
        }
    }

    pub fn guidance_config(&self) -> GuidanceConfig {
        let g = &self.guidance;
        GuidanceConfig {
            epsilon: g.epsilon,
            reference: ReferenceConfig {
                dc_ref: g.dc_ref,
                nodes_per_orbit: g.nodes_per_orbit,
                profile_step: g.profile_step,
                search: g.search,
                adjust: g.adjust_reference,
            },
            segment: SegmentConfig {
                n_orbits: g.n_orbits,
                nodes_per_orbit: g.nodes_per_orbit,
                dv_prime_weight: g.dv_prime_weight,
            },
            errors: self.error_model(),
            solver: g.solver.clone(),
            max_recomputations: g.max_recomputations,
        }
    }

    /// Low-fidelity mission: two-body, J2 and drag.
    pub fn mission(&self) -> Result<Mission> {
        self.validate()?;
        let prop = Propagator::low_fidelity(&self.spacecraft);
        let body = prop.model.conversion_body();
        let i = &self.initial;
        let kep = KeplerianElements::osculating(
            i.a_km,
            i.e,
            i.i_deg.to_radians(),
            i.raan_deg.to_radians(),
            i.argp_deg.to_radians(),
            i.ta_deg.to_radians(),
        );
        let x0 = kep_to_cart(&kep, body.mu, 0.0);
        let target = match self.target.i_deg {
            Some(inc) => TransferTarget {
                a: self.target.a_km,
                i: inc.to_radians(),
                raan: self.target.raan_deg.map(f64::to_radians),
            },
            None => TransferTarget {
                a: self.target.a_km,
                i: cart_to_mean(&x0, &body)?.i,
                raan: None,
            },
        };
        Ok(Mission {
            prop,
            solar: SolarGeometry::new(&self.epoch()?),
            x0,
            m0: self.spacecraft.m0,
            target,
            config: self.guidance_config(),
        })
    }
}
