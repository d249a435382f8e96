use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ramp::{ionization_threshold, FieldRamp};
use crate::error::{Error, Result};
use crate::format::g9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RydbergPopulation {
    pub label: String,
    pub n_star: f64,
    pub count: f64,
}

/// Ion signal recorded before the ramp (collisional ionization during the
/// excitation pulse), spread uniformly over `[start, stop]` us.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub start: f64,
    pub stop: f64,
    pub count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Populations {
    /// Ions left in the cloud, pulled out as soon as the field rises.
    #[serde(default)]
    pub prompt_ions: f64,
    #[serde(default)]
    pub rydberg: Vec<RydbergPopulation>,
    #[serde(default)]
    pub background: Option<Background>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detector {
    /// Ion flight time to the MCP, us.
    #[serde(default)]
    pub flight_time: f64,
    /// Gaussian sigma of the MCP response, us.
    #[serde(default = "default_response")]
    pub response_width: f64,
    /// Extra Gaussian sigma on field-ionized arrivals (collisional l-mixing), us.
    #[serde(default = "default_smear")]
    pub rydberg_smear: f64,
    /// Sampling step, us.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_start")]
    pub start: f64,
    #[serde(default = "default_stop")]
    pub stop: f64,
    /// Draw this many arrival times per event instead of the analytic
    /// smear; needs a seed.
    #[serde(default)]
    pub monte_carlo: Option<usize>,
}

fn default_response() -> f64 {
    0.5
}

fn default_smear() -> f64 {
    4.0
}

fn default_step() -> f64 {
    0.1
}

fn default_start() -> f64 {
    -110.0
}

fn default_stop() -> f64 {
    150.0
}

impl Default for Detector {
    fn default() -> Self {
        Detector {
            flight_time: 0.0,
            response_width: default_response(),
            rydberg_smear: default_smear(),
            step: default_step(),
            start: default_start(),
            stop: default_stop(),
            monte_carlo: None,
        }
    }
}

impl Detector {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.stop > self.start) {
            return Err(Error::config("detector time grid must have positive step and span"));
        }
        if !(self.response_width > 0.0) || !(self.rydberg_smear >= 0.0) || !(self.flight_time >= 0.0) {
            return Err(Error::config("detector widths must be positive and flight time >= 0"));
        }
        if self.monte_carlo == Some(0) {
            return Err(Error::config("Monte Carlo sample count must be positive"));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    PromptIon,
    FieldIonizedRydberg,
    Background,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent {
    pub species: Species,
    pub label: String,
    /// Mean arrival time at the MCP, us.
    pub time: f64,
    pub count: f64,
    /// Field needed to release this species, V/cm.
    pub threshold: f64,
}

/// A population whose threshold the ramp never reaches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Undetected {
    pub label: String,
    pub count: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionTimeline {
    pub time: Vec<f64>,
    pub field: Vec<f64>,
    /// Counts per us.
    pub signal: Vec<f64>,
    pub events: Vec<DetectionEvent>,
    pub undetected: Vec<Undetected>,
    /// Atoms per signal unit, when a calibration is applied.
    pub calibration: Option<f64>,
}

fn gaussian(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// MCP trace for prompt ions, field-ionized Rydberg levels and an optional
/// background window, given a field ramp triggered at t = 0.
///
/// `seed` drives the Monte Carlo smear when the detector asks for one.
pub fn detection_trace(
    pops: &Populations,
    ramp: &FieldRamp,
    det: &Detector,
    seed: Option<u64>,
) -> Result<DetectionTimeline> {
    ramp.validate()?;
    det.validate()?;
    let counts = std::iter::once(pops.prompt_ions)
        .chain(pops.rydberg.iter().map(|r| r.count))
        .chain(pops.background.iter().map(|b| b.count));
    if counts.into_iter().any(|c| !(c >= 0.0) || !c.is_finite()) {
        return Err(Error::domain("populations must be finite and non-negative"));
    }

    let mut events = Vec::new();
    let mut undetected = Vec::new();
    if pops.prompt_ions > 0.0 {
        events.push(DetectionEvent {
            species: Species::PromptIon,
            label: "prompt".into(),
            time: ramp.switch_delay + det.flight_time,
            count: pops.prompt_ions,
            threshold: 0.0,
        });
    }
    for r in &pops.rydberg {
        let threshold = ionization_threshold(r.n_star)?;
        match ramp.crossing_time(threshold) {
            Some(t) => events.push(DetectionEvent {
                species: Species::FieldIonizedRydberg,
                label: r.label.clone(),
                time: t + det.flight_time,
                count: r.count,
                threshold,
            }),
            None => undetected.push(Undetected { label: r.label.clone(), count: r.count, threshold }),
        }
    }
    if let Some(bg) = &pops.background {
        if !(bg.stop > bg.start) {
            return Err(Error::config("background window must have stop > start"));
        }
        events.push(DetectionEvent {
            species: Species::Background,
            label: "background".into(),
            time: 0.5 * (bg.start + bg.stop),
            count: bg.count,
            threshold: 0.0,
        });
    }

    let time = det.times();
    let field: Vec<f64> = time.iter().map(|&t| ramp.field(t)).collect();
    let mut signal = vec![0.0; time.len()];
    let sigma = |e: &DetectionEvent| match e.species {
        Species::FieldIonizedRydberg => det.response_width.hypot(det.rydberg_smear),
        _ => det.response_width,
    };
    match (det.monte_carlo, seed) {
        (Some(_), None) => return Err(Error::config("Monte Carlo smear needs a seed")),
        (Some(samples), Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for e in &events {
                let weight = e.count / samples as f64 / det.step;
                let jitter = Normal::new(0.0, sigma(e)).map_err(|err| Error::domain(err.to_string()))?;
                for _ in 0..samples {
                    let t = match (e.species, &pops.background) {
                        (Species::Background, Some(bg)) => {
                            bg.start + (bg.stop - bg.start) * rand::Rng::random::<f64>(&mut rng)
                        }
                        _ => e.time + jitter.sample(&mut rng),
                    };
                    let k = ((t - det.start) / det.step).round();
                    if k >= 0.0 && (k as usize) < signal.len() {
                        signal[k as usize] += weight;
                    }
                }
            }
        }
        (None, _) => {
            for e in &events {
                for (s, &t) in signal.iter_mut().zip(&time) {
                    *s += e.count
                        * match (e.species, &pops.background) {
                            (Species::Background, Some(bg)) => smoothed_window(t, bg, det.response_width),
                            _ => gaussian(t - e.time, sigma(e)),
                        };
                }
            }
        }
    }
    Ok(DetectionTimeline { time, field, signal, events, undetected, calibration: None })
}

/// Unit-area box on `[start, stop]` convolved with a Gaussian of `sigma`.
fn smoothed_window(t: f64, bg: &Background, sigma: f64) -> f64 {
    let cdf = |x: f64| 0.5 * (1.0 + erf(x / (sigma * std::f64::consts::SQRT_2)));
    (cdf(t - bg.start) - cdf(t - bg.stop)) / (bg.stop - bg.start)
}

/// Error function (Abramowitz-Stegun 7.1.26, 1.5e-7 absolute).
fn erf(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let y = 1.0
        - (((((1.061_405_429 * t - 1.453_152_027) * t) + 1.421_413_741) * t - 0.284_496_736) * t + 0.254_829_592)
            * t
            * (-x * x).exp();
    s * y
}

impl DetectionTimeline {
    /// Sum of detected counts over all events.
    pub fn detected_count(&self) -> f64 {
        self.events.iter().map(|e| e.count).sum()
    }

    /// Counts of events of one species.
    pub fn species_count(&self, species: Species) -> f64 {
        self.events.iter().filter(|e| e.species == species).map(|e| e.count).sum()
    }

    pub fn integral(&self) -> f64 {
        crate::spectra::integrate(&self.time, &self.signal)
    }

    /// Time of the largest signal sample after `after` us.
    pub fn peak_after(&self, after: f64) -> Option<f64> {
        self.time
            .iter()
            .zip(&self.signal)
            .filter(|(t, _)| **t > after)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .filter(|(_, s)| **s > 0.0)
            .map(|(t, _)| *t)
    }

    pub fn with_calibration(mut self, atoms_per_signal: f64) -> Self {
        self.calibration = Some(atoms_per_signal);
        self
    }

    /// CSV `t_us,field_V_per_cm,mcp_signal`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_us,field_V_per_cm,mcp_signal\n");
        for i in 0..self.time.len() {
            out.push_str(&format!("{},{},{}\n", g9(self.time[i]), g9(self.field[i]), g9(self.signal[i])));
        }
        out
    }

    /// The three features of a typical trace: (a) ions during excitation,
    /// (b) prompt ions at ramp start, (c) field-ionized Rydberg atoms.
    pub fn annotate(&self) -> Vec<Feature> {
        let mut out = Vec::new();
        let mut push = |tag: &str, species: Species, what: &str| {
            let ev: Vec<&DetectionEvent> = self.events.iter().filter(|e| e.species == species).collect();
            if ev.is_empty() {
                return;
            }
            let count: f64 = ev.iter().map(|e| e.count).sum();
            let first = ev.iter().map(|e| e.time).fold(f64::INFINITY, f64::min);
            let last = ev.iter().map(|e| e.time).fold(f64::NEG_INFINITY, f64::max);
            out.push(Feature { tag: tag.into(), description: what.into(), first, last, count });
        };
        push("a", Species::Background, "ion signal during the excitation pulse");
        push("b", Species::PromptIon, "ions pulled out at the start of the field ramp");
        push("c", Species::FieldIonizedRydberg, "field-ionized Rydberg atoms");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub tag: String,
    pub description: String,
    /// Earliest and latest mean arrival in the feature, us.
    pub first: f64,
    pub last: f64,
    pub count: f64,
}
