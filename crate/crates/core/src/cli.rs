//! Command-line front end: TOML run configuration, orchestration and
//! deterministic CSV/JSON output.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::angular::HalfInt;
use crate::dressed::{autler_townes_spectrum, dressed_lines, rabi_frequency, saturation_sweep, LaserDrive};
use crate::error::{Error, Result};
use crate::format::g9;
use crate::radial::RadialCache;
use crate::sequence::{
    detection_trace, mcp_calibration, Background, Detector, FieldRamp, Populations, RydbergPopulation,
};
use crate::spectra::{
    fit_operating_field, gradient_addressing_scan, ground_zeeman_width, hyperfine_selective_spectrum,
    stark_spectrum, CloudGeometry, FrequencyGrid, HfSelectRequest,
};
use crate::stark::{hyperfine_stark_lines, stark_map, BasisSpec, HyperfineRequest, MapRequest};
use crate::structure::{AtomData, Channel, CONSTANTS_ENV};

#[derive(Debug, Parser)]
#[command(name = "rydspec", version, about = "Rydberg spectroscopy of ultracold 87Rb")]
pub struct Cli {
    /// TOML run configuration; every section is optional.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `output_dir` from the configuration.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Constants file; takes precedence over the environment and the configuration.
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Adiabatic Stark map of one |m| block.
    Starkmap,
    /// Broadened excitation spectrum at one field.
    Spectrum,
    /// Line shifts and widths as the beam moves through a field gradient.
    Addressing,
    /// Spectrum with separately addressed ground hyperfine states.
    Hfselect,
    /// Autler-Townes doublet of the red transition.
    Autler {
        /// Comma-separated intensity ratios I/I_s for a sweep.
        #[arg(long, value_delimiter = ',')]
        sweep_s: Option<Vec<f64>>,
    },
    /// Field-ionization ramp and MCP trace.
    Sequence {
        /// Print and store the three-feature annotation.
        #[arg(long)]
        annotate: bool,
    },
    /// Check the constants file against known intervals.
    ValidateData,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Starkmap => "starkmap",
            Command::Spectrum => "spectrum",
            Command::Addressing => "addressing",
            Command::Hfselect => "hfselect",
            Command::Autler { .. } => "autler",
            Command::Sequence { .. } => "sequence",
            Command::ValidateData => "validate-data",
        }
    }
}

/// Explicit list of fields or an inclusive uniform range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range(AxisRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Axis::Range(AxisRange { start, stop, step })
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            Axis::List(v) => Ok(v.clone()),
            Axis::Range(r) => {
                if !(r.step > 0.0) || !(r.stop >= r.start) || !r.start.is_finite() || !r.stop.is_finite() {
                    return Err(Error::config(format!("bad range {}..{} step {}", r.start, r.stop, r.step)));
                }
                let count = ((r.stop - r.start) / r.step + 1e-9).floor() as usize + 1;
                Ok((0..count).map(|i| r.start + i as f64 * r.step).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarkMapConfig {
    #[serde(default = "map_basis")]
    pub basis: BasisSpec,
    #[serde(default = "map_fields")]
    pub fields: Axis,
    #[serde(default = "default_targets")]
    pub targets: Vec<String>,
    #[serde(default = "default_reference")]
    pub reference: String,
    #[serde(default = "default_intermediate")]
    pub intermediate: String,
    #[serde(default)]
    pub polarization: i32,
    /// Fields (V/cm) at which hyperfine-resolved lines are also written.
    #[serde(default)]
    pub hyperfine_fields: Vec<f64>,
}

fn map_basis() -> BasisSpec {
    BasisSpec { delta_n: 2, ..BasisSpec::new(40) }
}

fn map_fields() -> Axis {
    Axis::range(0.0, 20.0, 0.5)
}

fn default_targets() -> Vec<String> {
    vec!["41D3/2".into(), "41D5/2".into()]
}

fn default_reference() -> String {
    "41D5/2".into()
}

fn default_intermediate() -> String {
    "5P3/2".into()
}

impl Default for StarkMapConfig {
    fn default() -> Self {
        StarkMapConfig {
            basis: map_basis(),
            fields: map_fields(),
            targets: default_targets(),
            reference: default_reference(),
            intermediate: default_intermediate(),
            polarization: 0,
            hyperfine_fields: Vec::new(),
        }
    }
}

impl StarkMapConfig {
    fn request(&self, fields: Vec<f64>) -> MapRequest {
        MapRequest {
            basis: self.basis.clone(),
            fields,
            targets: self.targets.clone(),
            reference: self.reference.clone(),
            intermediate: self.intermediate.clone(),
            polarization: self.polarization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "spectrum_basis")]
    pub basis: BasisSpec,
    /// V/cm
    #[serde(default = "default_field")]
    pub field: f64,
    /// Field step for the local slope, V/cm.
    #[serde(default = "default_slope_step")]
    pub slope_step: f64,
    #[serde(default)]
    pub geometry: CloudGeometry,
    /// Gaussian FWHMs (MHz); defaults to the ground-state Zeeman width.
    #[serde(default)]
    pub gaussian: Option<Vec<f64>>,
    #[serde(default = "default_lorentzian")]
    pub lorentzian: Vec<f64>,
    #[serde(default = "spectrum_grid")]
    pub grid: FrequencyGrid,
    /// Tracks weaker than this fraction of the strongest are dropped.
    #[serde(default = "default_rel_threshold")]
    pub rel_threshold: f64,
    /// Atoms per signal unit.
    #[serde(default)]
    pub calibration: Option<f64>,
}

fn spectrum_basis() -> BasisSpec {
    BasisSpec { delta_n: 2, ..BasisSpec::new(41) }
}

fn default_field() -> f64 {
    2.0
}

fn default_slope_step() -> f64 {
    0.05
}

fn default_lorentzian() -> Vec<f64> {
    vec![1.0]
}

fn spectrum_grid() -> FrequencyGrid {
    FrequencyGrid::new(-400.0, 100.0, 0.2)
}

fn default_rel_threshold() -> f64 {
    1e-4
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            basis: spectrum_basis(),
            field: default_field(),
            slope_step: default_slope_step(),
            geometry: CloudGeometry::default(),
            gaussian: None,
            lorentzian: default_lorentzian(),
            grid: spectrum_grid(),
            rel_threshold: default_rel_threshold(),
            calibration: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddressingConfig {
    #[serde(default = "spectrum_basis")]
    pub basis: BasisSpec,
    #[serde(default = "addressing_fields")]
    pub fields: Axis,
    #[serde(default)]
    pub geometry: CloudGeometry,
    /// Beam offsets, um.
    #[serde(default = "addressing_offsets")]
    pub offsets: Axis,
    /// Bias field; fitted to `ratio` when absent.
    #[serde(default)]
    pub e0: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    /// Lines whose shift ratio is fitted.
    #[serde(default = "ratio_pair")]
    pub pair: [String; 2],
    /// Other width contributions (MHz), added in quadrature.
    #[serde(default)]
    pub other_widths: Vec<f64>,
}

fn addressing_fields() -> Axis {
    Axis::range(0.0, 6.0, 0.05)
}

fn addressing_offsets() -> Axis {
    Axis::range(-500.0, 500.0, 50.0)
}

fn default_ratio() -> f64 {
    98.0 / 75.0
}

fn ratio_pair() -> [String; 2] {
    ["41D5/2".into(), "41D3/2".into()]
}

impl Default for AddressingConfig {
    fn default() -> Self {
        AddressingConfig {
            basis: spectrum_basis(),
            fields: addressing_fields(),
            geometry: CloudGeometry::default(),
            offsets: addressing_offsets(),
            e0: None,
            ratio: default_ratio(),
            pair: ratio_pair(),
            other_widths: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(default = "default_saturation")]
    pub saturation: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    /// MHz; the shipped D2 linewidth when absent.
    #[serde(default)]
    pub linewidth: Option<f64>,
}

fn default_saturation() -> f64 {
    151.0
}

fn default_coupling() -> f64 {
    crate::dressed::MEAN_D2_COUPLING
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig { saturation: default_saturation(), detuning: 0.0, coupling: default_coupling(), linewidth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutlerConfig {
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default = "autler_grid")]
    pub grid: FrequencyGrid,
    #[serde(default = "default_probe")]
    pub probe_linewidth: f64,
    /// Gaussian FWHMs (MHz), e.g. the Zeeman width.
    #[serde(default = "default_extra")]
    pub extra_widths: Vec<f64>,
    #[serde(default)]
    pub sweep_s: Vec<f64>,
}

fn autler_grid() -> FrequencyGrid {
    FrequencyGrid::new(-40.0, 40.0, 0.1)
}

fn default_probe() -> f64 {
    1.0
}

fn default_extra() -> Vec<f64> {
    vec![6.0]
}

impl Default for AutlerConfig {
    fn default() -> Self {
        AutlerConfig {
            drive: DriveConfig::default(),
            grid: autler_grid(),
            probe_linewidth: default_probe(),
            extra_widths: default_extra(),
            sweep_s: Vec::new(),
        }
    }
}

/// A Rydberg population given by level label or directly by `n*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationEntry {
    pub label: String,
    #[serde(default)]
    pub n_star: Option<f64>,
    pub count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    /// atoms/s
    pub loading: f64,
    /// s
    pub lifetime: f64,
    /// atoms/s
    pub ionization: f64,
    /// signal units/s
    pub signal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    #[serde(default)]
    pub ramp: FieldRamp,
    #[serde(default)]
    pub detector: Detector,
    #[serde(default = "default_prompt")]
    pub prompt_ions: f64,
    #[serde(default = "default_rydberg")]
    pub rydberg: Vec<PopulationEntry>,
    #[serde(default = "default_background")]
    pub background: Option<Background>,
    #[serde(default)]
    pub calibration: Option<CalibrationConfig>,
}

fn default_prompt() -> f64 {
    50.0
}

fn default_rydberg() -> Vec<PopulationEntry> {
    vec![PopulationEntry { label: "41D5/2".into(), n_star: None, count: 1000.0 }]
}

fn default_background() -> Option<Background> {
    Some(Background { start: -100.0, stop: 0.0, count: 40.0 })
}

impl Default for SequenceConfig {
    fn default() -> Self {
        SequenceConfig {
            ramp: FieldRamp::default(),
            detector: Detector::default(),
            prompt_ions: default_prompt(),
            rydberg: default_rydberg(),
            background: default_background(),
            calibration: None,
        }
    }
}

/// Whole run configuration as read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub constants: Option<PathBuf>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub starkmap: Option<StarkMapConfig>,
    #[serde(default)]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default)]
    pub addressing: Option<AddressingConfig>,
    #[serde(default)]
    pub hfselect: Option<HfSelectRequest>,
    #[serde(default)]
    pub autler: Option<AutlerConfig>,
    #[serde(default)]
    pub sequence: Option<SequenceConfig>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            constants: None,
            output_dir: default_output(),
            seed: 0,
            starkmap: None,
            spectrum: None,
            addressing: None,
            hfselect: None,
            autler: None,
            sequence: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Constants path: explicit flag, then the environment, then the file.
    pub fn constants_path(&self, flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONSTANTS_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .or_else(|| self.constants.clone())
    }
}

/// Files written by one run, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// One-line summaries printed to stdout.
    pub summary: Vec<String>,
}

struct Output<'a> {
    dir: &'a Path,
    name: &'static str,
    config: &'a RunConfig,
    atom: &'a AtomData,
    constants: Option<PathBuf>,
    report: RunReport,
}

impl Output<'_> {
    fn write(&mut self, file: String, contents: &str) -> Result<()> {
        let path = self.dir.join(&file);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.report.files.push(path);
        Ok(())
    }

    fn csv(&mut self, suffix: &str, contents: &str) -> Result<()> {
        self.write(format!("{}{suffix}.csv", self.name), contents)
    }

    fn json(&mut self, suffix: &str, value: &serde_json::Value) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::domain(e.to_string()))?;
        self.write(format!("{}{suffix}.json", self.name), &(text + "\n"))
    }

    /// Sidecar with the full configuration, constants identity and results.
    fn metadata(&mut self, result: serde_json::Value) -> Result<()> {
        let value = json!({
            "subcommand": self.name,
            "config": self.config,
            "constants": {
                "path": self.constants,
                "version": self.atom.version,
                "sha256": self.atom.content_hash,
            },
            "result": result,
        });
        self.json("", &value)
    }

    fn say(&mut self, line: String) {
        self.report.summary.push(line);
    }
}

/// Execute one subcommand with an already parsed configuration.
pub fn run(command: &Command, config: &RunConfig, constants_flag: Option<&Path>) -> Result<RunReport> {
    let constants = config.constants_path(constants_flag);
    let atom = AtomData::load(constants.as_deref())?;
    let dir = config.output_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Output {
        dir,
        name: command.name(),
        config,
        atom: &atom,
        constants,
        report: RunReport { files: Vec::new(), summary: Vec::new() },
    };
    let cache = RadialCache::default();
    match command {
        Command::Starkmap => starkmap(&mut out, &cache)?,
        Command::Spectrum => spectrum(&mut out, &cache)?,
        Command::Addressing => addressing(&mut out, &cache)?,
        Command::Hfselect => hfselect(&mut out, &cache)?,
        Command::Autler { .. } => autler(&mut out)?,
        Command::Sequence { annotate } => sequence(&mut out, *annotate)?,
        Command::ValidateData => validate_data(&mut out)?,
    }
    Ok(out.report)
}

fn starkmap(out: &mut Output, cache: &RadialCache) -> Result<()> {
    let cfg = out.config.starkmap.clone().unwrap_or_default();
    let req = cfg.request(cfg.fields.points()?);
    let map = stark_map(out.atom, cache, &req)?;
    out.csv("", &map.to_csv())?;
    let mut result = map.metadata(out.atom, &cfg.basis);
    if !cfg.hyperfine_fields.is_empty() {
        let hreq = HyperfineRequest {
            basis: cfg.basis.clone(),
            targets: cfg.targets.clone(),
            intermediate: cfg.intermediate.clone(),
            intermediate_f: HalfInt::integer(3),
            reference: cfg.reference.clone(),
        };
        let sets = hyperfine_stark_lines(out.atom, cache, &hreq, &cfg.hyperfine_fields)?;
        let mut csv = String::from("field_V_per_cm,energy_MHz,strength,m_F,level,j,F,purity\n");
        for set in &sets {
            for l in &set.lines {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    g9(set.field),
                    g9(l.energy_mhz),
                    g9(l.strength),
                    l.m_f,
                    l.level,
                    l.j,
                    l.f,
                    g9(l.purity)
                ));
            }
        }
        out.csv("_hyperfine", &csv)?;
        result["hyperfine_fields"] = json!(cfg.hyperfine_fields);
    }
    out.say(format!("starkmap: {} tracks x {} fields", map.track_count(), map.fields.len()));
    out.metadata(result)
}

fn spectrum(out: &mut Output, cache: &RadialCache) -> Result<()> {
    let cfg = out.config.spectrum.clone().unwrap_or_default();
    if !(cfg.field >= 0.0) || !(cfg.slope_step > 0.0) {
        return Err(Error::config("spectrum field must be >= 0 and slope_step > 0"));
    }
    let lo = (cfg.field - cfg.slope_step).max(0.0);
    let fields = if lo < cfg.field {
        vec![lo, cfg.field, cfg.field + cfg.slope_step]
    } else {
        vec![cfg.field, cfg.field + cfg.slope_step]
    };
    let index = fields.iter().position(|&f| f == cfg.field).unwrap_or(0);
    let map = stark_map(out.atom, cache, &MapRequest::new(cfg.basis.clone(), fields))?;
    let gaussian = match &cfg.gaussian {
        Some(g) => g.clone(),
        None => vec![ground_zeeman_width(out.atom, &cfg.geometry, HalfInt::integer(2))?],
    };
    let mut s =
        stark_spectrum(&map, index, &cfg.geometry, &gaussian, &cfg.lorentzian, &cfg.grid.points(), cfg.rel_threshold)?;
    if let Some(c) = cfg.calibration {
        s = s.with_scale(c);
    }
    out.csv("", &s.to_csv(false))?;
    out.say(format!("spectrum: {} lines at {} V/cm, {} outside the grid", s.lines.len(), g9(cfg.field), s.excluded.len()));
    out.metadata(json!({
        "field_V_per_cm": cfg.field,
        "gaussian_fwhm_MHz": gaussian,
        "lines": s.lines,
        "excluded": s.excluded,
        "scale": s.scale,
        "peaks_MHz": s.peaks(1e-3),
    }))
}

fn addressing(out: &mut Output, cache: &RadialCache) -> Result<()> {
    let cfg = out.config.addressing.clone().unwrap_or_default();
    let mut req = MapRequest::new(cfg.basis.clone(), cfg.fields.points()?);
    for t in &cfg.pair {
        if !req.targets.contains(t) {
            req.targets.push(t.clone());
        }
    }
    let map = stark_map(out.atom, cache, &req)?;
    let fit = match cfg.e0 {
        Some(_) => None,
        None => Some(fit_operating_field(
            &map,
            &cfg.geometry,
            (&cfg.pair[0], &cfg.pair[1]),
            cfg.ratio,
            cfg.geometry.diameter_um,
        )?),
    };
    let e0 = cfg.e0.or(fit.as_ref().map(|f| f.e0)).unwrap_or_default();
    let traces = gradient_addressing_scan(&map, &cfg.geometry, e0, &cfg.offsets.points()?, &cfg.other_widths)?;
    let mut csv = String::from("target,offset_um,field_V_per_cm,center_MHz,shift_MHz,slope_MHz_per_V_per_cm,width_MHz\n");
    for trace in &traces {
        for p in &trace.points {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                trace.target,
                g9(p.offset_um),
                g9(p.field),
                g9(p.center_mhz),
                g9(p.shift_mhz),
                g9(p.slope),
                g9(p.width_mhz)
            ));
        }
    }
    out.csv("", &csv)?;
    if let Some(f) = &fit {
        out.say(format!(
            "addressing: E0 = {} V/cm gives shifts {} and {} MHz (ratio {})",
            g9(f.e0),
            g9(f.shift_a),
            g9(f.shift_b),
            g9(f.ratio)
        ));
    } else {
        out.say(format!("addressing: {} traces at E0 = {} V/cm", traces.len(), g9(e0)));
    }
    out.metadata(json!({ "e0_V_per_cm": e0, "fit": fit }))
}

fn hfselect(out: &mut Output, cache: &RadialCache) -> Result<()> {
    let req = out.config.hfselect.clone().unwrap_or_default();
    let s = hyperfine_selective_spectrum(out.atom, cache, &req)?;
    out.csv("", &s.to_csv(true))?;
    let center = |prefix: &str| s.lines.iter().find(|l| l.label.starts_with(prefix)).map(|l| l.center);
    let separation = match (center("F1_"), center("F2_")) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    if let Some(sep) = separation {
        out.say(format!("hfselect: F=1 and F=2 paths separated by {} MHz", g9(sep)));
    } else {
        out.say(format!("hfselect: {} lines", s.lines.len()));
    }
    out.metadata(json!({ "lines": s.lines, "excluded": s.excluded, "path_separation_MHz": separation }))
}

fn autler(out: &mut Output) -> Result<()> {
    let cfg = out.config.autler.clone().unwrap_or_default();
    let linewidth = match cfg.drive.linewidth {
        Some(w) => w,
        None => out.atom.d2_linewidth()?,
    };
    let drive = LaserDrive {
        saturation: cfg.drive.saturation,
        linewidth,
        detuning: cfg.drive.detuning,
        coupling: cfg.drive.coupling,
    };
    let grid = cfg.grid.points();
    if cfg.sweep_s.is_empty() {
        let omega = rabi_frequency(&drive)?;
        let pair = dressed_lines(omega, drive.detuning)?;
        let s = autler_townes_spectrum(&drive, &grid, cfg.probe_linewidth, &cfg.extra_widths)?;
        out.csv("", &s.to_csv(true))?;
        let peaks = s.peaks(crate::dressed::PEAK_PROMINENCE);
        out.say(format!("autler: Rabi frequency {} MHz, {} peak(s)", g9(omega), peaks.len()));
        out.metadata(json!({ "rabi_MHz": omega, "pair": pair, "peaks_MHz": peaks }))
    } else {
        let pts = saturation_sweep(&drive, &cfg.sweep_s, &grid, cfg.probe_linewidth, &cfg.extra_widths)?;
        let mut csv = String::from("s,splitting_MHz,resolved\n");
        for p in &pts {
            csv.push_str(&format!("{},{},{}\n", g9(p.saturation), g9(p.splitting), u8::from(p.resolved())));
            out.say(format!(
                "autler: s = {} splitting {} MHz, {} peak(s)",
                g9(p.saturation),
                g9(p.splitting),
                p.peaks.len()
            ));
        }
        out.csv("", &csv)?;
        out.metadata(json!({ "sweep": pts }))
    }
}

fn sequence(out: &mut Output, annotate: bool) -> Result<()> {
    let cfg = out.config.sequence.clone().unwrap_or_default();
    let rydberg = cfg
        .rydberg
        .iter()
        .map(|p| {
            let n_star = match p.n_star {
                Some(n) => n,
                None => out.atom.level_by_label(&p.label)?.n_star,
            };
            Ok(RydbergPopulation { label: p.label.clone(), n_star, count: p.count })
        })
        .collect::<Result<Vec<_>>>()?;
    let pops = Populations { prompt_ions: cfg.prompt_ions, rydberg, background: cfg.background.clone() };
    let mut tl = detection_trace(&pops, &cfg.ramp, &cfg.detector, Some(out.config.seed))?;
    let calibration = match &cfg.calibration {
        Some(c) => Some(mcp_calibration(c.loading, c.lifetime, c.ionization, c.signal)?),
        None => None,
    };
    if let Some(c) = &calibration {
        tl = tl.with_calibration(c.atoms_per_signal);
    }
    out.csv("", &tl.to_csv())?;
    out.json("_events", &json!({ "events": tl.events, "undetected": tl.undetected }))?;
    for e in &tl.events {
        out.say(format!("sequence: {} {:?} at {} us, {} counts", e.label, e.species, g9(e.time), g9(e.count)));
    }
    for u in &tl.undetected {
        out.say(format!("sequence: {} never ionized (threshold {} V/cm)", u.label, g9(u.threshold)));
    }
    let features = tl.annotate();
    if annotate {
        for f in &features {
            let when = if f.first == f.last {
                format!("{} us", g9(f.first))
            } else {
                format!("{} to {} us", g9(f.first), g9(f.last))
            };
            out.say(format!("({}) {}: {}, {} counts", f.tag, f.description, when, g9(f.count)));
        }
        out.json("_annotation", &json!(features))?;
    }
    out.metadata(json!({
        "detected": tl.detected_count(),
        "calibration": calibration,
        "natural_frequency_rad_per_us": cfg.ramp.natural_frequency(),
        "peak_field_V_per_cm": cfg.ramp.peak_field(),
    }))
}

/// Published intervals the shipped constants must reproduce, MHz.
const GROUND_SPLITTING: f64 = 6_834.682_610_904;
const GROUND_TOLERANCE: f64 = 0.01;
const INTERMEDIATE_SPLITTING: f64 = 423.0;
const INTERMEDIATE_TOLERANCE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Check {
    name: String,
    value: f64,
    expected: f64,
    tolerance: f64,
    pass: bool,
}

fn validate_data(out: &mut Output) -> Result<()> {
    let atom = out.atom;
    let h = HalfInt::integer;
    let mut checks = Vec::new();
    let mut check = |name: &str, value: f64, expected: f64, tolerance: f64| {
        checks.push(Check {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        })
    };
    let ground = atom.level_hyperfine_shift("5S1/2", h(2))? - atom.level_hyperfine_shift("5S1/2", h(1))?;
    check("5S1/2 F=1 -> F=2 interval (MHz)", ground, GROUND_SPLITTING, GROUND_TOLERANCE);
    let inter = atom.level_hyperfine_shift("5P3/2", h(3))? - atom.level_hyperfine_shift("5P3/2", h(1))?;
    check("5P3/2 F'=1 -> F'=3 interval (MHz)", inter, INTERMEDIATE_SPLITTING, INTERMEDIATE_TOLERANCE);
    let gamma = atom.d2_linewidth()?;
    check("D2 natural linewidth (MHz)", gamma, 6.07, 0.05);
    check("nuclear spin", atom.nuclear_spin.value(), 1.5, 0.0);
    for label in ["S1/2", "P1/2", "P3/2", "D3/2", "D5/2", "F5/2", "F7/2"] {
        let channel = Channel::parse(label).ok_or_else(|| Error::domain(format!("bad channel {label}")))?;
        let present = atom.defect_series(channel).map(|s| s.defect(41) > 0.0).unwrap_or(false);
        check(&format!("quantum defect series {label}"), f64::from(u8::from(present)), 1.0, 0.0);
    }
    let mut csv = String::from("check,value,expected,tolerance,pass\n");
    for c in &checks {
        csv.push_str(&format!("{},{},{},{},{}\n", c.name, g9(c.value), g9(c.expected), g9(c.tolerance), u8::from(c.pass)));
        out.say(format!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, g9(c.value)));
    }
    out.csv("", &csv)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    out.metadata(json!({ "checks": checks }))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::domain(format!("constants check failed: {}", failed.join("; "))))
    }
}

/// Parse arguments, run, print summaries and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("rydspec: {e}");
            e.exit_code()
        }
    }
}

/// Merge command-line overrides into the configuration and run.
pub fn execute(cli: &Cli) -> Result<RunReport> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        config.output_dir = dir.clone();
    }
    if let Command::Autler { sweep_s: Some(s) } = &cli.command {
        config.autler.get_or_insert_with(AutlerConfig::default).sweep_s = s.clone();
    }
    run(&cli.command, &config, cli.constants.as_deref())
}
