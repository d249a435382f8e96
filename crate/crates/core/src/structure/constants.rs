//! Parser for the record-per-line atomic constants file.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::units;

/// The constants file shipped with the crate.
pub const RB87_CONSTANTS: &str = include_str!("../../data/rb87.constants");

/// Environment variable that overrides the constants-file path.
pub const CONSTANTS_ENV: &str = "RYDSPEC_CONSTANTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Dimensionless,
    Frequency,
    Wavenumber,
}

/// A unit token and its factor into the canonical unit of its dimension
/// (MHz for frequencies, cm^-1 for wavenumbers).
fn parse_unit(token: &str) -> Option<(Dimension, f64)> {
    Some(match token {
        "1" => (Dimension::Dimensionless, 1.0),
        "Hz" => (Dimension::Frequency, 1e-6),
        "kHz" => (Dimension::Frequency, 1e-3),
        "MHz" => (Dimension::Frequency, 1.0),
        "GHz" => (Dimension::Frequency, 1e3),
        "cm^-1" => (Dimension::Wavenumber, 1.0),
        _ => return None,
    })
}

fn expected_dimension(constant: &str) -> Option<Dimension> {
    Some(match constant {
        "nuclear_spin" | "min_n" | "delta0" | "delta2" | "g_J" => Dimension::Dimensionless,
        "hfs_A" | "hfs_B" | "linewidth" | "hfs_A_scaled" => Dimension::Frequency,
        "rydberg" => Dimension::Wavenumber,
        _ => return None,
    })
}

/// One parsed line of the constants file, kept for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub species: String,
    pub target: String,
    pub constant: String,
    /// Value in the canonical unit of the constant's dimension.
    pub value: f64,
    pub unit: String,
    pub source: String,
}

/// Fine-structure channel `(l, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Channel {
    pub l: u32,
    pub j: HalfInt,
}

const L_LETTERS: &[u8] = b"SPDFGHIKLMNOQRTUVWXYZ";

impl Channel {
    pub fn new(l: u32, j: HalfInt) -> Result<Self> {
        let twice_l = 2 * l as i32;
        if (j.twice() - twice_l).abs() != 1 {
            return Err(Error::domain(format!("j={j} is not l +- 1/2 for l={l}")));
        }
        Ok(Channel { l, j })
    }

    /// Spectroscopic letter, or `[l]` beyond the lettered range.
    pub fn symbol(&self) -> String {
        match L_LETTERS.get(self.l as usize) {
            Some(&b) => (b as char).to_string(),
            None => format!("[{}]", self.l),
        }
    }

    /// Parse `S1/2`, `D5/2`, `[25]51/2`, ...
    pub fn parse(label: &str) -> Option<Self> {
        let (l, rest) = if let Some(tail) = label.strip_prefix('[') {
            let (num, rest) = tail.split_once(']')?;
            (num.parse().ok()?, rest)
        } else {
            let letter = label.chars().next()?;
            let l = L_LETTERS.iter().position(|&b| b as char == letter)? as u32;
            (l, &label[letter.len_utf8()..])
        };
        let (num, den) = rest.split_once('/')?;
        if den != "2" {
            return None;
        }
        let twice: i32 = num.parse().ok()?;
        Channel::new(l, HalfInt::from_twice(twice)).ok()
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}/2", self.symbol(), self.j.twice())
    }
}

/// Parse `5P3/2` into `(n, channel)`.
pub fn parse_level_label(label: &str) -> Option<(u32, Channel)> {
    let split = label.find(|c: char| !c.is_ascii_digit())?;
    let n: u32 = label[..split].parse().ok()?;
    Some((n, Channel::parse(&label[split..])?))
}

/// Rydberg-Ritz quantum-defect series for one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectSeries {
    pub channel: Channel,
    pub delta0: f64,
    pub delta2: f64,
}

impl DefectSeries {
    pub fn zero(channel: Channel) -> Self {
        DefectSeries { channel, delta0: 0.0, delta2: 0.0 }
    }

    pub fn defect(&self, n: u32) -> f64 {
        if self.delta0 == 0.0 && self.delta2 == 0.0 {
            return 0.0;
        }
        let x = n as f64 - self.delta0;
        self.delta0 + self.delta2 / (x * x)
    }
}

/// Constants attached to one specific low-lying level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelConstants {
    pub label: String,
    pub n: u32,
    pub channel: Channel,
    /// Magnetic dipole hyperfine constant, MHz.
    pub hfs_a: f64,
    /// Electric quadrupole hyperfine constant, MHz.
    pub hfs_b: f64,
    pub g_j: Option<f64>,
    /// Natural linewidth Gamma/2pi, MHz.
    pub linewidth: Option<f64>,
}

/// Everything loaded from one constants file.
#[derive(Debug, Clone)]
pub struct AtomData {
    pub species: String,
    pub version: String,
    /// SHA-256 of the file contents, hex encoded.
    pub content_hash: String,
    pub nuclear_spin: HalfInt,
    /// Species Rydberg constant in GHz.
    pub rydberg_ghz: f64,
    pub min_n: u32,
    pub defects: BTreeMap<Channel, DefectSeries>,
    pub levels: BTreeMap<String, LevelConstants>,
    /// Rydberg hyperfine constants as A * (n*)^3 in MHz.
    pub rydberg_hfs_scaled: BTreeMap<Channel, f64>,
    /// Channels without an entry are treated as hydrogenic for every l
    /// rather than only for l > 3.
    pub hydrogenic: bool,
    pub records: Vec<Record>,
}

impl AtomData {
    /// The shipped 87Rb table.
    pub fn rb87() -> Self {
        Self::parse(RB87_CONSTANTS).expect("shipped constants file is valid")
    }

    /// Load from `path`, or fall back to the shipped table.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                Self::parse(&text)
            }
            None => Ok(Self::rb87()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut species: Option<String> = None;
        let mut version: Option<String> = None;
        let mut records = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| Error::ConstantsParse { line: line_no, msg };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(directive) = line.strip_prefix('@') {
                let mut parts = directive.split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some("format"), Some("1")) => {}
                    (Some("format"), Some(other)) => {
                        return Err(err(format!("unsupported format {other}")))
                    }
                    (Some("version"), Some(v)) => version = Some(v.to_string()),
                    _ => return Err(err(format!("unknown directive '{line}'"))),
                }
                continue;
            }

            let mut rest = line;
            let mut fields = Vec::with_capacity(5);
            for _ in 0..5 {
                rest = rest.trim_start();
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                if end == 0 {
                    return Err(err("expected 6 columns".into()));
                }
                fields.push(&rest[..end]);
                rest = &rest[end..];
            }
            let source = rest.trim();
            if source.is_empty() {
                return Err(err("missing source tag".into()));
            }
            let [sp, target, constant, value, unit] = [fields[0], fields[1], fields[2], fields[3], fields[4]];

            match &species {
                None => species = Some(sp.to_string()),
                Some(s) if s != sp => {
                    return Err(err(format!("mixed species '{s}' and '{sp}' in one file")))
                }
                _ => {}
            }
            let (dim, factor) =
                parse_unit(unit).ok_or_else(|| err(format!("unknown unit '{unit}'")))?;
            let expected = expected_dimension(constant)
                .ok_or_else(|| err(format!("unknown constant '{constant}'")))?;
            if dim != expected {
                return Err(err(format!("unit '{unit}' does not fit constant '{constant}'")));
            }
            let value: f64 = value
                .parse()
                .map_err(|_| err(format!("cannot parse value '{value}'")))?;
            if !value.is_finite() {
                return Err(err(format!("non-finite value for '{constant}'")));
            }
            records.push((
                line_no,
                Record {
                    species: sp.to_string(),
                    target: target.to_string(),
                    constant: constant.to_string(),
                    value: value * factor,
                    unit: unit.to_string(),
                    source: source.to_string(),
                },
            ));
        }

        let species = species.ok_or(Error::ConstantsParse { line: 0, msg: "no records".into() })?;
        let version = version.ok_or(Error::ConstantsParse { line: 0, msg: "missing @version".into() })?;

        let mut nuclear_spin = None;
        let mut rydberg = None;
        let mut min_n = None;
        let mut partial_defects: BTreeMap<Channel, (Option<f64>, Option<f64>)> = BTreeMap::new();
        let mut levels: BTreeMap<String, LevelConstants> = BTreeMap::new();
        let mut rydberg_hfs_scaled = BTreeMap::new();

        for (line, rec) in &records {
            let err = |msg: String| Error::ConstantsParse { line: *line, msg };
            let v = rec.value;
            if rec.target == "atom" {
                match rec.constant.as_str() {
                    "nuclear_spin" => {
                        let twice = 2.0 * v;
                        if twice.fract() != 0.0 || twice < 0.0 {
                            return Err(err(format!("nuclear spin {v} is not a half-integer")));
                        }
                        nuclear_spin = Some(HalfInt::from_twice(twice as i32));
                    }
                    "rydberg" => rydberg = Some(units::inverse_cm_to_ghz(v)),
                    "min_n" => min_n = Some(v as u32),
                    c => return Err(err(format!("'{c}' is not a species-wide constant"))),
                }
            } else if let Some(channel) = Channel::parse(&rec.target) {
                match rec.constant.as_str() {
                    "delta0" => partial_defects.entry(channel).or_default().0 = Some(v),
                    "delta2" => partial_defects.entry(channel).or_default().1 = Some(v),
                    "hfs_A_scaled" => {
                        rydberg_hfs_scaled.insert(channel, v);
                    }
                    c => return Err(err(format!("'{c}' is not a channel constant"))),
                }
            } else if let Some((n, channel)) = parse_level_label(&rec.target) {
                let entry = levels.entry(rec.target.clone()).or_insert_with(|| LevelConstants {
                    label: rec.target.clone(),
                    n,
                    channel,
                    hfs_a: 0.0,
                    hfs_b: 0.0,
                    g_j: None,
                    linewidth: None,
                });
                match rec.constant.as_str() {
                    "hfs_A" => entry.hfs_a = v,
                    "hfs_B" => entry.hfs_b = v,
                    "g_J" => entry.g_j = Some(v),
                    "linewidth" => entry.linewidth = Some(v),
                    c => return Err(err(format!("'{c}' is not a level constant"))),
                }
            } else {
                return Err(err(format!("cannot interpret target '{}'", rec.target)));
            }
        }

        let mut defects = BTreeMap::new();
        for (channel, (d0, d2)) in partial_defects {
            let delta0 = d0.ok_or_else(|| Error::MissingConstant {
                what: "delta0",
                key: channel.to_string(),
            })?;
            let series = DefectSeries { channel, delta0, delta2: d2.unwrap_or(0.0) };
            if channel.l > 3 && (series.delta0 != 0.0 || series.delta2 != 0.0) {
                return Err(Error::ConstantsParse {
                    line: 0,
                    msg: format!("channel {channel} has l > 3 but a nonzero defect"),
                });
            }
            defects.insert(channel, series);
        }

        let nuclear_spin = nuclear_spin.ok_or(Error::MissingConstant { what: "nuclear_spin", key: species.clone() })?;
        // quadrupole term needs I >= 1 and J >= 1
        for lc in levels.values() {
            if lc.hfs_b != 0.0 && (lc.channel.j.twice() < 2 || nuclear_spin.twice() < 2) {
                return Err(Error::ConstantsParse {
                    line: 0,
                    msg: format!("{} has a quadrupole constant but J or I is 1/2", lc.label),
                });
            }
        }

        Ok(AtomData {
            species: species.clone(),
            version,
            content_hash: hex::encode(Sha256::digest(text.as_bytes())),
            nuclear_spin,
            rydberg_ghz: rydberg.ok_or(Error::MissingConstant { what: "rydberg", key: species.clone() })?,
            min_n: min_n.unwrap_or(1),
            defects,
            levels,
            rydberg_hfs_scaled,
            hydrogenic: false,
            records: records.into_iter().map(|(_, r)| r).collect(),
        })
    }

    /// Same constants with every quantum defect removed; all channels become
    /// hydrogenic and `n` may start at 1.
    pub fn zero_defects(&self) -> Self {
        let mut out = self.clone();
        out.defects.clear();
        out.hydrogenic = true;
        out.min_n = 1;
        out
    }

    /// Copy with the Rydberg hyperfine constants of every channel multiplied by `factor`.
    pub fn scale_rydberg_hyperfine(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.rydberg_hfs_scaled.values_mut() {
            *v *= factor;
        }
        out
    }

    pub fn defect_series(&self, channel: Channel) -> Result<DefectSeries> {
        if let Some(s) = self.defects.get(&channel) {
            return Ok(*s);
        }
        if self.hydrogenic || channel.l > 3 {
            return Ok(DefectSeries::zero(channel));
        }
        Err(Error::MissingConstant { what: "quantum defect", key: channel.to_string() })
    }

    pub fn level_constants(&self, label: &str) -> Result<&LevelConstants> {
        self.levels
            .get(label)
            .ok_or_else(|| Error::MissingConstant { what: "level", key: label.to_string() })
    }

    /// D2-line natural linewidth Gamma/2pi in MHz.
    pub fn d2_linewidth(&self) -> Result<f64> {
        self.level_constants("5P3/2")?
            .linewidth
            .ok_or(Error::MissingConstant { what: "linewidth", key: "5P3/2".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "@format 1\n@version t1\n\
        X atom nuclear_spin 1.5 1 test\n\
        X atom rydberg 109737.0 cm^-1 test\n";

    #[test]
    fn shipped_file_parses() {
        let atom = AtomData::rb87();
        assert_eq!(atom.species, "Rb87");
        assert_eq!(atom.nuclear_spin, HalfInt::from_twice(3));
        assert_eq!(atom.defects.len(), 7);
        assert_eq!(atom.content_hash.len(), 64);
        let p32 = atom.level_constants("5P3/2").unwrap();
        assert_eq!(p32.n, 5);
        assert_eq!(p32.channel, Channel::parse("P3/2").unwrap());
        assert!((atom.d2_linewidth().unwrap() - 6.0666).abs() < 1e-12);
        // ~3.29e6 GHz
        assert!((atom.rydberg_ghz - 3_289_821.0).abs() < 5.0);
    }

    #[test]
    fn rejects_unknown_unit() {
        let text = format!("{MINIMAL}X S1/2 delta0 3.1 furlongs test\n");
        match AtomData::parse(&text) {
            Err(Error::ConstantsParse { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("furlongs"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let text = format!("{MINIMAL}X S1/2 delta0 3.1 MHz test\n");
        assert!(AtomData::parse(&text).is_err());
    }

    #[test]
    fn unit_conversion_to_canonical() {
        let text = format!("{MINIMAL}X 5S1/2 hfs_A 3.4 GHz test\n");
        let atom = AtomData::parse(&text).unwrap();
        assert!((atom.level_constants("5S1/2").unwrap().hfs_a - 3400.0).abs() < 1e-9);
    }

    #[test]
    fn missing_source_rejected() {
        let text = format!("{MINIMAL}X S1/2 delta0 3.1 1\n");
        assert!(AtomData::parse(&text).is_err());
    }

    #[test]
    fn missing_low_l_channel_is_a_lookup_error() {
        let atom = AtomData::parse(MINIMAL).unwrap();
        let err = atom.defect_series(Channel::parse("S1/2").unwrap()).unwrap_err();
        assert!(matches!(err, Error::MissingConstant { .. }));
        // l > 3 is hydrogenic without an entry
        let g = atom.defect_series(Channel::parse("G7/2").unwrap()).unwrap();
        assert_eq!(g.defect(40), 0.0);
    }

    #[test]
    fn quadrupole_on_j_half_rejected() {
        let text = format!("{MINIMAL}X 5S1/2 hfs_B 1.0 MHz test\n");
        assert!(AtomData::parse(&text).is_err());
    }

    #[test]
    fn channel_labels_round_trip() {
        for label in ["S1/2", "P1/2", "P3/2", "D5/2", "F7/2", "G9/2", "Z41/2", "[21]43/2", "[44]89/2"] {
            assert_eq!(Channel::parse(label).unwrap().to_string(), label);
        }
        assert!(Channel::parse("D1/2").is_none());
        assert_eq!(parse_level_label("41D5/2").unwrap().0, 41);
    }
}
