use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::structure::{AtomData, RydbergLevel};

/// Which states enter a Stark calculation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    /// Central principal quantum number.
    pub n_center: u32,
    /// States with `|n - n_center| <= delta_n` are included.
    #[serde(default = "default_delta_n")]
    pub delta_n: u32,
    /// Highest orbital momentum; `None` means `n - 1` for every `n`.
    #[serde(default)]
    pub l_max: Option<u32>,
    /// Conserved projection (m_j, or m_F for hyperfine line sets).
    #[serde(default = "default_m")]
    pub m: HalfInt,
    /// Resolve hyperfine structure inside `hyperfine_window_ghz` of the targets.
    #[serde(default)]
    pub include_hyperfine: bool,
    #[serde(default = "default_window")]
    pub hyperfine_window_ghz: f64,
    /// Largest block dimension accepted.
    #[serde(default = "default_capacity")]
    pub capacity: usize,
}

fn default_delta_n() -> u32 {
    4
}

fn default_m() -> HalfInt {
    HalfInt::HALF
}

fn default_window() -> f64 {
    2.0
}

fn default_capacity() -> usize {
    4000
}

impl BasisSpec {
    pub fn new(n_center: u32) -> Self {
        BasisSpec {
            n_center,
            delta_n: default_delta_n(),
            l_max: None,
            m: default_m(),
            include_hyperfine: false,
            hyperfine_window_ghz: default_window(),
            capacity: default_capacity(),
        }
    }

    pub fn with_m(&self, m: HalfInt) -> Self {
        BasisSpec { m, ..self.clone() }
    }

    /// Number of states this specification produces for projection `m`, without
    /// building anything.
    pub fn count(&self, atom: &AtomData, m: HalfInt) -> usize {
        let mut count = 0;
        for n in self.n_range(atom) {
            for l in 0..=self.l_top(n) {
                count += j_values(l).filter(|j| j.twice() >= m.twice().abs()).count();
            }
        }
        count
    }

    fn n_range(&self, atom: &AtomData) -> std::ops::RangeInclusive<u32> {
        let lo = self.n_center.saturating_sub(self.delta_n).max(atom.min_n).max(1);
        lo..=self.n_center + self.delta_n
    }

    fn l_top(&self, n: u32) -> u32 {
        self.l_max.map_or(n - 1, |l| l.min(n - 1))
    }
}

fn j_values(l: u32) -> impl Iterator<Item = HalfInt> {
    let twice = 2 * l as i32;
    [twice - 1, twice + 1].into_iter().filter(|&t| t > 0).map(HalfInt::from_twice)
}

/// One `|n l j m_j>` state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisState {
    pub level: RydbergLevel,
    pub m: HalfInt,
}

/// The states of one `m_j` block, ordered by `(n, l, j)`, with their
/// field-free energies in GHz.
#[derive(Debug, Clone)]
pub struct Basis {
    pub m: HalfInt,
    pub states: Vec<BasisState>,
    pub energies: Vec<f64>,
}

impl Basis {
    pub fn build(atom: &AtomData, spec: &BasisSpec) -> Result<Self> {
        let m = spec.m;
        if spec.n_center == 0 {
            return Err(Error::config("basis centre n must be positive"));
        }
        let size = spec.count(atom, m);
        if size > spec.capacity {
            return Err(Error::Capacity { size, limit: spec.capacity });
        }
        let mut states = Vec::with_capacity(size);
        for n in spec.n_range(atom) {
            for l in 0..=spec.l_top(n) {
                for j in j_values(l) {
                    if j.twice() < m.twice().abs() || (j.twice() - m.twice()) % 2 != 0 {
                        continue;
                    }
                    states.push(BasisState { level: atom.level(n, l, j)?, m });
                }
            }
        }
        if states.is_empty() {
            return Err(Error::domain(format!(
                "basis around n={} with m={m} is empty",
                spec.n_center
            )));
        }
        let energies = states.iter().map(|s| atom.level_energy(&s.level)).collect();
        Ok(Basis { m, states, energies })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn find(&self, n: u32, l: u32, j: HalfInt) -> Option<usize> {
        self.states
            .iter()
            .position(|s| s.level.n == n && s.level.l == l && s.level.j == j)
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        let (n, ch) = crate::structure::parse_level_label(label)?;
        self.find(n, ch.l, ch.j)
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.level.label()).collect()
    }
}
