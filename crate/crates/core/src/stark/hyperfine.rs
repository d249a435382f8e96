use std::collections::{BTreeMap, BTreeSet};

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::basis::BasisSpec;
use super::hamiltonian::{eigh, StarkOperator};
use crate::angular::{clebsch_gordan, HalfInt};
use crate::error::{Error, Result};
use crate::radial::RadialCache;
use crate::structure::{AtomData, RydbergLevel};

/// Hyperfine-resolved line calculation around a few target levels.
///
/// Fine-structure Stark blocks are diagonalized first; the eigenstates that
/// live mostly on states within `basis.hyperfine_window_ghz` of a target form
/// an effective subspace, which is tensored with the nuclear spin and
/// rediagonalized with the `A I.J` interaction for each `m_F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperfineRequest {
    pub basis: BasisSpec,
    #[serde(default = "default_targets")]
    pub targets: Vec<String>,
    /// Intermediate level and its hyperfine state `F'`.
    #[serde(default = "default_intermediate")]
    pub intermediate: String,
    #[serde(default = "default_intermediate_f")]
    pub intermediate_f: HalfInt,
    /// Energies are reported in MHz relative to this level's field-free energy.
    #[serde(default = "default_reference")]
    pub reference: String,
}

fn default_targets() -> Vec<String> {
    vec!["41D3/2".into(), "41D5/2".into()]
}

fn default_intermediate() -> String {
    "5P3/2".into()
}

fn default_intermediate_f() -> HalfInt {
    HalfInt::integer(3)
}

fn default_reference() -> String {
    "41D5/2".into()
}

impl HyperfineRequest {
    pub fn new(basis: BasisSpec) -> Self {
        HyperfineRequest {
            basis,
            targets: default_targets(),
            intermediate: default_intermediate(),
            intermediate_f: default_intermediate_f(),
            reference: default_reference(),
        }
    }
}

/// One excitable hyperfine Stark component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperfineLine {
    /// MHz relative to the reference level.
    pub energy_mhz: f64,
    /// `|<line| d_0 |F' m_F>|^2 / (2F'+1)` in (e a0)^2.
    pub strength: f64,
    pub m_f: HalfInt,
    /// Dominant zero-field parentage.
    pub level: String,
    pub j: HalfInt,
    pub f: HalfInt,
    /// Weight of that parentage.
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperfineLineSet {
    pub field: f64,
    pub lines: Vec<HyperfineLine>,
}

impl HyperfineLineSet {
    /// Distinct `F` among lines of fine-structure level `level` whose
    /// strength exceeds `rel_threshold` times the strongest line.
    pub fn components(&self, level: &str, rel_threshold: f64) -> BTreeSet<HalfInt> {
        let max = self.lines.iter().map(|l| l.strength).fold(0.0, f64::max);
        self.lines
            .iter()
            .filter(|l| l.level == level && l.strength > rel_threshold * max)
            .map(|l| l.f)
            .collect()
    }
}

/// Window level with its per-block basis index.
struct WindowLevel {
    level: RydbergLevel,
    a_mhz: f64,
    index: BTreeMap<HalfInt, usize>,
}

/// Selected fine-structure eigenstate of one `m_j` block.
struct Dressed {
    m_j: HalfInt,
    energy_mhz: f64,
    /// Amplitude on each window level (0 when the level has no such m_j).
    window: Vec<f64>,
    /// `<state| d_0 |intermediate m_j>`
    coupling: f64,
}

pub fn hyperfine_stark_lines(
    atom: &AtomData,
    cache: &RadialCache,
    req: &HyperfineRequest,
    fields: &[f64],
) -> Result<Vec<HyperfineLineSet>> {
    let i_nuc = atom.nuclear_spin;
    let lower = atom.level_by_label(&req.intermediate)?;
    let f_int = req.intermediate_f;
    let jl = lower.j;
    if f_int.twice() < (i_nuc.twice() - jl.twice()).abs() || f_int.twice() > i_nuc.twice() + jl.twice() {
        return Err(Error::domain(format!("F'={f_int} is not a state of {}", req.intermediate)));
    }
    let reference_ghz = atom.level_energy(&atom.level_by_label(&req.reference)?);
    let targets: Vec<RydbergLevel> =
        req.targets.iter().map(|t| atom.level_by_label(t)).collect::<Result<_>>()?;
    if targets.is_empty() {
        return Err(Error::config("no hyperfine targets given"));
    }

    // m_j blocks reachable from F' by pi light after adding m_I
    let j_top = targets.iter().map(|t| t.j.twice()).max().unwrap_or(1);
    let mut m_js = BTreeSet::new();
    for m_f in f_int.projections() {
        for m_i in i_nuc.projections() {
            let m_j = m_f - m_i;
            if m_j.twice().abs() <= j_top {
                m_js.insert(m_j);
            }
        }
    }

    let mut ops = BTreeMap::new();
    for &m_j in &m_js {
        ops.insert(m_j, StarkOperator::new(atom, cache, &req.basis.with_m(m_j))?);
    }

    // window: basis levels close to any target
    let window_ghz = req.basis.hyperfine_window_ghz;
    let mut window: Vec<WindowLevel> = Vec::new();
    for (&m_j, op) in &ops {
        for (idx, s) in op.basis.states.iter().enumerate() {
            let e = op.basis.energies[idx];
            let near = targets.iter().any(|t| (atom.level_energy(t) - e).abs() <= window_ghz);
            if !near {
                continue;
            }
            if let Some(w) = window.iter_mut().find(|w| w.level == s.level) {
                w.index.insert(m_j, idx);
            } else {
                let is_target = targets.contains(&s.level);
                let a_mhz = match atom.rydberg_hfs_a(&s.level) {
                    Ok(a) => a,
                    Err(e) if is_target => return Err(e),
                    Err(_) => 0.0,
                };
                window.push(WindowLevel { level: s.level, a_mhz, index: BTreeMap::from([(m_j, idx)]) });
            }
        }
    }
    for t in &targets {
        if !window.iter().any(|w| w.level == *t) {
            return Err(Error::config(format!("target {} is outside the basis", t.label())));
        }
    }

    let couplings: BTreeMap<HalfInt, Vec<f64>> = ops
        .iter()
        .map(|(&m_j, op)| Ok((m_j, op.couplings_from(cache, &lower, m_j, 0)?)))
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(fields.len());
    for &field in fields {
        let mut states: Vec<Dressed> = Vec::new();
        for (&m_j, op) in &ops {
            let (values, vectors) = eigh(&op.hamiltonian(field, reference_ghz))?;
            let members: Vec<usize> = window.iter().filter_map(|w| w.index.get(&m_j).copied()).collect();
            let mut ranked: Vec<(f64, usize)> = (0..op.len())
                .map(|c| (members.iter().map(|&r| vectors[(r, c)].powi(2)).sum::<f64>(), c))
                .collect();
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let cpl = &couplings[&m_j];
            for &(_, c) in ranked.iter().take(members.len()) {
                states.push(Dressed {
                    m_j,
                    energy_mhz: values[c] * 1e3,
                    window: window.iter().map(|w| w.index.get(&m_j).map_or(0.0, |&r| vectors[(r, c)])).collect(),
                    coupling: (0..op.len()).map(|r| vectors[(r, c)] * cpl[r]).sum(),
                });
            }
        }

        let mut lines = Vec::new();
        for m_f in f_int.projections() {
            let product: Vec<(usize, HalfInt)> = states
                .iter()
                .enumerate()
                .flat_map(|(a, s)| {
                    i_nuc.projections().filter(move |&m_i| s.m_j + m_i == m_f).map(move |m_i| (a, m_i))
                })
                .collect();
            if product.is_empty() {
                continue;
            }
            let dim = product.len();
            let h = Mat::from_fn(dim, dim, |p, q| {
                let (a, mi_a) = product[p];
                let (b, mi_b) = product[q];
                let mut v = 0.0;
                if p == q {
                    v += states[a].energy_mhz;
                }
                for (w_idx, w) in window.iter().enumerate() {
                    let (ca, cb) = (states[a].window[w_idx], states[b].window[w_idx]);
                    if ca == 0.0 || cb == 0.0 || w.a_mhz == 0.0 {
                        continue;
                    }
                    v += w.a_mhz * ca * cb * i_dot_j(w.level.j, states[a].m_j, mi_a, states[b].m_j, mi_b, i_nuc);
                }
                v
            });
            let (values, vectors) = eigh(&h)?;
            for (k, &energy) in values.iter().enumerate() {
                let mut amp = 0.0;
                for (p, &(a, m_i)) in product.iter().enumerate() {
                    if states[a].m_j.twice().abs() > jl.twice() {
                        continue;
                    }
                    let cg = clebsch_gordan(jl, states[a].m_j, i_nuc, m_i, f_int, m_f)?;
                    amp += vectors[(p, k)] * states[a].coupling * cg;
                }
                let (level, j, f, purity) = parentage(&window, &states, &product, &vectors, k, m_f, i_nuc)?;
                lines.push(HyperfineLine {
                    energy_mhz: energy,
                    strength: amp * amp / f_int.multiplicity() as f64,
                    m_f,
                    level,
                    j,
                    f,
                    purity,
                });
            }
        }
        lines.sort_by(|a, b| a.energy_mhz.total_cmp(&b.energy_mhz).then(a.m_f.cmp(&b.m_f)));
        out.push(HyperfineLineSet { field, lines });
    }
    Ok(out)
}

/// `<j ma, I mia| I.J |j mb, I mib>`
fn i_dot_j(j: HalfInt, ma: HalfInt, mia: HalfInt, mb: HalfInt, mib: HalfInt, i: HalfInt) -> f64 {
    let jj = j.value() * (j.value() + 1.0);
    let ii = i.value() * (i.value() + 1.0);
    let (ma_v, mb_v, mia_v, mib_v) = (ma.value(), mb.value(), mia.value(), mib.value());
    if ma == mb && mia == mib {
        return ma_v * mia_v;
    }
    if ma.twice() == mb.twice() + 2 && mia.twice() == mib.twice() - 2 {
        return 0.5 * (jj - mb_v * (mb_v + 1.0)).sqrt() * (ii - mib_v * (mib_v - 1.0)).sqrt();
    }
    if ma.twice() == mb.twice() - 2 && mia.twice() == mib.twice() + 2 {
        return 0.5 * (jj - mb_v * (mb_v - 1.0)).sqrt() * (ii - mib_v * (mib_v + 1.0)).sqrt();
    }
    0.0
}

/// Largest projection of eigenvector `k` onto a zero-field `|level F m_F>`.
fn parentage(
    window: &[WindowLevel],
    states: &[Dressed],
    product: &[(usize, HalfInt)],
    vectors: &Mat<f64>,
    k: usize,
    m_f: HalfInt,
    i_nuc: HalfInt,
) -> Result<(String, HalfInt, HalfInt, f64)> {
    let mut best = (String::new(), HalfInt::ZERO, HalfInt::ZERO, -1.0);
    for (w_idx, w) in window.iter().enumerate() {
        let j = w.level.j;
        let lo = (j.twice() - i_nuc.twice()).abs();
        for tf in (lo..=j.twice() + i_nuc.twice()).step_by(2) {
            let f = HalfInt::from_twice(tf);
            if m_f.twice().abs() > tf {
                continue;
            }
            let mut amp = 0.0;
            for (p, &(a, m_i)) in product.iter().enumerate() {
                let c = states[a].window[w_idx];
                if c == 0.0 {
                    continue;
                }
                amp += vectors[(p, k)] * c * clebsch_gordan(j, states[a].m_j, i_nuc, m_i, f, m_f)?;
            }
            let weight = amp * amp;
            if weight > best.3 {
                best = (w.level.label(), j, f, weight);
            }
        }
    }
    Ok(best)
}
