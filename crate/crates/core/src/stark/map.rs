use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::BasisSpec;
use super::hamiltonian::{eigh, StarkOperator};
use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::format::g9;
use crate::radial::RadialCache;
use crate::structure::AtomData;

/// Overlap below which a track assignment is flagged diabatic.
pub const TRACK_THRESHOLD: f64 = 0.5;

/// What to compute on top of the eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRequest {
    pub basis: BasisSpec,
    /// Field grid in V/cm, monotone.
    pub fields: Vec<f64>,
    /// Zero-field states whose character is followed, e.g. `41D5/2`.
    #[serde(default = "default_targets")]
    pub targets: Vec<String>,
    /// Energies are reported relative to this level's field-free energy.
    #[serde(default = "default_reference")]
    pub reference: String,
    /// Lower level of the strength calculation.
    #[serde(default = "default_intermediate")]
    pub intermediate: String,
    /// Spherical component of the exciting light (0 = pi).
    #[serde(default)]
    pub polarization: i32,
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

impl MapRequest {
    pub fn new(basis: BasisSpec, fields: Vec<f64>) -> Self {
        MapRequest {
            basis,
            fields,
            targets: default_targets(),
            reference: default_reference(),
            intermediate: default_intermediate(),
            polarization: 0,
        }
    }
}

/// Eigenvalues of one `m` block against field, sorted into adiabatic tracks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarkMap {
    pub m: HalfInt,
    pub fields: Vec<f64>,
    pub reference: String,
    /// Field-free energy of the reference level, GHz below the limit.
    pub reference_ghz: f64,
    pub targets: Vec<String>,
    pub basis_labels: Vec<String>,
    /// `[field][track]`, GHz relative to the reference.
    pub energies: Vec<Vec<f64>>,
    /// `[field][track][target]`, `|<target|track>|^2`.
    pub characters: Vec<Vec<Vec<f64>>>,
    /// `[field][track]`, `|<track| d_q |intermediate>|^2` in (e a0)^2.
    pub strengths: Vec<Vec<f64>>,
    /// `[field][track]`, set when the track was continued with overlap
    /// below [`TRACK_THRESHOLD`].
    pub diabatic: Vec<Vec<bool>>,
}

struct Point {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

/// Compute a Stark map. Field points are diagonalized in parallel chunks and
/// then linked sequentially by maximal eigenvector overlap.
pub fn stark_map(atom: &AtomData, cache: &RadialCache, req: &MapRequest) -> Result<StarkMap> {
    if req.fields.is_empty() {
        return Err(Error::config("field grid is empty"));
    }
    if req.fields.iter().any(|f| !f.is_finite()) {
        return Err(Error::config("field grid contains non-finite values"));
    }
    let rising = req.fields.windows(2).all(|w| w[1] > w[0]);
    let falling = req.fields.windows(2).all(|w| w[1] < w[0]);
    if !(rising || falling) {
        return Err(Error::config("field grid must be strictly monotone"));
    }
    let op = StarkOperator::new(atom, cache, &req.basis)?;
    let reference_ghz = atom.level_energy(&atom.level_by_label(&req.reference)?);
    let target_idx: Vec<usize> = req
        .targets
        .iter()
        .map(|t| {
            op.basis.find_label(t).ok_or_else(|| {
                Error::config(format!("target {t} is not in the m={} basis", req.basis.m))
            })
        })
        .collect::<Result<_>>()?;
    let lower = atom.level_by_label(&req.intermediate)?;
    let m_lower = req.basis.m - HalfInt::integer(req.polarization);
    let couplings = op.couplings_from(cache, &lower, m_lower, req.polarization)?;

    let n = op.len();
    let nf = req.fields.len();
    let mut map = StarkMap {
        m: req.basis.m,
        fields: req.fields.clone(),
        reference: req.reference.clone(),
        reference_ghz,
        targets: req.targets.clone(),
        basis_labels: op.basis.labels(),
        energies: Vec::with_capacity(nf),
        characters: Vec::with_capacity(nf),
        strengths: Vec::with_capacity(nf),
        diabatic: Vec::with_capacity(nf),
    };

    let chunk = 2 * rayon::current_num_threads().max(1);
    let mut prev: Option<Mat<f64>> = None;
    for fields in req.fields.chunks(chunk) {
        let points: Vec<Point> = fields
            .par_iter()
            .map(|&f| {
                let (values, vectors) = eigh(&op.hamiltonian(f, reference_ghz))?;
                Ok(Point { values, vectors })
            })
            .collect::<Result<_>>()?;
        for p in points {
            let (order, flags) = match &prev {
                None => ((0..n).collect(), vec![false; n]),
                Some(pv) => assign_tracks(pv, &p.vectors, &p.values),
            };
            let vectors = Mat::from_fn(n, n, |r, c| p.vectors[(r, order[c])]);
            map.energies.push(order.iter().map(|&k| p.values[k]).collect());
            map.characters.push(
                (0..n)
                    .map(|c| target_idx.iter().map(|&t| vectors[(t, c)].powi(2)).collect())
                    .collect(),
            );
            map.strengths.push(
                (0..n)
                    .map(|c| {
                        let amp: f64 = (0..n).map(|r| vectors[(r, c)] * couplings[r]).sum();
                        amp * amp
                    })
                    .collect(),
            );
            map.diabatic.push(flags);
            prev = Some(vectors);
        }
    }
    Ok(map)
}

/// Link new eigenvectors to previous tracks. Returns, for each track, the
/// index of the new eigenvector, and whether the link is ambiguous.
fn assign_tracks(prev: &Mat<f64>, next: &Mat<f64>, values: &[f64]) -> (Vec<usize>, Vec<bool>) {
    let n = prev.ncols();
    let overlap = prev.transpose() * next;
    let mut order = vec![usize::MAX; n];
    let mut flags = vec![false; n];
    let mut taken = vec![false; n];
    // overlaps above one half are unique in both directions
    let mut weak = Vec::new();
    for t in 0..n {
        for k in 0..n {
            let w = overlap[(t, k)].powi(2);
            if w > TRACK_THRESHOLD {
                order[t] = k;
                taken[k] = true;
            } else if w > 1e-4 {
                weak.push((w, t, k));
            }
        }
    }
    weak.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, t, k) in weak {
        if order[t] == usize::MAX && !taken[k] {
            order[t] = k;
            taken[k] = true;
            flags[t] = true;
        }
    }
    // anything still open is paired in energy order
    let mut free: Vec<usize> = (0..n).filter(|&k| !taken[k]).collect();
    free.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut free = free.into_iter();
    for t in 0..n {
        if order[t] == usize::MAX {
            order[t] = free.next().expect("track and state counts agree");
            flags[t] = true;
        }
    }
    (order, flags)
}

impl StarkMap {
    pub fn track_count(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn target_index(&self, label: &str) -> Result<usize> {
        self.targets
            .iter()
            .position(|t| t == label)
            .ok_or_else(|| Error::config(format!("{label} is not a target of this map")))
    }

    /// Track carrying the largest share of `target` at field index `i`.
    pub fn dominant_track(&self, target: usize, i: usize) -> usize {
        let chars = &self.characters[i];
        (0..chars.len())
            .max_by(|&a, &b| chars[a][target].total_cmp(&chars[b][target]).then(b.cmp(&a)))
            .expect("non-empty map")
    }

    /// Energy (GHz) of the dominant track of `target` at every field point.
    pub fn target_energies(&self, target: usize) -> Vec<f64> {
        (0..self.fields.len())
            .map(|i| self.energies[i][self.dominant_track(target, i)])
            .collect()
    }

    pub fn trace(&self, i: usize) -> f64 {
        self.energies[i].iter().sum()
    }

    pub fn total_strength(&self, i: usize) -> f64 {
        self.strengths[i].iter().sum()
    }

    pub fn diabatic_count(&self) -> usize {
        self.diabatic.iter().flatten().filter(|&&d| d).count()
    }

    /// CSV rows `field_V_per_cm,track_id,energy_GHz,character,strength`,
    /// with `character` summed over the targets.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("field_V_per_cm,track_id,energy_GHz,character,strength\n");
        for (i, &f) in self.fields.iter().enumerate() {
            for t in 0..self.track_count() {
                let ch: f64 = self.characters[i][t].iter().sum();
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    g9(f),
                    t,
                    g9(self.energies[i][t]),
                    g9(ch),
                    g9(self.strengths[i][t])
                ));
            }
        }
        out
    }

    /// Metadata for the JSON sidecar.
    pub fn metadata(&self, atom: &AtomData, basis: &BasisSpec) -> serde_json::Value {
        let diabatic: Vec<[usize; 2]> = self
            .diabatic
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, &d)| d).map(move |(t, _)| [i, t]))
            .collect();
        serde_json::json!({
            "basis": basis,
            "basis_size": self.track_count(),
            "basis_labels": self.basis_labels,
            "m": self.m,
            "targets": self.targets,
            "reference": self.reference,
            "reference_GHz": self.reference_ghz,
            "field_points": self.fields.len(),
            "constants_version": atom.version,
            "constants_sha256": atom.content_hash,
            "diabatic_links": diabatic,
        })
    }
}
