//! Dataset ingest and result serialization.
//!
//! Input rows are `label,x1,...,xd` or `label,x1,...,xd,weight`; the two
//! layouts are byte-compatible, so which one applies is an explicit choice
//! (`CsvFormat`), not something inferred. Labels are arbitrary nonnegative
//! integers and are remapped to a dense `0..K-1` range by sorted order.

use std::collections::BTreeMap;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::hypergraph::VariableIndex;
use crate::solver::DualSolution;

/// Atoms with a final value below this are written as exact zeros in the
/// solution file (flagged); bounded losses produce genuinely sparse duals.
const SPARSITY_CLAMP: f64 = 1e-9;

/// How much the raw weight column may deviate from summing to one before
/// the renormalization warning fires.
const WEIGHT_SUM_SLACK: f64 = 1e-9;

/// Whether the trailing CSV column is a sample weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CsvFormat {
    #[default]
    Plain,
    Weighted,
}

/// A weighted, labeled point cloud with dense class indices.
///
/// Invariants established at construction: every point has dimension
/// `dim >= 1`; labels cover `0..class_count` with no gaps; weights are
/// strictly positive and sum to one; no two atoms share both class and
/// coordinates (duplicates are merged by summing their weights).
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    points: Vec<f64>, // row-major n x dim
    labels: Vec<u32>,
    weights: Vec<f64>,
    class_count: usize,
    dim: usize,
}

impl LabeledDataset {
    /// Builds a dataset from raw rows, applying the full validation and
    /// normalization pipeline. `weights: None` means uniform.
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<u64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        assert_eq!(points.len(), labels.len());
        let n_raw = points.len();
        let dim = points[0].len();
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    row: i + 1,
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        if dim == 0 {
            return Err(Error::MalformedRow {
                row: 1,
                message: "points need at least one coordinate".into(),
            });
        }
        let weights = match weights {
            Some(w) => {
                assert_eq!(w.len(), n_raw);
                for (i, &wi) in w.iter().enumerate() {
                    if !wi.is_finite() || wi < 0.0 {
                        return Err(Error::NegativeWeight {
                            row: i + 1,
                            weight: wi,
                        });
                    }
                }
                w
            }
            None => vec![1.0 / n_raw as f64; n_raw],
        };

        // Dense relabeling by sorted original label.
        let mut label_map: BTreeMap<u64, u32> = BTreeMap::new();
        for &l in &labels {
            let next = label_map.len() as u32;
            label_map.entry(l).or_insert(next);
        }
        // BTreeMap iteration is sorted, but insertion order above is not;
        // rebuild the dense ids from the sorted key order.
        for (rank, (_, v)) in label_map.iter_mut().enumerate() {
            *v = rank as u32;
        }

        // Merge duplicate atoms (same class, bitwise-identical coordinates).
        let mut seen: BTreeMap<(u32, Vec<u64>), usize> = BTreeMap::new();
        let mut m_points: Vec<Vec<f64>> = Vec::new();
        let mut m_labels: Vec<u32> = Vec::new();
        let mut m_weights: Vec<f64> = Vec::new();
        for ((p, l), w) in points.into_iter().zip(&labels).zip(&weights) {
            let dense = label_map[l];
            let key = (dense, p.iter().map(|x| x.to_bits()).collect());
            match seen.get(&key) {
                Some(&idx) => m_weights[idx] += w,
                None => {
                    seen.insert(key, m_points.len());
                    m_points.push(p);
                    m_labels.push(dense);
                    m_weights.push(*w);
                }
            }
        }
        if m_points.len() < n_raw {
            log::warn!(
                "merged {} duplicate atoms (same class and coordinates)",
                n_raw - m_points.len()
            );
        }

        // Drop zero-weight atoms; they would add constraints without mass.
        let kept: Vec<usize> = (0..m_points.len())
            .filter(|&i| m_weights[i] > 0.0)
            .collect();
        if kept.len() < m_points.len() {
            log::warn!(
                "dropped {} atoms with zero weight",
                m_points.len() - kept.len()
            );
        }
        for (&orig, &dense) in label_map.iter() {
            if !kept.iter().any(|&i| m_labels[i] == dense) {
                return Err(Error::EmptyClass { label: orig });
            }
        }
        let mut flat = Vec::with_capacity(kept.len() * dim);
        let mut labels_out = Vec::with_capacity(kept.len());
        let mut weights_out = Vec::with_capacity(kept.len());
        for &i in &kept {
            flat.extend_from_slice(&m_points[i]);
            labels_out.push(m_labels[i]);
            weights_out.push(m_weights[i]);
        }

        let sum: f64 = weights_out.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_SLACK {
            log::warn!("weights sum to {sum}; renormalizing to 1");
        }
        for w in &mut weights_out {
            *w /= sum;
        }

        Ok(LabeledDataset {
            points: flat,
            labels: labels_out,
            weights: weights_out,
            class_count: label_map.len(),
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Loads `label,x1,...,xd[,weight]` rows. All rows must agree on the
/// column count; mismatches are reported with their 1-based row number.
pub fn load_dataset(path: &Path, format: CsvFormat) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue; // blank line
        }
        let tail = match format {
            CsvFormat::Plain => 0,
            CsvFormat::Weighted => 1,
        };
        if record.len() < 2 + tail {
            return Err(Error::MalformedRow {
                row,
                message: format!(
                    "need a label, coordinates{}",
                    if tail == 1 { " and a weight" } else { "" }
                ),
            });
        }
        let label: u64 = record[0].parse().map_err(|_| Error::MalformedRow {
            row,
            message: format!("label '{}' is not a nonnegative integer", &record[0]),
        })?;
        let coord_count = record.len() - 1 - tail;
        match dim {
            None => dim = Some(coord_count),
            Some(d) if d != coord_count => {
                return Err(Error::DimensionMismatch {
                    row,
                    expected: d,
                    found: coord_count,
                })
            }
            _ => {}
        }
        let mut coords = Vec::with_capacity(coord_count);
        for f in record.iter().skip(1).take(coord_count) {
            let x: f64 = f.parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("coordinate '{f}' is not a number"),
            })?;
            if !x.is_finite() {
                return Err(Error::MalformedRow {
                    row,
                    message: format!("coordinate '{f}' is not finite"),
                });
            }
            coords.push(x);
        }
        if tail == 1 {
            let wtext = &record[record.len() - 1];
            let w: f64 = wtext.parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("weight '{wtext}' is not a number"),
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeWeight { row, weight: w });
            }
            weights.push(w);
        }
        labels.push(label);
        points.push(coords);
    }
    let weights = match format {
        CsvFormat::Plain => None,
        CsvFormat::Weighted => Some(weights),
    };
    LabeledDataset::new(points, labels, weights)
}

// ─── Solution files ──────────────────────────────────────────────────────

/// One dual value, keyed by (dense class, position within that class).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PsiEntry {
    pub class: u32,
    pub point: u32,
    pub value: f64,
    /// True when the raw value fell below the sparsity clamp and was
    /// written as an exact zero.
    #[serde(default)]
    pub clamped: bool,
}

/// Run metadata that accompanies a dual solution on disk.
#[derive(Clone, Copy, Debug)]
pub struct SolveMeta {
    pub alpha: f64,
    pub epsilon: f64,
    pub metric: Metric,
    pub interaction_cap: usize,
}

/// Serialized form of one solve: metadata, certificates and the per-atom
/// dual values. `schema` is 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub schema: u32,
    pub alpha: f64,
    pub epsilon: f64,
    pub metric: Metric,
    pub interaction_cap: usize,
    pub objective: f64,
    pub risk_lower_bound: f64,
    pub kkt_residual: f64,
    pub newton_iters: usize,
    pub psi: Vec<PsiEntry>,
}

impl SolutionRecord {
    pub fn new(sol: &DualSolution, index: &VariableIndex, meta: SolveMeta) -> Self {
        let sparse = meta.alpha < 1.0 - crate::alpha::ALPHA_ONE_BAND;
        let psi = (0..index.var_count())
            .map(|v| {
                let (class, point) = index.member_of(v);
                let raw = sol.z[v];
                let clamped = sparse && raw < SPARSITY_CLAMP;
                PsiEntry {
                    class: class as u32,
                    point: point as u32,
                    value: if clamped { 0.0 } else { raw },
                    clamped,
                }
            })
            .collect();
        SolutionRecord {
            schema: 1,
            alpha: meta.alpha,
            epsilon: meta.epsilon,
            metric: meta.metric,
            interaction_cap: meta.interaction_cap,
            objective: sol.objective,
            risk_lower_bound: sol.risk_lower_bound,
            kkt_residual: sol.kkt_residual,
            newton_iters: sol.newton_iters,
            psi,
        }
    }

    /// Dual values arranged by variable id under `index`; errors if the
    /// entries do not exactly cover the index.
    pub fn psi_by_variable(&self, index: &VariableIndex) -> Result<Vec<f64>> {
        let n = index.var_count();
        let mut out = vec![f64::NAN; n];
        if self.psi.len() != n {
            return Err(Error::InvalidConfig(format!(
                "solution has {} psi entries, dataset has {} atoms",
                self.psi.len(),
                n
            )));
        }
        for e in &self.psi {
            let v = index
                .var_of(e.class as usize, e.point as usize)
                .ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "psi entry (class {}, point {}) does not exist in the dataset",
                        e.class, e.point
                    ))
                })?;
            if !out[v].is_nan() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate psi entry for (class {}, point {})",
                    e.class, e.point
                )));
            }
            out[v] = e.value;
        }
        Ok(out)
    }
}

pub fn write_solution(record: &SolutionRecord, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, record)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

pub fn read_solution(path: &Path) -> Result<SolutionRecord> {
    let file = std::fs::File::open(path)?;
    let record: SolutionRecord = serde_json::from_reader(BufReader::new(file))?;
    if record.schema != 1 {
        return Err(Error::InvalidConfig(format!(
            "unsupported solution schema {}",
            record.schema
        )));
    }
    Ok(record)
}

// ─── Risk curve CSV ──────────────────────────────────────────────────────

/// Writes curve rows as `epsilon,alpha,value,kkt_residual,newton_iters`.
/// Edge counts and wall times stay in-memory diagnostics; the CSV schema
/// is the plotting interface and stays minimal.
pub fn write_curve_csv(curve: &crate::harness::RiskCurve, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["epsilon", "alpha", "value", "kkt_residual", "newton_iters"])?;
    for row in &curve.rows {
        w.write_record([
            format!("{}", row.epsilon),
            format!("{}", row.alpha),
            format!("{}", row.risk_lower_bound),
            format!("{}", row.kkt_residual),
            format!("{}", row.newton_iters),
        ])?;
    }
    w.flush()?;
    Ok(())
}
