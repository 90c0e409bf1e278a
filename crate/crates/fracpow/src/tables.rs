//! Parameter sweeps reproducing the reference accuracy tables, and the diff
//! machinery that checks produced tables against the shipped reference data.
//!
//! Five tables exist:
//!
//! 1. scalar quadrature error `eps` of `S_m(alpha+p, kappa)`:
//!    rows m x p, columns alpha;
//! 2. / 3. solution errors `eps2`/`epsinf` at N = 256 for the smooth (f1) and
//!    discontinuous (f2) right-hand side: rows p x m, columns alpha;
//! 4. / 5. the same errors across grid sizes N in {32, 64, 128} at p = 0:
//!    rows N x m, columns alpha.
//!
//! Reference values are shipped as CSV assets embedded in the binary and
//! integrity-checked by SHA-256 before use. CSV layouts mirror the table
//! shapes: `m,p,<alphas>` for table 1, `p,m,error,<alphas>` for tables 2-3
//! and `N,m,error,<alphas>` for tables 4-5, with `error` one of
//! `eps2`/`epsinf`.
//!
//! Cells are independent jobs and are evaluated in parallel; assembly order
//! is fixed, so re-running a sweep bit-reproduces its CSV.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{rhs_f1, rhs_f2, Grid2D, GridFunction};
use crate::quadrature::{default_kappa_samples, quad_error_study};
use crate::solver::{solution_report, SolverConfig};
use crate::spectral::SpectralBasis;

/// Largest grid size a sweep will attempt.
pub const MAX_SWEEP_N: usize = 2048;

const TABLE1_CSV: &str = include_str!("../data/table1.csv");
const TABLE2_CSV: &str = include_str!("../data/table2.csv");
const TABLE3_CSV: &str = include_str!("../data/table3.csv");
const TABLE4_CSV: &str = include_str!("../data/table4.csv");
const TABLE5_CSV: &str = include_str!("../data/table5.csv");
const FIGURES_CSV: &str = include_str!("../data/figures.csv");

const TABLE_SHA256: [&str; 5] = [
    "a3ba975bd33a0400aabbdc5a95e0fc5513a473801660e8c41d9499cab6078d2b",
    "1ea5024293d13f2f0b735c91ecce26300e985218c5e0457676cbab73af1ab090",
    "af36e0749da2a4ca8b1316551678f3034ab15623f9a5ab31ab8ff13a9b6f25f4",
    "ac6ed7002c80093698c44780a1335926f8d9e7c162fc9127f36929822fd38eff",
    "e9cabb4954488d56353689cb5c68c767c6790d6839349e50f597d5cc640b4bb1",
];
const FIGURES_SHA256: &str = "75d7aae677ae938d7b22c5c9f1ef9d242a1f571095b7a6c391c6f970fbc4166b";

/// Which model right-hand side a sweep solves with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsKind {
    F1,
    F2,
}

impl RhsKind {
    pub fn field(&self, grid: Grid2D) -> GridFunction {
        match self {
            RhsKind::F1 => rhs_f1(grid),
            RhsKind::F2 => rhs_f2(grid),
        }
    }
}

impl fmt::Display for RhsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsKind::F1 => write!(f, "f1"),
            RhsKind::F2 => write!(f, "f2"),
        }
    }
}

impl FromStr for RhsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(RhsKind::F1),
            "f2" => Ok(RhsKind::F2),
            other => Err(Error::Domain(format!(
                "unknown right-hand side '{other}' (expected f1 or f2)"
            ))),
        }
    }
}

/// What a cell value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    /// Scalar quadrature error functional (table 1).
    Eps,
    /// Squared relative L2 solution error.
    Eps2,
    /// Relative maximum-norm solution error.
    EpsInf,
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellKind::Eps => write!(f, "eps"),
            CellKind::Eps2 => write!(f, "eps2"),
            CellKind::EpsInf => write!(f, "epsinf"),
        }
    }
}

/// One table cell with full sweep provenance.
#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<RhsKind>,
    pub alpha: f64,
    pub kind: CellKind,
    pub value: f64,
}

impl TableCell {
    /// Row/column identity of the cell, ignoring its value.
    fn key(&self) -> (usize, Option<usize>, Option<usize>, u64, CellKind) {
        (self.m, self.p, self.n, self.alpha.to_bits(), self.kind)
    }

    fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(n) = self.n {
            parts.push(format!("N={n}"));
        }
        if let Some(p) = self.p {
            parts.push(format!("p={p}"));
        }
        parts.push(format!("m={}", self.m));
        parts.push(format!("alpha={}", self.alpha));
        parts.push(self.kind.to_string());
        parts.join(" ")
    }
}

/// Parameter grid of one table run; defaults mirror the reference tables.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub table: u8,
    pub alphas: Vec<f64>,
    pub ms: Vec<usize>,
    pub ps: Vec<usize>,
    pub ns: Vec<usize>,
    pub rhs: RhsKind,
}

impl SweepSpec {
    pub fn for_table(table: u8) -> Result<Self> {
        let alphas = vec![0.1, 0.25, 0.5, 0.75, 0.9];
        let ms = vec![25, 50, 100];
        match table {
            1 => Ok(Self {
                table,
                alphas,
                ms,
                ps: (0..=4).collect(),
                ns: Vec::new(),
                rhs: RhsKind::F1,
            }),
            2 | 3 => Ok(Self {
                table,
                alphas,
                ms,
                ps: vec![0, 1, 2],
                ns: vec![256],
                rhs: if table == 2 { RhsKind::F1 } else { RhsKind::F2 },
            }),
            4 | 5 => Ok(Self {
                table,
                alphas,
                ms,
                ps: vec![0],
                ns: vec![32, 64, 128],
                rhs: if table == 4 { RhsKind::F1 } else { RhsKind::F2 },
            }),
            other => Err(Error::Domain(format!(
                "table id must be 1..=5, got {other}"
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.ms.is_empty() {
            return Err(Error::Domain("sweep needs alphas and ms".into()));
        }
        if self.table != 1 {
            if self.ns.is_empty() || self.ps.is_empty() {
                return Err(Error::Domain("solution sweep needs ns and ps".into()));
            }
            for &n in &self.ns {
                if n > MAX_SWEEP_N {
                    return Err(Error::Capacity(format!(
                        "grid size N = {n} exceeds the sweep cap {MAX_SWEEP_N}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A produced or reference table: ordered cells plus the column set.
#[derive(Debug, Clone)]
pub struct Table {
    pub id: u8,
    pub alphas: Vec<f64>,
    pub cells: Vec<TableCell>,
}

impl Table {
    /// Looks a cell value up by its coordinates.
    pub fn value(
        &self,
        m: usize,
        p: Option<usize>,
        n: Option<usize>,
        alpha: f64,
        kind: CellKind,
    ) -> Option<f64> {
        let key = (m, p, n, alpha.to_bits(), kind);
        self.cells.iter().find(|c| c.key() == key).map(|c| c.value)
    }

    /// CSV in the layout of the corresponding reference table, values with
    /// 17 significant digits.
    pub fn to_csv(&self) -> String {
        let alpha_header = self
            .alphas
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut out = String::new();
        if self.id == 1 {
            out.push_str(&format!("m,p,{alpha_header}\n"));
            for row in self.cells.chunks(self.alphas.len()) {
                let vals = row
                    .iter()
                    .map(|c| format!("{:.16e}", c.value))
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("{},{},{vals}\n", row[0].m, row[0].p.unwrap()));
            }
        } else {
            let key_name = if self.id <= 3 { "p" } else { "N" };
            out.push_str(&format!("{key_name},m,error,{alpha_header}\n"));
            for row in self.cells.chunks(self.alphas.len()) {
                let key = if self.id <= 3 {
                    row[0].p.unwrap()
                } else {
                    row[0].n.unwrap()
                };
                let vals = row
                    .iter()
                    .map(|c| format!("{:.16e}", c.value))
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("{key},{},{},{vals}\n", row[0].m, row[0].kind));
            }
        }
        out
    }

    /// Parses a table in the [`Table::to_csv`] layout.
    pub fn from_csv(id: u8, text: &str) -> Result<Table> {
        let parse_err = |msg: String| Error::Asset(format!("table {id} csv: {msg}"));
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err("empty file".into()))?;
        let head: Vec<&str> = header.split(',').collect();
        let key_cols = if id == 1 { 2 } else { 3 };
        if head.len() <= key_cols {
            return Err(parse_err(format!("bad header '{header}'")));
        }
        let alphas: Vec<f64> = head[key_cols..]
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| parse_err(format!("bad alpha column '{s}'")))
            })
            .collect::<Result<_>>()?;
        let rhs = match id {
            2 | 4 => Some(RhsKind::F1),
            3 | 5 => Some(RhsKind::F2),
            _ => None,
        };
        let mut cells = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != key_cols + alphas.len() {
                return Err(parse_err(format!("bad row '{line}'")));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| parse_err(format!("bad number '{s}'")))
            };
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(format!("bad integer '{s}'")))
            };
            let (m, p, n, kind) = if id == 1 {
                (int(fields[0])?, Some(int(fields[1])?), None, CellKind::Eps)
            } else {
                let kind = match fields[2] {
                    "eps2" => CellKind::Eps2,
                    "epsinf" => CellKind::EpsInf,
                    other => return Err(parse_err(format!("bad error kind '{other}'"))),
                };
                if id <= 3 {
                    (int(fields[1])?, Some(int(fields[0])?), Some(256), kind)
                } else {
                    (int(fields[1])?, Some(0), Some(int(fields[0])?), kind)
                }
            };
            for (j, alpha) in alphas.iter().enumerate() {
                cells.push(TableCell {
                    m,
                    p,
                    n,
                    rhs,
                    alpha: *alpha,
                    kind,
                    value: num(fields[key_cols + j])?,
                });
            }
        }
        Ok(Table { id, alphas, cells })
    }

    /// The shipped reference table, integrity-checked against its pinned
    /// SHA-256 before parsing.
    pub fn reference(id: u8) -> Result<Table> {
        let text = match id {
            1 => TABLE1_CSV,
            2 => TABLE2_CSV,
            3 => TABLE3_CSV,
            4 => TABLE4_CSV,
            5 => TABLE5_CSV,
            other => {
                return Err(Error::Domain(format!(
                    "table id must be 1..=5, got {other}"
                )))
            }
        };
        verify_checksum(text, TABLE_SHA256[id as usize - 1], &format!("table{id}"))?;
        Table::from_csv(id, text)
    }
}

fn verify_checksum(text: &str, expected: &str, what: &str) -> Result<()> {
    let digest = Sha256::digest(text.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    if hex != expected {
        return Err(Error::Asset(format!(
            "{what} reference data failed its checksum ({hex} != {expected})"
        )));
    }
    Ok(())
}

/// A reference point from the solution plots: the maximum of the computed
/// solution for a given right-hand side and exponent.
#[derive(Debug, Clone, Copy)]
pub struct FigureAnchor {
    pub rhs: RhsKind,
    pub alpha: f64,
    pub max_u: f64,
}

/// The shipped figure-caption anchors (checksummed like the tables).
pub fn figure_anchors() -> Result<Vec<FigureAnchor>> {
    verify_checksum(FIGURES_CSV, FIGURES_SHA256, "figures")?;
    let mut anchors = Vec::new();
    for line in FIGURES_CSV.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Asset(format!("figures csv: bad row '{line}'")));
        }
        anchors.push(FigureAnchor {
            rhs: fields[0].parse()?,
            alpha: fields[1]
                .parse()
                .map_err(|_| Error::Asset(format!("figures csv: bad alpha '{}'", fields[1])))?,
            max_u: fields[2]
                .parse()
                .map_err(|_| Error::Asset(format!("figures csv: bad value '{}'", fields[2])))?,
        });
    }
    Ok(anchors)
}

/// Runs the sweep and assembles the table in reference layout.
pub fn run_table(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    if spec.table == 1 {
        run_quad_table(spec)
    } else {
        run_solution_table(spec)
    }
}

fn run_quad_table(spec: &SweepSpec) -> Result<Table> {
    let samples = default_kappa_samples();
    let mut jobs = Vec::new();
    for &m in &spec.ms {
        for &p in &spec.ps {
            for &alpha in &spec.alphas {
                jobs.push((m, p, alpha));
            }
        }
    }
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(m, p, alpha)| quad_error_study(m, alpha, p, &samples))
        .collect::<Result<_>>()?;
    let cells = jobs
        .into_iter()
        .zip(values)
        .map(|((m, p, alpha), value)| TableCell {
            m,
            p: Some(p),
            n: None,
            rhs: None,
            alpha,
            kind: CellKind::Eps,
            value,
        })
        .collect();
    Ok(Table {
        id: spec.table,
        alphas: spec.alphas.clone(),
        cells,
    })
}

fn run_solution_table(spec: &SweepSpec) -> Result<Table> {
    // one basis per grid size, shared across the whole sweep
    let bases: Vec<(usize, SpectralBasis, GridFunction)> = spec
        .ns
        .iter()
        .map(|&n| {
            let grid = Grid2D::unit_square(n)?;
            let basis = SpectralBasis::analytic(grid, 1.0, 0.0)?;
            let b = spec.rhs.field(grid);
            Ok((n, basis, b))
        })
        .collect::<Result<_>>()?;

    // outer row order: N, then p, then m; both error kinds per row
    let mut jobs = Vec::new();
    for (ni, &n) in spec.ns.iter().enumerate() {
        for &p in &spec.ps {
            for &m in &spec.ms {
                for &alpha in &spec.alphas {
                    jobs.push((ni, n, p, m, alpha));
                }
            }
        }
    }
    let reports: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(ni, _, p, m, alpha)| {
            let (_, basis, b) = &bases[ni];
            let config = SolverConfig::new(alpha, m)?.with_p(p);
            let report = solution_report(basis, &config, b)?;
            Ok((report.eps2, report.epsinf))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    let row_len = spec.alphas.len();
    let mut row_start = 0;
    while row_start < jobs.len() {
        for kind in [CellKind::Eps2, CellKind::EpsInf] {
            for offset in 0..row_len {
                let (_, n, p, m, alpha) = jobs[row_start + offset];
                let (eps2, epsinf) = reports[row_start + offset];
                cells.push(TableCell {
                    m,
                    p: Some(p),
                    n: Some(n),
                    rhs: Some(spec.rhs),
                    alpha,
                    kind,
                    value: if kind == CellKind::Eps2 { eps2 } else { epsinf },
                });
            }
        }
        row_start += row_len;
    }
    Ok(Table {
        id: spec.table,
        alphas: spec.alphas.clone(),
        cells,
    })
}

/// Per-cell comparison of a produced table against a reference.
#[derive(Debug, Clone, Serialize)]
pub struct CellDiff {
    pub cell: String,
    pub produced: f64,
    pub reference: f64,
    pub rel_deviation: f64,
}

/// Outcome of [`diff_against_reference`].
#[derive(Debug, Clone, Serialize)]
pub struct DiffReport {
    pub table: u8,
    pub tolerance: f64,
    pub comparisons: usize,
    pub max_rel_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_cell: Option<String>,
    pub failures: Vec<CellDiff>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }
}

/// Compares tables cell by cell; shapes must be congruent (same cell set in
/// the same order).
pub fn diff_against_reference(
    produced: &Table,
    reference: &Table,
    tolerance: f64,
) -> Result<DiffReport> {
    if produced.id != reference.id || produced.cells.len() != reference.cells.len() {
        return Err(Error::ShapeMismatch(format!(
            "table {} with {} cells vs table {} with {} cells",
            produced.id,
            produced.cells.len(),
            reference.id,
            reference.cells.len()
        )));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let mut failures = Vec::new();
    let mut max_rel: f64 = 0.0;
    let mut worst_cell = None;
    for (prod, refc) in produced.cells.iter().zip(&reference.cells) {
        if prod.key() != refc.key() {
            return Err(Error::ShapeMismatch(format!(
                "cell mismatch: produced {} vs reference {}",
                prod.label(),
                refc.label()
            )));
        }
        if refc.value == 0.0 {
            return Err(Error::Normalization(format!(
                "reference cell {} is zero",
                refc.label()
            )));
        }
        let rel = (prod.value - refc.value).abs() / refc.value.abs();
        if rel > max_rel {
            max_rel = rel;
            worst_cell = Some(prod.label());
        }
        if rel > tolerance {
            failures.push(CellDiff {
                cell: prod.label(),
                produced: prod.value,
                reference: refc.value,
                rel_deviation: rel,
            });
        }
    }
    Ok(DiffReport {
        table: produced.id,
        tolerance,
        comparisons: produced.cells.len(),
        max_rel_deviation: max_rel,
        worst_cell,
        failures,
    })
}
