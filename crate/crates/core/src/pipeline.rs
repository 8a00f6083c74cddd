//! Sweeps over (state, r_c) cells, a write-once solution cache, output
//! emission and the golden-table comparison harness.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complexity::{ComplexityReport, DEFAULT_B_VALUES, Family, Space, assemble_report};
use crate::error::{Error, Result};
use crate::measures::{DEFAULT_ALPHA, DEFAULT_BETA, MeasureSet, assemble_measures};
use crate::momentum::{MomentumOptions, MomentumSolution, build_momentum};
use crate::radial::{Confinement, QuantumState, RadialSolution, SUPPORTED_STATES, SolverOptions, solve};

/// Largest confinement radius accepted by a sweep, bohr.
pub const MAX_RC: f64 = 1e4;

/// Header of the CSV output.
pub const CSV_HEADER: &str = "state,r_c,alpha,beta,b,family,space,value";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub states: Vec<QuantumState>,
    pub rc_values: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub b_values: Vec<f64>,
    pub solver: SolverOptions,
    pub momentum: MomentumOptions,
    pub format: OutputFormat,
    /// `None` writes to standard output.
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            states: Vec::new(),
            rc_values: Vec::new(),
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            b_values: DEFAULT_B_VALUES.to_vec(),
            solver: SolverOptions::default(),
            momentum: MomentumOptions::default(),
            format: OutputFormat::Csv,
            out: None,
            threads: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for s in &self.states {
            if !SUPPORTED_STATES.contains(&s.to_string().as_str()) || s.m != 0 {
                return Err(Error::Config(format!("state {s} is not supported")));
            }
        }
        for &rc in &self.rc_values {
            if !(rc > 0.0 && rc <= MAX_RC) {
                return Err(Error::Config(format!("r_c = {rc} outside (0, {MAX_RC}]")));
            }
        }
        for (name, q) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(q > 0.0 && q.is_finite()) || q == 1.0 {
                return Err(Error::Config(format!("{name} = {q} must be positive and not 1")));
            }
        }
        if self.b_values.is_empty() || self.b_values.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config("b values must be a nonempty list of finite numbers".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// Identifies one cached pair of solutions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub state: QuantumState,
    /// Bit pattern of r_c, so that equal keys mean bit-equal radii.
    pub r_c_bits: u64,
    /// Hex SHA-256 of the serialized solver and momentum options.
    pub signature: String,
}

impl CacheKey {
    pub fn new(state: QuantumState, r_c: f64, solver: &SolverOptions, momentum: &MomentumOptions) -> Self {
        let options = serde_json::to_vec(&(solver, momentum)).expect("options serialize");
        CacheKey {
            state,
            r_c_bits: r_c.to_bits(),
            signature: hex_digest(&options),
        }
    }

    pub fn r_c(&self) -> f64 {
        f64::from_bits(self.r_c_bits)
    }

    fn file_name(&self) -> String {
        let id = format!("{}|{:016x}|{}", self.state, self.r_c_bits, self.signature);
        format!("{}-{}.json", self.state, &hex_digest(id.as_bytes())[..24])
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedSolution {
    pub radial: RadialSolution,
    pub momentum: MomentumSolution,
}

type Slot = Arc<Mutex<Option<Arc<CachedSolution>>>>;

/// Write-once store of solutions, in memory and optionally on disk.
///
/// Concurrent requests for the same key wait on one computation.
#[derive(Debug, Default)]
pub struct SolutionCache {
    slots: Mutex<HashMap<CacheKey, Slot>>,
    dir: Option<PathBuf>,
    solver_calls: AtomicUsize,
}

impl SolutionCache {
    pub fn in_memory() -> Self {
        SolutionCache::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SolutionCache {
            dir: Some(dir),
            ..SolutionCache::default()
        })
    }

    /// Number of times the eigensolver has been run by this cache.
    pub fn solver_invocations(&self) -> usize {
        self.solver_calls.load(Ordering::SeqCst)
    }

    pub fn get_or_compute(&self, key: &CacheKey, solver: &SolverOptions, momentum: &MomentumOptions) -> Result<Arc<CachedSolution>> {
        let slot = {
            let mut slots = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            slots.entry(key.clone()).or_default().clone()
        };
        let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(found) = guard.as_ref() {
            return Ok(found.clone());
        }
        let value = match self.load(key) {
            Some(v) => v,
            None => {
                let v = Arc::new(self.compute(key, solver, momentum)?);
                self.store(key, &v);
                v
            }
        };
        *guard = Some(value.clone());
        Ok(value)
    }

    fn compute(&self, key: &CacheKey, solver: &SolverOptions, momentum: &MomentumOptions) -> Result<CachedSolution> {
        self.solver_calls.fetch_add(1, Ordering::SeqCst);
        let radial = solve(&key.state, &Confinement::new(key.r_c())?, solver)?;
        let momentum = build_momentum(&radial, momentum)?;
        Ok(CachedSolution { radial, momentum })
    }

    fn load(&self, key: &CacheKey) -> Option<Arc<CachedSolution>> {
        let path = self.dir.as_ref()?.join(key.file_name());
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<CachedSolution>(&text) {
            Ok(v) if v.radial.state == key.state && v.radial.r_c.to_bits() == key.r_c_bits => Some(Arc::new(v)),
            Ok(_) => {
                log::warn!("cache entry {} belongs to another key; recomputing", path.display());
                None
            }
            Err(e) => {
                log::warn!("cache entry {} is corrupt ({e}); recomputing", path.display());
                None
            }
        }
    }

    fn store(&self, key: &CacheKey, value: &CachedSolution) {
        let Some(dir) = &self.dir else { return };
        let path = dir.join(key.file_name());
        let tmp = dir.join(format!("{}.{}.tmp", key.file_name(), std::process::id()));
        let result = serde_json::to_vec(value)
            .map_err(Error::from)
            .and_then(|bytes| fs::write(&tmp, bytes).map_err(Error::from))
            .and_then(|_| fs::rename(&tmp, &path).map_err(Error::from));
        if let Err(e) = result {
            log::warn!("could not write cache entry {}: {e}", path.display());
            let _ = fs::remove_file(&tmp);
        }
    }
}

/// Measures and complexities of one (state, r_c) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub measures: MeasureSet,
    pub report: ComplexityReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub state: QuantumState,
    pub r_c: f64,
    pub error: Error,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// Successful cells ordered by state, then r_c as configured.
    pub records: Vec<CellRecord>,
    pub failures: Vec<CellFailure>,
}

/// Solves one cell through `cache` and evaluates its measures.
pub fn compute_cell(state: QuantumState, r_c: f64, cfg: &SweepConfig, cache: &SolutionCache) -> Result<CellRecord> {
    let key = CacheKey::new(state, r_c, &cfg.solver, &cfg.momentum);
    let sol = cache.get_or_compute(&key, &cfg.solver, &cfg.momentum)?;
    let measures = assemble_measures(&sol.radial, &sol.momentum, cfg.alpha, cfg.beta)?;
    let report = assemble_report(&measures, &cfg.b_values)?;
    Ok(CellRecord { measures, report })
}

/// Runs every (state, r_c) cell of `cfg` concurrently.
///
/// A failing cell is reported in `failures` and leaves the others untouched.
pub fn run_sweep(cfg: &SweepConfig, cache: &SolutionCache) -> Result<SweepOutcome> {
    cfg.validate()?;
    let cells: Vec<(QuantumState, f64)> = cfg
        .states
        .iter()
        .flat_map(|&s| cfg.rc_values.iter().map(move |&rc| (s, rc)))
        .collect();
    let work = || -> Vec<Result<CellRecord>> {
        cells
            .par_iter()
            .map(|&(s, rc)| compute_cell(s, rc, cfg, cache))
            .collect()
    };
    let results = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut outcome = SweepOutcome::default();
    for ((state, r_c), res) in cells.into_iter().zip(results) {
        match res {
            Ok(rec) => outcome.records.push(rec),
            Err(error) => {
                log::error!("cell {state} r_c = {r_c} failed: {error}");
                outcome.failures.push(CellFailure { state, r_c, error });
            }
        }
    }
    Ok(outcome)
}

/// Rounds to nine significant digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// One flat output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub state: String,
    pub r_c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
    pub family: Family,
    pub space: Space,
    pub value: f64,
}

/// Flattens records into rows with every number rounded to nine
/// significant digits.
pub fn output_rows(records: &[CellRecord]) -> Vec<OutputRow> {
    records
        .iter()
        .flat_map(|rec| {
            let r = &rec.report;
            r.entries.iter().map(move |e| OutputRow {
                state: r.state.to_string(),
                r_c: round_sig9(r.r_c),
                alpha: round_sig9(r.alpha),
                beta: round_sig9(r.beta),
                b: round_sig9(e.b),
                family: e.family,
                space: e.space,
                value: round_sig9(e.value),
            })
        })
        .collect()
}

pub fn render_csv(records: &[CellRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(','))?;
    for row in output_rows(records) {
        w.write_record([
            row.state,
            row.r_c.to_string(),
            row.alpha.to_string(),
            row.beta.to_string(),
            row.b.to_string(),
            row.family.to_string(),
            row.space.to_string(),
            row.value.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn render_json(records: &[CellRecord]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&output_rows(records))?;
    text.push('\n');
    Ok(text)
}

pub fn parse_json(text: &str) -> Result<Vec<OutputRow>> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(records: &[CellRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => render_csv(records),
        OutputFormat::Json => render_json(records),
    }
}

/// Writes `records` to `path`, or to standard output when `path` is `None`.
pub fn emit_output(records: &[CellRecord], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Contract("no records to emit".into()));
    }
    let text = render(records, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Gnuplot data: one `index` block per state with (r_c, value) columns,
/// blocks separated by two blank lines.
pub fn plot_data(records: &[CellRecord], family: Family, space: Space, b: f64) -> String {
    let mut blocks: Vec<(QuantumState, Vec<(f64, f64)>)> = Vec::new();
    for rec in records {
        let Some(v) = rec.report.get(family, space, b) else { continue };
        let state = rec.report.state;
        match blocks.iter_mut().find(|(s, _)| *s == state) {
            Some((_, pts)) => pts.push((rec.report.r_c, v)),
            None => blocks.push((state, vec![(rec.report.r_c, v)])),
        }
    }
    let mut out = String::new();
    for (i, (state, pts)) in blocks.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# {state} C_{family} space={space} b={}\n", round_sig9(b)));
        for (rc, v) in pts {
            out.push_str(&format!("{} {}\n", round_sig9(*rc), round_sig9(*v)));
        }
    }
    out
}

/// The published reference tables plus the literature values quoted
/// alongside the third one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    I,
    II,
    III,
    IV,
    IIIRef,
}

impl TableId {
    pub const ALL: [TableId; 5] = [TableId::I, TableId::II, TableId::III, TableId::IV, TableId::IIIRef];

    pub fn family(self) -> Family {
        match self {
            TableId::I => Family::ES,
            TableId::II => Family::ER,
            TableId::III | TableId::IIIRef => Family::IS,
            TableId::IV => Family::IR,
        }
    }

    pub fn b(self) -> f64 {
        match self {
            TableId::I | TableId::II => 1.0,
            TableId::III | TableId::IV | TableId::IIIRef => 2.0 / 3.0,
        }
    }

    /// Relative tolerance for every cell of the table.
    pub fn tolerance(self) -> f64 {
        match self {
            TableId::I | TableId::III => 3e-3,
            TableId::II | TableId::IV | TableId::IIIRef => 5e-3,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableId::I => "I",
            TableId::II => "II",
            TableId::III => "III",
            TableId::IV => "IV",
            TableId::IIIRef => "III_ref",
        })
    }
}

impl FromStr for TableId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "1" => Ok(TableId::I),
            "II" | "2" => Ok(TableId::II),
            "III" | "3" => Ok(TableId::III),
            "IV" | "4" => Ok(TableId::IV),
            "III_ref" => Ok(TableId::IIIRef),
            other => Err(Error::Config(format!("unknown table {other:?}"))),
        }
    }
}

/// Golden CSV shipped with the crate.
pub fn default_golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/golden_tables.csv")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub table: String,
    pub state: String,
    pub r_c: f64,
    pub col1: f64,
    pub col2: f64,
    pub col3: f64,
}

impl GoldenRow {
    pub fn columns(&self) -> [(Space, f64); 3] {
        [
            (Space::Position, self.col1),
            (Space::Momentum, self.col2),
            (Space::Total, self.col3),
        ]
    }
}

pub fn load_golden(path: &Path) -> Result<Vec<GoldenRow>> {
    if !path.is_file() {
        return Err(Error::Config(format!("golden data file {} not found", path.display())));
    }
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        let row: GoldenRow = row?;
        row.table.parse::<TableId>()?;
        row.state.parse::<QuantumState>()?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub state: QuantumState,
    pub r_c: f64,
    pub space: Space,
    pub expected: f64,
    pub computed: f64,
    pub relative_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableComparison {
    pub table: TableId,
    pub cells: Vec<CellComparison>,
    pub failures: Vec<CellFailure>,
}

impl TableComparison {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && !self.cells.is_empty() && self.cells.iter().all(|c| c.pass)
    }

    pub fn worst(&self) -> Option<&CellComparison> {
        self.cells
            .iter()
            .max_by(|a, b| a.relative_deviation.total_cmp(&b.relative_deviation))
    }
}

/// Recomputes every golden row of `which` and compares cell by cell.
///
/// `cfg` supplies the numerical options and Rényi orders; its state, radius
/// and b lists are replaced by the table's own.
pub fn reproduce_table(which: TableId, golden: &[GoldenRow], cfg: &SweepConfig, cache: &SolutionCache) -> Result<TableComparison> {
    let label = which.to_string();
    let rows: Vec<&GoldenRow> = golden.iter().filter(|r| r.table == label).collect();
    if rows.is_empty() {
        return Err(Error::Config(format!("golden data has no rows for table {label}")));
    }
    let mut cell_cfg = cfg.clone();
    cell_cfg.b_values = vec![which.b()];
    cell_cfg.validate()?;
    let results: Vec<Result<CellRecord>> = rows
        .par_iter()
        .map(|row| {
            let state: QuantumState = row.state.parse()?;
            compute_cell(state, row.r_c, &cell_cfg, cache)
        })
        .collect();
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (row, res) in rows.iter().zip(results) {
        let state: QuantumState = row.state.parse()?;
        match res {
            Ok(rec) => {
                for (space, expected) in row.columns() {
                    let computed = rec
                        .report
                        .get(which.family(), space, which.b())
                        .ok_or_else(|| Error::InvalidState("missing report entry".into()))?;
                    let relative_deviation = ((computed - expected) / expected).abs();
                    cells.push(CellComparison {
                        state,
                        r_c: row.r_c,
                        space,
                        expected,
                        computed,
                        relative_deviation,
                        tolerance: which.tolerance(),
                        pass: relative_deviation <= which.tolerance(),
                    });
                }
            }
            Err(error) => failures.push(CellFailure {
                state,
                r_c: row.r_c,
                error,
            }),
        }
    }
    Ok(TableComparison {
        table: which,
        cells,
        failures,
    })
}
