//! Batch front end: config parsing, run/sweep orchestration, artifacts.
//!
//! A run follows one branch from `p_start` to `p_end` on one grid, dumping
//! fields, diagnostics, and a summary table into its output directory. A
//! sweep executes independent entries (one per grid spacing, or one radial
//! oracle evaluation per p) concurrently and merges their rows into a single
//! deterministic summary.
//!
//! Reproducibility contract: the same build, config, and seed produce
//! bit-identical `summary.csv`, field dumps, and diagnostics. `manifest.json`
//! is the one exception, since it records wall-clock timings.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concentration::{self, Configuration, SearchSettings};
use crate::diagnostics::{self, ReportSettings};
use crate::domain::DomainSpec;
use crate::field::Field;
use crate::green::GreenFn;
use crate::grid::build_grid;
use crate::io;
use crate::radial;
use crate::solver::{self, ContinuationSettings, RunStatus};

/// Environment variable that overrides the root under which output
/// directories are created.
pub const OUTPUT_ROOT_ENV: &str = "LELAB_OUT";

pub const SUMMARY_HEADER: [&str; 15] = [
    "domain",
    "h",
    "p",
    "kind",
    "status",
    "k",
    "max_norm",
    "energy",
    "energy_ratio",
    "sqrtp_off",
    "green_off",
    "m_est",
    "err_vs_oracle",
    "err_ratio",
    "newton_iters",
];

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{stage}: {message}")]
    Module { stage: &'static str, message: String },
    #[error("continuation stalled at p = {p}")]
    Stalled { p: f64 },
}

impl RunnerError {
    /// 2 for config/schema rejections, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunnerError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn module_err(stage: &'static str, e: impl std::fmt::Display) -> RunnerError {
    RunnerError::Module { stage, message: e.to_string() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    /// Grid spacing. Optional only for oracle sweeps (`p_list`).
    #[serde(default)]
    pub h: Option<f64>,
    pub p_start: f64,
    pub p_end: f64,
    /// Exponents at which fields and diagnostics are dumped; `p_end` always
    /// reports.
    #[serde(default)]
    pub report_p: Vec<f64>,
    #[serde(default = "default_true")]
    pub diagnostics: bool,
    /// Peak counts for the concentration-system search.
    #[serde(default)]
    pub concentration_k: Vec<usize>,
    /// Bubble centers seeding the branch; empty selects the principal
    /// eigenfunction start.
    #[serde(default)]
    pub start_centers: Vec<[f64; 2]>,
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
    /// Sweep axis: grid spacings, each continued to `p_end`.
    #[serde(default)]
    pub h_list: Vec<f64>,
    /// Sweep axis: radial-oracle evaluations (unit disk only, no grid).
    #[serde(default)]
    pub p_list: Vec<f64>,
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn validate(&self, for_sweep: bool) -> Result<(), RunnerError> {
        let bad = |m: String| Err(RunnerError::Config(m));
        self.domain.validate().map_err(|e| RunnerError::Config(e.to_string()))?;
        if !(self.p_start > 1.0 && self.p_start.is_finite()) {
            return bad(format!("p_start must exceed 1, got {}", self.p_start));
        }
        if !(self.p_end >= self.p_start && self.p_end.is_finite()) {
            return bad(format!("p_end must be ≥ p_start, got {}", self.p_end));
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("h must be positive, got {h}"));
            }
        }
        if self.report_p.iter().any(|p| !(p.is_finite() && *p > 1.0)) {
            return bad("report_p entries must be finite and exceed 1".into());
        }
        if self.concentration_k.iter().any(|k| *k == 0 || *k > 8) {
            return bad("concentration_k entries must lie in 1..=8".into());
        }
        if self.output_dir.is_empty() {
            return bad("output_dir must be non-empty".into());
        }
        if for_sweep {
            match (self.h_list.is_empty(), self.p_list.is_empty()) {
                (true, true) => return bad("sweep needs h_list or p_list".into()),
                (false, false) => return bad("sweep takes h_list or p_list, not both".into()),
                _ => {}
            }
            if self.h_list.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
                return bad("h_list entries must be positive".into());
            }
            if self.p_list.iter().any(|p| !(p.is_finite() && *p > 1.0)) {
                return bad("p_list entries must exceed 1".into());
            }
            if !self.p_list.is_empty() && !is_unit_disk(&self.domain) {
                return bad("p_list sweeps evaluate the radial oracle; domain must be the unit disk".into());
            }
        } else if self.h.is_none() {
            return bad("run needs h".into());
        }
        Ok(())
    }
}

fn is_unit_disk(spec: &DomainSpec) -> bool {
    matches!(spec, DomainSpec::Disk { center, radius } if *center == [0.0, 0.0] && *radius == 1.0)
}

pub fn load_config(path: &Path) -> Result<RunConfig, RunnerError> {
    io::read_json(path).map_err(|e| RunnerError::Config(format!("{}: {e}", path.display())))
}

/// The output directory from the config, re-rooted under [`OUTPUT_ROOT_ENV`]
/// when that is set.
pub fn resolve_run_dir(config: &RunConfig) -> PathBuf {
    let dir = PathBuf::from(&config.output_dir);
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) => {
            let rel = if dir.is_absolute() {
                PathBuf::from(dir.file_name().unwrap_or_default())
            } else {
                dir
            };
            PathBuf::from(root).join(rel)
        }
        None => dir,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Grid,
    Oracle,
    Extrapolated,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub domain: String,
    pub h: Option<f64>,
    /// Infinite for the extrapolated limit row of an oracle sweep.
    pub p: f64,
    pub kind: RowKind,
    pub status: String,
    pub k: Option<usize>,
    pub max_norm: f64,
    pub energy: f64,
    pub energy_ratio: f64,
    pub sqrtp_off: Option<f64>,
    pub green_off: Option<f64>,
    pub m_est: Option<f64>,
    pub err_vs_oracle: Option<f64>,
    pub err_ratio: Option<f64>,
    pub newton_iters: Option<usize>,
}

impl SummaryRow {
    fn to_record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(String::new, T::to_string)
        }
        let kind = match self.kind {
            RowKind::Grid => "grid",
            RowKind::Oracle => "oracle",
            RowKind::Extrapolated => "extrapolated",
        };
        vec![
            self.domain.clone(),
            opt(&self.h),
            self.p.to_string(),
            kind.to_string(),
            self.status.clone(),
            opt(&self.k),
            self.max_norm.to_string(),
            self.energy.to_string(),
            self.energy_ratio.to_string(),
            opt(&self.sqrtp_off),
            opt(&self.green_off),
            opt(&self.m_est),
            opt(&self.err_vs_oracle),
            opt(&self.err_ratio),
            opt(&self.newton_iters),
        ]
    }
}

fn sort_rows(rows: &mut [SummaryRow]) {
    rows.sort_by(|a, b| {
        let ha = a.h.unwrap_or(f64::NEG_INFINITY);
        let hb = b.h.unwrap_or(f64::NEG_INFINITY);
        a.domain
            .cmp(&b.domain)
            .then(ha.total_cmp(&hb))
            .then(a.p.total_cmp(&b.p))
    });
}

pub struct RunArtifacts {
    pub dir: PathBuf,
    pub rows: Vec<SummaryRow>,
}

struct RunState {
    dir: PathBuf,
    files: Vec<String>,
    timings: BTreeMap<String, f64>,
    warnings: Vec<String>,
    rows: Vec<SummaryRow>,
}

impl RunState {
    fn new(dir: PathBuf) -> Self {
        RunState {
            dir,
            files: Vec::new(),
            timings: BTreeMap::new(),
            warnings: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn track(&mut self, rel: String) {
        self.files.push(rel);
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    status: &'a str,
    config: &'a RunConfig,
    timings_s: &'a BTreeMap<String, f64>,
    warnings: &'a [String],
    files: &'a [String],
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    stage: &'a str,
    message: String,
    exit_code: u8,
}

#[derive(Serialize)]
struct ConcentrationRecord {
    k: usize,
    configurations: Vec<Configuration>,
    note: Option<String>,
}

fn write_error_record(st: &mut RunState, stage: &str, err: &RunnerError) -> Result<(), RunnerError> {
    let record = ErrorRecord { stage, message: err.to_string(), exit_code: err.exit_code() };
    io::write_json(&st.dir.join("error.json"), &record)?;
    st.track("error.json".into());
    Ok(())
}

fn flush(config: &RunConfig, st: &mut RunState, status: &str, t0: Instant) -> Result<(), RunnerError> {
    sort_rows(&mut st.rows);
    let records: Vec<Vec<String>> = st.rows.iter().map(SummaryRow::to_record).collect();
    io::write_csv(&st.dir.join("summary.csv"), &SUMMARY_HEADER, &records)?;
    st.track("summary.csv".into());
    st.timings.insert("total".into(), t0.elapsed().as_secs_f64());
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        status,
        config,
        timings_s: &st.timings,
        warnings: &st.warnings,
        files: &st.files,
    };
    io::write_json(&st.dir.join("manifest.json"), &manifest)?;
    Ok(())
}

/// Diagnostics knobs scaled to the domain; the cluster radius must clear the
/// 4h floor even on coarse grids.
fn report_settings(spec: &DomainSpec, h: f64) -> ReportSettings {
    let d = spec.diameter();
    ReportSettings {
        height_floor: 1.0,
        cluster_radius: (0.075 * d).max(6.0 * h),
        r_compare: 5.0,
        delta: 0.15 * d,
        gamma: 1.0,
        ball_radius: 0.125 * d,
    }
}

fn p_tag(p: f64) -> String {
    format!("{p:08.3}")
}

/// Sup-norm distance from the radial oracle profile; unit disk only.
fn oracle_error(u: &Field, p: f64) -> Option<f64> {
    if !is_unit_disk(&u.grid.spec) {
        return None;
    }
    let sol = radial::shoot(p, 1e-10).ok()?;
    let mut sup: f64 = 0.0;
    for q in 0..u.grid.n_unknowns() {
        let x = u.grid.node_point(q);
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        sup = sup.max((u.values[q] - sol.u(r)).abs());
    }
    Some(sup)
}

/// One continuation run: grid, branch following, per-report artifacts,
/// concentration search, summary, manifest. Partial outputs are flushed even
/// when the branch stalls or a module fails.
pub fn run(config: &RunConfig) -> Result<RunArtifacts, RunnerError> {
    config.validate(false)?;
    let t0 = Instant::now();
    let dir = resolve_run_dir(config);
    fs::create_dir_all(dir.join("fields"))?;
    if config.diagnostics {
        fs::create_dir_all(dir.join("diagnostics"))?;
    }
    if !config.concentration_k.is_empty() {
        fs::create_dir_all(dir.join("concentration"))?;
    }
    let mut st = RunState::new(dir.clone());

    match run_pipeline(config, &mut st) {
        Ok(RunStatus::Completed) => {
            flush(config, &mut st, "completed", t0)?;
            Ok(RunArtifacts { dir, rows: std::mem::take(&mut st.rows) })
        }
        Ok(RunStatus::Stalled) => {
            let p = st.rows.iter().map(|r| r.p).fold(config.p_start, f64::max);
            let err = RunnerError::Stalled { p };
            write_error_record(&mut st, "continuation", &err)?;
            flush(config, &mut st, "stalled", t0)?;
            Err(err)
        }
        Err(err) => {
            let stage = match &err {
                RunnerError::Module { stage, .. } => stage,
                _ => "run",
            };
            write_error_record(&mut st, stage, &err)?;
            flush(config, &mut st, "failed", t0)?;
            Err(err)
        }
    }
}

fn run_pipeline(config: &RunConfig, st: &mut RunState) -> Result<RunStatus, RunnerError> {
    let h = config.h.expect("validated");
    let domain_label = config.domain.label();

    let t = Instant::now();
    let grid = std::sync::Arc::new(build_grid(&config.domain, h).map_err(|e| module_err("grid", e))?);
    st.timings.insert("grid".into(), t.elapsed().as_secs_f64());
    log::info!("grid: {} unknowns at h = {h}", grid.n_unknowns());

    let t = Instant::now();
    let u0 = if config.start_centers.is_empty() {
        solver::initial_guess(&grid, config.p_start)
    } else {
        solver::multi_bubble_guess(&grid, &config.start_centers, config.p_start)
    }
    .map_err(|e| module_err("initial_guess", e))?;
    st.timings.insert("initial_guess".into(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let mut targets = config.report_p.clone();
    targets.push(config.p_end);
    let cont = solver::continue_in_p(
        &u0,
        config.p_start,
        config.p_end,
        &targets,
        &ContinuationSettings::default(),
    )
    .map_err(|e| module_err("continuation", e))?;
    st.timings.insert("continuation".into(), t.elapsed().as_secs_f64());
    log::info!(
        "continuation reached p = {} ({} snapshots, {} Newton iterations)",
        cont.p_final,
        cont.snapshots.len(),
        cont.newton_iters_total
    );

    let green = GreenFn::for_domain(&config.domain);
    let settings = report_settings(&config.domain, h);

    let t = Instant::now();
    for (p, field, info) in &cont.snapshots {
        let tag = p_tag(*p);
        let csv = format!("fields/u_p{tag}.csv");
        let pgm = format!("fields/u_p{tag}.pgm");
        io::write_field_csv(&st.dir.join(&csv), field)?;
        io::write_field_pgm(&st.dir.join(&pgm), field)?;
        st.track(csv);
        st.track(pgm);

        let mut row = SummaryRow {
            domain: domain_label.clone(),
            h: Some(h),
            p: *p,
            kind: RowKind::Grid,
            status: "completed".into(),
            k: None,
            max_norm: field.max_norm(),
            energy: 0.0,
            energy_ratio: 0.0,
            sqrtp_off: None,
            green_off: None,
            m_est: None,
            err_vs_oracle: oracle_error(field, *p),
            err_ratio: None,
            newton_iters: Some(info.iters),
        };

        if config.diagnostics {
            match diagnostics::full_report(field, *p, &green, &settings) {
                Ok(report) => {
                    row.k = Some(report.k);
                    row.energy = report.energy.e;
                    row.energy_ratio = report.energy.ratio;
                    row.sqrtp_off = Some(report.sqrtp_off_peak);
                    row.green_off = Some(report.green_off_peak);
                    row.m_est = report.decomposition.iter().flatten().next().map(|d| d.m_est);
                    let rel = format!("diagnostics/diag_p{tag}.json");
                    io::write_json(&st.dir.join(&rel), &report)?;
                    st.track(rel);
                }
                Err(e) => {
                    st.warnings.push(format!("diagnostics at p = {p}: {e}"));
                    let ec = diagnostics::energy_check(field, *p, 1);
                    row.energy = ec.e;
                    row.energy_ratio = ec.ratio;
                }
            }
        } else {
            let ec = diagnostics::energy_check(field, *p, 1);
            row.energy = ec.e;
            row.energy_ratio = ec.ratio;
        }
        st.rows.push(row);
    }
    st.timings.insert("reports".into(), t.elapsed().as_secs_f64());

    if !config.concentration_k.is_empty() {
        let t = Instant::now();
        for &k in &config.concentration_k {
            let record = match concentration::solve_system(
                &green,
                k,
                config.seed,
                &SearchSettings::default(),
            ) {
                Ok(configurations) => ConcentrationRecord { k, configurations, note: None },
                Err(e) => {
                    st.warnings.push(format!("concentration k = {k}: {e}"));
                    ConcentrationRecord { k, configurations: Vec::new(), note: Some(e.to_string()) }
                }
            };
            let rel = format!("concentration/k{k}.json");
            io::write_json(&st.dir.join(&rel), &record)?;
            st.track(rel);
        }
        st.timings.insert("concentration".into(), t.elapsed().as_secs_f64());
    }

    if cont.status == RunStatus::Stalled {
        // mark where the branch died so the table is machine-readable on its own
        let p = cont.p_final;
        let ec = diagnostics::energy_check(&cont.solution, p, 1);
        st.rows.push(SummaryRow {
            domain: domain_label,
            h: Some(h),
            p,
            kind: RowKind::Grid,
            status: "stalled".into(),
            k: None,
            max_norm: cont.solution.max_norm(),
            energy: ec.e,
            energy_ratio: ec.ratio,
            sqrtp_off: None,
            green_off: None,
            m_est: None,
            err_vs_oracle: None,
            err_ratio: None,
            newton_iters: Some(cont.newton_iters_total),
        });
    }
    Ok(cont.status)
}

fn oracle_row(domain: &str, p: f64) -> Result<SummaryRow, RunnerError> {
    let sol = radial::shoot(p, 1e-10).map_err(|e| module_err("oracle", e))?;
    let dec = radial::radial_decomposition(&sol, 0.5);
    Ok(SummaryRow {
        domain: domain.to_string(),
        h: None,
        p,
        kind: RowKind::Oracle,
        status: "completed".into(),
        k: Some(1),
        max_norm: sol.m,
        energy: sol.energy,
        energy_ratio: sol.energy / crate::constants::EIGHT_PI_E,
        sqrtp_off: None,
        green_off: None,
        m_est: Some(dec.m_est),
        err_vs_oracle: None,
        err_ratio: None,
        newton_iters: None,
    })
}

/// Executes sweep entries concurrently on `jobs` workers and merges rows in
/// sorted order. `h_list` entries each continue a branch to `p_end` on their
/// own grid; `p_list` entries evaluate the radial oracle, and their rows are
/// followed by an extrapolated-limit row when at least four samples exist.
pub fn sweep(config: &RunConfig, jobs: usize) -> Result<RunArtifacts, RunnerError> {
    config.validate(true)?;
    let t0 = Instant::now();
    let dir = resolve_run_dir(config);
    fs::create_dir_all(&dir)?;
    let mut st = RunState::new(dir.clone());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| module_err("sweep", e))?;

    let outcome = if !config.p_list.is_empty() {
        let results: Vec<Result<SummaryRow, RunnerError>> = pool.install(|| {
            config
                .p_list
                .par_iter()
                .map(|&p| oracle_row(&config.domain.label(), p))
                .collect()
        });
        let mut rows = Vec::new();
        let mut first_err = None;
        for r in results {
            match r {
                Ok(row) => rows.push(row),
                Err(e) => {
                    st.warnings.push(e.to_string());
                    first_err.get_or_insert(e);
                }
            }
        }
        let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.p, r.max_norm)).collect();
        let energies: Vec<(f64, f64)> = rows.iter().map(|r| (r.p, r.energy)).collect();
        let m_ests: Vec<(f64, f64)> =
            rows.iter().filter_map(|r| r.m_est.map(|m| (r.p, m))).collect();
        match (
            diagnostics::extrapolate(&samples),
            diagnostics::extrapolate(&energies),
            diagnostics::extrapolate(&m_ests),
        ) {
            (Ok((m_lim, _)), Ok((e_lim, _)), Ok((est_lim, _))) => rows.push(SummaryRow {
                domain: config.domain.label(),
                h: None,
                p: f64::INFINITY,
                kind: RowKind::Extrapolated,
                status: "completed".into(),
                k: None,
                max_norm: m_lim,
                energy: e_lim,
                energy_ratio: e_lim / crate::constants::EIGHT_PI_E,
                sqrtp_off: None,
                green_off: None,
                m_est: Some(est_lim),
                err_vs_oracle: None,
                err_ratio: None,
                newton_iters: None,
            }),
            _ => st.warnings.push("too few samples to extrapolate".into()),
        }
        st.rows = rows;
        first_err
    } else {
        let results: Vec<Result<SummaryRow, RunnerError>> = pool.install(|| {
            config.h_list.par_iter().map(|&h| sweep_grid_entry(config, h, &dir)).collect()
        });
        let mut first_err = None;
        for r in results {
            match r {
                Ok(row) => st.rows.push(row),
                Err(e) => {
                    st.warnings.push(e.to_string());
                    first_err.get_or_insert(e);
                }
            }
        }
        // rows sort finest-first; each coarser row records its error over
        // the next finer one (≈ 4 for a second-order scheme)
        sort_rows(&mut st.rows);
        for i in 1..st.rows.len() {
            if let (Some(finer), Some(coarser)) =
                (st.rows[i - 1].err_vs_oracle, st.rows[i].err_vs_oracle)
            {
                if st.rows[i].h > st.rows[i - 1].h && finer > 0.0 {
                    st.rows[i].err_ratio = Some(coarser / finer);
                }
            }
        }
        // field dumps written by the entries
        for &h in &config.h_list {
            let tag = format!("u_h{h}_p{}", p_tag(config.p_end));
            st.track(format!("fields/{tag}.csv"));
            st.track(format!("fields/{tag}.pgm"));
        }
        first_err
    };

    match outcome {
        None => {
            flush(config, &mut st, "completed", t0)?;
            Ok(RunArtifacts { dir, rows: std::mem::take(&mut st.rows) })
        }
        Some(err) => {
            let stage = match &err {
                RunnerError::Module { stage, .. } => stage,
                RunnerError::Stalled { .. } => "continuation",
                _ => "sweep",
            };
            write_error_record(&mut st, stage, &err)?;
            flush(config, &mut st, "stalled", t0)?;
            Err(err)
        }
    }
}

fn sweep_grid_entry(config: &RunConfig, h: f64, dir: &Path) -> Result<SummaryRow, RunnerError> {
    let grid =
        std::sync::Arc::new(build_grid(&config.domain, h).map_err(|e| module_err("grid", e))?);
    let u0 = if config.start_centers.is_empty() {
        solver::initial_guess(&grid, config.p_start)
    } else {
        solver::multi_bubble_guess(&grid, &config.start_centers, config.p_start)
    }
    .map_err(|e| module_err("initial_guess", e))?;
    let cont = solver::continue_in_p(
        &u0,
        config.p_start,
        config.p_end,
        &[config.p_end],
        &ContinuationSettings::default(),
    )
    .map_err(|e| module_err("continuation", e))?;

    let field = &cont.solution;
    let p = cont.p_final;
    fs::create_dir_all(dir.join("fields"))?;
    let tag = format!("u_h{h}_p{}", p_tag(config.p_end));
    io::write_field_csv(&dir.join(format!("fields/{tag}.csv")), field)?;
    io::write_field_pgm(&dir.join(format!("fields/{tag}.pgm")), field)?;

    // partial outputs stay on disk; the stall itself surfaces as the sweep's
    // error record, same contract as a single run
    if cont.status == RunStatus::Stalled {
        return Err(RunnerError::Stalled { p });
    }

    let ec = diagnostics::energy_check(field, p, 1);
    Ok(SummaryRow {
        domain: config.domain.label(),
        h: Some(h),
        p,
        kind: RowKind::Grid,
        status: "completed".into(),
        k: None,
        max_norm: field.max_norm(),
        energy: ec.e,
        energy_ratio: ec.ratio,
        sqrtp_off: None,
        green_off: None,
        m_est: None,
        err_vs_oracle: oracle_error(field, p),
        err_ratio: None,
        newton_iters: Some(cont.newton_iters_total),
    })
}
