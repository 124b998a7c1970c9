//! Corpus benchmark: analyze every shipped program at k = 1, 2, 3, compare
//! against golden renderings and confirm the k = 2 invariants numerically.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::corpus::{corpus, CorpusProgram};
use crate::invariants::{analyze, InvariantReport};
use crate::validator::{check, CheckConfig, MCReport};

pub const ORDERS: [u32; 3] = [1, 2, 3];

/// Default location of the versioned golden files in the source tree.
pub fn default_golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden").join("v1")
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub filter: Option<String>,
    pub golden_dir: PathBuf,
    pub update_golden: bool,
    pub check: CheckConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            filter: None,
            golden_dir: default_golden_dir(),
            update_golden: false,
            check: CheckConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoldenStatus {
    Match,
    Mismatch,
    Missing,
    Updated,
    /// Update requested but withheld because validation failed.
    NotUpdated,
}

#[derive(Clone, Debug)]
pub struct ProgramResult {
    pub name: &'static str,
    /// Wall time of each `analyze` call, in seconds, per order in [`ORDERS`].
    pub seconds: Vec<f64>,
    pub rendering: String,
    pub golden: GoldenStatus,
    pub validation: Option<MCReport>,
    pub error: Option<String>,
}

impl ProgramResult {
    pub fn pass(&self) -> bool {
        self.error.is_none()
            && matches!(self.golden, GoldenStatus::Match | GoldenStatus::Updated)
            && self.validation.as_ref().is_some_and(|v| v.pass)
    }
}

/// Canonical golden text for all orders.
pub fn render_golden(name: &str, reports: &[(u32, InvariantReport)]) -> String {
    let mut out = format!("# {name}\n");
    for (k, r) in reports {
        out.push_str(&format!("\n## k = {k}\n"));
        out.push_str(&r.to_text());
    }
    out
}

fn golden_path(dir: &Path, p: &CorpusProgram) -> PathBuf {
    dir.join(p.file.replace(".psl", ".txt"))
}

pub fn bench_program(p: &'static CorpusProgram, cfg: &BenchConfig) -> ProgramResult {
    let mut result = ProgramResult {
        name: p.name,
        seconds: Vec::new(),
        rendering: String::new(),
        golden: GoldenStatus::Missing,
        validation: None,
        error: None,
    };
    let vp = match p.load() {
        Ok(vp) => vp,
        Err(e) => {
            result.error = Some(e.to_string());
            return result;
        }
    };
    let mut reports = Vec::new();
    for k in ORDERS {
        let start = Instant::now();
        match analyze(&vp, p.name, k) {
            Ok(r) => reports.push((k, r)),
            Err(e) => {
                result.error = Some(e.to_string());
                return result;
            }
        }
        result.seconds.push(start.elapsed().as_secs_f64());
    }
    result.rendering = render_golden(p.name, &reports);
    let validation = check(&reports[1].1, &vp, &p.default_bindings(), &cfg.check);
    let valid = validation.pass;
    result.validation = Some(validation);

    let path = golden_path(&cfg.golden_dir, p);
    let existing = fs::read_to_string(&path).ok();
    result.golden = match (&existing, cfg.update_golden) {
        (Some(g), _) if *g == result.rendering => GoldenStatus::Match,
        (_, true) if valid => {
            let written = fs::create_dir_all(&cfg.golden_dir)
                .and_then(|_| fs::write(&path, &result.rendering));
            match written {
                Ok(()) => GoldenStatus::Updated,
                Err(e) => {
                    result.error = Some(format!("writing {}: {e}", path.display()));
                    GoldenStatus::NotUpdated
                }
            }
        }
        (_, true) => GoldenStatus::NotUpdated,
        (Some(_), false) => GoldenStatus::Mismatch,
        (None, false) => GoldenStatus::Missing,
    };
    result
}

pub fn run_bench(cfg: &BenchConfig) -> Vec<ProgramResult> {
    corpus()
        .iter()
        .filter(|p| {
            cfg.filter
                .as_ref()
                .is_none_or(|f| p.name.to_lowercase().contains(&f.to_lowercase()))
        })
        .map(|p| bench_program(p, cfg))
        .collect()
}

/// Table with one row per program; only the time columns vary between runs.
pub fn format_table(results: &[ProgramResult]) -> String {
    let mut out = format!(
        "{:<20} {:>9} {:>9} {:>9}  {:<10} {:<10}\n",
        "program", "k=1 (s)", "k=2 (s)", "k=3 (s)", "golden", "check"
    );
    for r in results {
        let times: Vec<String> = (0..ORDERS.len())
            .map(|i| r.seconds.get(i).map_or("-".to_string(), |s| format!("{s:.3}")))
            .collect();
        let golden = match r.golden {
            GoldenStatus::Match => "match",
            GoldenStatus::Mismatch => "MISMATCH",
            GoldenStatus::Missing => "missing",
            GoldenStatus::Updated => "updated",
            GoldenStatus::NotUpdated => "withheld",
        };
        let check = match &r.validation {
            Some(v) if v.pass => match v.method {
                crate::validator::Method::Exact => "exact",
                crate::validator::Method::MonteCarlo => "mc",
            },
            Some(_) => "FAIL",
            None => "-",
        };
        out.push_str(&format!(
            "{:<20} {:>9} {:>9} {:>9}  {:<10} {:<10}\n",
            r.name, times[0], times[1], times[2], golden, check
        ));
        if let Some(e) = &r.error {
            out.push_str(&format!("  error: {e}\n"));
        }
    }
    let passed = results.iter().filter(|r| r.pass()).count();
    out.push_str(&format!("{passed}/{} programs pass\n", results.len()));
    out
}
