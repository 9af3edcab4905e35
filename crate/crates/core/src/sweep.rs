//! Seeded Monte Carlo sweeps over edge density (random graphs) or bond
//! probability (lattices), written as CSV.

use std::io::Write;
use std::time::Instant;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Deserialize;

use crate::counting::{value_from_decomposition, BigNat, RankBackendConfig};
use crate::error::{CountError, SweepError};
use crate::graph::{enumerate_dominoes, pair_count, ComponentClass};
use crate::instance::{
    Conditioning, FactorDistribution, GenSpec, GraphSpec, Instance, DEFAULT_RESAMPLE_BUDGET,
};
use crate::seed::derive;
use crate::structure::{
    count_frustrated_figure_eights, decouple, domino_is_frustrated, Label, DEFAULT_CUTOFF_FACTOR,
};

pub const CSV_HEADER: &str = "grid,trial,seed,n,m,frustrated,max_comp,multicyclic,frozen_core,\
residual_max,label,fig8_l3,dominoes,value,resamples,ms";

/// Values with more digits than this are written as `2^<log₂>`.
const MAX_DECIMAL_DIGITS: usize = 40;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SweepModel {
    Er,
    Lat2,
    Lat3,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
pub enum SweepConditioning {
    #[default]
    #[serde(rename = "any")]
    Any,
    #[serde(rename = "ff", alias = "free")]
    FrustrationFree,
}

fn default_q() -> String {
    "uniform".into()
}
fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF_FACTOR
}
fn default_cap() -> usize {
    crate::counting::DEFAULT_MAX_COMPONENT_QUBITS
}
fn default_budget() -> u32 {
    DEFAULT_RESAMPLE_BUDGET
}
fn yes() -> bool {
    true
}

/// Sweep parameters, read from TOML key/value pairs. `grid` holds
/// `γ = m/n` for `er` and the bond probability `p` for lattices.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: SweepModel,
    pub n: Option<u32>,
    #[serde(rename = "L")]
    pub side: Option<u32>,
    pub grid: Vec<f64>,
    pub trials: u32,
    pub seed: u64,
    pub f: Option<usize>,
    #[serde(default = "default_q")]
    pub q: String,
    #[serde(default)]
    pub cond: SweepConditioning,
    #[serde(default = "default_cutoff")]
    pub cutoff_c: f64,
    #[serde(default = "default_cap")]
    pub max_component: usize,
    /// Count frustrated figure eights with two triangles (random graphs).
    #[serde(default)]
    pub fig8: bool,
    /// Compute the #2-QSAT value column.
    #[serde(default = "yes")]
    pub values: bool,
    /// Fill the `ms` column. Off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "default_budget")]
    pub budget: u32,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, SweepError> {
        let cfg: SweepConfig =
            toml::from_str(text).map_err(|e| SweepError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.grid.is_empty()
            || self
                .grid
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return bad("grid must be non-empty and strictly increasing".into());
        }
        if self.cutoff_c.is_nan() || self.cutoff_c <= 0.0 {
            return bad("cutoff_c must be positive".into());
        }
        self.distribution()?;
        match self.model {
            SweepModel::Er => {
                let Some(n) = self.n else {
                    return bad("model er needs n".into());
                };
                for &g in &self.grid {
                    if g.is_nan() || g < 0.0 || (g * n as f64).round() > pair_count(n) as f64 {
                        return bad(format!("gamma {g} is out of range for n = {n}"));
                    }
                }
            }
            SweepModel::Lat2 | SweepModel::Lat3 => {
                if self.side.is_none() {
                    return bad("lattice models need L".into());
                }
                if self.grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return bad("lattice grid values are probabilities in [0, 1]".into());
                }
            }
        }
        Ok(())
    }

    pub fn distribution(&self) -> Result<FactorDistribution, SweepError> {
        Ok(FactorDistribution::from_spec(self.f, &self.q)?)
    }

    fn graph_spec(&self, x: f64) -> GraphSpec {
        match self.model {
            SweepModel::Er => {
                let n = self.n.unwrap();
                GraphSpec::Er {
                    n,
                    m: (x * n as f64).round() as u64,
                }
            }
            SweepModel::Lat2 => GraphSpec::Lattice {
                dim: 2,
                side: self.side.unwrap(),
                p: x,
            },
            SweepModel::Lat3 => GraphSpec::Lattice {
                dim: 3,
                side: self.side.unwrap(),
                p: x,
            },
        }
    }

    pub fn gen_spec(&self, x: f64) -> Result<GenSpec, SweepError> {
        Ok(GenSpec {
            graph: self.graph_spec(x),
            dist: self.distribution()?,
            conditioning: match self.cond {
                SweepConditioning::Any => Conditioning::Any,
                SweepConditioning::FrustrationFree => Conditioning::FrustrationFree,
            },
            budget: self.budget,
        })
    }
}

/// Seed of one trial, a pure function of its coordinates.
pub fn derive_trial_seed(master: u64, grid_index: u64, trial_index: u64) -> u64 {
    derive(&[master, grid_index, trial_index])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueCell {
    Exact(BigNat),
    /// A residual component exceeded the cap; holds its size.
    TooLarge(usize),
}

impl ValueCell {
    fn render(&self) -> String {
        match self {
            ValueCell::Exact(v) if v.is_zero() => "0".into(),
            ValueCell::Exact(v) => {
                let s = v.to_string();
                if s.len() <= MAX_DECIMAL_DIGITS {
                    s
                } else {
                    format!("2^{:.3}", log2(v))
                }
            }
            ValueCell::TooLarge(size) => format!("NA:{size}"),
        }
    }
}

fn log2(v: &BigNat) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(64);
    (v >> shift).to_f64().unwrap().log2() + shift as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub n: u32,
    pub m: usize,
    pub frustrated: bool,
    pub max_comp: usize,
    pub multicyclic: usize,
    pub frozen_core: Option<usize>,
    pub residual_max: Option<usize>,
    pub label: Label,
    pub fig8_l3: Option<usize>,
    /// `(dominoes, frustrated dominoes)` on lattices.
    pub dominoes: Option<(usize, usize)>,
    pub value: Option<ValueCell>,
    pub resamples: u64,
    pub ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub grid_index: usize,
    pub grid: f64,
    pub trial: u32,
    pub seed: u64,
    /// A failed trial keeps its error message.
    pub outcome: Result<TrialOutcome, String>,
}

impl TrialRecord {
    pub fn csv_line(&self) -> String {
        let head = format!("{},{},{}", self.grid, self.trial, self.seed);
        let o = match &self.outcome {
            Ok(o) => o,
            Err(e) => return format!("{head},,,,,,,,error: {},,,,,", e.replace(',', ";")),
        };
        let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{head},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            o.n,
            o.m,
            o.frustrated as u8,
            o.max_comp,
            o.multicyclic,
            opt(o.frozen_core),
            opt(o.residual_max),
            o.label.as_str(),
            opt(o.fig8_l3),
            opt(o.dominoes.map(|d| d.0)),
            o.value.as_ref().map(ValueCell::render).unwrap_or_default(),
            o.resamples,
            o.ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        )
    }
}

/// Builds and measures the instance of one trial.
pub fn run_trial(
    cfg: &SweepConfig,
    x: f64,
    seed: u64,
) -> Result<(Instance, TrialOutcome), SweepError> {
    let start = Instant::now();
    let inst = crate::instance::generate_instance(&cfg.gen_spec(x)?, seed)?;
    let d = decouple(&inst, cfg.cutoff_c);
    let frustrated = d.label == Label::Frustrated;
    let fig8_l3 = match (cfg.fig8, cfg.model) {
        (true, SweepModel::Er) => Some(count_frustrated_figure_eights(&inst, 3)?),
        _ => None,
    };
    let dominoes = match cfg.model {
        SweepModel::Er => None,
        _ => {
            let all = enumerate_dominoes(inst.graph())?;
            let bad = all
                .iter()
                .filter(|d| domino_is_frustrated(&inst, d))
                .count();
            Some((all.len(), bad))
        }
    };
    let value = if cfg.values {
        let rank = RankBackendConfig::default().with_cap(cfg.max_component);
        match value_from_decomposition(&inst, &d, &rank) {
            Ok(v) => Some(ValueCell::Exact(v.value)),
            Err(CountError::ComponentTooLarge { size, .. }) => Some(ValueCell::TooLarge(size)),
            Err(e) => return Err(SweepError::Config(e.to_string())),
        }
    } else {
        None
    };
    let outcome = TrialOutcome {
        n: inst.n(),
        m: inst.graph().m(),
        frustrated,
        max_comp: d.components.max_size(),
        multicyclic: d.components.count_class(ComponentClass::Multicyclic),
        frozen_core: d.frozen_core(),
        residual_max: d.residual_max(),
        label: d.label,
        fig8_l3,
        dominoes,
        value,
        resamples: inst.provenance().resamples,
        ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    Ok((inst, outcome))
}

/// Runs every `(grid point, trial)` on `threads` workers and returns the
/// records in `(grid, trial)` order.
pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> Result<Vec<TrialRecord>, SweepError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| SweepError::Config(e.to_string()))?;
    let tasks: Vec<(usize, u32)> = (0..cfg.grid.len())
        .flat_map(|g| (0..cfg.trials).map(move |t| (g, t)))
        .collect();
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|&(g, t)| {
                let seed = derive_trial_seed(cfg.seed, g as u64, t as u64);
                let outcome = run_trial(cfg, cfg.grid[g], seed)
                    .map(|r| r.1)
                    .map_err(|e| e.to_string());
                TrialRecord {
                    grid_index: g,
                    grid: cfg.grid[g],
                    trial: t,
                    seed,
                    outcome,
                }
            })
            .collect()
    }))
}

/// Per-grid-point aggregates over the successful trials.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSummary {
    pub grid: f64,
    pub trials: usize,
    pub frustrated_fraction: Option<f64>,
    pub mean_max_comp: Option<f64>,
    /// Mean of `frozen_core / n` over satisfiable trials.
    pub mean_frozen_fraction: Option<f64>,
}

pub fn summarize(records: &[TrialRecord], grid: f64) -> GridSummary {
    let ok: Vec<&TrialOutcome> = records
        .iter()
        .filter(|r| r.grid == grid)
        .filter_map(|r| r.outcome.as_ref().ok())
        .collect();
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let frustrated: Vec<f64> = ok.iter().map(|o| o.frustrated as u8 as f64).collect();
    let max_comp: Vec<f64> = ok.iter().map(|o| o.max_comp as f64).collect();
    let frozen: Vec<f64> = ok
        .iter()
        .filter_map(|o| o.frozen_core.map(|c| c as f64 / o.n as f64))
        .collect();
    GridSummary {
        grid,
        trials: ok.len(),
        frustrated_fraction: mean(&frustrated),
        mean_max_comp: mean(&max_comp),
        mean_frozen_fraction: mean(&frozen),
    }
}

impl GridSummary {
    pub fn csv_line(&self) -> String {
        let f = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        format!(
            "{},summary,,,,{},{},,{},,,,,,,",
            self.grid,
            f(self.frustrated_fraction),
            f(self.mean_max_comp),
            f(self.mean_frozen_fraction)
        )
    }
}

/// Header, one line per record, then one summary line per grid point.
pub fn write_csv<W: Write>(
    cfg: &SweepConfig,
    records: &[TrialRecord],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_line())?;
    }
    for &g in &cfg.grid {
        writeln!(out, "{}", summarize(records, g).csv_line())?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(model: &str, extra: &str) -> SweepConfig {
        let size = if model == "er" { "n = 40" } else { "L = 6" };
        let grid = if model == "er" {
            "[0.3, 1.2]"
        } else {
            "[0.5, 0.9]"
        };
        SweepConfig::from_toml(&format!(
            "model = \"{model}\"\n{size}\ngrid = {grid}\ntrials = 3\nseed = 9\nf = 2\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn trial_seed_golden() {
        assert_eq!(derive_trial_seed(0, 0, 0), 0x051E_B30D_BC4D_8B05);
        assert_ne!(derive_trial_seed(5, 0, 0), derive_trial_seed(5, 0, 1));
        assert_ne!(derive_trial_seed(5, 1, 0), derive_trial_seed(5, 0, 1));
    }

    #[test]
    fn trial_seeds_do_not_collide() {
        let mut seen = std::collections::HashSet::new();
        for g in 0..100u64 {
            for t in 0..10_000u64 {
                assert!(seen.insert(derive_trial_seed(12345, g, t)));
            }
        }
    }

    #[test]
    fn config_validation() {
        let base = "model = \"er\"\nn = 10\ntrials = 1\nseed = 1\nf = 2\n";
        assert!(SweepConfig::from_toml(&format!("{base}grid = [1.0]")).is_ok());
        assert!(SweepConfig::from_toml(&format!("{base}grid = [1.0, 0.5]")).is_err());
        assert!(SweepConfig::from_toml(&format!("{base}grid = [10.0]")).is_err());
        assert!(SweepConfig::from_toml(&format!("{base}grid = [1.0]\nbogus = 1")).is_err());
        assert!(SweepConfig::from_toml(
            "model = \"lat2\"\ngrid = [0.5]\ntrials = 1\nseed = 1\nf = 2"
        )
        .is_err());
    }

    #[test]
    fn one_row_per_trial_in_order() {
        let cfg = SweepConfig::from_toml(
            "model = \"er\"\nn = 30\ngrid = [0.2, 0.6, 1.5]\ntrials = 1\nseed = 4\nf = 3",
        )
        .unwrap();
        let rows = run_sweep(&cfg, 2).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.grid_index == i && r.trial == 0));
    }

    #[test]
    fn summaries_match_rows() {
        for model in ["er", "lat2"] {
            let cfg = small(model, "cond = \"any\"");
            let rows = run_sweep(&cfg, 3).unwrap();
            assert_eq!(rows.len(), 6);
            for &g in &cfg.grid {
                let s = summarize(&rows, g);
                let mine: Vec<_> = rows.iter().filter(|r| r.grid == g).collect();
                let fr = mine
                    .iter()
                    .filter(|r| r.outcome.as_ref().unwrap().frustrated)
                    .count();
                assert_eq!(s.frustrated_fraction, Some(fr as f64 / 3.0));
            }
            let mut out = Vec::new();
            write_csv(&cfg, &rows, &mut out).unwrap();
            let text = String::from_utf8(out).unwrap();
            let cols = CSV_HEADER.split(',').count();
            assert!(text.lines().all(|l| l.split(',').count() == cols), "{text}");
            assert_eq!(text.lines().count(), 1 + 6 + 2);
        }
    }

    #[test]
    fn error_rows_keep_the_column_count() {
        let r = TrialRecord {
            grid_index: 0,
            grid: 0.5,
            trial: 2,
            seed: 7,
            outcome: Err("a, b".into()),
        };
        let line = r.csv_line();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert_eq!(line.split(',').nth(10), Some("error: a; b"));
    }

    #[test]
    fn value_rendering() {
        assert_eq!(ValueCell::Exact(BigNat::from(12u8)).render(), "12");
        assert_eq!(ValueCell::Exact(BigNat::from(0u8)).render(), "0");
        assert_eq!(
            ValueCell::Exact(BigNat::from(1u8) << 200).render(),
            "2^200.000"
        );
        assert_eq!(ValueCell::TooLarge(33).render(), "NA:33");
    }

    #[test]
    fn cap_is_reported_in_row() {
        let cfg = SweepConfig::from_toml(
            "model = \"er\"\nn = 60\ngrid = [0.45]\ntrials = 4\nseed = 2\nf = 2\nmax_component = 2",
        )
        .unwrap();
        let rows = run_sweep(&cfg, 1).unwrap();
        let na = rows
            .iter()
            .filter(|r| {
                matches!(
                    r.outcome.as_ref().unwrap().value,
                    Some(ValueCell::TooLarge(_))
                )
            })
            .count();
        assert!(na > 0);
    }
}
