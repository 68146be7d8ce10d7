use clap::{Args, Parser, Subcommand};
use staircase::experiment::Algo;
use staircase::LandscapeParams;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "staircase",
    version,
    about = "Build staircase landscapes, verify them, and run descent experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the numerical checks on one landscape and write check.json.
    Check(Common),
    /// Run descent once per seed; writes one CSV per run and summary.json.
    Run(Common),
    /// Run the cartesian product of the parameter lists and seeds; writes sweep.csv.
    Sweep(Common),
    /// Turn the outputs of `run` into plot-ready CSV series.
    Plotdata(PlotArgs),
}

/// Options shared by check, run, and sweep. List-valued options take
/// comma-separated values; only sweep accepts more than one.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Block curvature L.
    #[arg(long = "L", value_delimiter = ',')]
    pub l: Vec<f64>,
    /// Escape curvature gamma.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Block side length.
    #[arg(long, value_delimiter = ',')]
    pub tau: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub n_saddles: Vec<usize>,
    /// Step size; defaults to 1/(4L).
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<u64>,
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Seed list: `a..b` (end exclusive) or comma-separated values.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Variance of the noise added by sgd.
    #[arg(long)]
    pub noise_var: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub algo: Vec<Algo>,
    /// Output directory; defaults to ./out/<unix-seconds>.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keep every n-th iterate in trajectory CSVs (event rows are always kept).
    #[arg(long)]
    pub record_every: Option<u64>,
    /// File of `key = value` lines using the long option names; options
    /// given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record wall time in summary.json, which makes it non-reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Directory written by `run`.
    pub run_dir: PathBuf,
    /// Defaults to <run_dir>/plot.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub grid: Vec<LandscapeParams>,
    pub eta: Option<f64>,
    pub max_iter: u64,
    pub seeds: Vec<u64>,
    pub noise_var: f64,
    pub algos: Vec<Algo>,
    pub out: PathBuf,
    pub record_every: u64,
    pub jobs: Option<usize>,
    pub timing: bool,
}

impl Settings {
    /// The single landscape of a check or run.
    pub fn single(&self) -> Result<LandscapeParams, CliError> {
        match self.grid.as_slice() {
            [p] => Ok(*p),
            _ => Err(CliError::Usage(
                "only sweep accepts more than one value for L, gamma, tau or n-saddles".into(),
            )),
        }
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("invalid seed list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a >= b {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| bad()))
        .collect()
}

/// Reads `key = value` lines. Blank lines and `#` comments are skipped;
/// `_` and `-` are interchangeable in keys.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value",
                no + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key {key:?}",
                no + 1
            )));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

const KEYS: [&str; 12] = [
    "L",
    "gamma",
    "tau",
    "n-saddles",
    "eta",
    "max-iter",
    "seed",
    "seeds",
    "noise-var",
    "algo",
    "record-every",
    "jobs",
];

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid value {s:?} for {key}")))
        })
        .collect()
}

fn one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value {v:?} for {key}")))
}

fn pick<T>(cli: Vec<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Vec<T>, CliError>
where
    T: std::str::FromStr,
{
    if !cli.is_empty() {
        return Ok(cli);
    }
    file.get(key).map_or(Ok(Vec::new()), |v| list(key, v))
}

fn pick_one<T>(
    cli: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T: std::str::FromStr,
{
    match cli {
        Some(v) => Ok(Some(v)),
        None => file.get(key).map(|v| one(key, v)).transpose(),
    }
}

fn or_default<T>(v: Vec<T>, dflt: T) -> Vec<T> {
    if v.is_empty() {
        vec![dflt]
    } else {
        v
    }
}

fn default_out() -> PathBuf {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    PathBuf::from("out").join(secs.to_string())
}

/// Merges the command line over the config file and fills in defaults.
/// `default_algos` is used when no algorithm was named.
pub fn resolve(
    c: Common,
    default_seeds: &[u64],
    default_algos: &[Algo],
) -> Result<Settings, CliError> {
    let file = match &c.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let d = LandscapeParams::default();
    let ls = or_default(pick(c.l, &file, "L")?, d.l);
    let gammas = or_default(pick(c.gamma, &file, "gamma")?, d.gamma);
    let taus = or_default(pick(c.tau, &file, "tau")?, d.tau);
    let ns = or_default(pick(c.n_saddles, &file, "n-saddles")?, d.n_saddles);
    let mut grid = Vec::new();
    for &l in &ls {
        for &gamma in &gammas {
            for &tau in &taus {
                for &n in &ns {
                    let p = LandscapeParams::new(l, gamma, tau, n)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    grid.push(p);
                }
            }
        }
    }

    // Seeds named on the command line replace both seed keys of the file.
    let (seed, seeds_text) = if c.seed.is_some() || c.seeds.is_some() {
        (c.seed, c.seeds)
    } else {
        (pick_one(None, &file, "seed")?, file.get("seeds").cloned())
    };
    let seeds = match (seed, seeds_text) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either seed or seeds, not both".into(),
            ))
        }
        (Some(s), None) => vec![s],
        (None, Some(t)) => parse_seeds(&t)?,
        (None, None) => default_seeds.to_vec(),
    };

    let algos = pick(c.algo, &file, "algo")?;
    let algos = if algos.is_empty() {
        default_algos.to_vec()
    } else {
        algos
    };

    let eta = pick_one(c.eta, &file, "eta")?;
    if eta.is_some_and(|e: f64| !(e > 0.0 && e.is_finite())) {
        return Err(CliError::Usage("eta must be positive".into()));
    }
    let noise_var = pick_one(c.noise_var, &file, "noise-var")?.unwrap_or(0.1);
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(CliError::Usage("noise-var must be non-negative".into()));
    }
    let record_every = pick_one(c.record_every, &file, "record-every")?.unwrap_or(1);
    if record_every == 0 {
        return Err(CliError::Usage("record-every must be at least 1".into()));
    }
    let jobs = pick_one(c.jobs, &file, "jobs")?;
    if jobs == Some(0) {
        return Err(CliError::Usage("jobs must be at least 1".into()));
    }
    Ok(Settings {
        grid,
        eta,
        max_iter: pick_one(c.max_iter, &file, "max-iter")?.unwrap_or(1_000_000),
        seeds,
        noise_var,
        algos,
        out: c.out.unwrap_or_else(default_out),
        record_every,
        jobs,
        timing: c.timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("4, 7").unwrap(), vec![4, 7]);
        assert!(parse_seeds("3..3").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn config_parse() {
        let m =
            parse_config("# comment\nL = 1.5\nn_saddles = 4 # trailing\n\nalgo=gd,sgd\n").unwrap();
        assert_eq!(m["L"], "1.5");
        assert_eq!(m["n-saddles"], "4");
        assert_eq!(m["algo"], "gd,sgd");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("L 1").is_err());
    }

    #[test]
    fn defaults_and_grid() {
        let s = resolve(Common::default(), &[0], &[Algo::Gd]).unwrap();
        assert_eq!(s.grid, vec![LandscapeParams::default()]);
        assert_eq!(
            (s.max_iter, s.record_every, s.noise_var),
            (1_000_000, 1, 0.1)
        );
        let c = Common {
            l: vec![1.0, 1.5],
            n_saddles: vec![3, 5],
            ..Common::default()
        };
        let s = resolve(c, &[0], &[Algo::Gd]).unwrap();
        assert_eq!(s.grid.len(), 4);
        assert!(s.single().is_err());
    }

    #[test]
    fn invalid_params_are_usage_errors() {
        let c = Common {
            l: vec![0.5],
            gamma: vec![1.0],
            ..Common::default()
        };
        assert!(matches!(
            resolve(c, &[0], &[Algo::Gd]),
            Err(CliError::Usage(_))
        ));
    }
}
