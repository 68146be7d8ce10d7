use rayon::prelude::*;
use staircase::experiment::{
    read_trajectory_csv, run_checks, run_seeded, to_json, write_f_series, write_path_series,
    write_sweep_csv, write_t_bars, write_trajectory_csv, Algo, CheckSettings, RunResult,
    RunSummary, Summary, SweepRow,
};
use staircase::optimizer::GdConfig;
use staircase::{Landscape, LandscapeParams};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::options::{resolve, Common, PlotArgs, Settings};
use crate::CliError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Creates the output directory up front so an unwritable path fails
/// before any work is done.
fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let probe = dir.join(".write-test");
    File::create(&probe).map_err(|e| io_err(dir, e))?;
    fs::remove_file(&probe).map_err(|e| io_err(&probe, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_err(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j);
    }
    b.build().map_err(|e| CliError::Usage(e.to_string()))
}

fn landscape(p: LandscapeParams) -> Result<Landscape, CliError> {
    Landscape::new(p).map_err(|e| CliError::Usage(e.to_string()))
}

fn config(ls: &Landscape, s: &Settings) -> Result<GdConfig, CliError> {
    let mut c = GdConfig::for_landscape(ls);
    if let Some(eta) = s.eta {
        c.eta = eta;
    }
    c.max_iter = s.max_iter;
    c.record_every = s.record_every;
    c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(c)
}

pub fn check(c: Common) -> Result<(), CliError> {
    let s = resolve(c, &[0], &[Algo::Gd])?;
    let ls = landscape(s.single()?)?;
    prepare_out(&s.out)?;
    let settings = CheckSettings {
        seed: s.seeds[0],
        ..CheckSettings::default()
    };
    let suite = run_checks(&ls, &settings)?;
    let path = s.out.join("check.json");
    write_text(&path, &to_json(&suite)?)?;
    let status = |ok: bool| if ok { "pass" } else { "FAIL" };
    for (name, ok, worst) in [
        (
            "gradient",
            suite.gradient.passed,
            suite.gradient.worst_error,
        ),
        (
            "seam value",
            suite.seams.value.passed,
            suite.seams.value.worst_error,
        ),
        (
            "seam gradient",
            suite.seams.gradient.passed,
            suite.seams.gradient.worst_error,
        ),
        (
            "stationary",
            suite.stationary.check.passed,
            suite.stationary.check.worst_error,
        ),
        (
            "global min",
            suite.global_min.passed,
            suite.global_min.worst_error,
        ),
        (
            "lipschitz",
            suite.lipschitz_passed,
            suite.lipschitz.estimate,
        ),
    ] {
        println!("{name:<14} {} ({worst:.3e})", status(ok));
    }
    println!("wrote {}", path.display());
    if suite.passed {
        Ok(())
    } else {
        Err(CliError::Failed("one or more checks failed".into()))
    }
}

fn trajectory_name(r: &RunResult) -> String {
    format!("{}_seed{}.csv", r.algo, r.seed)
}

pub fn run(c: Common) -> Result<(), CliError> {
    let s = resolve(c, &[0], &[Algo::Gd])?;
    let ls = landscape(s.single()?)?;
    let cfg = config(&ls, &s)?;
    let algo = match s.algos.as_slice() {
        [a] => *a,
        _ => return Err(CliError::Usage("run takes a single algo".into())),
    };
    prepare_out(&s.out)?;
    let runs: Vec<(RunResult, f64)> = pool(s.jobs)?.install(|| {
        s.seeds
            .par_iter()
            .map(|&seed| {
                let clock = Instant::now();
                let r = run_seeded(&ls, &cfg, algo, s.noise_var, seed)?;
                Ok((r, clock.elapsed().as_secs_f64()))
            })
            .collect::<Result<_, CliError>>()
    })?;
    let mut summaries = Vec::new();
    let mut failed = Vec::new();
    for (r, secs) in &runs {
        let name = trajectory_name(r);
        write_trajectory_csv(create(&s.out.join(&name))?, &r.trajectory)?;
        let mut sum = RunSummary::from_result(r);
        sum.trajectory_file = Some(name);
        if s.timing {
            sum.wall_time_s = Some(*secs);
        }
        if !sum.theory_passed || sum.segmentation_error.is_some() {
            failed.push(r.seed);
        }
        let ts: Vec<u64> = sum.records.iter().map(|x| x.t).collect();
        println!(
            "{} seed {}: {} after {} iterations, t = {ts:?}",
            algo,
            r.seed,
            r.trajectory.outcome.as_str(),
            r.total_iters()
        );
        summaries.push(sum);
    }
    let noise = (algo == Algo::Sgd).then_some(s.noise_var);
    let path = s.out.join("summary.json");
    write_text(&path, &to_json(&Summary::new(&ls, &cfg, noise, summaries))?)?;
    println!("wrote {}", path.display());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "theory checks failed for seeds {failed:?}"
        )))
    }
}

pub fn sweep(c: Common) -> Result<(), CliError> {
    let s = resolve(c, &(0..20).collect::<Vec<_>>(), &[Algo::Gd, Algo::Sgd])?;
    if s.grid.is_empty() || s.seeds.is_empty() || s.algos.is_empty() {
        return Err(CliError::Usage("empty sweep grid".into()));
    }
    let mut jobs = Vec::new();
    for p in &s.grid {
        let ls = landscape(*p)?;
        let cfg = config(&ls, &s)?;
        for &seed in &s.seeds {
            for &algo in &s.algos {
                jobs.push((*p, cfg, seed, algo));
            }
        }
    }
    prepare_out(&s.out)?;
    let rows: Vec<SweepRow> = pool(s.jobs)?.install(|| {
        jobs.par_iter()
            .map(|(p, cfg, seed, algo)| {
                let ls = landscape(*p)?;
                let r = run_seeded(&ls, cfg, *algo, s.noise_var, *seed)?;
                Ok(SweepRow::from_result(p, &r))
            })
            .collect::<Result<_, CliError>>()
    })?;
    let path = s.out.join("sweep.csv");
    write_sweep_csv(create(&path)?, &rows)?;
    println!("{} runs, wrote {}", rows.len(), path.display());
    Ok(())
}

pub fn plotdata(p: PlotArgs) -> Result<(), CliError> {
    let summary_path = p.run_dir.join("summary.json");
    let text = fs::read_to_string(&summary_path).map_err(|e| io_err(&summary_path, e))?;
    let summary: Summary = serde_json::from_str(&text).map_err(|e| io_err(&summary_path, e))?;
    let out: PathBuf = p.out.unwrap_or_else(|| p.run_dir.join("plot"));
    prepare_out(&out)?;
    for run in &summary.runs {
        let Some(name) = &run.trajectory_file else {
            continue;
        };
        let src = p.run_dir.join(name);
        let rows = read_trajectory_csv(File::open(&src).map_err(|e| io_err(&src, e))?)?;
        let stem = name.trim_end_matches(".csv");
        write_f_series(create(&out.join(format!("{stem}_f.csv")))?, &rows)?;
        write_path_series(create(&out.join(format!("{stem}_path.csv")))?, &rows)?;
    }
    write_t_bars(create(&out.join("t_bars.csv"))?, &summary)?;
    println!(
        "wrote plot data for {} runs to {}",
        summary.runs.len(),
        out.display()
    );
    Ok(())
}
