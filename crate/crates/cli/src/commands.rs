use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{info, warn};
use sparsesense::dataset::{load_matrix, synthesize, Dataset, MatrixFormat, SpectrumSpec};
use sparsesense::evaluation::{
    mf_sweep, sweep_modes_sensors, Cell, ExperimentConfig, SplitContext, TrialCounts, TrialIndex,
    TrialSeeds,
};
use sparsesense::linalg::{condition_number, singular_values};
use sparsesense::multifidelity::{budget_from_endpoints, Assignment};
use sparsesense::placement::{measure, ModeRule, Oversample, PlacementPolicy};

use crate::cli::{MfArgs, PlaceArgs, ReportArgs, SweepArgs, SynthArgs, TrialArgs};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{self, num, RegimeTags, RunManifest, REPORT_HEADER};
use crate::svg;

/// Shared state for one invocation.
pub struct Context {
    pub settings: Settings,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Context {
    /// Relative outputs live under the output directory.
    pub fn output_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        }
    }

    fn manifest_path(&self, command: &str) -> PathBuf {
        self.out_dir.join(format!("manifest-{command}.txt"))
    }

    fn load(&self, flag: Option<PathBuf>) -> CliResult<(PathBuf, Dataset)> {
        let path: PathBuf = self.settings.require(flag, "data")?;
        let ds = load_matrix(&path, MatrixFormat::from_path(&path))?;
        info!("loaded {} ({} x {})", path.display(), ds.n(), ds.m());
        Ok((path, ds))
    }

    fn base_config(&self, trials: &TrialArgs, basis: Option<String>) -> CliResult<ExperimentConfig> {
        let s = &self.settings;
        let d = ExperimentConfig::default();
        Ok(ExperimentConfig {
            basis: s.get_or(basis.map(|b| b.parse()).transpose()?, "basis", d.basis)?,
            counts: TrialCounts {
                splits: s.get_or(trials.splits, "splits", d.counts.splits)?,
                placement_cv: s.get_or(trials.cv, "cv", d.counts.placement_cv)?,
                noise: s.get_or(trials.noise_draws, "noise-draws", d.counts.noise)?,
            },
            train_fraction: s.get_or(trials.train_fraction, "train-fraction", d.train_fraction)?,
            master_seed: self.seed,
            ..d
        })
    }

    fn oversample(&self, flag: Option<String>) -> CliResult<Oversample> {
        self.settings
            .get_or(flag.map(|o| o.parse()).transpose()?, "oversample", Oversample::default())
    }
}

fn echo_config(manifest: &mut RunManifest, config: &ExperimentConfig) {
    for (k, v) in config.describe() {
        manifest.echo(k, v);
    }
}

pub fn synth(cx: &Context, args: SynthArgs) -> CliResult<()> {
    let s = &cx.settings;
    let a: f64 = s.require(args.a, "a")?;
    let b: f64 = s.require(args.b, "b")?;
    let n: usize = s.require(args.n, "n")?;
    let m: usize = s.require(args.m, "m")?;
    let n_sv: usize = s.get_or(args.n_sv, "n-sv", n.min(m))?;
    let out = cx.output_path(&s.require(args.out, "out")?);

    let spec = SpectrumSpec::new(a, b, n_sv)?;
    let mut ds = synthesize(&spec, n, m, cx.seed)?;
    ds.name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let format = MatrixFormat::from_path(&out);
    let mut bytes = Vec::new();
    match format {
        MatrixFormat::Binary => sparsesense::dataset::write_binary(&ds.x, &mut bytes),
        MatrixFormat::Csv => sparsesense::dataset::write_csv(&ds.x, &mut bytes),
    }
    .map_err(|e| CliError::io("encoding dataset", e))?;

    let mut meta = String::new();
    for (k, v) in [
        ("a", num(a)),
        ("b", num(b)),
        ("n_sv", n_sv.to_string()),
        ("n", n.to_string()),
        ("m", m.to_string()),
        ("seed", cx.seed.to_string()),
    ] {
        let _ = writeln!(meta, "{k}={v}");
    }
    let mut meta_path = out.clone().into_os_string();
    meta_path.push(".meta");

    let mut manifest = RunManifest::new("synth", cx.seed);
    for (k, v) in meta.lines().filter_map(|l| l.split_once('=')) {
        manifest.echo(k, v);
    }
    manifest.emit(&out, &bytes)?;
    manifest.emit(Path::new(&meta_path), meta.as_bytes())?;
    manifest.finish(&cx.manifest_path("synth"))?;
    println!("wrote {}", out.display());
    Ok(())
}

pub fn place(cx: &Context, args: PlaceArgs) -> CliResult<()> {
    let s = &cx.settings;
    let (data_path, ds) = cx.load(args.data)?;
    let trials = TrialArgs {
        train_fraction: args.train_fraction,
        ..TrialArgs::default()
    };
    let mut config = cx.base_config(&trials, args.basis)?;
    config.policy.oversample = cx.oversample(args.oversample)?;
    let r: usize = s.require(args.r, "r")?;
    let p: usize = s.require(args.p, "p")?;
    let split: usize = s.get_or(args.split, "split", 0)?;
    let out = cx.output_path(&s.get_or(args.out, "out", PathBuf::from("place.csv"))?);

    let ctx = SplitContext::new(&ds, &config, split)?;
    let seeds = TrialSeeds::derive(config.master_seed, TrialIndex { split, cv: 0, noise: 0 });
    let (basis, plan, _) = ctx.plan(&config, &Cell::Modes { r, p }, seeds.placement)?;
    let theta = measure(&basis.psi, &plan)?;
    let sv = singular_values(&theta);

    let mut text = String::from("order,location\n");
    for (i, loc) in plan.locations.iter().enumerate() {
        let _ = writeln!(text, "{i},{loc}");
    }
    let _ = writeln!(text, "# method={}", plan.method);
    let _ = writeln!(text, "# r_used={}", plan.r_used);
    let _ = writeln!(text, "# sigma_min={}", num(*sv.last().unwrap_or(&0.0)));
    let _ = writeln!(text, "# condition={}", num(condition_number(&theta)));

    let mut manifest = RunManifest::new("place", cx.seed);
    manifest.echo("data", data_path.display());
    manifest.echo("r", r);
    manifest.echo("p", p);
    manifest.echo("split", split);
    echo_config(&mut manifest, &config);
    manifest.emit(&out, text.as_bytes())?;
    manifest.finish(&cx.manifest_path("place"))?;
    print!("{text}");
    Ok(())
}

pub fn sweep(cx: &Context, args: SweepArgs) -> CliResult<()> {
    let s = &cx.settings;
    let (data_path, ds) = cx.load(args.data)?;
    let mut config = cx.base_config(&args.trials, args.basis)?;
    config.policy.oversample = cx.oversample(args.oversample)?;
    config.noise_cheap = s.get_or(args.noise, "noise", config.noise_cheap)?;
    config.noise_exp = config.noise_exp.min(config.noise_cheap);
    let r_grid = s
        .list(args.r, "r")?
        .ok_or_else(|| CliError::usage("missing required setting --r"))?;
    let p_grid = s
        .list(args.p, "p")?
        .ok_or_else(|| CliError::usage("missing required setting --p"))?;
    let out = cx.output_path(&s.get_or(args.out, "out", PathBuf::from("sweep.csv"))?);
    let svg_path = s.get::<PathBuf>(args.svg, "svg")?.map(|p| cx.output_path(&p));

    let result = sweep_modes_sensors(&ds, &config, &r_grid, &p_grid)?;

    let mut manifest = RunManifest::new("sweep", cx.seed);
    manifest.echo("data", data_path.display());
    manifest.echo("r", join(&r_grid));
    manifest.echo("p", join(&p_grid));
    echo_config(&mut manifest, &config);
    manifest.emit(&out, output::sweep_csv(&result).as_bytes())?;
    if let Some(p) = svg_path {
        manifest.emit(&p, svg::sweep_chart(&result).as_bytes())?;
    }
    manifest.finish(&cx.manifest_path("sweep"))?;
    println!("wrote {} ({} cells)", out.display(), result.cells.len());
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

pub fn mf(cx: &Context, args: MfArgs) -> CliResult<()> {
    let s = &cx.settings;
    let (data_path, ds) = cx.load(args.data)?;
    let mut config = cx.base_config(&args.trials, args.basis)?;
    let d = ExperimentConfig::default();
    config.policy = PlacementPolicy {
        mode_rule: ModeRule {
            threshold: s.get_or(args.mode_threshold, "mode-threshold", ModeRule::default().threshold)?,
            factor: s.get_or(args.mode_factor, "mode-factor", ModeRule::default().factor)?,
        },
        oversample: cx.oversample(args.oversample)?,
    };
    config.noise_cheap = s.get_or(args.noise_cheap, "noise-cheap", d.noise_cheap)?;
    config.noise_exp = s.get_or(args.noise_exp, "noise-exp", d.noise_exp)?;
    config.assignment = s.get_or(
        args.assignment.map(|a| a.parse::<Assignment>()).transpose()?,
        "assignment",
        d.assignment,
    )?;
    config.band = s.get_or(args.band, "band", d.band)?;
    config.composition_steps = s.get_or(args.steps, "steps", d.composition_steps)?;
    let p_cheap_max: usize = s.require(args.p_cheap_max, "p-cheap-max")?;
    let p_exp_max: usize = s.require(args.p_exp_max, "p-exp-max")?;
    let cost_cheap: f64 = s.get_or(args.cost_cheap, "cost-cheap", 1.0)?;
    config.budget = Some(budget_from_endpoints(p_cheap_max, p_exp_max, cost_cheap)?);
    let tags = RegimeTags {
        b: s.get(args.tag_b, "tag-b")?,
        noise_regime: s.get(args.noise_regime, "noise-regime")?,
        sensor_regime: s.get(args.sensor_regime, "sensor-regime")?,
    };
    let out = cx.output_path(&s.get_or(args.out, "out", PathBuf::from("mf.csv"))?);
    let svg_path = s.get::<PathBuf>(args.svg, "svg")?.map(|p| cx.output_path(&p));

    let result = mf_sweep(&ds, &config)?;
    for w in &result.warnings {
        warn!("{w}");
    }

    let mut manifest = RunManifest::new("mf", cx.seed);
    manifest.echo("data", data_path.display());
    manifest.echo("p_cheap_max", p_cheap_max);
    manifest.echo("p_exp_max", p_exp_max);
    echo_config(&mut manifest, &config);
    manifest.emit(&out, output::mf_csv(&result, config.band, &tags).as_bytes())?;
    if let Some(p) = svg_path {
        manifest.emit(&p, svg::mf_chart(&result).as_bytes())?;
    }
    manifest.finish(&cx.manifest_path("mf"))?;
    let regime = result.regime.map(|r| r.as_str()).unwrap_or("inconclusive");
    println!("regime={regime}");
    Ok(())
}

pub fn report(cx: &Context, args: ReportArgs) -> CliResult<()> {
    let out = cx.output_path(&cx.settings.get_or(args.out, "out", PathBuf::from("report.csv"))?);
    let mut rows: Vec<([String; 3], String, PathBuf)> = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        let table = output::parse_mf_csv(&text, &path.display().to_string())?;
        let regime = table
            .footer_value("regime")
            .ok_or_else(|| CliError::data(format!("{}: no `# regime=` line", path.display())))?;
        let regime: sparsesense::evaluation::Regime = regime
            .parse()
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let tag = |k: &str| table.footer_value(k).unwrap_or("NA").to_string();
        let key = [tag("b"), tag("noise_regime"), tag("sensor_regime")];
        match rows.iter().find(|(k, _, _)| *k == key) {
            Some((_, prev, from)) if *prev != regime.as_str() => {
                return Err(CliError::data(format!(
                    "conflicting classifications for b={}, noise_regime={}, sensor_regime={}: {} ({}) vs {} ({})",
                    key[0],
                    key[1],
                    key[2],
                    prev,
                    from.display(),
                    regime,
                    path.display()
                )));
            }
            Some(_) => {}
            None => rows.push((key, regime.as_str().to_string(), path.clone())),
        }
    }
    let mut text = String::from(REPORT_HEADER);
    text.push('\n');
    for (key, class, _) in &rows {
        let _ = writeln!(text, "{},{},{},{class}", key[0], key[1], key[2]);
    }
    let mut manifest = RunManifest::new("report", cx.seed);
    for p in &args.inputs {
        manifest.echo("input", p.display());
    }
    manifest.emit(&out, text.as_bytes())?;
    manifest.finish(&cx.manifest_path("report"))?;
    print!("{text}");
    Ok(())
}

