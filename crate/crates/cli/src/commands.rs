use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use fracgibbs_core::dynamics::{Evolver, IntegratorConfig, Scheme};
use fracgibbs_core::experiments::{
    convergence_study, invariance_test, norm_growth, tail_test, ConvergenceConfig, GrowthConfig, InvarianceConfig,
    TailConfig,
};
use fracgibbs_core::io::{fmt_f64, to_json_pretty};
use fracgibbs_core::measures::{
    classify_growth, lambda_k, partition_stability, sample_gibbs, weighted_estimate, write_lambda_csv,
    write_samples, Ensemble, EnsembleReport, MeasureConfig, Observable, ZeroMode,
};
use fracgibbs_core::spectral::{hamiltonian, mass};
use fracgibbs_core::{Gamma, ModelParams};
use serde::Serialize;

use crate::config::{read_config, List, Resolver};
use crate::init::InitSpec;
use crate::{
    CliError, Common, ConvergeArgs, EvolveArgs, FlowArgs, GrowthArgs, InvarianceArgs, LambdaArgs, MeasureArgs,
    Outcome, PartitionArgs, SampleArgs, TailsArgs,
};

type Result<T> = std::result::Result<T, CliError>;

/// Used when `--alpha` is omitted (except by `evolve`, which requires it).
const DEFAULT_ALPHA: f64 = 0.75;

struct Ctx {
    name: &'static str,
    r: Resolver,
    out: PathBuf,
    workers: usize,
}

impl Ctx {
    fn new(name: &'static str, common: &Common) -> Result<Self> {
        let file = match &common.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        let mut r = Resolver::new(file);
        let out = match &common.out {
            Some(p) => p.clone(),
            None => PathBuf::from(r.raw("out").unwrap_or_else(|| "out".into())),
        };
        let workers = match common.workers {
            Some(w) => w,
            None => match r.raw("workers") {
                Some(w) => w
                    .parse()
                    .map_err(|_| CliError::Config(format!("config key `workers` = `{w}`: not a count")))?,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if workers == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        Ok(Self { name, r, out, workers })
    }

    fn ensemble(&mut self, common: &Common) -> Result<Ensemble> {
        let seed = self.r.or("seed", common.seed, 0u64)?;
        Ok(Ensemble::new(seed).with_workers(self.workers))
    }

    fn params(&mut self, common: &Common, alpha_required: bool, default_modes: Option<usize>) -> Result<ModelParams> {
        let alpha = if alpha_required {
            self.r.require("alpha", common.alpha)?
        } else {
            self.r.or("alpha", common.alpha, DEFAULT_ALPHA)?
        };
        let gamma = self.r.or("gamma", common.gamma, Gamma::Defocusing)?;
        let modes = match default_modes {
            Some(d) => self.r.or("modes", common.modes, d)?,
            None => self.r.require("modes", common.modes)?,
        };
        let s = self.r.or("s", common.s, 0.0)?;
        Ok(ModelParams::new(alpha, gamma, modes, s)?)
    }

    fn measure(&mut self, params: ModelParams, args: &MeasureArgs) -> Result<MeasureConfig> {
        self.measure_with(params, args, None)
    }

    /// Flow experiments default to sampling `u_0`: the pinned slice
    /// `u_0 = 0` is not invariant.
    fn flow_measure(&mut self, params: ModelParams, args: &MeasureArgs) -> Result<MeasureConfig> {
        let cfg = self.measure_with(params, args, Some(ZeroMode::GaussianProposal { sigma0: 1.0 }))?;
        if cfg.zero_mode == ZeroMode::Pinned {
            eprintln!("warning: the pinned zero mode is not preserved by the flow; expect abs2_mode_0 to drift");
        }
        Ok(cfg)
    }

    fn measure_with(&mut self, params: ModelParams, args: &MeasureArgs, zero_default: Option<ZeroMode>) -> Result<MeasureConfig> {
        let base = MeasureConfig::new(params);
        let method = self.r.or("method", args.method, base.method)?;
        let zero_mode = self.r.or("zero-mode", args.zero_mode, zero_default.unwrap_or(base.zero_mode))?;
        let cutoff = match self.r.get("cutoff", args.cutoff)? {
            Some(b) => Some(b),
            None => base.l2_cutoff.map(|b| self.r.or("cutoff", None, b)).transpose()?,
        };
        let cfg = base.with_method(method).with_zero_mode(zero_mode).with_cutoff(cutoff);
        cfg.validate()?;
        Ok(cfg)
    }

    fn integrator(&mut self, params: &ModelParams, flow: &FlowArgs, default: Scheme) -> Result<IntegratorConfig> {
        let scheme = self.r.or("scheme", flow.scheme, default)?;
        let dt = self.r.or("dt", flow.dt, params.default_dt())?;
        let cfg = IntegratorConfig::new(scheme, dt);
        cfg.validate()?;
        Ok(cfg)
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.out.join(format!("{}{suffix}", self.name))
    }

    fn create(&self, suffix: &str) -> Result<BufWriter<File>> {
        let path = self.path(suffix);
        let file = File::create(&path).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(BufWriter::new(file))
    }

    /// Ends resolution: warns about stray config keys and creates the output
    /// directory with the re-runnable `<name>.config`.
    fn start(&mut self) -> Result<()> {
        for key in self.r.unused_keys() {
            eprintln!("warning: config key `{key}` is not used by {}", self.name);
        }
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", self.out.display())))?;
        let mut w = self.create(".config")?;
        for (k, v) in self.r.resolved() {
            writeln!(w, "{k} = {v}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// `<name>.json`: `{"run_config": {...}, "report": {...}}`.
    fn write_json<T: Serialize>(&self, report: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Artifact<'a, T> {
            run_config: &'a BTreeMap<String, String>,
            report: &'a T,
        }
        let text = to_json_pretty(&Artifact {
            run_config: self.r.resolved(),
            report,
        })?;
        let mut w = self.create(".json")?;
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    fn write_csv(&self, f: impl FnOnce(&mut BufWriter<File>) -> fracgibbs_core::Result<()>) -> Result<()> {
        let mut w = self.create(".csv")?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn warn_all(advisories: impl IntoIterator<Item = String>) {
    for a in advisories {
        eprintln!("warning: {a}");
    }
}

pub fn evolve(a: EvolveArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("evolve", &a.common)?;
    let init_text: String = ctx.r.require("init", a.init.clone())?;
    let spec = InitSpec::parse(&init_text)?;
    let alpha = ctx.r.require("alpha", a.common.alpha)?;
    let modes = ctx.r.get("modes", a.common.modes)?;
    let (state, file_alpha) = spec.build(modes)?;
    if let Some(fa) = file_alpha {
        if fa != alpha {
            eprintln!("warning: initial state was written for alpha = {fa}, evolving with alpha = {alpha}");
        }
    }
    if modes.is_none() {
        ctx.r.or("modes", None, state.n_modes())?;
    }
    let gamma = ctx.r.or("gamma", a.common.gamma, Gamma::Defocusing)?;
    let s = ctx.r.or("s", a.common.s, 0.0)?;
    let params = ModelParams::new(alpha, gamma, state.n_modes(), s)?;
    let time = ctx.r.require("time", a.flow.time)?;
    let integrator = ctx.integrator(&params, &a.flow, Scheme::Strang)?;
    let record_every = ctx.r.or("record-every", a.record_every, 1usize)?;
    let sigmas = ctx.r.or("log-sigmas", a.log_sigmas.clone(), List(vec![s]))?;
    let integrator = integrator.record_every(record_every).log_sigmas(sigmas.0);
    integrator.validate()?;
    warn_all(integrator.advisories(&params));
    ctx.start()?;

    let (final_state, log) = Evolver::new(params, integrator.clone())?.evolve(&state, time)?;
    ctx.write_csv(|w| log.write_csv(w))?;
    let mut w = ctx.create("_final_state.json")?;
    final_state.write_json(alpha, &mut w)?;
    w.flush()?;

    #[derive(Serialize)]
    struct Summary {
        time: f64,
        rows: usize,
        initial_mass: f64,
        initial_hamiltonian: f64,
        relative_mass_drift: f64,
        hamiltonian_drift: f64,
        final_mass: f64,
        final_hamiltonian: f64,
    }
    let summary = Summary {
        time,
        rows: log.rows.len(),
        initial_mass: mass(&state),
        initial_hamiltonian: hamiltonian(&state, &params)?,
        relative_mass_drift: log.relative_mass_drift(),
        hamiltonian_drift: log.hamiltonian_drift(),
        final_mass: mass(&final_state),
        final_hamiltonian: hamiltonian(&final_state, &params)?,
    };
    ctx.write_json(&summary)?;
    Ok(Outcome {
        summary: format!(
            "evolve: T={} N={} scheme={} rows={} relative_mass_drift={} hamiltonian_drift={}",
            time,
            params.n_modes,
            integrator.scheme,
            summary.rows,
            fmt_f64(summary.relative_mass_drift),
            fmt_f64(summary.hamiltonian_drift)
        ),
        passed: true,
    })
}

pub fn sample(a: SampleArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("sample", &a.common)?;
    let params = ctx.params(&a.common, false, Some(8))?;
    let measure = ctx.measure(params, &a.measure)?;
    let count = ctx.r.or("count", a.measure.count, 1000usize)?;
    let ensemble = ctx.ensemble(&a.common)?;
    ctx.start()?;

    let set = sample_gibbs(&measure, &ensemble, count)?;
    let mut w = ctx.create(".jsonl")?;
    write_samples(&set.samples, &mut w)?;
    w.flush()?;

    let lw = set.log_weights();
    let mut ws = fracgibbs_core::transform::SpectralWorkspace::new(params.n_modes);
    let mut estimates = EnsembleReport::new();
    for obs in Observable::default_set(&params).into_iter().chain([Observable::Hamiltonian]) {
        let values: Vec<f64> = set.samples.iter().map(|s| obs.eval(&s.state, &params, &mut ws)).collect();
        estimates.insert(obs.to_string(), weighted_estimate(&values, &lw)?);
    }

    #[derive(Serialize)]
    struct Report<'a> {
        measure: &'a MeasureConfig,
        master_seed: u64,
        count: usize,
        draws: u64,
        acceptance_rate: f64,
        estimates: &'a EnsembleReport,
    }
    ctx.write_json(&Report {
        measure: &measure,
        master_seed: ensemble.master_seed,
        count,
        draws: set.draws,
        acceptance_rate: set.acceptance_rate(),
        estimates: &estimates,
    })?;
    ctx.write_csv(|w| {
        writeln!(w, "observable,estimate,std_error,n_samples,ess")?;
        for (name, e) in &estimates {
            writeln!(w, "{name},{},{},{},{}", fmt_f64(e.estimate), fmt_f64(e.std_error), e.n_samples, fmt_f64(e.ess))?;
        }
        Ok(())
    })?;
    let q = &estimates["quartic"];
    Ok(Outcome {
        summary: format!(
            "sample: count={count} draws={} acceptance={} quartic={} ± {} ess={}",
            set.draws,
            fmt_f64(set.acceptance_rate()),
            fmt_f64(q.estimate),
            fmt_f64(q.std_error),
            fmt_f64(q.ess)
        ),
        passed: true,
    })
}

pub fn invariance(a: InvarianceArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("invariance", &a.common)?;
    let params = ctx.params(&a.common, false, Some(8))?;
    let measure = ctx.flow_measure(params, &a.measure)?;
    let count = ctx.r.or("count", a.measure.count, 10_000usize)?;
    let time = ctx.r.or("time", a.flow.time, 1.0)?;
    let integrator = ctx.integrator(&params, &a.flow, Scheme::Strang)?;
    let observables = ctx.r.or(
        "observables",
        a.observables.clone(),
        List(Observable::default_set(&params)),
    )?;
    let doubling = ctx.r.or("double", a.double.then_some(true), false)?;
    let ensemble = ctx.ensemble(&a.common)?;
    let mut config = InvarianceConfig::new(measure, integrator, time, count);
    config.observables = observables.0;
    config.doubling = doubling;
    config.validate()?;
    warn_all(config.integrator.advisories(&params));
    ctx.start()?;

    let report = invariance_test(&config, &ensemble)?;
    ctx.write_json(&report)?;
    ctx.write_csv(|w| report.write_csv(w))?;
    if report.run.underpowered {
        eprintln!("warning: effective sample size {} is below 30", report.run.ess);
    }
    let zs: Vec<String> = report
        .run
        .observables
        .iter()
        .map(|o| {
            if o.pathwise_conserved {
                format!("{}=drift:{:.1e}", o.name, o.max_relative_drift)
            } else {
                format!("{}={:.2}", o.name, o.z_score)
            }
        })
        .collect();
    Ok(Outcome {
        summary: format!(
            "invariance: {} T={time} N={} count={count} ess={:.1} max|z|={:.3} z: {}",
            if report.passes() { "pass" } else { "FAIL" },
            params.n_modes,
            report.run.ess,
            report.run.max_abs_z(),
            zs.join(" ")
        ),
        passed: report.passes(),
    })
}

pub fn tails(a: TailsArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("tails", &a.common)?;
    let params = ctx.params(&a.common, false, Some(32))?;
    let measure = ctx.measure(params, &a.measure)?;
    let count = ctx.r.or("count", a.measure.count, 100_000usize)?;
    let k_grid = ctx.r.or(
        "k-grid",
        a.k_grid.clone(),
        List(vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]),
    )?;
    let ensemble = ctx.ensemble(&a.common)?;
    let config = TailConfig {
        measure,
        k_grid: k_grid.0,
        count,
    };
    config.validate()?;
    ctx.start()?;

    let report = tail_test(&config, &ensemble)?;
    ctx.write_json(&report)?;
    ctx.write_csv(|w| report.write_csv(w))?;
    Ok(Outcome {
        summary: format!(
            "tails: {} C={} bound_holds={} monotone={} log_concave={}",
            if report.passes() { "pass" } else { "FAIL" },
            fmt_f64(report.fitted_c),
            report.bound_holds,
            report.monotone,
            report.log_concave
        ),
        passed: report.passes(),
    })
}

pub fn converge(a: ConvergeArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("converge", &a.common)?;
    let alpha = ctx.r.or("alpha", a.common.alpha, DEFAULT_ALPHA)?;
    let gamma = ctx.r.or("gamma", a.common.gamma, Gamma::Defocusing)?;
    let s = ctx.r.require("s", a.common.s)?;
    let s_prime = ctx.r.require("s-prime", a.s_prime)?;
    let n_list = ctx.r.or("n-list", a.n_list.clone(), List(vec![8, 16, 32, 64]))?;
    let max = n_list.0.iter().copied().max().unwrap_or(1);
    let n_ref = ctx.r.or("n-ref", a.n_ref, 4 * max)?;
    let time = ctx.r.or("time", a.flow.time, 0.5)?;
    let delta = ctx.r.or("delta", a.delta, 0.01)?;
    let seed = ctx.r.or("seed", a.common.seed, 0u64)?;
    let params = ModelParams::new(alpha, gamma, n_ref, s)?;
    let integrator = ctx.integrator(&params, &a.flow, Scheme::Rk4)?;
    let mut config = ConvergenceConfig::new(params, s_prime, n_list.0, n_ref, time, seed);
    config.integrator = integrator;
    config.delta = delta;
    config.validate()?;
    warn_all(config.advisories());
    ctx.start()?;

    let table = convergence_study(&config, &Ensemble::new(seed).with_workers(ctx.workers))?;
    ctx.write_json(&table)?;
    ctx.write_csv(|w| table.write_csv(w))?;
    Ok(Outcome {
        summary: format!(
            "converge: slope={} expected={} residual={}",
            fmt_f64(table.slope),
            fmt_f64(s_prime - s),
            fmt_f64(table.residual)
        ),
        passed: true,
    })
}

pub fn lambda(a: LambdaArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("lambda", &a.common)?;
    let alpha = ctx.r.or("alpha", a.common.alpha, DEFAULT_ALPHA)?;
    let s = ctx.r.or("s", a.common.s, 0.0)?;
    let k_max = ctx.r.or("k-max", a.k_max, 1_000_000usize)?;
    let stride = ctx.r.or("csv-stride", a.csv_stride, (k_max / 10_000).max(1))?;
    ctx.start()?;

    let lambdas = lambda_k(alpha, s, k_max)?;
    let fit = classify_growth(&lambdas).ok();
    #[derive(Serialize)]
    struct Report {
        alpha: f64,
        s: f64,
        k_max: usize,
        lambda_k_max: f64,
        critical_s: f64,
        fit: Option<fracgibbs_core::measures::GrowthFit>,
    }
    let last = *lambdas.last().expect("k_max >= 1");
    ctx.write_json(&Report {
        alpha,
        s,
        k_max,
        lambda_k_max: last,
        critical_s: alpha - 0.5,
        fit,
    })?;
    ctx.write_csv(|w| write_lambda_csv(&lambdas, stride, w))?;
    let class = fit.map_or("unclassified".to_string(), |f| {
        format!("{} exponent={}", serde_json::to_string(&f.class).unwrap_or_default().trim_matches('"'), fmt_f64(f.exponent))
    });
    Ok(Outcome {
        summary: format!("lambda: k={k_max} lambda_k={} {class}", fmt_f64(last)),
        passed: true,
    })
}

pub fn partition(a: PartitionArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("partition", &a.common)?;
    let n_list = ctx.r.or("n-list", a.n_list.clone(), List(vec![8, 16, 32, 64]))?;
    let first = n_list.0.first().copied().unwrap_or(1);
    let params = ctx.params(&a.common, false, Some(first))?;
    let mut measure = ctx.measure(params, &a.measure)?;
    // Z_N is a plain proposal average whatever the sampler.
    measure.method = fracgibbs_core::measures::SamplingMethod::Importance;
    let count = ctx.r.or("count", a.measure.count, 100_000usize)?;
    let ensemble = ctx.ensemble(&a.common)?;
    ctx.start()?;

    let table = partition_stability(&measure, &n_list.0, count, &ensemble)?;
    #[derive(Serialize)]
    struct Report<'a> {
        measure: &'a MeasureConfig,
        master_seed: u64,
        count: usize,
        table: &'a fracgibbs_core::measures::PartitionTable,
        no_growth: bool,
    }
    ctx.write_json(&Report {
        measure: &measure,
        master_seed: ensemble.master_seed,
        count,
        table: &table,
        no_growth: table.no_growth(),
    })?;
    ctx.write_csv(|w| table.write_csv(w))?;
    for r in table.rows.iter().filter(|r| r.degenerate) {
        eprintln!("warning: N = {} has effective sample size {:.1}", r.n_modes, r.ess);
    }
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("Z_{}={}±{}", r.n_modes, fmt_f64(r.z), fmt_f64(r.std_error)))
        .collect();
    Ok(Outcome {
        summary: format!(
            "partition: {} max_z={:.3} {}",
            if table.no_growth() { "pass" } else { "FAIL" },
            table.max_z_score,
            rows.join(" ")
        ),
        passed: table.no_growth(),
    })
}

pub fn growth(a: GrowthArgs) -> Result<Outcome> {
    let mut ctx = Ctx::new("growth", &a.common)?;
    let params = ctx.params(&a.common, false, Some(16))?;
    let measure = ctx.flow_measure(params, &a.measure)?;
    let count = ctx.r.or("count", a.measure.count, 1000usize)?;
    let flow = FlowArgs {
        time: None,
        dt: a.dt,
        scheme: a.scheme,
    };
    let integrator = ctx.integrator(&params, &flow, Scheme::Strang)?;
    let checkpoints = ctx.r.or(
        "checkpoints",
        a.checkpoints.clone(),
        List(vec![0.0, 1.0, 3.0, 10.0, 30.0, 100.0]),
    )?;
    let sigma = ctx.r.or("sigma", a.sigma, 0.2)?;
    let ensemble = ctx.ensemble(&a.common)?;
    let config = GrowthConfig {
        measure,
        integrator,
        checkpoints: checkpoints.0,
        count,
        sigma,
    };
    config.validate()?;
    ctx.start()?;

    let report = norm_growth(&config, &ensemble)?;
    ctx.write_json(&report)?;
    ctx.write_csv(|w| report.write_csv(w))?;
    if report.aborted > 0 {
        eprintln!("warning: {} trajectories aborted; table truncated", report.aborted);
    }
    let (first, last) = (report.rows.first(), report.rows.last());
    Ok(Outcome {
        summary: format!(
            "growth: rows={} q99(t0)={} q99(t_end)={} sqrt_log_preferred={}",
            report.rows.len(),
            first.map_or("nan".into(), |r| fmt_f64(r.quantiles[2])),
            last.map_or("nan".into(), |r| fmt_f64(r.quantiles[2])),
            report.sqrt_log_preferred()
        ),
        passed: report.aborted == 0,
    })
}

