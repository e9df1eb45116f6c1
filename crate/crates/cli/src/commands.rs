use std::path::Path;

use nlwave::experiments::{
    blowup_initial_data, blowup_refinement_study, blowup_study, convergence_study, decay_check,
    domain_study, run_bound_suite, self_convergence_study, solitary_exact, solitary_initial_data,
    ConvergenceReport, DecayOptions, Setup, SolitaryWave, TAIL_TOLERANCE,
};
use nlwave::integrator::integrate_with_outputs;
use nlwave::kernels::{parse_table, second_difference_weights, Support};
use nlwave::semidiscrete::{nonlinearity_power, nonlinearity_quadratic};
use nlwave::{Grid, Kernel, Nonlinearity, Problem, ProblemOptions, Status};

use crate::config::{Command, InitialData, KernelSpec, NonlinearitySpec, RunConfig};
use crate::output::{Cell, Report, Table};
use crate::CliError;

// Stencil reach in x units for the kernel weight checks.
const STENCIL_REACH: f64 = 200.0;

/// How a command finished, mapped to the process exit code in `main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Blowup,
    Violation,
    /// Output was written but the run stopped early.
    Stalled,
}

pub struct Execution {
    pub report: Report,
    pub trace: Option<Report>,
    /// One-line summaries for stderr.
    pub summary: Vec<String>,
    pub verdict: Verdict,
}

type Profile = Box<dyn Fn(f64) -> f64 + Sync + Send>;

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn read_table(path: &Path, field: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    parse_table(&read_text(path)?)
        .map_err(|e| CliError::Config(format!("field '{field}': {}: {e}", path.display())))
}

pub fn build_kernel(spec: &KernelSpec) -> Result<Kernel, CliError> {
    match spec {
        KernelSpec::Builtin(k) => Ok(k.kernel()),
        KernelSpec::Table(path) => {
            let (xs, ys) = read_table(path, "kernel.table")?;
            let name = path.file_stem().map_or("table".into(), |s| s.to_string_lossy().into_owned());
            Kernel::from_table(&name, xs, ys).map_err(|e| CliError::Config(format!("field 'kernel.table': {e}")))
        }
    }
}

fn build_nonlinearity(spec: NonlinearitySpec) -> Result<Nonlinearity, CliError> {
    match spec {
        NonlinearitySpec::Quadratic => Ok(nonlinearity_quadratic()),
        NonlinearitySpec::Power(p) => {
            nonlinearity_power(p).map_err(|e| CliError::Config(format!("field 'nonlinearity.p': {e}")))
        }
    }
}

/// Linear interpolation through a table, zero outside it.
fn interpolant(xs: Vec<f64>, ys: Vec<f64>, field: &str) -> Result<Profile, CliError> {
    if xs.is_empty() || xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Config(format!(
            "field '{field}': table needs strictly increasing abscissae"
        )));
    }
    Ok(Box::new(move |x| {
        let n = xs.len();
        if x < xs[0] || x > xs[n - 1] {
            return 0.0;
        }
        if n == 1 {
            return ys[0];
        }
        let j = xs.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1) = (xs[j - 1], xs[j]);
        ys[j - 1] + (ys[j] - ys[j - 1]) * (x - x0) / (x1 - x0)
    }))
}

fn solitary_wave(c: f64, x0: f64) -> Result<SolitaryWave, CliError> {
    SolitaryWave::new(c, x0).map_err(|e| CliError::Config(format!("field 'solitary.c': {e}")))
}

fn initial_profiles(initial: &InitialData) -> Result<(Profile, Profile), CliError> {
    match initial {
        InitialData::Solitary { c, x0 } => {
            let (phi, psi) = solitary_initial_data(&solitary_wave(*c, *x0)?);
            Ok((Box::new(phi), Box::new(psi)))
        }
        InitialData::BlowupGaussian => {
            let (phi, psi) = blowup_initial_data();
            Ok((Box::new(phi), Box::new(psi)))
        }
        InitialData::Table { phi, psi } => {
            let (xs, ys) = read_table(phi, "initial_data.phi_file")?;
            let phi = interpolant(xs, ys, "initial_data.phi_file")?;
            let psi = match psi {
                Some(p) => {
                    let (xs, ys) = read_table(p, "initial_data.psi_file")?;
                    interpolant(xs, ys, "initial_data.psi_file")?
                }
                None => Box::new(|_| 0.0),
            };
            Ok((phi, psi))
        }
    }
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    Ok(Setup {
        kernel: build_kernel(&cfg.kernel)?,
        nonlinearity: build_nonlinearity(cfg.nonlinearity)?,
        integrator: cfg.integrator.clone(),
        options: ProblemOptions {
            path: cfg.path,
            cutoff: cfg.cutoff,
        },
    })
}

fn grid(cfg: &RunConfig) -> Result<Grid, CliError> {
    Grid::from_interval(cfg.grid.h, cfg.grid.x_left, cfg.grid.x_right)
        .map_err(|e| CliError::Config(format!("field 'grid.h': {e}")))
}

fn report(cfg: &RunConfig, metadata: Vec<(String, Cell)>, table: Table) -> Report {
    Report {
        command: cfg.command.name().to_string(),
        config: cfg.to_flat(),
        metadata,
        table,
    }
}

fn meta(key: &str, value: impl Into<Cell>) -> (String, Cell) {
    (key.to_string(), value.into())
}

fn require_blowup_preset(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.initial != InitialData::BlowupGaussian {
        return Err(CliError::Config(format!(
            "field 'initial_data.preset': {} needs the blowup-gaussian preset, got {}",
            cfg.command.name(),
            cfg.initial.preset()
        )));
    }
    Ok(())
}

fn require_solitary(cfg: &RunConfig) -> Result<SolitaryWave, CliError> {
    match cfg.initial {
        InitialData::Solitary { c, x0 } => solitary_wave(c, x0),
        _ => Err(CliError::Config(format!(
            "field 'initial_data.preset': {} needs the solitary preset, got {}",
            cfg.command.name(),
            cfg.initial.preset()
        ))),
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Execution, CliError> {
    match cfg.command {
        Command::Run => run(cfg),
        Command::Converge => converge(cfg),
        Command::DomainStudy => domain(cfg),
        Command::Blowup => blowup(cfg),
        Command::BlowupRefine => blowup_refine(cfg),
        Command::Decay => decay(cfg),
        Command::KernelInfo => kernel_info(cfg),
        Command::LemmaCheck => lemma_check(cfg),
    }
}

fn status_verdict(status: Status) -> Verdict {
    match status {
        Status::Completed => Verdict::Ok,
        Status::BlowupDetected => Verdict::Blowup,
        Status::StepUnderflow => Verdict::Stalled,
    }
}

fn blowup_summary(label: &str, t_star: Option<f64>, crossing: Option<f64>) -> String {
    let show = |t: Option<f64>| t.map_or("none".to_string(), |t| format!("{t:.6}"));
    format!("blow-up detected for {label}: t* = {} (threshold crossed at {})", show(t_star), show(crossing))
}

fn run(cfg: &RunConfig) -> Result<Execution, CliError> {
    let setup = setup(cfg)?;
    let grid = grid(cfg)?;
    let (phi, psi) = initial_profiles(&cfg.initial)?;
    let problem = Problem::from_functions(&setup.kernel, setup.nonlinearity.clone(), grid, &phi, &psi, setup.options)?;

    let t_end = cfg.integrator.t_end;
    let mut times: Vec<f64> = cfg.output.times.iter().copied().filter(|t| (0.0..=t_end).contains(t)).collect();
    times.push(t_end);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let out = integrate_with_outputs(&problem, &cfg.integrator, &times)?;

    let exact = match cfg.initial {
        InitialData::Solitary { c, x0 } => Some(solitary_wave(c, x0)?),
        _ => None,
    };
    let mut columns = vec!["t", "x", "u", "u_t"];
    if exact.is_some() {
        columns.push("exact");
    }
    let mut table = Table::new(&columns);
    for snap in &out.snapshots {
        for ((x, u), ut) in grid.points().zip(snap.v.values()).zip(snap.w.values()) {
            let mut row: Vec<Cell> = vec![snap.t.into(), x.into(), (*u).into(), (*ut).into()];
            if let Some(w) = &exact {
                row.push(solitary_exact(w, x, snap.t).into());
            }
            table.push(row);
        }
    }
    let metadata = vec![
        meta("status", out.status.to_string()),
        meta("t_final", out.final_state.t),
        meta("blowup_time", out.blowup_time_estimate),
        meta("crossing_time", out.threshold_crossing_time),
        meta("steps_accepted", out.stats.accepted),
        meta("steps_rejected", out.stats.rejected),
        meta("rhs_evals", out.stats.rhs_evals),
        meta("grid_points", grid.len()),
    ];
    let mut trace_table = Table::new(&["t", "linf_u"]);
    for p in &out.trace {
        trace_table.push(vec![p.t.into(), p.linf.into()]);
    }
    let trace = report(cfg, metadata.clone(), trace_table);

    let mut summary = Vec::new();
    match out.status {
        Status::BlowupDetected => summary.push(blowup_summary(
            setup.kernel.name(),
            out.blowup_time_estimate,
            out.threshold_crossing_time,
        )),
        Status::StepUnderflow => summary.push(format!("step size underflow at t = {}", out.final_state.t)),
        Status::Completed => {}
    }
    Ok(Execution {
        report: report(cfg, metadata, table),
        trace: Some(trace),
        summary,
        verdict: status_verdict(out.status),
    })
}

fn convergence_table(rep: &ConvergenceReport) -> Table {
    let mut table = Table::new(&["h", "N", "E", "order"]);
    for r in &rep.rows {
        table.push(vec![r.h.into(), r.n.into(), r.error.into(), r.rate.into()]);
    }
    table
}

fn converge(cfg: &RunConfig) -> Result<Execution, CliError> {
    let setup = setup(cfg)?;
    let domain = (cfg.grid.x_left, cfg.grid.x_right);
    let (rep, reference) = match &cfg.initial {
        InitialData::Solitary { c, x0 } => {
            let wave = solitary_wave(*c, *x0)?;
            (convergence_study(&setup, domain, &cfg.study.h_list, &cfg.study.times, &wave)?, "exact")
        }
        other => {
            let (phi, psi) = initial_profiles(other)?;
            (
                self_convergence_study(&setup, domain, &cfg.study.h_list, &cfg.study.times, &phi, &psi)?,
                "refined",
            )
        }
    };
    let metadata = vec![meta("reference", reference)];
    Ok(Execution {
        report: report(cfg, metadata, convergence_table(&rep)),
        trace: None,
        summary: Vec::new(),
        verdict: Verdict::Ok,
    })
}

fn domain(cfg: &RunConfig) -> Result<Execution, CliError> {
    let wave = require_solitary(cfg)?;
    let rep = domain_study(&setup(cfg)?, &cfg.study.n_list, cfg.grid.h, &cfg.study.times, &wave)?;
    let time_cols: Vec<String> = rep.times.iter().map(|t| format!("E(t={t})")).collect();
    let mut columns: Vec<&str> = vec!["N"];
    columns.extend(time_cols.iter().map(String::as_str));
    columns.extend(["max", "status"]);
    let mut table = Table::new(&columns);
    let mut verdict = Verdict::Ok;
    let mut summary = Vec::new();
    for r in &rep.rows {
        let mut row: Vec<Cell> = vec![r.n.into()];
        row.extend(r.errors.iter().map(|&e| Cell::from(e)));
        row.push(r.max.into());
        row.push(r.status.to_string().into());
        table.push(row);
        if r.status != Status::Completed {
            summary.push(format!("N = {} stopped with status {}", r.n, r.status));
            verdict = verdict.max_with(status_verdict(r.status));
        }
    }
    Ok(Execution {
        report: report(cfg, vec![meta("h", rep.h)], table),
        trace: None,
        summary,
        verdict,
    })
}

impl Verdict {
    /// Runtime stalls outrank blow-ups, which outrank success.
    fn max_with(self, other: Verdict) -> Verdict {
        let rank = |v: Verdict| match v {
            Verdict::Ok => 0,
            Verdict::Blowup => 1,
            Verdict::Violation => 2,
            Verdict::Stalled => 3,
        };
        if rank(other) > rank(self) { other } else { self }
    }
}

fn blowup(cfg: &RunConfig) -> Result<Execution, CliError> {
    require_blowup_preset(cfg)?;
    let base = setup(cfg)?;
    let grid = grid(cfg)?;
    let kernels: Vec<Kernel> = match &cfg.kernel {
        KernelSpec::Table(_) => vec![base.kernel.clone()],
        KernelSpec::Builtin(_) => cfg.study.kernels.iter().map(|k| k.kernel()).collect(),
    };
    let thresholds = if cfg.study.thresholds.is_empty() {
        vec![cfg.integrator.blowup_threshold]
    } else {
        cfg.study.thresholds.clone()
    };
    let mut table = Table::new(&["kernel", "threshold", "status", "t_star", "crossing_time"]);
    let mut trace = Table::new(&["kernel", "threshold", "t", "linf_u"]);
    let mut summary = Vec::new();
    let mut verdict = Verdict::Ok;
    for &m in &thresholds {
        let mut s = base.clone();
        s.integrator.blowup_threshold = m;
        let rep = blowup_study(&s, &kernels, grid)?;
        for r in &rep.rows {
            table.push(vec![
                r.kernel.as_str().into(),
                m.into(),
                r.status.to_string().into(),
                r.blowup_time.into(),
                r.crossing_time.into(),
            ]);
            for p in &r.trace {
                trace.push(vec![r.kernel.as_str().into(), m.into(), p.t.into(), p.linf.into()]);
            }
            if r.status == Status::BlowupDetected {
                summary.push(blowup_summary(&format!("{} (M = {m:e})", r.kernel), r.blowup_time, r.crossing_time));
            }
            verdict = verdict.max_with(status_verdict(r.status));
        }
    }
    let metadata = vec![meta("h", grid.h()), meta("x_left", grid.x_left()), meta("x_right", grid.x_right())];
    Ok(Execution {
        report: report(cfg, metadata.clone(), table),
        trace: Some(report(cfg, metadata, trace)),
        summary,
        verdict,
    })
}

fn blowup_refine(cfg: &RunConfig) -> Result<Execution, CliError> {
    require_blowup_preset(cfg)?;
    let rep = blowup_refinement_study(&setup(cfg)?, &cfg.study.n_list, cfg.study.half_width)?;
    let mut table = Table::new(&["N", "h", "status", "t_star", "crossing_time"]);
    let mut trace = Table::new(&["N", "t", "linf_u"]);
    let mut verdict = Verdict::Ok;
    let mut summary = Vec::new();
    for r in &rep.rows {
        table.push(vec![
            r.n.into(),
            r.h.into(),
            r.status.to_string().into(),
            r.blowup_time.into(),
            r.crossing_time.into(),
        ]);
        for p in &r.trace {
            trace.push(vec![r.n.into(), p.t.into(), p.linf.into()]);
        }
        if r.status == Status::BlowupDetected {
            summary.push(blowup_summary(&format!("N = {}", r.n), r.blowup_time, r.crossing_time));
        }
        verdict = verdict.max_with(status_verdict(r.status));
    }
    let metadata = vec![meta("half_width", rep.half_width)];
    Ok(Execution {
        report: report(cfg, metadata.clone(), table),
        trace: Some(report(cfg, metadata, trace)),
        summary,
        verdict,
    })
}

fn decay(cfg: &RunConfig) -> Result<Execution, CliError> {
    let setup = setup(cfg)?;
    let grid = grid(cfg)?;
    let r = match (cfg.decay.r, &cfg.initial) {
        (Some(r), _) => r,
        (None, InitialData::Solitary { c, x0 }) => 0.9 * 1f64.min(2.0 * solitary_wave(*c, *x0)?.width()),
        (None, _) => return Err(CliError::Config("missing required field 'decay.r'".into())),
    };
    let (phi, psi) = initial_profiles(&cfg.initial)?;
    let problem = setup.problem(grid, &phi, &psi)?;
    let opts = DecayOptions {
        r,
        times: cfg.decay.times.clone(),
        band: cfg.decay.band,
    };
    let rep = decay_check(&problem, &cfg.integrator, &opts)?;
    let mut table = Table::new(&[
        "r",
        "C",
        "displacement_c",
        "velocity_c",
        "kappa",
        "observed_kappa",
        "max_amplitude",
        "samples",
        "violations",
    ]);
    table.push(vec![
        rep.r.into(),
        rep.fitted_c.into(),
        rep.displacement_c.into(),
        rep.velocity_c.into(),
        rep.kappa.into(),
        rep.observed_kappa.into(),
        rep.max_amplitude.into(),
        rep.samples.into(),
        rep.violations.into(),
    ]);
    let verdict = if rep.violations > 0 { Verdict::Violation } else { Verdict::Ok };
    let summary = if rep.violations > 0 {
        vec![format!("decay envelope violated at {} of {} samples", rep.violations, rep.samples)]
    } else {
        Vec::new()
    };
    Ok(Execution {
        report: report(cfg, Vec::new(), table),
        trace: None,
        summary,
        verdict,
    })
}

fn kernel_info(cfg: &RunConfig) -> Result<Execution, CliError> {
    let kernel = build_kernel(&cfg.kernel)?;
    let tail = match kernel.support() {
        Support::Compact(_) => 0.0,
        Support::Unbounded => TAIL_TOLERANCE,
    };
    let bound = 2.0 * kernel.tv_mass() + tail;
    let mut table = Table::new(&["h", "K", "grid_mass", "row_sum", "abs_sum", "bound", "passed"]);
    let mut failures = 0;
    for &h in &cfg.study.h_list {
        let half_width = (STENCIL_REACH / h).ceil() as usize;
        let w = second_difference_weights(&kernel, h, half_width)
            .map_err(|e| CliError::Config(format!("field 'study.h_list': {e}")))?;
        let passed = w.abs_sum() <= bound * (1.0 + 1e-12);
        failures += usize::from(!passed);
        table.push(vec![
            h.into(),
            half_width.into(),
            kernel.grid_mass(h, STENCIL_REACH).into(),
            w.row_sum().into(),
            w.abs_sum().into(),
            bound.into(),
            passed.into(),
        ]);
    }
    let support = match kernel.support() {
        Support::Compact(r) => format!("compact(radius={})", crate::config::format_float(r)),
        Support::Unbounded => "unbounded".to_string(),
    };
    let metadata = vec![
        meta("kernel", kernel.name()),
        meta("tv_mass", kernel.tv_mass()),
        meta("support", support),
        meta("decay_class", kernel.decay_class().to_string()),
    ];
    let summary = if failures > 0 {
        vec![format!("weight bound violated for {failures} mesh sizes")]
    } else {
        Vec::new()
    };
    Ok(Execution {
        report: report(cfg, metadata, table),
        trace: None,
        summary,
        verdict: if failures > 0 { Verdict::Violation } else { Verdict::Ok },
    })
}

fn lemma_check(cfg: &RunConfig) -> Result<Execution, CliError> {
    let rep = run_bound_suite(&cfg.study.h_list, cfg.lemma_mode);
    let mut table = Table::new(&["check", "function", "h", "measured", "bound", "rate", "passed"]);
    for r in &rep.rows {
        table.push(vec![
            r.check.as_str().into(),
            r.function.as_str().into(),
            r.h.into(),
            r.measured.into(),
            r.bound.into(),
            r.rate.into(),
            r.passed.into(),
        ]);
    }
    let violations = rep.violations();
    let metadata = vec![meta("checks", rep.rows.len()), meta("violations", violations)];
    let summary = vec![format!("{} of {} bound checks hold", rep.rows.len() - violations, rep.rows.len())];
    Ok(Execution {
        report: report(cfg, metadata, table),
        trace: None,
        summary,
        verdict: if violations > 0 { Verdict::Violation } else { Verdict::Ok },
    })
}
