//! The `telechan` command line.
//!
//! Every flag may also be given in a JSON file passed with `--config`, keyed
//! by the long flag name (`"t-range": [0, 100, 201]`). Flags on the
//! command line override the file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use super::critical::{
    find_classical_crossing, find_esd_time, find_fidelity_minimum, find_shrink_minimum, Axis,
    CriticalKind, CriticalOutcome,
};
use super::io::{emit_csv, emit_json, fmt_num, write_mesh_csv};
use super::{bloch_mesh, sweep, ChannelModel, Engine, Quantity, SweepSpec};
use crate::dynamics::{ChannelParams, EnvKind, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::metrics::{concurrence, purity};
use crate::teleport::TeleportReport;

const DEFAULT_GAMMA: f64 = 0.05;
const DEFAULT_N_THETA: usize = 21;
const DEFAULT_N_PHI: usize = 40;

#[derive(Debug, Parser)]
#[command(name = "telechan", version, about = "Teleportation through a decohering two-qubit XY channel")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the channel state at time t.
    Evolve(Opts),
    /// Report fidelity, optimal branch, overlaps, concurrence, purity and shrink factors.
    Teleport(Opts),
    /// Emit a (delta, t) dataset as CSV or JSON.
    Sweep(Opts),
    /// Locate a critical time (--kind classical|fmin|esd|shrinkmin).
    Critical(Opts),
    /// Emit the distorted Bloch sphere as a theta/phi/x/y/z mesh.
    Bloch(Opts),
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
struct Opts {
    /// Initial Bell state index, 0..=3.
    #[arg(long)]
    bell: Option<usize>,
    /// dissipative | noisy | dephasing
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Pauli branch override, 0..=3.
    #[arg(long)]
    m: Option<usize>,
    /// analytic | integrator | both
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// classical | fmin | esd | shrinkmin
    #[arg(long)]
    kind: Option<String>,
    /// x | y | z
    #[arg(long)]
    axis: Option<String>,
    /// Search interval as lo,hi.
    #[arg(long, value_delimiter = ',')]
    bracket: Option<Vec<f64>>,
    /// start,stop,count
    #[arg(long, value_delimiter = ',')]
    t_range: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    t_list: Option<Vec<f64>>,
    /// start,stop,count
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    delta_range: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    delta_list: Option<Vec<f64>>,
    /// Any of F,C,P,chi,shrink,blochcoeff.
    #[arg(long, value_delimiter = ',')]
    quantities: Option<Vec<String>>,
    #[arg(long)]
    n_theta: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
}

macro_rules! overlay {
    ($cli:expr, $file:expr, $($f:ident),*) => {
        Opts { $($f: $cli.$f.or($file.$f),)* config: $cli.config }
    };
}

impl Opts {
    fn merged(self) -> Result<Self> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: Opts = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(overlay!(
            self, file, bell, env, gamma, j, delta, t, m, engine, step, out, format, kind, axis,
            bracket, t_range, t_list, delta_range, delta_list, quantities, n_theta, n_phi
        ))
    }

    fn model(&self) -> Result<ChannelModel> {
        let kind: EnvKind = self.env.as_deref().unwrap_or("dissipative").parse()?;
        let env = EnvironmentSpec::new(kind, self.gamma.unwrap_or(DEFAULT_GAMMA))?;
        let params = ChannelParams::new(self.j.unwrap_or(0.0), self.delta.unwrap_or(0.0))?;
        let engine: Engine = match &self.engine {
            Some(s) => s.parse()?,
            None => Engine::Analytic,
        };
        ChannelModel::new(self.bell.unwrap_or(0), env, params, engine, self.step)
    }

    fn time(&self) -> Result<f64> {
        self.t.ok_or_else(|| Error::InvalidArgument("--t is required".into()))
    }

    fn format(&self) -> Result<Option<Format>> {
        match self.format.as_deref().map(str::to_ascii_lowercase).as_deref() {
            None => Ok(None),
            Some("csv") => Ok(Some(Format::Csv)),
            Some("json") => Ok(Some(Format::Json)),
            Some(f) => Err(Error::InvalidArgument(format!("unknown format '{f}'"))),
        }
    }

    fn bracket(&self) -> Result<Option<(f64, f64)>> {
        match self.bracket.as_deref() {
            None => Ok(None),
            Some([lo, hi]) => Ok(Some((*lo, *hi))),
            Some(b) => Err(Error::InvalidArgument(format!("--bracket needs lo,hi, got {b:?}"))),
        }
    }

    fn grid(name: &str, list: &Option<Vec<f64>>, range: &Option<Vec<f64>>) -> Result<Option<Vec<f64>>> {
        if let Some(l) = list {
            return Ok(Some(l.clone()));
        }
        let Some(r) = range else { return Ok(None) };
        let &[start, stop, n] = r.as_slice() else {
            return Err(Error::InvalidArgument(format!("--{name}-range needs start,stop,count")));
        };
        if !(n >= 1.0 && n.fract() == 0.0) {
            return Err(Error::InvalidArgument(format!("--{name}-range count {n} is not a positive integer")));
        }
        let n = n as usize;
        if n == 1 {
            return Ok(Some(vec![start]));
        }
        Ok(Some((0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()))
    }

    fn sweep_spec(&self) -> Result<SweepSpec> {
        let model = self.model()?;
        let t_grid = match Self::grid("t", &self.t_list, &self.t_range)? {
            Some(g) => g,
            None => vec![self.time().map_err(|_| {
                Error::InvalidArgument("sweep needs --t-list, --t-range or --t".into())
            })?],
        };
        let quantities = match &self.quantities {
            None => Quantity::ALL.to_vec(),
            Some(qs) => {
                let mut v = qs.iter().map(|q| q.trim().parse()).collect::<Result<Vec<Quantity>>>()?;
                v.sort();
                v.dedup();
                v
            }
        };
        Ok(SweepSpec {
            initial_bell: model.initial_bell,
            env: model.env,
            params: model.params,
            t_grid,
            delta_grid: Self::grid("delta", &self.delta_list, &self.delta_range)?,
            engine: model.engine,
            quantities,
            m: self.m,
            step: self.step,
        })
    }
}

type Handler = fn(&Opts, &mut dyn Write) -> Result<()>;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

fn with_output(path: &Option<PathBuf>, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(create(p)?);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn create(p: &Path) -> Result<File> {
    File::create(p).map_err(|e| Error::Config(format!("cannot create {}: {e}", p.display())))
}

#[derive(Serialize)]
struct EvolveDoc<'a> {
    meta: &'a ChannelModel,
    t: f64,
    /// Row-major `[re, im]` pairs.
    rho: Vec<Vec<[f64; 2]>>,
    engine_disagreement: f64,
}

fn cmd_evolve(o: &Opts, out: &mut dyn Write) -> Result<()> {
    let model = o.model()?;
    let t = o.time()?;
    let s = model.state_at(t)?;
    let m = s.rho.mat();
    with_output(&o.out, out, |w| {
        if o.format()? == Some(Format::Json) {
            let rho = m.rows().iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
            let doc = EvolveDoc { meta: &model, t, rho, engine_disagreement: s.engine_disagreement };
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)?;
            return Ok(());
        }
        writeln!(w, "i,j,re,im")?;
        for i in 0..4 {
            for j in 0..4 {
                let z = m[(i, j)];
                writeln!(w, "{},{},{},{}", i + 1, j + 1, fmt_num(z.re), fmt_num(z.im))?;
            }
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct TeleportDoc<'a> {
    meta: &'a ChannelModel,
    t: f64,
    report: TeleportReport,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "P")]
    p: f64,
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(",")
}

fn cmd_teleport(o: &Opts, out: &mut dyn Write) -> Result<()> {
    let model = o.model()?;
    let t = o.time()?;
    let rho = model.state_at(t)?.rho;
    let report = TeleportReport::new(&rho, o.m)?;
    let (c, p) = (concurrence(&rho)?, purity(&rho));
    with_output(&o.out, out, |w| {
        if o.format()? == Some(Format::Json) {
            serde_json::to_writer_pretty(&mut *w, &TeleportDoc { meta: &model, t, report, c, p })?;
            writeln!(w)?;
            return Ok(());
        }
        writeln!(w, "F={:.6}", report.max_avg_fidelity)?;
        writeln!(w, "m*={}", report.m_star)?;
        writeln!(w, "C={c:.6}")?;
        writeln!(w, "P={p:.6}")?;
        writeln!(w, "chi={}", join(&report.chi.chi))?;
        writeln!(w, "m={}", report.m_used)?;
        writeln!(w, "F_m={:.6}", report.avg_fidelity_per_m[report.m_used])?;
        writeln!(w, "shrink={}", join(&report.shrink))?;
        Ok(())
    })
}

fn cmd_sweep(o: &Opts, out: &mut dyn Write) -> Result<()> {
    let spec = o.sweep_spec()?;
    let records = sweep(&spec)?;
    with_output(&o.out, out, |w| match o.format()?.unwrap_or(Format::Csv) {
        Format::Csv => emit_csv(w, &records, &spec.quantities),
        Format::Json => emit_json(w, &spec, &records),
    })
}

fn cmd_critical(o: &Opts, out: &mut dyn Write) -> Result<()> {
    let model = o.model()?;
    let kind: CriticalKind = o
        .kind
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--kind is required".into()))?
        .parse()?;
    let bracket = o.bracket()?;
    let result = match kind {
        CriticalKind::ClassicalCrossing => find_classical_crossing(&model, bracket)?,
        CriticalKind::FidelityMinimum => find_fidelity_minimum(&model, bracket)?,
        CriticalKind::EntanglementSuddenDeath => find_esd_time(&model, bracket)?,
        CriticalKind::ShrinkMinimum => {
            let axis: Axis = o.axis.as_deref().unwrap_or("z").parse()?;
            find_shrink_minimum(&model, axis, o.m, bracket)?
        }
    };
    with_output(&o.out, out, |w| {
        if o.format()? == Some(Format::Json) {
            serde_json::to_writer_pretty(&mut *w, &result)?;
            writeln!(w)?;
            return Ok(());
        }
        // Residuals below the printed precision show as 0 rather than -0.
        let shown = |v: f64| if v.abs() < 5e-7 { 0.0 } else { v };
        match result.outcome {
            CriticalOutcome::Found { t, value } => {
                let value = shown(value);
                writeln!(w, "t_c={t:.6}\nvalue={value:.6}\nstatus=found")?
            }
            CriticalOutcome::EdgeMinimum { t, value } => {
                let value = shown(value);
                writeln!(w, "t_c={t:.6}\nvalue={value:.6}\nstatus=edge-minimum")?
            }
            CriticalOutcome::NoneInBracket => writeln!(w, "t_c=none\nstatus=none-in-bracket")?,
        }
        Ok(())
    })
}

fn cmd_bloch(o: &Opts, out: &mut dyn Write) -> Result<()> {
    let model = o.model()?;
    let mesh = bloch_mesh(
        &model,
        o.time()?,
        o.m,
        o.n_theta.unwrap_or(DEFAULT_N_THETA),
        o.n_phi.unwrap_or(DEFAULT_N_PHI),
    )?;
    with_output(&o.out, out, |w| match o.format()?.unwrap_or(Format::Csv) {
        Format::Csv => write_mesh_csv(w, &mesh),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &mesh)?;
            writeln!(w)?;
            Ok(())
        }
    })
}

/// Runs the command line on `argv` (program name first). Returns the exit
/// code: 0 on success, 2 for bad arguments or configuration, 3 for a
/// numerical failure.
pub fn run_cli<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let (run, opts): (Handler, Opts) = match cli.cmd {
        Command::Evolve(o) => (cmd_evolve, o),
        Command::Teleport(o) => (cmd_teleport, o),
        Command::Sweep(o) => (cmd_sweep, o),
        Command::Critical(o) => (cmd_critical, o),
        Command::Bloch(o) => (cmd_bloch, o),
    };
    match opts.merged().and_then(|o| run(&o, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}
