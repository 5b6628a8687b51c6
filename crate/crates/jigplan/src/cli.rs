//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input or I/O error, 2 a valid but negative
//! outcome (partial plan, failed fixing trial), 3 oracle disagreement.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use jigplan_core::eval::{self, DisplacementParams};
use jigplan_core::planner::{configure_fixing_parts, AssemblySequence};
use jigplan_core::relations::SweepParams;
use jigplan_core::{fixtures, AssemblyModel, Direction, RelationMatrices};

use crate::descriptor::{write_proxy_fixtures, AssemblyDescriptor};
use crate::measurements;
use crate::report::{to_json, write_atomic, DisplacementReport, MatricesReport, PlanReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success = 0,
    Error = 1,
    Negative = 2,
    OracleMismatch = 3,
}

#[derive(Debug, Parser)]
#[command(
    name = "jigplan",
    version,
    about = "Fixing-part and posture planning for soft-jig assembly"
)]
pub struct Cli {
    /// Contact tolerance in mm (default: 1e-3 of the assembly diagonal).
    #[arg(long, global = true, value_name = "MM")]
    epsilon_mm: Option<f64>,
    /// Sweep samples per direction (at least 16).
    #[arg(long, global = true, value_name = "N")]
    steps: Option<usize>,
    /// Also sweep at 10x finer sampling and fail with exit 3 on any difference.
    #[arg(long, global = true)]
    oracle: bool,
    /// Output file (JSON), or output directory for `fixtures`.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Choose the fixed part and posture for every step of an assembly order.
    Plan {
        #[command(flatten)]
        source: Source,
        /// Comma-separated part ids or group names, in assembly order.
        #[arg(long)]
        sequence: String,
    },
    /// Export the contact, interference-free and reachable-direction matrices.
    Matrices {
        #[command(flatten)]
        source: Source,
    },
    /// Measure jig displacement between two marker observations.
    Evaluate {
        #[arg(long, value_name = "JSON")]
        before: PathBuf,
        #[arg(long, value_name = "JSON")]
        after: PathBuf,
        /// Force-plate series, CSV with header fx,fy,fz[,t].
        #[arg(long, value_name = "CSV")]
        forces: Option<PathBuf>,
        /// Jig width in the images, in pixels.
        #[arg(long, value_name = "PX")]
        jig_width_px: f64,
        #[arg(long, value_name = "MM", default_value_t = eval::DEFAULT_JIG_WIDTH_MM)]
        jig_width_mm: f64,
        #[arg(long, value_name = "MM", default_value_t = eval::DEFAULT_PUSH_MM)]
        push_mm: f64,
        #[arg(long, default_value_t = eval::DEFAULT_SUCCESS_RATIO)]
        ratio: f64,
    },
    /// Write the proxy motor/plate/bolt meshes and their assembly descriptor.
    Fixtures {
        /// Target directory (default: --out, else ./fixtures).
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["descriptor", "fixtures"])))]
struct Source {
    /// Assembly descriptor (JSON).
    descriptor: Option<PathBuf>,
    /// Use a built-in fixture assembly instead of a descriptor.
    #[arg(long, value_enum)]
    fixtures: Option<FixtureSet>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FixtureSet {
    /// Motor, plate and two grouped bolts.
    Proxy,
    /// Peg in a blind hole.
    Peg,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    /// JSON goes to `path` when given (the summary then goes to stdout),
    /// otherwise JSON to stdout and the summary to stderr.
    fn emit(&mut self, path: Option<&Path>, json: &str, summary: &str) -> Result<()> {
        match path {
            Some(p) => {
                write_atomic(p, json.as_bytes())?;
                write!(self.out, "{summary}")?;
            }
            None => {
                write!(self.out, "{json}")?;
                write!(self.err, "{summary}")?;
            }
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    Outcome::Success as i32
                }
                _ => {
                    let _ = write!(err, "{text}");
                    Outcome::Error as i32
                }
            };
        }
    };
    let mut io = Io { out, err };
    match execute(&cli, &mut io) {
        Ok(outcome) => outcome as i32,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e:#}");
            Outcome::Error as i32
        }
    }
}

fn execute(cli: &Cli, io: &mut Io) -> Result<Outcome> {
    match &cli.command {
        Command::Plan { source, sequence } => cmd_plan(cli, io, source, sequence),
        Command::Matrices { source } => cmd_matrices(cli, io, source),
        Command::Evaluate {
            before,
            after,
            forces,
            jig_width_px,
            jig_width_mm,
            push_mm,
            ratio,
        } => {
            let params = DisplacementParams {
                jig_width_px: *jig_width_px,
                jig_width_mm: *jig_width_mm,
                push_mm: *push_mm,
                success_ratio: *ratio,
            };
            cmd_evaluate(cli, io, before, after, forces.as_deref(), &params)
        }
        Command::Fixtures { dir } => {
            let dir = dir
                .clone()
                .or_else(|| cli.out.clone())
                .unwrap_or_else(|| PathBuf::from("fixtures"));
            for p in write_proxy_fixtures(&dir)? {
                writeln!(io.out, "wrote {}", p.display())?;
            }
            Ok(Outcome::Success)
        }
    }
}

fn load(cli: &Cli, source: &Source) -> Result<(AssemblyModel, SweepParams)> {
    if let Some(set) = source.fixtures {
        let reference = match set {
            FixtureSet::Proxy => fixtures::proxy_assembly(),
            FixtureSet::Peg => fixtures::peg_assembly(),
        };
        let asm = match cli.epsilon_mm {
            Some(eps) => AssemblyModel::new(reference.parts().to_vec(), Some(eps))?,
            None => reference,
        };
        let params = SweepParams::new(&asm, None, cli.steps, false)?;
        return Ok((asm, params));
    }
    let path = source
        .descriptor
        .as_deref()
        .expect("clap enforces an input");
    let (desc, base) = AssemblyDescriptor::load(path)?;
    let asm = desc
        .build(&base, cli.epsilon_mm)
        .with_context(|| format!("building the assembly of {}", path.display()))?;
    let params = desc.sweep_params(&asm, cli.steps, false)?;
    Ok((asm, params))
}

/// Differences between default and oracle sampling, one line each.
fn oracle_mismatches(
    asm: &AssemblyModel,
    params: &SweepParams,
    standard: &RelationMatrices,
) -> Result<Vec<String>> {
    let oracle = RelationMatrices::compute(asm, &params.with_oracle(true))?;
    let ids = standard.entity_ids();
    let mut out = Vec::new();
    for d in Direction::ALL {
        for i in 0..ids.len() {
            for k in 0..ids.len() {
                let (s, o) = (standard.free(d).get(i, k), oracle.free(d).get(i, k));
                if s != o {
                    out.push(format!(
                        "M{}({}, {}): default {} vs oracle {}",
                        d.label(),
                        ids[i],
                        ids[k],
                        u8::from(s),
                        u8::from(o)
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn check_oracle(cli: &Cli, io: &mut Io, asm: &AssemblyModel, params: &SweepParams) -> Result<bool> {
    if !cli.oracle {
        return Ok(true);
    }
    let standard = RelationMatrices::compute(asm, params)?;
    let diffs = oracle_mismatches(asm, params, &standard)?;
    for d in &diffs {
        writeln!(io.err, "oracle mismatch: {d}")?;
    }
    if diffs.is_empty() {
        writeln!(io.err, "oracle: all interference-free entries agree")?;
    }
    Ok(diffs.is_empty())
}

fn cmd_plan(cli: &Cli, io: &mut Io, source: &Source, sequence: &str) -> Result<Outcome> {
    let (asm, params) = load(cli, source)?;
    let seq = AssemblySequence::parse(sequence)?;
    let plan = configure_fixing_parts(&asm, &seq, &params)?;
    let report = PlanReport::new(seq.steps(), &plan);
    io.emit(cli.out.as_deref(), &to_json(&report)?, &report.table())?;
    if !check_oracle(cli, io, &asm, &params)? {
        return Ok(Outcome::OracleMismatch);
    }
    Ok(if plan.complete {
        Outcome::Success
    } else {
        Outcome::Negative
    })
}

fn cmd_matrices(cli: &Cli, io: &mut Io, source: &Source) -> Result<Outcome> {
    let (asm, params) = load(cli, source)?;
    let rel = RelationMatrices::compute(&asm, &params)?;
    let summary = format!("{} entities, 13 matrices\n", rel.entity_ids().len());
    io.emit(
        cli.out.as_deref(),
        &to_json(&MatricesReport::new(&rel))?,
        &summary,
    )?;
    if cli.oracle {
        let diffs = oracle_mismatches(&asm, &params, &rel)?;
        for d in &diffs {
            writeln!(io.err, "oracle mismatch: {d}")?;
        }
        if !diffs.is_empty() {
            return Ok(Outcome::OracleMismatch);
        }
        writeln!(io.err, "oracle: all interference-free entries agree")?;
    }
    Ok(Outcome::Success)
}

fn cmd_evaluate(
    cli: &Cli,
    io: &mut Io,
    before: &Path,
    after: &Path,
    forces: Option<&Path>,
    params: &DisplacementParams,
) -> Result<Outcome> {
    let b = measurements::read_observation(before)?;
    let a = measurements::read_observation(after)?;
    let result = eval::displacement_report(&b, &a, params)?;
    let peaks = match forces {
        Some(p) => {
            let series = measurements::read_force_csv(p)?;
            let (n, s) = eval::peak_forces(&series).with_context(|| format!("{}", p.display()))?;
            Some((n, s, series.len()))
        }
        None => None,
    };
    let report = DisplacementReport::new(
        &b.image_tag,
        &a.image_tag,
        &result,
        params.threshold_mm(),
        peaks,
    );
    let summary = format!(
        "{}: jig moved {:.1} mm (threshold {:.1} mm)\n",
        if result.success { "success" } else { "failure" },
        report.centroid_translation_mm,
        report.threshold_mm
    );
    io.emit(cli.out.as_deref(), &to_json(&report)?, &summary)?;
    Ok(if result.success {
        Outcome::Success
    } else {
        Outcome::Negative
    })
}
