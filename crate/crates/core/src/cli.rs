//! Command-line surface. [`run`] returns the process exit code:
//! 0 on success, 1 for domain findings, 2 for usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constraints::validate_ladder;
use crate::error::{Error, Result};
use crate::gop::{build_sequence, GopConfig, IrapMode};
use crate::io::{
    digest_files, gop_csv, load_ladder, quality_csv, read_rd_curve, read_schedule, read_trace,
    switches_csv, to_canonical_json, write_file, LoadedLadder, RunReport,
};
use crate::quality::BdRateTable;
use crate::switching::{simulate_abr_session, simulate_session, CodecCapabilities, SessionReport};

pub const THREADS_ENV: &str = "OGOP_SIM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ogop-sim",
    version,
    about = "Open-GOP resolution switching simulator"
)]
pub struct Cli {
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Directory for report and plot files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Recorded in reports. The simulation itself draws no random numbers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coded structure inspection.
    #[command(subcommand)]
    Gop(GopCommand),
    /// Ladder conformance.
    #[command(subcommand)]
    Ladder(LadderCommand),
    /// Streaming sessions.
    #[command(subcommand)]
    Sim(SimCommand),
    /// BD-rate of a test RD curve against an anchor.
    Bdrate(BdrateArgs),
}

#[derive(Debug, Subcommand)]
pub enum GopCommand {
    /// One row per picture: poc, decode_idx, tid, kind, refs, collocated_ref, segment.
    Show(GopShowArgs),
}

#[derive(Debug, Args)]
pub struct GopShowArgs {
    #[arg(long)]
    pub gop: u32,
    #[arg(long)]
    pub irap: u32,
    #[arg(long, default_value = "open", value_parser = parse_mode)]
    pub mode: IrapMode,
    /// Segment length in pictures; defaults to the IRAP period.
    #[arg(long)]
    pub segment: Option<u32>,
    /// Number of pictures; defaults to one IRAP period plus the IDR.
    #[arg(long)]
    pub length: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum LadderCommand {
    /// Check all switching rules; exit 1 when the ladder is not switchable.
    Validate(LadderArgs),
}

#[derive(Debug, Args)]
pub struct LadderArgs {
    pub ladder: PathBuf,
    /// Override the ladder's closed-GOP fallback flag.
    #[arg(long, value_enum)]
    pub fallback: Option<Toggle>,
}

#[derive(Debug, Subcommand)]
pub enum SimCommand {
    /// Play a session driven by a bandwidth trace or a fixed schedule.
    Run(SimRunArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("driver").required(true).args(["trace", "schedule"]))]
pub struct SimRunArgs {
    pub ladder: PathBuf,
    /// CSV `time_s,kbps`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// CSV `segment,rep_id`.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Caps::Rpr)]
    pub caps: Caps,
    #[arg(long, value_enum)]
    pub fallback: Option<Toggle>,
}

#[derive(Debug, Args)]
pub struct BdrateArgs {
    pub anchor: PathBuf,
    pub test: PathBuf,
    #[arg(long, default_value = "test vs anchor")]
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Caps {
    Rpr,
    NoRpr,
}

impl From<Caps> for CodecCapabilities {
    fn from(c: Caps) -> Self {
        match c {
            Caps::Rpr => CodecCapabilities::VVC,
            Caps::NoRpr => CodecCapabilities::NO_RPR,
        }
    }
}

fn parse_mode(s: &str) -> std::result::Result<IrapMode, String> {
    s.parse::<IrapMode>().map_err(|e| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(stderr, "error[invalid-argument]: {msg}");
        return 2;
    }
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.name());
            e.exit_code()
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV}={v} is not a positive integer"))?;
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let out = Output {
        format: cli.format,
        dir: cli.out.as_deref(),
    };
    match &cli.command {
        Command::Gop(GopCommand::Show(a)) => gop_show(a, &out, stdout),
        Command::Ladder(LadderCommand::Validate(a)) => ladder_validate(a, &out, stdout),
        Command::Sim(SimCommand::Run(a)) => sim_run(a, cli.seed, &out, stdout),
        Command::Bdrate(a) => bdrate(a, &out, stdout),
    }
}

struct Output<'a> {
    format: Format,
    dir: Option<&'a Path>,
}

impl Output<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let Some(dir) = self.dir else { return Ok(()) };
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_file(&dir.join(name), contents)
    }
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn gop_show(a: &GopShowArgs, out: &Output, stdout: &mut dyn Write) -> Result<i32> {
    let config = GopConfig::new(a.gop, a.irap, a.mode, a.segment.unwrap_or(a.irap))?;
    let seq = build_sequence(config, a.length.unwrap_or(a.irap + 1))?;
    let csv = gop_csv(&seq)?;
    let json = to_canonical_json(&seq)?;
    out.write("gop.csv", &csv)?;
    out.write("gop.json", &json)?;
    emit(
        stdout,
        if out.format == Format::Json {
            &json
        } else {
            &csv
        },
    )?;
    Ok(0)
}

fn load(path: &Path, fallback: Option<Toggle>) -> Result<LoadedLadder> {
    let loaded = load_ladder(path)?;
    match fallback {
        Some(t) => loaded.with_fallback_flag(t == Toggle::On, path),
        None => Ok(loaded),
    }
}

fn ladder_validate(a: &LadderArgs, out: &Output, stdout: &mut dyn Write) -> Result<i32> {
    let loaded = load(&a.ladder, a.fallback)?;
    let report = validate_ladder(&loaded.ladder);
    let json = to_canonical_json(&report)?;
    out.write("conformance.json", &json)?;
    let text = if out.format == Format::Json {
        json
    } else {
        report.to_text()
    };
    emit(stdout, &text)?;
    Ok(if report.is_switchable { 0 } else { 1 })
}

fn sim_run(a: &SimRunArgs, seed: Option<u64>, out: &Output, stdout: &mut dyn Write) -> Result<i32> {
    let loaded = load(&a.ladder, a.fallback)?;
    let ladder = &loaded.ladder;
    let caps = CodecCapabilities::from(a.caps);
    let mut inputs = loaded.inputs.clone();
    let (session, driver) = match (&a.trace, &a.schedule) {
        (Some(t), None) => {
            let trace = read_trace(t)?;
            inputs.push(t.clone());
            (
                simulate_abr_session(ladder, &trace, &loaded.abr, caps)?,
                "trace",
            )
        }
        (None, Some(s)) => {
            let schedule = read_schedule(s)?;
            inputs.push(s.clone());
            (simulate_session(ladder, &schedule, caps)?, "schedule")
        }
        _ => return Err(Error::invalid("give exactly one of --trace and --schedule")),
    };
    let base = a.ladder.parent().unwrap_or(Path::new("."));
    let mut tables = Vec::new();
    for c in &loaded.config.comparisons {
        let anchor = read_rd_curve(&base.join(&c.anchor))?;
        let test = read_rd_curve(&base.join(&c.test))?;
        tables.push(BdRateTable::compute(&c.label, &anchor, &test)?);
    }
    let report = RunReport::new(
        seed,
        digest_files(&inputs)?,
        caps,
        ladder.fallback.is_some(),
        driver,
        validate_ladder(ladder),
        session,
        tables,
    );
    let json = to_canonical_json(&report)?;
    out.write("report.json", &json)?;
    out.write("quality.csv", &quality_csv(&report.session)?)?;
    out.write("switches.csv", &switches_csv(&report.session)?)?;
    let text = if out.format == Format::Json {
        json
    } else {
        session_text(&report.session)
    };
    emit(stdout, &text)?;
    Ok(0)
}

fn session_text(s: &SessionReport) -> String {
    let mut t = String::new();
    for sw in &s.switches {
        t.push_str(&format!(
            "segment {:>3}: {} -> {}{}{} {}\n",
            sw.segment,
            sw.from,
            sw.to,
            if sw.fallback {
                format!(" (requested {}, fallback)", sw.requested)
            } else {
                String::new()
            },
            if sw.panic { " [panic]" } else { "" },
            sw.outcome.kind()
        ));
    }
    let m = &s.summary;
    let f = |v: Option<f64>| {
        v.map(|x| format!("{x:.3} dB"))
            .unwrap_or_else(|| "n/a".into())
    };
    t.push_str(&format!(
        "switches: {}  panic down-switches: {}\nmean quality: {}  min quality: {}\ndropped pictures: {}  artefact pictures: {}\nstalls: {} ({:.3} s)\n",
        s.switches.len(),
        m.panic_down_switches,
        f(m.mean_quality_db),
        f(m.min_quality_db),
        m.dropped_pictures,
        m.artefact_pictures,
        m.stall_events,
        m.stall_s
    ));
    t
}

fn bdrate(a: &BdrateArgs, out: &Output, stdout: &mut dyn Write) -> Result<i32> {
    let anchor = read_rd_curve(&a.anchor)?;
    let test = read_rd_curve(&a.test)?;
    let table = BdRateTable::compute(&a.label, &anchor, &test)?;
    let json = to_canonical_json(&table)?;
    let text = table.to_text();
    out.write("bdrate.json", &json)?;
    out.write("bdrate.txt", &text)?;
    emit(
        stdout,
        if out.format == Format::Json {
            &json
        } else {
            &text
        },
    )?;
    Ok(0)
}
