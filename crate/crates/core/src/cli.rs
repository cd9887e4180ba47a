//! Command-line front end. Every verb maps its outcome onto [`ExitStatus`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::cofinite_demo;
use crate::cosheaf::{self, CosheafFile, FadedCosheaf};
use crate::filters;
use crate::functors::{self, Representation};
use crate::generate::{self, MutationKind};
use crate::space::{FiniteSpace, PointSet, SpaceFile};
use crate::tubewise::FiberedFile;
use crate::verify::{self, VerifyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// The property holds, or the construction succeeded.
    Success = 0,
    /// The property fails; a witness was printed.
    PropertyFails = 1,
    /// Unreadable input, schema violation, or unmet precondition.
    InputError = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn from_bool(holds: bool) -> Self {
        if holds {
            ExitStatus::Success
        } else {
            ExitStatus::PropertyFails
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "faded-cosheaf", version, about = "Faded cosheaves over finite spaces and maps into them")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a space or decide sobriety.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Completely prime filters of an open sublattice.
    #[command(subcommand)]
    Filters(FiltersCmd),
    /// Check copresheaf laws, fadedness, gluing, and the image identities.
    #[command(subcommand)]
    Cosheaf(CosheafCmd),
    /// Build the tube cosheaf CS(f).
    Cs {
        space: PathBuf,
        fibered: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build L(X), the support map of a faded cosheaf.
    L {
        cosheaf: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check L(CS(f)) = f.
    Roundtrip { space: PathBuf, fibered: PathBuf },
    /// Build the filter cosheaf Fil0 of a space.
    Fil0 {
        space: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether a faded cosheaf is isomorphic to some CS(f).
    Represent { cosheaf: PathBuf },
    /// Built-in case studies.
    #[command(subcommand)]
    Demo(DemoCmd),
    /// Emit fixtures in the space, fibered-set and cosheaf formats.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Run the exhaustive verification suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Subcommand)]
enum SpaceCmd {
    Check { file: PathBuf },
    Sober { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum FiltersCmd {
    Enumerate {
        file: PathBuf,
        /// Comma-separated points of the open; defaults to the whole space.
        #[arg(long)]
        open: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum CosheafCmd {
    Check { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum DemoCmd {
    Cofinite {
        #[arg(long, default_value_t = 10)]
        bound: u32,
    },
}

#[derive(Debug, Args)]
struct Output {
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenerateCmd {
    /// Every labeled topology on the given number of points, as a JSON array.
    Topologies {
        #[arg(long)]
        points: usize,
        #[command(flatten)]
        out: Output,
    },
    Fibered {
        space: PathBuf,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// A relabeled tube cosheaf of a random map.
    Cosheaf {
        space: PathBuf,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// A copresheaf broken in one targeted way.
    Mutant {
        cosheaf: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: MutationKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    All {
        #[arg(long, default_value_t = 4)]
        max_points: usize,
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
    },
}

fn parse_kind(s: &str) -> Result<MutationKind, String> {
    match s {
        "break-injectivity" => Ok(MutationKind::BreakInjectivity),
        "break-composition" => Ok(MutationKind::BreakComposition),
        "add-orphan" => Ok(MutationKind::AddOrphan),
        _ => Err("expected break-injectivity, break-composition or add-orphan".into()),
    }
}

/// An input problem; reported with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<ExitStatus, InputError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_space(path: &Path) -> Result<FiniteSpace, InputError> {
    Ok(read_json::<SpaceFile>(path)?.validate()?)
}

fn read_faded(path: &Path) -> Result<FadedCosheaf, InputError> {
    let x = read_json::<CosheafFile>(path)?.to_copresheaf()?;
    FadedCosheaf::new(x).map_err(|e| InputError(format!("precondition: {e}")))
}

struct Ctx<'a> {
    json: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn line(&mut self, text: impl std::fmt::Display) -> Result<(), InputError> {
        writeln!(self.out, "{text}")?;
        Ok(())
    }

    fn value(&mut self, v: &serde_json::Value) -> Result<(), InputError> {
        writeln!(self.out, "{}", serde_json::to_string_pretty(v)?)?;
        Ok(())
    }

    /// Writes a schema document to `path`, or to stdout when absent.
    fn emit<T: Serialize>(&mut self, doc: &T, path: Option<&Path>) -> Result<(), InputError> {
        let text = serde_json::to_string_pretty(doc)?;
        match path {
            Some(p) => {
                fs::write(p, text + "\n").map_err(|e| InputError(format!("{}: {e}", p.display())))?;
                if !self.json {
                    self.line(format!("wrote {}", p.display()))?;
                }
                Ok(())
            }
            None => self.line(text),
        }
    }
}

/// Parses `argv` (including the program name) and runs the verb.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return if code == 0 { ExitStatus::Success } else { ExitStatus::InputError };
        }
    };
    let mut ctx = Ctx { json: cli.json, out };
    match dispatch(cli.command, &mut ctx) {
        Ok(status) => status,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            ExitStatus::InputError
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> CmdResult {
    match command {
        Command::Space(SpaceCmd::Check { file }) => space_check(&file, ctx),
        Command::Space(SpaceCmd::Sober { file }) => space_sober(&file, ctx),
        Command::Filters(FiltersCmd::Enumerate { file, open }) => filters_enumerate(&file, open, ctx),
        Command::Cosheaf(CosheafCmd::Check { file }) => cosheaf_check(&file, ctx),
        Command::Cs { space, fibered, output } => {
            let space = read_space(&space)?;
            let f = read_json::<FiberedFile>(&fibered)?.into_fibered(space)?;
            ctx.emit(&functors::cs_object(&f).to_file(), output.as_deref())?;
            Ok(ExitStatus::Success)
        }
        Command::L { cosheaf, output } => {
            let x = read_faded(&cosheaf)?;
            let f = functors::l_object(&x).map_err(|e| InputError(format!("precondition: {e}")))?;
            ctx.emit(&f.to_file(), output.as_deref())?;
            Ok(ExitStatus::Success)
        }
        Command::Roundtrip { space, fibered } => {
            let space = read_space(&space)?;
            let f = read_json::<FiberedFile>(&fibered)?.into_fibered(space)?;
            let holds = functors::verify_left_inverse(&f).map_err(|e| InputError(format!("precondition: {e}")))?;
            if ctx.json {
                ctx.value(&json!({ "holds": holds, "fibered": f.to_file() }))?;
            } else if holds {
                ctx.line("L(CS(f)) = f")?;
            } else {
                ctx.line("L(CS(f)) != f")?;
            }
            Ok(ExitStatus::from_bool(holds))
        }
        Command::Fil0 { space, output } => {
            let space = read_space(&space)?;
            let fil = filters::fil0_cosheaf(&space)?;
            ctx.emit(&fil.cosheaf.to_file(), output.as_deref())?;
            Ok(ExitStatus::Success)
        }
        Command::Represent { cosheaf } => represent(&cosheaf, ctx),
        Command::Demo(DemoCmd::Cofinite { bound }) => {
            let report = cofinite_demo::demo_not_sober(bound);
            if ctx.json {
                ctx.value(&serde_json::to_value(&report)?)?;
            } else {
                ctx.line(&report)?;
            }
            Ok(ExitStatus::from_bool(report.certified()))
        }
        Command::Generate(cmd) => generate_cmd(cmd, ctx),
        Command::Verify(VerifyCmd::All { max_points, seed }) => {
            if max_points > generate::MAX_ENUMERATED_POINTS {
                return Err(InputError(format!("--max-points is at most {}", generate::MAX_ENUMERATED_POINTS)));
            }
            let cfg = VerifyConfig { max_points, seed, ..VerifyConfig::default() };
            let results = verify::run_all(&cfg);
            let all = results.iter().all(|r| r.passed);
            if ctx.json {
                ctx.value(&json!({ "passed": all, "criteria": results }))?;
            } else {
                for r in &results {
                    ctx.line(r)?;
                }
            }
            Ok(ExitStatus::from_bool(all))
        }
    }
}

fn space_check(file: &Path, ctx: &mut Ctx) -> CmdResult {
    let doc = read_json::<SpaceFile>(file)?;
    match doc.validate() {
        Ok(space) => {
            if ctx.json {
                ctx.value(&json!({
                    "valid": true,
                    "space": space.to_file(),
                    "t0": space.is_t0(),
                    "t1": space.is_t1(),
                }))?;
            } else {
                ctx.line(format!(
                    "valid topology: {} points, {} opens; T0 {}, T1 {}",
                    space.num_points(),
                    space.num_opens(),
                    space.is_t0(),
                    space.is_t1()
                ))?;
            }
            Ok(ExitStatus::Success)
        }
        Err(e) => {
            if ctx.json {
                ctx.value(&json!({ "valid": false, "error": e.to_string() }))?;
            } else {
                ctx.line(format!("invalid topology: {e}"))?;
            }
            Ok(ExitStatus::PropertyFails)
        }
    }
}

fn space_sober(file: &Path, ctx: &mut Ctx) -> CmdResult {
    let space = read_space(file)?;
    let verdict = filters::is_sober(&space);
    let witness = verdict.witness.as_ref().map(|w| match w {
        filters::SobrietyWitness::Unmatched(f) => format!("filter {} matches no point", f.display(&space)),
        filters::SobrietyWitness::Shared { filter, points } => {
            format!("filter {} is the neighborhood filter of points {points:?}", filter.display(&space))
        }
    });
    if ctx.json {
        ctx.value(&json!({ "sober": verdict.sober, "t0": space.is_t0(), "witness": witness }))?;
    } else if verdict.sober {
        ctx.line("sober")?;
    } else {
        ctx.line(format!("not sober: {}", witness.unwrap_or_default()))?;
    }
    Ok(ExitStatus::from_bool(verdict.sober))
}

fn parse_open(space: &FiniteSpace, list: &str) -> Result<crate::space::OpenId, InputError> {
    let points: PointSet = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|e| InputError(format!("--open {list:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .collect();
    Ok(space.require_open(points)?)
}

fn filters_enumerate(file: &Path, open: Option<String>, ctx: &mut Ctx) -> CmdResult {
    let space = read_space(file)?;
    let v = match open {
        Some(list) => parse_open(&space, &list)?,
        None => space.total_open(),
    };
    let found = filters::enumerate_cp_filters(&space, v);
    if ctx.json {
        let lists: Vec<Vec<Vec<usize>>> = found
            .iter()
            .map(|f| f.members.iter().map(|&w| space.open(w).to_vec()).collect())
            .collect();
        ctx.value(&json!({ "open": space.open(v).to_vec(), "filters": lists }))?;
    } else {
        ctx.line(format!("{} completely prime filters in O({})", found.len(), space.open(v)))?;
        for f in &found {
            ctx.line(format!("  {}", f.display(&space)))?;
        }
    }
    Ok(ExitStatus::Success)
}

fn cosheaf_check(file: &Path, ctx: &mut Ctx) -> CmdResult {
    let raw = read_json::<CosheafFile>(file)?.to_raw()?;
    let legend: Vec<String> =
        raw.space.open_ids().map(|v| format!("{v} = {}", raw.space.open(v))).collect();
    let report = cosheaf::run_checks(raw);
    let law = report.copresheaf.as_ref().err().map(|e| e.to_string());
    let faded = report.faded.as_ref().map(|w| w.as_ref().map(|w| w.to_string()));
    let gluing = report.gluing.as_ref().map(|r| r.as_ref().err().map(|w| w.to_string()));
    let images: Option<Vec<String>> =
        report.images.as_ref().map(|r| r.violations.iter().map(|v| v.to_string()).collect());
    let ok = report.first_failure().is_none();
    if ctx.json {
        ctx.value(&json!({
            "holds": ok,
            "first_failure": report.first_failure(),
            "copresheaf": { "holds": law.is_none(), "witness": law },
            "faded": faded.as_ref().map(|w| json!({ "holds": w.is_none(), "witness": w })),
            "gluing": gluing.as_ref().map(|w| json!({ "holds": w.is_none(), "witness": w })),
            "image_identities": images.as_ref().map(|v| json!({ "holds": v.is_empty(), "violations": v })),
        }))?;
    } else {
        let mark = |w: &Option<String>| match w {
            None => "ok".to_string(),
            Some(w) => format!("FAILS: {w}"),
        };
        ctx.line(format!("copresheaf laws: {}", mark(&law)))?;
        if let (Some(faded), Some(gluing), Some(images)) = (&faded, &gluing, &images) {
            ctx.line(format!("faded: {}", mark(faded)))?;
            ctx.line(format!("gluing: {}", mark(gluing)))?;
            if images.is_empty() {
                ctx.line("image identities: ok")?;
            } else {
                ctx.line(format!("image identities: FAILS ({} violations)", images.len()))?;
                for v in images {
                    ctx.line(format!("  {v}"))?;
                }
            }
        }
        if !ok {
            ctx.line(format!("opens: {}", legend.join(", ")))?;
        }
    }
    Ok(ExitStatus::from_bool(ok))
}

fn represent(file: &Path, ctx: &mut Ctx) -> CmdResult {
    let x = read_faded(file)?;
    match functors::representability_check(&x).map_err(|e| InputError(format!("precondition: {e}")))? {
        Representation::Representable(iso) => {
            if ctx.json {
                ctx.value(&json!({ "representable": true, "fibered": iso.fibered.to_file() }))?;
            } else {
                ctx.line(format!("representable: X ≅ CS(f) with f = {:?}", iso.fibered.map()))?;
            }
            Ok(ExitStatus::Success)
        }
        Representation::Obstructed(o) => {
            if ctx.json {
                ctx.value(&json!({
                    "representable": false,
                    "element": o.element,
                    "family": o.family.iter().map(|&w| x.space().open(w).to_vec()).collect::<Vec<_>>(),
                    "reason": o.reason,
                }))?;
            } else {
                ctx.line(format!("not representable: {o}"))?;
            }
            Ok(ExitStatus::PropertyFails)
        }
    }
}

fn generate_cmd(cmd: GenerateCmd, ctx: &mut Ctx) -> CmdResult {
    match cmd {
        GenerateCmd::Topologies { points, out } => {
            let spaces = generate::enumerate_topologies(points)?;
            let docs: Vec<SpaceFile> = spaces.iter().map(FiniteSpace::to_file).collect();
            ctx.emit(&docs, out.output.as_deref())?;
        }
        GenerateCmd::Fibered { space, size, seed, out } => {
            let space = read_space(&space)?;
            ctx.emit(&generate::random_fibered_set(&space, size, seed).to_file(), out.output.as_deref())?;
        }
        GenerateCmd::Cosheaf { space, size, seed, out } => {
            let space = read_space(&space)?;
            let x = generate::random_faded_cosheaf(&space, size, seed)?;
            ctx.emit(&x.to_file(), out.output.as_deref())?;
        }
        GenerateCmd::Mutant { cosheaf, kind, seed, out } => {
            let x = read_json::<CosheafFile>(&cosheaf)?.to_copresheaf()?;
            let m = generate::mutate(&x, kind, seed)?;
            ctx.emit(&m.raw.to_file(), out.output.as_deref())?;
        }
    }
    Ok(ExitStatus::Success)
}
