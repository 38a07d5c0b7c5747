use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use edgetok_core::detokenizer::{detokenize_ids, orientation_check, DetokenizeOptions};
use edgetok_core::ertk::TokenFile;
use edgetok_core::grammar::{allowed_next, state_after};
use edgetok_core::obj::{write_obj, write_raw_obj};
use edgetok_core::tokenizer::{stats, tokenize, TraversalStats};
use edgetok_core::{shapes, Resolution, Vocabulary};

use crate::bench::{load_corpus, run_bench};
use crate::prep::{prep_dir, PrepOptions, ScaleRange};
use crate::{load_mesh, resolution, write_file, CliError};

#[derive(Debug, Parser)]
#[command(name = "edgetok", version, about = "Lossless triangle-mesh tokenizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize an OBJ mesh into an ERTK or JSON token file.
    Tokenize(TokenizeArgs),
    /// Rebuild an OBJ mesh from a token file.
    Detokenize(DetokenizeArgs),
    /// Tokenize, detokenize and compare canonical forms.
    Roundtrip(RoundtripArgs),
    /// Print the token ids allowed after a prefix.
    Mask(MaskArgs),
    /// Compare tokenizers over a directory of OBJ files.
    Bench(BenchArgs),
    /// Normalize, augment and quantize a directory of OBJ files.
    Prep(PrepArgs),
    /// Write the built-in synthetic corpus as OBJ files.
    GenCorpus(GenCorpusArgs),
}

#[derive(Debug, Args)]
pub struct MeshInput {
    /// Grid cells per axis.
    #[arg(short, long, default_value_t = 512)]
    pub resolution: u32,
    /// Treat coordinates as already normalized to the unit cube.
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TokenFormat {
    Ertk,
    Json,
}

#[derive(Debug, Args)]
pub struct TokenizeArgs {
    pub input: PathBuf,
    /// Output path; defaults to the input with an `.ertk` or `.json` extension.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TokenFormat::Ertk)]
    pub format: TokenFormat,
    #[command(flatten)]
    pub mesh: MeshInput,
}

#[derive(Debug, Args)]
pub struct DetokenizeArgs {
    /// ERTK or JSON token file.
    pub input: PathBuf,
    /// Output OBJ path; the mesh goes to stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub keep_degenerate: bool,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub mesh: MeshInput,
}

#[derive(Debug, Args)]
pub struct MaskArgs {
    /// Token file holding the prefix.
    #[arg(conflicts_with = "ids", required_unless_present = "ids")]
    pub input: Option<PathBuf>,
    /// Comma-separated prefix ids, e.g. `515,512`.
    #[arg(long, value_delimiter = ',')]
    pub ids: Option<Vec<u32>>,
    /// Resolution of the vocabulary for `--ids`.
    #[arg(short, long, default_value_t = 512)]
    pub resolution: u32,
    /// Also write the mask as a little-endian bitset to this path.
    #[arg(long)]
    pub bitset: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub corpus: PathBuf,
    #[arg(short, long, env = "EDGETOK_JOBS", default_value_t = 1)]
    pub jobs: usize,
    /// Passes over the corpus per tokenizer when timing.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long)]
    pub skip_invalid: bool,
    #[command(flatten)]
    pub mesh: MeshInput,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(short, long, default_value_t = 512)]
    pub resolution: u32,
    /// Random uniform scale range applied after normalization, e.g. `0.75..0.95`.
    #[arg(long)]
    pub scale: Option<ScaleRange>,
    /// Maximum random rotation about the vertical axis, in degrees.
    #[arg(long, default_value_t = 0.0)]
    pub rotate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long, env = "EDGETOK_JOBS", default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    pub output: PathBuf,
}

/// JSON form of a token file.
#[derive(Debug, Serialize, Deserialize)]
pub struct JsonTokens {
    pub resolution: u16,
    #[serde(default)]
    pub extended: bool,
    pub ids: Vec<u32>,
}

#[derive(Debug, Serialize)]
pub struct RoundtripReport {
    #[serde(flatten)]
    pub stats: TraversalStats,
    pub token_count: usize,
    pub equal: bool,
    pub orientation_consistent: bool,
    pub detokenize_seconds: f64,
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string(value).expect("serializable");
    writeln!(out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

/// Reads an ERTK or JSON token file, telling them apart by the magic bytes.
pub fn read_tokens(path: &Path) -> Result<(Vocabulary, Vec<u32>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(&edgetok_core::ertk::MAGIC) {
        let file = TokenFile::from_bytes(&bytes).map_err(|e| CliError::parse(path, e))?;
        return Ok((file.vocab, file.ids_u32()));
    }
    let parsed: JsonTokens =
        serde_json::from_slice(&bytes).map_err(|e| CliError::parse(path, e))?;
    let res =
        Resolution::new(u32::from(parsed.resolution)).map_err(|e| CliError::parse(path, e))?;
    let vocab = if parsed.extended {
        Vocabulary::with_face_buckets(res)
    } else {
        Vocabulary::new(res)
    };
    Ok((vocab, parsed.ids))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Tokenize(args) => cmd_tokenize(args, out),
        Command::Detokenize(args) => cmd_detokenize(args, out),
        Command::Roundtrip(args) => cmd_roundtrip(args, out),
        Command::Mask(args) => cmd_mask(args, out),
        Command::Bench(args) => cmd_bench(args, out),
        Command::Prep(args) => cmd_prep(args, out),
        Command::GenCorpus(args) => cmd_gen_corpus(args, out),
    }
}

fn cmd_tokenize(args: TokenizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let res = resolution(args.mesh.resolution)?;
    let mesh = load_mesh(&args.input, res, !args.mesh.no_normalize)?;
    let start = Instant::now();
    let seq = tokenize(&mesh).map_err(|e| CliError::tokenize(&args.input, e))?;
    let elapsed = start.elapsed();

    let (ext, bytes) = match args.format {
        TokenFormat::Ertk => ("ertk", TokenFile::from_sequence(&seq).to_bytes()),
        TokenFormat::Json => {
            let doc = JsonTokens {
                resolution: res.get(),
                extended: false,
                ids: seq.ids(),
            };
            ("json", serde_json::to_vec(&doc).expect("serializable"))
        }
    };
    let path = args
        .output
        .unwrap_or_else(|| args.input.with_extension(ext));
    write_file(&path, bytes)?;
    json_line(out, &stats(&seq, &mesh, elapsed))
}

fn cmd_detokenize(args: DetokenizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (vocab, ids) = read_tokens(&args.input)?;
    let opts = DetokenizeOptions {
        keep_degenerate: args.keep_degenerate,
    };
    let mesh = detokenize_ids(&ids, &vocab, opts)?;
    let text = write_obj(&mesh);
    match args.output {
        Some(path) => {
            write_file(&path, text)?;
            json_line(
                out,
                &serde_json::json!({
                    "faces": mesh.face_count(),
                    "vertices": mesh.vertex_count(),
                    "tokens": ids.len(),
                }),
            )
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn cmd_roundtrip(args: RoundtripArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let res = resolution(args.mesh.resolution)?;
    let mesh = load_mesh(&args.input, res, !args.mesh.no_normalize)?;
    let start = Instant::now();
    let seq = tokenize(&mesh).map_err(|e| CliError::tokenize(&args.input, e))?;
    let tokenize_time = start.elapsed();

    let start = Instant::now();
    let back = detokenize_ids(&seq.ids(), &seq.vocabulary(), DetokenizeOptions::default())?;
    let detokenize_seconds = start.elapsed().as_secs_f64();

    let report = RoundtripReport {
        stats: stats(&seq, &mesh, tokenize_time),
        token_count: seq.len(),
        equal: back.canonical() == mesh.canonical(),
        orientation_consistent: orientation_check(&back).consistent,
        detokenize_seconds,
    };
    json_line(out, &report)?;
    if report.equal {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "{}: decoded mesh differs ({} faces in, {} out)",
            args.input.display(),
            mesh.face_count(),
            back.face_count()
        )))
    }
}

fn cmd_mask(args: MaskArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (vocab, ids) = match (&args.input, args.ids) {
        (Some(path), _) => read_tokens(path)?,
        (None, ids) => (
            Vocabulary::new(resolution(args.resolution)?),
            ids.unwrap_or_default(),
        ),
    };
    let state = state_after(&ids, &vocab)?;
    let mask = allowed_next(&state, &vocab);
    if let Some(path) = &args.bitset {
        write_file(path, mask.to_bytes())?;
    }
    json_line(out, &mask.allowed_ids())
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let res = resolution(args.mesh.resolution)?;
    let (meshes, skipped) = load_corpus(
        &args.corpus,
        res,
        !args.mesh.no_normalize,
        args.skip_invalid,
    )?;
    for s in &skipped {
        eprintln!("skipped {}: {}", s.name, s.reason);
    }
    let report = run_bench(&meshes, skipped.len(), args.jobs, args.repeat);
    eprint!("{}", report.table());
    json_line(out, &report)
}

fn cmd_prep(args: PrepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = PrepOptions {
        resolution: resolution(args.resolution)?,
        scale: args.scale,
        max_rotation_degrees: args.rotate,
        seed: args.seed,
        jobs: args.jobs,
    };
    let summary = prep_dir(&args.input, &args.output, &opts)?;
    for s in &summary.skipped {
        eprintln!("skipped {}: {}", s.name, s.reason);
    }
    json_line(out, &summary)
}

fn cmd_gen_corpus(args: GenCorpusArgs, out: &mut dyn Write) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.output).map_err(|e| CliError::io(&args.output, e))?;
    let corpus = shapes::corpus();
    for (name, mesh) in &corpus {
        write_file(
            &args.output.join(format!("{name}.obj")),
            write_raw_obj(mesh),
        )?;
    }
    json_line(out, &serde_json::json!({ "written": corpus.len() }))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
