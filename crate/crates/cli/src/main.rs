//! `vip`: list, render and inspect demos, generate the synthetic corpus,
//! analyse survey data, and run the gallery service.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vip_core::engine::{
    catalog, descriptor, generate_clip, render_demo, write_corpus, CorpusClip, CorpusOptions, InputKind, ParamMap,
};
use vip_core::survey::{
    aggregate_counts, bundled_dataset, format_counts_table, ingest_likert, paired_responses, wilcoxon_with_method,
    Alternative, Survey, TestMethod,
};
use vip_core::video::{read_y4m_file, write_y4m};
use vip_core::{Error, VideoClip};

#[derive(Parser)]
#[command(name = "vip", version, about = "Video processing demonstration gallery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the demo catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Render one demo to `demo.y4m` and `manifest.json`.
    Render(RenderArgs),
    /// Synthetic input clips.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Print the header and frame count of a `.y4m` file.
    Probe { file: PathBuf },
    /// Likert tables and paired signed-rank tests.
    Survey(SurveyArgs),
    /// Run the HTTP service; configured through VIP_DATA_DIR, VIP_BIND and VIP_WORKERS.
    Serve,
}

#[derive(Args)]
struct RenderArgs {
    demo_id: String,
    /// Input clip in `.y4m` format.
    #[arg(long, conflicts_with = "corpus")]
    input: Option<PathBuf>,
    /// Generate the named corpus clip as input.
    #[arg(long)]
    corpus: Option<CorpusClip>,
    /// Generate corpus input at 1280x720.
    #[arg(long)]
    hd: bool,
    /// Parameter override, repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Write every corpus clip as `<name>.y4m`.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        hd: bool,
        #[arg(long)]
        frames: Option<usize>,
    },
}

#[derive(Args)]
struct SurveyArgs {
    /// Long-format CSV with columns subject_id,survey,question,response.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Pre-course and post-course question numbers to compare, repeatable.
    #[arg(long = "pair", value_name = "PRE:POST")]
    pairs: Vec<String>,
    /// Alternative for every `--pair`; the built-in pairs carry their own.
    #[arg(long, default_value = "greater")]
    alt: String,
    /// Force `exact` or `normal`; by default chosen from the sample size.
    #[arg(long)]
    method: Option<String>,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_schema_violation() { 2 } else { 3 };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 3, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { json } => list(json),
        Command::Render(args) => render(args),
        Command::Corpus { action: CorpusAction::Generate { out, hd, frames } } => corpus(&out, hd, frames),
        Command::Probe { file } => probe(&file),
        Command::Survey(args) => survey(args),
        Command::Serve => serve(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("vip: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn list(json: bool) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    let written = if json {
        serde_json::to_writer_pretty(&mut out, &serde_json::json!({ "categories": catalog() }))
            .map_err(std::io::Error::from)
            .and_then(|()| writeln!(out))
    } else {
        write_table(&mut out)
    };
    match written {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn write_table(out: &mut impl Write) -> std::io::Result<()> {
    for cat in catalog() {
        writeln!(out, "{}", cat.name)?;
        for d in &cat.demos {
            let input = match d.input_kind {
                InputKind::Clip => "clip",
                InputKind::None => "generated",
            };
            let seed = if d.stochastic { ", seeded" } else { "" };
            writeln!(out, "  {:<20} {} ({input}{seed})", d.id, d.title)?;
        }
    }
    Ok(())
}

fn corpus_options(hd: bool) -> CorpusOptions {
    if hd {
        CorpusOptions::hd()
    } else {
        CorpusOptions::default()
    }
}

fn parse_params(demo_id: &str, pairs: &[String]) -> Result<ParamMap, Failure> {
    let desc = descriptor(demo_id).ok_or_else(|| Failure::from(Error::UnknownDemo(demo_id.into())))?;
    let mut map = ParamMap::new();
    for pair in pairs {
        let (k, v) = pair.split_once('=').ok_or_else(|| usage(format!("--param {pair:?} is not K=V")))?;
        let spec = desc.param_schema.iter().find(|s| s.name == k.trim()).ok_or_else(|| {
            Failure::from(Error::Schema { field: k.trim().into(), reason: "unknown parameter".into() })
        })?;
        map.insert(spec.name.clone(), spec.parse(v)?);
    }
    Ok(map)
}

fn render(args: RenderArgs) -> Result<(), Failure> {
    let params = parse_params(&args.demo_id, &args.params)?;
    let input: Option<VideoClip> = match (&args.input, args.corpus) {
        (Some(path), _) => Some(read_y4m_file(path)?),
        (None, Some(c)) => Some(generate_clip(c, &corpus_options(args.hd))?),
        (None, None) => None,
    };
    let out = render_demo(&args.demo_id, input.as_ref(), &params, args.seed)?;
    fs::create_dir_all(&args.out)?;
    let mut video = BufWriter::new(fs::File::create(args.out.join("demo.y4m"))?);
    write_y4m(&out.clip, &mut video)?;
    video.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    let manifest = serde_json::to_string_pretty(&out.manifest).map_err(|e| Failure { code: 3, message: e.to_string() })?;
    fs::write(args.out.join("manifest.json"), manifest + "\n")?;
    println!(
        "{} frames {}x{} checksum {}",
        out.manifest.frame_count, out.manifest.width, out.manifest.height, out.manifest.content_checksum
    );
    Ok(())
}

fn corpus(out: &Path, hd: bool, frames: Option<usize>) -> Result<(), Failure> {
    let mut opts = corpus_options(hd);
    if let Some(n) = frames {
        if n == 0 {
            return Err(usage("--frames must be positive"));
        }
        opts.frames = n;
    }
    for (_, path) in write_corpus(out, &opts)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn probe(file: &Path) -> Result<(), Failure> {
    let clip = read_y4m_file(file)?;
    let fps = clip.fps();
    println!("width: {}", clip.width());
    println!("height: {}", clip.height());
    println!("fps: {}:{} ({:.3})", fps.num, fps.den, fps.as_f64());
    println!("frames: {}", clip.len());
    println!("duration_s: {:.3}", clip.len() as f64 / fps.as_f64());
    println!("sample_checksum: {}", clip.sample_checksum());
    Ok(())
}

fn parse_pair(text: &str) -> Result<(u32, u32), Failure> {
    let bad = || usage(format!("--pair {text:?} is not PRE:POST"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn survey(args: SurveyArgs) -> Result<(), Failure> {
    let ds = match &args.csv {
        Some(path) => ingest_likert(fs::File::open(path)?)?,
        None => bundled_dataset(),
    };
    let method = match args.method.as_deref() {
        None => None,
        Some("exact") => Some(TestMethod::Exact),
        Some("normal") | Some("normal_approx") => Some(TestMethod::NormalApprox),
        Some(other) => return Err(usage(format!("unknown method {other:?}"))),
    };
    let pairs: Vec<(u32, u32, Alternative)> = if args.pairs.is_empty() {
        // Background items answered again after the course, then the item on
        // learning by seeing.
        vec![(3, 1, Alternative::Greater), (5, 2, Alternative::Greater), (6, 3, Alternative::Greater), (8, 4, Alternative::TwoSided)]
    } else {
        let alt: Alternative = args.alt.parse()?;
        args.pairs.iter().map(|p| parse_pair(p).map(|(a, b)| (a, b, alt))).collect::<Result<_, _>>()?
    };
    println!("subjects: {}", ds.subjects().len());
    println!("\npre-course survey\n{}", format_counts_table(&aggregate_counts(&ds, Survey::Pre)));
    println!("post-course survey\n{}", format_counts_table(&aggregate_counts(&ds, Survey::Post)));
    println!("{:>5} {:>5} {:>10} {:>3} {:>7} {:>7} {:>12} {:>10}", "pre", "post", "alt", "n", "W+", "W-", "method", "p");
    for (pre, post, alt) in pairs {
        let (x, y) = paired_responses(&ds, (Survey::Pre, pre), (Survey::Post, post));
        let alt_name = match alt {
            Alternative::Greater => "greater",
            Alternative::Less => "less",
            Alternative::TwoSided => "two_sided",
        };
        match wilcoxon_with_method(&x, &y, alt, method) {
            Ok(r) => println!(
                "{pre:>5} {post:>5} {alt_name:>10} {:>3} {:>7.1} {:>7.1} {:>12} {:>10.6}",
                r.n_effective,
                r.w_plus,
                r.w_minus,
                match r.method {
                    TestMethod::Exact => "exact",
                    TestMethod::NormalApprox => "normal",
                },
                r.p
            ),
            Err(Error::Degenerate(why)) => println!("{pre:>5} {post:>5} {alt_name:>10}   {why}"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn serve() -> Result<(), Failure> {
    let config = vip_service::Config::from_env().map_err(usage)?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(vip_service::serve(config))?;
    Ok(())
}
