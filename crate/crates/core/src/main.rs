use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use feww::error::{Error, Result};
use feww::harness::{run_experiment, ExperimentConfig};
use feww::insertion_deletion::{run_insertion_deletion, InsDelConfig};
use feww::insertion_only::{run_insertion_only, InsertionOnlyConfig};
use feww::instances::{
    gen_amri_stream, gen_bvl_graph, gen_planted_star, gen_set_disjointness, gen_star_graph, with_churn,
    AmriInstance, BvlInstance,
};
use feww::model::{ExactGraph, Neighbourhood};
use feww::star::{run_star_detection, GraphStream, StarConfig};
use feww::stream::{Stream, StreamMode};

#[derive(Parser)]
#[command(name = "feww", version, about = "Frequent elements with witnesses over edge streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a stream file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Insertion-only algorithm.
    #[command(name = "feww-ins")]
    FewwIns(AlgArgs),
    /// Insertion-deletion algorithm.
    #[command(name = "feww-del")]
    FewwDel {
        #[command(flatten)]
        args: AlgArgs,
        /// Sampler failure probability; defaults to 1/(n^10 d).
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Max-degree vertex with witnesses in a general graph.
    Star {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: u32,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value = "ins")]
        mode: StreamMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        stream: PathBuf,
    },
    /// Run a seeded experiment from a key=value config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check a result file against a stream.
    Verify {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        result: PathBuf,
        /// Minimum witness count; defaults to 1.
        #[arg(long)]
        threshold: Option<usize>,
    },
}

#[derive(Args)]
struct AlgArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    alpha: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    stream: PathBuf,
}

#[derive(Subcommand)]
enum GenKind {
    /// One vertex of degree d among vertices of lower degree.
    Planted {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        background: u32,
        /// Transient insert/delete pairs; makes an insertion-deletion stream.
        #[arg(long, default_value_t = 0)]
        churn: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Party streams of a set-disjointness instance, concatenated.
    Setdisj {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        intersecting: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Bit-vector-learning graph; ground truth goes to `<output>.truth`.
    Bvl {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Augmented-matrix-row-index insert/delete stream with m = 2d.
    Amri {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        alpha: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// General graph containing a star of the given degree.
    Star {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(String, bool)> {
    let out = match command {
        Command::Gen { kind } => generate(kind)?,
        Command::FewwIns(a) => {
            let stream = read_stream(&a)?;
            let out = run_insertion_only(InsertionOnlyConfig::new(a.n, a.d, a.alpha, a.seed)?, &stream)?;
            let mut text = format_result(out.result.as_ref());
            let _ = writeln!(text, "space={},{}", out.space.stored_edges, out.space.words());
            text
        }
        Command::FewwDel { args: a, delta } => {
            let stream = read_stream(&a)?;
            let config = match delta {
                Some(delta) => InsDelConfig::with_delta(a.n, a.m, a.d, a.alpha, a.seed, delta)?,
                None => InsDelConfig::new(a.n, a.m, a.d, a.alpha, a.seed)?,
            };
            let out = run_insertion_deletion(config, &stream)?;
            let mut text = format_result(out.result.as_ref());
            let words = out.sketch_cells * 3;
            let _ = writeln!(text, "space={},{}", out.sketch_cells, words);
            let s = out.samplers;
            let _ = writeln!(text, "samplers={},{},{}", s.vertex_sample, s.per_vertex, s.edge);
            text
        }
        Command::Star {
            n,
            alpha,
            epsilon,
            mode,
            seed,
            delta,
            stream,
        } => {
            let graph = GraphStream::read(stream)?;
            let config = StarConfig {
                n,
                epsilon,
                alpha,
                mode,
                seed,
                delta,
            };
            let out = run_star_detection(&config, &graph)?;
            let mut text = format_result(out.result.as_ref());
            if let Some(g) = out.guess {
                let _ = writeln!(text, "guess={g}");
            }
            let _ = writeln!(text, "space={},{}", out.stored_edges + out.sketch_cells, out.space_words + 3 * out.sketch_cells);
            text
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::parse(&std::fs::read_to_string(config)?)?;
            let report = run_experiment(&cfg)?;
            let mut text = String::new();
            if cfg.output.is_none() {
                text.push_str(&report.csv);
            }
            let _ = writeln!(text, "summary {}", report.summary);
            text
        }
        Command::Verify {
            stream,
            result,
            threshold,
        } => return verify(&stream, &result, threshold.unwrap_or(1)),
    };
    Ok((out, true))
}

fn read_stream(a: &AlgArgs) -> Result<Stream> {
    let stream = Stream::read(&a.stream)?;
    if stream.dims.n != a.n || stream.dims.m != a.m {
        return Err(Error::InvalidParameter(format!(
            "--n {} --m {} disagree with stream header n={} m={}",
            a.n, a.m, stream.dims.n, stream.dims.m
        )));
    }
    Ok(stream)
}

fn format_result(result: Option<&Neighbourhood>) -> String {
    match result {
        Some(nb) => {
            let mut text = format!("result {} {}\nwitnesses", nb.center(), nb.size());
            for b in nb.witnesses() {
                let _ = write!(text, " {b}");
            }
            text.push('\n');
            text
        }
        None => "fail\n".to_string(),
    }
}

fn generate(kind: GenKind) -> Result<String> {
    let (text, output, summary) = match kind {
        GenKind::Planted {
            n,
            m,
            d,
            background,
            churn,
            seed,
            output,
        } => {
            let inst = gen_planted_star(n, m, d, background, seed)?;
            let stream = if churn > 0 {
                with_churn(&inst.stream, churn, feww::seed::derive(seed, 1))?
            } else {
                inst.stream
            };
            (stream.to_text(), output, format!("center {}", inst.center))
        }
        GenKind::Setdisj {
            p,
            k,
            n,
            intersecting,
            seed,
            output,
        } => {
            let inst = gen_set_disjointness(p, k, n, intersecting, seed)?;
            let summary = match inst.planted {
                Some(x) => format!("planted {x}"),
                None => "disjoint".to_string(),
            };
            (inst.concatenated()?.to_text(), output, summary)
        }
        GenKind::Bvl { p, n, k, seed, output } => {
            let inst = BvlInstance::random(p, n, k, seed)?;
            let mut stream = Stream::new(inst.dims()?, StreamMode::InsertionOnly);
            for party in gen_bvl_graph(&inst)? {
                stream.extend_from(&party)?;
            }
            let mut truth = output.clone().into_os_string();
            truth.push(".truth");
            std::fs::write(&truth, inst.truth_text())?;
            (stream.to_text(), output, format!("index {}", inst.index_set(p)[0]))
        }
        GenKind::Amri {
            n,
            d,
            alpha,
            seed,
            output,
        } => {
            if alpha == 0 || d % alpha != 0 || d / alpha == 0 {
                return Err(Error::InvalidParameter(format!("alpha={alpha} must divide d={d}")));
            }
            let inst = AmriInstance::random(n, 2 * d, d / alpha - 1, seed)?
                .with_random_permutations(feww::seed::derive(seed, 1));
            let out = gen_amri_stream(&inst, alpha)?;
            (out.stream.to_text(), output, format!("target {}", inst.target()))
        }
        GenKind::Star { n, degree, seed, output } => {
            let (graph, hub) = gen_star_graph(n, degree, seed)?;
            (graph.to_text(), output, format!("hub {hub}"))
        }
    };
    std::fs::write(&output, text)?;
    Ok(format!("wrote {}\n{summary}\n", output.display()))
}

/// Parses `result <a> <k>` + `witnesses ...`, or `fail`. Other lines are
/// ignored so algorithm output can be passed through unchanged.
fn parse_result(text: &str) -> Result<Option<Neighbourhood>> {
    let perr = |line: usize, message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };
    let mut center = None;
    let mut witnesses = None;
    for (i, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("fail") => return Ok(None),
            Some("result") => {
                let a = fields.next().and_then(|f| f.parse::<u32>().ok());
                center = Some(a.ok_or_else(|| perr(i + 1, "bad center"))?);
            }
            Some("witnesses") => {
                let ws = fields
                    .map(|f| f.parse::<u32>().map_err(|_| perr(i + 1, "bad witness")))
                    .collect::<Result<Vec<_>>>()?;
                witnesses = Some(ws);
            }
            _ => {}
        }
    }
    match (center, witnesses) {
        (Some(a), Some(ws)) => Ok(Some(Neighbourhood::new(a, ws))),
        _ => Err(perr(1, "no `result` and `witnesses` lines and no `fail`")),
    }
}

fn load_graph(path: &Path) -> Result<ExactGraph> {
    let text = std::fs::read_to_string(path)?;
    match Stream::parse(&text) {
        Ok(stream) => stream.replay(),
        Err(bipartite) => GraphStream::parse(&text).and_then(|g| g.replay()).map_err(|_| bipartite),
    }
}

fn verify(stream: &Path, result: &Path, threshold: usize) -> Result<(String, bool)> {
    let graph = load_graph(stream)?;
    let nb = parse_result(&std::fs::read_to_string(result)?)?;
    let max = graph.max_degree();
    Ok(match nb {
        None => (format!("fail max_degree={max}\n"), true),
        Some(nb) => {
            let missing: Vec<u32> = nb
                .witnesses()
                .iter()
                .copied()
                .filter(|&b| !graph.contains(nb.center(), b))
                .collect();
            if !missing.is_empty() {
                (format!("unsound center={} missing={missing:?}\n", nb.center()), false)
            } else if nb.size() < threshold {
                (format!("short center={} witnesses={} threshold={threshold}\n", nb.center(), nb.size()), false)
            } else {
                (format!("valid center={} witnesses={} max_degree={max}\n", nb.center(), nb.size()), true)
            }
        }
    })
}
