use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use foldcover::cover_model::verify_certificate;
use foldcover::pipeline::{build_family, common_threshold, BuildOptions, CoverFamily, CoverSpec, PipelineError};
use foldcover::slopes::SlopeSystem;
use foldcover::LabeledGraph;

#[derive(Parser)]
#[command(name = "foldcover", about = "Build and certify finite covers of bounded surfaces")]
struct Cli {
    /// Worker threads for multi-spec or multi-N* runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the cover graph for each spec and N*; writes graph plus certificate.
    Build {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        /// Even target values; defaults to the common threshold of all specs.
        #[arg(long, value_delimiter = ',')]
        nstar: Vec<u64>,
        /// Output file, or a directory when several graphs are produced.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fold a graph and write it in canonical numbering.
    Fold {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the certificate on a graph file.
    Verify {
        graph: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        nstar: u64,
    },
    /// Emit Graphviz DOT.
    Dot {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the threshold of each spec and their maximum.
    Nmin {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
    },
    /// Print d values and curve counts for a slope system.
    Slopes { file: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("certificate failed for {0}")]
    Certificate(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Pipeline(e) => match e {
                PipelineError::Spec(_) | PipelineError::BadNStar { .. } | PipelineError::MismatchedD(..) => 2,
                PipelineError::SubgroupNotPeripheralFree { .. } | PipelineError::YNotSeparated { .. } => 3,
                _ => 4,
            },
            CliError::Certificate(_) => 4,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_spec(path: &Path) -> Result<CoverSpec, CliError> {
    CoverSpec::from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<LabeledGraph, CliError> {
    LabeledGraph::parse_text(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn seed() -> Result<u64, CliError> {
    match std::env::var("FOLDCOVER_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Input(format!("FOLDCOVER_SEED: bad integer `{s}`"))),
        Err(_) => Ok(0),
    }
}

fn families(specs: &[PathBuf]) -> Result<Vec<(PathBuf, CoverFamily)>, CliError> {
    let mut opts = BuildOptions::default();
    opts.completion.seed = seed()?;
    let loaded: Vec<(PathBuf, CoverSpec)> = specs.iter().map(|p| Ok((p.clone(), load_spec(p)?))).collect::<Result<_, CliError>>()?;
    loaded
        .into_par_iter()
        .map(|(p, s)| Ok((p, build_family(&s, &opts)?)))
        .collect()
}

fn cmd_build(specs: &[PathBuf], nstar: &[u64], out: Option<&Path>) -> Result<(), CliError> {
    let fams = families(specs)?;
    let list: Vec<u64> = if nstar.is_empty() {
        let all: Vec<CoverFamily> = fams.iter().map(|(_, f)| f.clone()).collect();
        vec![common_threshold(&all).unwrap()]
    } else {
        nstar.to_vec()
    };
    if fams.len() > 1 {
        let d0 = fams[0].1.d_i;
        if let Some((_, f)) = fams.iter().find(|(_, f)| f.d_i != d0) {
            return Err(PipelineError::MismatchedD(d0, f.d_i).into());
        }
    }
    let jobs: Vec<(&PathBuf, &CoverFamily, u64)> =
        fams.iter().flat_map(|(p, f)| list.iter().map(move |&n| (p, f, n))).collect();
    let many = jobs.len() > 1;
    let results: Vec<Result<(String, String, bool), CliError>> = jobs
        .par_iter()
        .map(|&(p, f, n)| {
            let g = f.instantiate(n)?;
            let cert = verify_certificate(&g, &f.spec, n);
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let name = format!("{stem}_N{n}.graph");
            Ok((name, format!("{}{}", g.to_text(), cert.to_text()), cert.passed()))
        })
        .collect();
    let mut failed = Vec::new();
    for r in results {
        let (name, text, passed) = r?;
        let first = text.lines().find(|l| l.starts_with("cert degree=")).unwrap_or_default().to_string();
        match (out, many) {
            (Some(dir), true) => {
                fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
                write_out(Some(&dir.join(&name)), &text)?;
                println!("{name}: {first}");
            }
            (Some(file), false) => {
                write_out(Some(file), &text)?;
                println!("{first}");
            }
            (None, _) => print!("{text}"),
        }
        if !passed {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Certificate(failed.join(", ")))
    }
}

fn cmd_nmin(specs: &[PathBuf]) -> Result<(), CliError> {
    let fams = families(specs)?;
    for (p, f) in &fams {
        println!("{}: case={} n={} m_star={} d_i={} n_min={}", p.display(), f.case.tag(), f.n, f.m_star, f.d_i, f.n_min);
    }
    let all: Vec<CoverFamily> = fams.into_iter().map(|(_, f)| f).collect();
    println!("n0={}", common_threshold(&all).unwrap());
    Ok(())
}

fn cmd_slopes(file: &Path) -> Result<(), CliError> {
    let sys = SlopeSystem::parse(&read(file)?).map_err(|e| CliError::Input(e.to_string()))?;
    let input = |e: foldcover::slopes::SlopeError| CliError::Input(e.to_string());
    for k in 1..=sys.torus_count() {
        let t = sys.torus(k).map_err(input)?;
        println!(
            "torus {k} delta={} c1={} c2={} d1={} d2={} intersections={}",
            foldcover::slopes::slope_intersection(t.slopes[0], t.slopes[1]),
            t.counts[0],
            t.counts[1],
            sys.d_ik(1, k).map_err(input)?,
            sys.d_ik(2, k).map_err(input)?,
            sys.intersection_count(k).map_err(input)?
        );
    }
    for i in 1..=2 {
        println!("surface {i} d={} ends={}", sys.d_i(i).map_err(input)?, sys.total_cusp_ends(i).map_err(input)?);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().ok();
    }
    match cli.cmd {
        Cmd::Build { specs, nstar, out } => cmd_build(&specs, &nstar, out.as_deref()),
        Cmd::Fold { graph, out } => {
            let g = load_graph(&graph)?;
            let (folded, _) = g.fold();
            write_out(out.as_deref(), &folded.canonical_relabel().0.to_text())
        }
        Cmd::Verify { graph, spec, nstar } => {
            let g = load_graph(&graph)?;
            let spec = load_spec(&spec)?;
            let cert = verify_certificate(&g, &spec, nstar);
            print!("{}", cert.to_text());
            if cert.passed() {
                Ok(())
            } else {
                Err(CliError::Certificate(graph.display().to_string()))
            }
        }
        Cmd::Dot { graph, out } => write_out(out.as_deref(), &load_graph(&graph)?.to_dot()),
        Cmd::Nmin { specs } => cmd_nmin(&specs),
        Cmd::Slopes { file } => cmd_slopes(&file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
