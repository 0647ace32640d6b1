use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use ribbonzeta::distributions::{
    grid_delta, histogram, kde, wasserstein1, DistributionError, EmpiricalDistribution, GridError,
};
use ribbonzeta::geodesics::{enumerate_geodesics, is_simple, GeodesicError};
use ribbonzeta::io::{parse_graph, ParseError};
use ribbonzeta::kontsevich::{
    cell_constant, ConstraintMode, KontsevichError, KontsevichSampler, SamplerOptions,
};
use ribbonzeta::zeta::{delta, delta_spectral, upper_bound_delta, Method, ZetaError};
use ribbonzeta::{enumerate_trivalent_types, MetricRibbonGraph, RibbonError};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "ribbonzeta", version, about = "Critical exponents and Kontsevich sampling for metric ribbon graphs")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a graph file and print its type, faces and face lengths.
    Validate { file: PathBuf },
    /// List trivalent types of a moduli space with automorphisms and volume constants.
    Cells { g: i64, n: i64 },
    /// Primitive closed geodesics up to a length.
    Geodesics {
        file: PathBuf,
        #[arg(long)]
        max_length: f64,
        #[arg(long)]
        simple_only: bool,
    },
    /// Critical exponent of a graph.
    Delta {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Compare all methods for the critical exponent on one graph.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Sample the Kontsevich measure: `g n L1 ... Ln N`.
    Sample {
        g: i64,
        n: i64,
        /// Boundary lengths (comma separated or one per argument) followed by the sample count.
        #[arg(num_args = 2.., required = true)]
        rest: Vec<String>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Histogram of sampled critical exponents: `g n L... N`.
    Dist {
        g: i64,
        n: i64,
        #[arg(num_args = 2.., required = true)]
        rest: Vec<String>,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Add a Gaussian kernel density column with this bandwidth.
        #[arg(long)]
        kde: Option<f64>,
    },
    /// Critical exponent over the one-holed-torus simplex.
    Grid {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Wasserstein-1 distance between two sample files.
    Wasserstein { file_a: PathBuf, file_b: PathBuf },
}

#[derive(clap::Args, Debug)]
struct SamplingArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    mode: ModeArg,
    /// Do not divide cell weights by automorphism counts.
    #[arg(long)]
    no_aut_weight: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Spectral,
    Polynomial,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Spectral => Method::Spectral,
            MethodArg::Polynomial => Method::Polynomial,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Standard,
    #[value(name = "paper-11")]
    Paper11,
}

impl From<ModeArg> for ConstraintMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Standard => ConstraintMode::Standard,
            ModeArg::Paper11 => ConstraintMode::Paper11,
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Kontsevich(#[from] KontsevichError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verify(String),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse(_) => "parse",
            CliError::Ribbon(_) => "ribbon",
            CliError::Geodesic(_) => "geodesic",
            CliError::Zeta(_) => "zeta",
            CliError::Kontsevich(_) => "kontsevich",
            CliError::Distribution(_) | CliError::Grid(_) => "distribution",
            CliError::Input(_) => "input",
            CliError::Verify(_) => "verify",
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_graph(path: &Path) -> Result<MetricRibbonGraph, CliError> {
    Ok(parse_graph(&read(path)?)?)
}

fn header(command: &Command, seed: Option<u64>) -> String {
    let mut h = format!("# ribbonzeta {VERSION}\n# config: {command:?}\n");
    if let Some(s) = seed {
        writeln!(h, "# seed: {s}").unwrap();
    }
    h
}

/// Splits `L1 ... Ln N` into boundary lengths and a sample count.
fn boundary_and_count(rest: &[String], n: i64) -> Result<(Vec<f64>, usize), CliError> {
    let (count, lengths) = rest.split_last().unwrap();
    let count: usize = count
        .parse()
        .map_err(|_| CliError::Input(format!("sample count `{count}` is not a nonnegative integer")))?;
    let mut boundary = Vec::new();
    for part in lengths.iter().flat_map(|s| s.split(',')).filter(|s| !s.is_empty()) {
        let v: f64 = part
            .parse()
            .map_err(|_| CliError::Input(format!("boundary length `{part}` is not a number")))?;
        boundary.push(v);
    }
    if boundary.len() != n as usize && n >= 0 {
        return Err(CliError::Input(format!(
            "expected {n} boundary lengths, got {}",
            boundary.len()
        )));
    }
    if count == 0 {
        return Err(CliError::Input("sample count must be positive".into()));
    }
    Ok((boundary, count))
}

struct Drawn {
    cell_id: usize,
    labeling: Vec<usize>,
    lengths: Vec<f64>,
    delta: f64,
}

fn draw_deltas(g: i64, n: i64, rest: &[String], s: &SamplingArgs) -> Result<Vec<Drawn>, CliError> {
    let (boundary, count) = boundary_and_count(rest, n)?;
    let opts = SamplerOptions {
        mode: s.mode.into(),
        no_aut_weight: s.no_aut_weight,
    };
    let sampler = KontsevichSampler::new(g, n, &boundary, opts)?;
    let drawn = sampler.map_samples(count, s.seed, |p| {
        delta_spectral(&p.graph, 1e-12).map(|d| Drawn {
            cell_id: p.cell_id,
            labeling: p.labeling.clone(),
            lengths: p.graph.lengths().to_vec(),
            delta: d.delta,
        })
    })?;
    Ok(drawn.into_iter().collect::<Result<_, _>>()?)
}

fn run(command: &Command) -> Result<String, CliError> {
    let mut out = String::new();
    match command {
        Command::Validate { file } => {
            let g = load_graph(file)?;
            let rg = g.graph();
            let (genus, n) = rg.topological_type();
            writeln!(out, "type: ({genus},{n})").unwrap();
            writeln!(out, "vertices: {}", rg.n_vertices()).unwrap();
            writeln!(out, "edges: {}", rg.n_edges()).unwrap();
            for (f, (cycle, len)) in rg.faces().iter().zip(g.face_lengths()).enumerate() {
                let hs: Vec<String> = cycle.iter().map(|h| h.to_string()).collect();
                writeln!(out, "face {f}: [{}] length {len}", hs.join(" ")).unwrap();
            }
        }
        Command::Cells { g, n } => {
            out += &header(command, None);
            writeln!(out, "cell_id,automorphisms,loops,constant").unwrap();
            for (i, cell) in enumerate_trivalent_types(*g, *n)?.iter().enumerate() {
                let rg = &cell.representative;
                let loops = (0..rg.n_edges()).filter(|&e| rg.is_loop(e)).count();
                let c = cell_constant(cell)?;
                writeln!(out, "{i},{},{loops},{c}", cell.automorphism_count).unwrap();
            }
        }
        Command::Geodesics {
            file,
            max_length,
            simple_only,
        } => {
            let g = load_graph(file)?;
            out += &header(command, None);
            writeln!(out, "steps,metric_length,combinatorial_length,simple").unwrap();
            for p in enumerate_geodesics(&g, *max_length)? {
                let simple = match is_simple(&g, &p) {
                    Ok(b) => Some(b),
                    Err(GeodesicError::NotTrivalent) => None,
                    Err(e) => return Err(e.into()),
                };
                if *simple_only && simple != Some(true) {
                    continue;
                }
                let flag = simple.map_or("na".to_string(), |b| b.to_string());
                writeln!(
                    out,
                    "{},{},{},{flag}",
                    p.format_steps(),
                    p.metric_length(),
                    p.combinatorial_length()
                )
                .unwrap();
            }
        }
        Command::Delta { file, method, tol } => {
            let g = load_graph(file)?;
            let d = delta(&g, (*method).into(), *tol)?;
            writeln!(out, "delta,method,residual").unwrap();
            writeln!(out, "{},{},{:e}", d.delta, d.method.name(), d.residual).unwrap();
        }
        Command::Verify { file, tol } => {
            let g = load_graph(file)?;
            let spectral = delta(&g, Method::Spectral, *tol)?;
            writeln!(out, "method,delta,residual").unwrap();
            writeln!(out, "spectral,{},{:e}", spectral.delta, spectral.residual).unwrap();
            let mut failures = Vec::new();
            match delta(&g, Method::Polynomial, *tol) {
                Ok(p) => {
                    writeln!(out, "polynomial,{},{:e}", p.delta, p.residual).unwrap();
                    if (p.delta - spectral.delta).abs() > 1e-8 {
                        failures.push(format!("polynomial differs from spectral by {}", p.delta - spectral.delta));
                    }
                }
                Err(ZetaError::NotRational) => writeln!(out, "polynomial,na,na").unwrap(),
                Err(e) => return Err(e.into()),
            }
            let o = delta(&g, Method::Oracle, *tol)?;
            writeln!(out, "oracle,{},{:e}", o.delta, o.residual).unwrap();
            let rel = (o.delta - spectral.delta).abs() / spectral.delta;
            if rel > 0.05 {
                failures.push(format!("oracle differs from spectral by {:.2}%", 100.0 * rel));
            }
            let ub = upper_bound_delta(&g);
            writeln!(out, "upper_bound,{},na", ub.value).unwrap();
            if spectral.delta > ub.value {
                failures.push(format!("delta {} exceeds upper bound {}", spectral.delta, ub.value));
            }
            if !failures.is_empty() {
                print!("{out}");
                return Err(CliError::Verify(failures.join("; ")));
            }
        }
        Command::Sample { g, n, rest, sampling } => {
            let drawn = draw_deltas(*g, *n, rest, sampling)?;
            out += &header(command, Some(sampling.seed));
            let e = drawn.first().map_or(0, |d| d.lengths.len());
            let cols: Vec<String> = (0..e).map(|i| format!("l{i}")).collect();
            writeln!(out, "cell_id,labeling,{},delta", cols.join(",")).unwrap();
            for d in &drawn {
                let lab: Vec<String> = d.labeling.iter().map(|x| x.to_string()).collect();
                let ls: Vec<String> = d.lengths.iter().map(|x| x.to_string()).collect();
                writeln!(out, "{},{},{},{}", d.cell_id, lab.join(" "), ls.join(","), d.delta).unwrap();
            }
        }
        Command::Dist {
            g,
            n,
            rest,
            sampling,
            bins,
            kde: bandwidth,
        } => {
            let drawn = draw_deltas(*g, *n, rest, sampling)?;
            let values: Vec<f64> = drawn.iter().map(|d| d.delta).collect();
            let dist = EmpiricalDistribution::from_samples(&values)?;
            let h = histogram(&dist, *bins, None)?;
            out += &header(command, Some(sampling.seed));
            match bandwidth {
                None => {
                    writeln!(out, "left,right,mass,density").unwrap();
                    out += &h.to_csv_rows();
                }
                Some(bw) => {
                    let dens = kde(&dist, *bw, &h.centers());
                    writeln!(out, "left,right,mass,density,kde").unwrap();
                    for (row, k) in h.to_csv_rows().lines().zip(dens) {
                        writeln!(out, "{row},{k}").unwrap();
                    }
                }
            }
        }
        Command::Grid { resolution, tol } => {
            let pts = grid_delta(*resolution, *tol)?;
            out += &header(command, None);
            writeln!(out, "x,y,z,delta").unwrap();
            for p in pts {
                writeln!(out, "{},{},{},{}", p.x, p.y, p.z, p.delta).unwrap();
            }
        }
        Command::Wasserstein { file_a, file_b } => {
            let a = read_samples(file_a)?;
            let b = read_samples(file_b)?;
            writeln!(out, "{}", wasserstein1(&a, &b)).unwrap();
        }
    }
    Ok(out)
}

/// Reads the `delta` column of a CSV (or its first column when there is no
/// such header), skipping `#` comments.
fn read_samples(path: &Path) -> Result<EmpiricalDistribution, CliError> {
    let text = read(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).peekable();
    let mut column = 0;
    if let Some(first) = lines.peek() {
        if first.split(',').next().is_some_and(|c| c.trim().parse::<f64>().is_err()) {
            column = first.split(',').position(|c| c.trim() == "delta").unwrap_or(0);
            lines.next();
        }
    }
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let cell = line.split(',').nth(column).unwrap_or("").trim();
        let v = cell.parse::<f64>().map_err(|_| {
            CliError::Input(format!("{}: row {}: `{cell}` is not a number", path.display(), i + 1))
        })?;
        values.push(v);
    }
    Ok(EmpiricalDistribution::from_samples(&values)?)
}

fn configure_threads() {
    if let Some(n) = std::env::var("RIBBONZETA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = run(&cli.command).and_then(|text| match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            })
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
