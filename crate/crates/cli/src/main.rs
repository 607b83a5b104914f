//! `packsat`: encode, split, solve, prove and certify packing-coloring
//! instances `D(r, k, c)`.
//!
//! Exit codes: 0 success, 10 satisfiable, 20 unsatisfiable, 1 error.
//! `pipeline` and `certify` exit 0 once a refutation is checked (and 10 if
//! the instance turns out satisfiable).

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use packsat::cnf::{parse_dimacs, Formula};
use packsat::encoder::{default_symmetry_layers, encode, Encoding, EncodingOptions};
use packsat::engine::{
    extract_centered_coloring, run_external, solve, solve_cubes, Budget, CubeRunOptions, SolveOptions, SolveStatus,
};
use packsat::grid::{verify_coloring, Verdict};
use packsat::proof::{
    certify_bound, check_steps, parse_drat, run_pipeline, PipelineConfig, PriorBound, UnsatEvidence,
};
use packsat::splitter::{count_cubes, CubeLayout, SplitParams};

/// Environment variable holding an external solver command template.
const SOLVER_ENV: &str = "PACKSAT_SOLVER";

#[derive(Parser)]
#[command(name = "packsat", version, about = "Packing colorings of the square grid as SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the CNF of D(r,k,c) and print its size.
    Encode(EncodeArgs),
    /// Generate PTR cubes (or just count them).
    Split(SplitArgs),
    /// Solve D(r,k,c), optionally through a cube split or an external solver.
    Solve(SolveArgs),
    /// Re-encoding, implication and tautology proofs, checked end to end.
    Pipeline(PipelineArgs),
    /// Check a DRAT refutation of the direct encoding and issue a bound.
    Certify(CertifyArgs),
    /// Solve D(r,k,c) for every center color c.
    SweepCenter(SweepArgs),
    /// Solve a DIMACS file and answer in solver-competition format.
    DimacsSolve(DimacsArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Direct,
    Plus,
}

#[derive(Args, Serialize)]
struct InstanceArgs {
    #[arg(short, long)]
    r: u32,
    #[arg(short, long)]
    k: u32,
    #[arg(short, long)]
    c: u32,
}

#[derive(Args, Serialize)]
struct EncodingArgs {
    #[arg(long, value_enum, default_value = "plus")]
    variant: VariantArg,
    #[arg(long)]
    alod: bool,
    /// Symmetry breaking with the default layers (colors k down to k-5).
    #[arg(long)]
    sym: bool,
    /// Explicit symmetry layer colors, comma separated.
    #[arg(long, value_delimiter = ',')]
    sym_layers: Option<Vec<u32>>,
    #[arg(long)]
    chessboard: bool,
    /// Keep the region definition clauses in the plus encoding.
    #[arg(long)]
    definitions: bool,
}

impl EncodingArgs {
    fn options(&self, k: u32) -> EncodingOptions {
        let mut o = match self.variant {
            VariantArg::Direct => EncodingOptions::direct(),
            VariantArg::Plus => EncodingOptions::plus(),
        };
        o = o.with_alod(self.alod).with_chessboard(self.chessboard);
        o.region_definitions = self.definitions;
        if let Some(layers) = &self.sym_layers {
            o = o.with_symmetry(layers.clone());
        } else if self.sym {
            o = o.with_symmetry(default_symmetry_layers(k));
        }
        o
    }
}

#[derive(Args, Serialize)]
struct EncodeArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    encoding: EncodingArgs,
    /// DIMACS output; a manifest is written next to it.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SplitArgs {
    #[arg(short = 'P', default_value_t = 6)]
    p: u32,
    #[arg(short = 'T', default_value_t = 7)]
    t: u32,
    #[arg(short = 'R', default_value_t = 9)]
    regions: u32,
    #[arg(short, long, default_value_t = 5)]
    r: u32,
    #[arg(short, long, default_value_t = 10)]
    k: u32,
    #[arg(short, long, default_value_t = 5)]
    c: u32,
    /// Print the closed-form count only.
    #[arg(long)]
    count_only: bool,
    #[arg(long)]
    alod: bool,
    /// iCNF output (formula plus cubes); a manifest is written next to it.
    #[arg(short, long, default_value = "cubes.icnf")]
    output: PathBuf,
}

#[derive(Args, Serialize)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    encoding: EncodingArgs,
    /// Cube split as P,T,R.
    #[arg(long, value_parser = parse_split)]
    split: Option<(u32, u32, u32)>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    conflicts: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Write the coloring of a satisfiable instance here.
    #[arg(long)]
    coloring: Option<PathBuf>,
    /// Per-cube DRAT proofs go to this directory.
    #[arg(long)]
    proof_dir: Option<PathBuf>,
    /// Line-delimited JSON journal; finished cubes are skipped on rerun.
    #[arg(long)]
    journal: Option<PathBuf>,
    /// Cube report; `.csv` and `.json` are written.
    #[arg(long)]
    report: Option<PathBuf>,
    /// External solver command with `{}` for the formula path (default:
    /// the PACKSAT_SOLVER environment variable, if set with --use-external).
    #[arg(long)]
    external: Option<String>,
    #[arg(long)]
    use_external: bool,
}

#[derive(Args, Serialize)]
struct PipelineArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    alod: bool,
    #[arg(long, value_parser = parse_split)]
    split: Option<(u32, u32, u32)>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Known lower bound for the certificate (defaults to k).
    #[arg(long)]
    prior: Option<u32>,
    #[arg(long, default_value = "assumed lower bound")]
    prior_source: String,
    /// Directory for proof.drat, report.csv/json and certificate.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CertifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// DRAT refutation of the direct encoding of D(r,k,c).
    #[arg(long)]
    proof: PathBuf,
    #[arg(long)]
    prior: u32,
    #[arg(long, default_value = "assumed lower bound")]
    prior_source: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(short, long)]
    r: u32,
    #[arg(short, long)]
    k: u32,
    #[command(flatten)]
    encoding: EncodingArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DimacsArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type CliResult = Result<u8, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Encode(a) => cmd_encode(a),
        Command::Split(a) => cmd_split(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Certify(a) => cmd_certify(a),
        Command::SweepCenter(a) => cmd_sweep(a),
        Command::DimacsSolve(a) => cmd_dimacs(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sha256_file(path: &Path) -> Result<String, String> {
    let bytes = fs::read(path).map_err(err)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Serialize)]
struct FileDigest {
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    options: &'a T,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Records how `outputs` were produced, next to the first of them.
fn write_manifest<T: Serialize>(
    subcommand: &'static str,
    options: &T,
    inputs: &[&Path],
    outputs: &[&Path],
) -> Result<(), String> {
    let digest = |p: &&Path| -> Result<FileDigest, String> {
        Ok(FileDigest {
            path: p.to_path_buf(),
            sha256: sha256_file(p)?,
        })
    };
    let m = RunManifest {
        tool: "packsat",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        options,
        inputs: inputs.iter().map(digest).collect::<Result<_, _>>()?,
        outputs: outputs.iter().map(digest).collect::<Result<_, _>>()?,
    };
    let Some(first) = outputs.first() else { return Ok(()) };
    fs::write(manifest_path(first), serde_json::to_string_pretty(&m).map_err(err)?).map_err(err)
}

fn encode_instance(inst: &InstanceArgs, enc: &EncodingArgs) -> Result<Encoding, String> {
    encode(inst.r, inst.k, inst.c, &enc.options(inst.k)).map_err(err)
}

fn cmd_encode(a: &EncodeArgs) -> CliResult {
    let enc = encode_instance(&a.instance, &a.encoding)?;
    let f = &enc.formula;
    if let Some(path) = &a.output {
        let mut out = BufWriter::new(fs::File::create(path).map_err(err)?);
        f.write_dimacs(&mut out).map_err(err)?;
        out.flush().map_err(err)?;
        drop(out);
        write_manifest("encode", a, &[], &[path])?;
        let desc = f.descriptor().expect("encoder sets a descriptor");
        let mut desc_path = path.as_os_str().to_owned();
        desc_path.push(".instance.json");
        fs::write(PathBuf::from(desc_path), desc.to_json()).map_err(err)?;
    }
    println!(
        "variant={} r={} k={} c={} vars={} clauses={}",
        f.descriptor().map_or("direct".to_string(), |d| d.variant.to_string()),
        a.instance.r,
        a.instance.k,
        a.instance.c,
        f.num_vars(),
        f.num_clauses()
    );
    Ok(0)
}

fn cmd_split(a: &SplitArgs) -> CliResult {
    if a.count_only {
        if a.p > a.t {
            return Err(format!("P = {} exceeds T = {}", a.p, a.t));
        }
        println!("{}", count_cubes(a.p, a.t, a.regions));
        return Ok(0);
    }
    let enc = encode(a.r, a.k, a.c, &EncodingOptions::plus().with_alod(a.alod)).map_err(err)?;
    let params = SplitParams::new(a.p, a.t, a.regions, a.k, a.c);
    let layout = CubeLayout::new(&params, &enc.regions, &enc.map).map_err(err)?;
    let mut out = BufWriter::new(fs::File::create(&a.output).map_err(err)?);
    writeln!(out, "p inccnf").map_err(err)?;
    // the formula body, without its DIMACS header
    let dimacs = enc.formula.to_dimacs();
    let body = dimacs.split(|&b| b == b'\n').skip(1).filter(|l| !l.is_empty());
    for line in body {
        out.write_all(line).map_err(err)?;
        out.write_all(b"\n").map_err(err)?;
    }
    let mut n = 0u64;
    for cube in layout.cubes() {
        writeln!(out, "{cube}").map_err(err)?;
        n += 1;
    }
    out.flush().map_err(err)?;
    drop(out);
    write_manifest("split", a, &[], &[&a.output])?;
    println!("cubes={n} output={}", a.output.display());
    Ok(0)
}

fn status_word(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Sat => "SAT",
        SolveStatus::Unsat => "UNSAT",
        SolveStatus::Unknown => "UNKNOWN",
    }
}

fn status_code(s: SolveStatus) -> u8 {
    s.exit_code() as u8
}

fn write_coloring(model: &[bool], enc: &Encoding, path: &Path) -> Result<(), String> {
    let c = enc.formula.descriptor().map_or(0, |d| d.c);
    let col = extract_centered_coloring(model, &enc.map, c).map_err(err)?;
    if let Verdict::Violation { u, v, color } = verify_coloring(&col) {
        return Err(format!("extracted coloring is invalid: {u:?} and {v:?} share {color}"));
    }
    fs::write(path, col.to_text()).map_err(err)
}

fn cmd_solve(a: &SolveArgs) -> CliResult {
    let enc = encode_instance(&a.instance, &a.encoding)?;
    let f = &enc.formula;
    let template = a
        .external
        .clone()
        .or_else(|| if a.use_external { std::env::var(SOLVER_ENV).ok() } else { None });
    if let Some(t) = template {
        let dir = std::env::temp_dir().join(format!("packsat-{}", std::process::id()));
        let res = run_external(f, &t, &dir).map_err(err);
        let _ = fs::remove_dir_all(&dir);
        let res = res?;
        if let (Some(m), Some(p)) = (&res.model, &a.coloring) {
            write_coloring(m, &enc, p)?;
        }
        println!("status={} seconds={:.3} solver=external", status_word(res.status), res.stats.wall.as_secs_f64());
        return Ok(status_code(res.status));
    }

    let budget = Budget {
        conflicts: a.conflicts,
        time: a.timeout.map(Duration::from_secs_f64),
    };
    let solve_opts = SolveOptions {
        seed: a.seed,
        budget,
        proof: a.proof_dir.is_some(),
    };
    let cubes = match a.split {
        Some((p, t, r)) => {
            let params = SplitParams::new(p, t, r, a.instance.k, a.instance.c);
            CubeLayout::new(&params, &enc.regions, &enc.map).map_err(err)?.cubes().collect()
        }
        None => vec![packsat::splitter::Cube {
            index: 0,
            lits: Vec::new(),
        }],
    };
    let opts = CubeRunOptions {
        workers: a.workers,
        solve: solve_opts,
        proof_dir: a.proof_dir.clone(),
        journal: a.journal.clone(),
        stop_on_sat: true,
    };
    let start = Instant::now();
    let run = solve_cubes(f, &cubes, &opts).map_err(err)?;
    let status = run.report.status();
    if let Some(path) = &a.report {
        let csv = path.with_extension("csv");
        let json = path.with_extension("json");
        fs::write(&csv, run.report.to_csv()).map_err(err)?;
        fs::write(&json, serde_json::to_string_pretty(&run.report).map_err(err)?).map_err(err)?;
        write_manifest("solve", a, &[], &[&csv, &json])?;
    }
    if let (Some(m), Some(p)) = (&run.model, &a.coloring) {
        write_coloring(m, &enc, p)?;
        write_manifest("solve", a, &[], &[p])?;
    }
    println!(
        "status={} cubes={} conflicts={} seconds={:.3} max_cube_seconds={:.3} avg_cube_seconds={:.3}",
        status_word(status),
        run.report.rows.len(),
        run.report.total_conflicts(),
        start.elapsed().as_secs_f64(),
        run.report.max_seconds(),
        run.report.avg_seconds()
    );
    Ok(status_code(status))
}

/// `P,T,R`.
fn parse_split(s: &str) -> Result<(u32, u32, u32), String> {
    let v: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(err))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [p, t, r] => Ok((p, t, r)),
        _ => Err(format!("expected P,T,R, got {s:?}")),
    }
}

fn cmd_pipeline(a: &PipelineArgs) -> CliResult {
    let i = &a.instance;
    let cfg = PipelineConfig {
        r: i.r,
        k: i.k,
        c: i.c,
        alod: a.alod,
        split: a.split,
        workers: a.workers,
        seed: a.seed,
    };
    let out = run_pipeline(&cfg).map_err(err)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(err)?;
        fs::write(dir.join("report.csv"), out.report.to_csv()).map_err(err)?;
        fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(&out.report).map_err(err)?,
        )
        .map_err(err)?;
    }
    let (Some(pipeline), Some(check)) = (&out.pipeline, &out.check) else {
        println!(
            "status={} cubes={} seconds={:.3}",
            status_word(out.status),
            out.report.rows.len(),
            out.solve_time.as_secs_f64()
        );
        return Ok(match out.status {
            SolveStatus::Sat => 10,
            _ => 1,
        });
    };
    let evidence = UnsatEvidence::from_pipeline(&out.descriptor, pipeline, check);
    let prior = PriorBound {
        value: a.prior.unwrap_or(i.k),
        source: a.prior_source.clone(),
    };
    let cert = certify_bound(i.r, i.k, i.c, prior, &evidence).map_err(err)?;
    if let Some(dir) = &a.out {
        let proof_path = dir.join("proof.drat");
        let mut w = BufWriter::new(fs::File::create(&proof_path).map_err(err)?);
        pipeline.write_drat(&mut w).map_err(err)?;
        w.flush().map_err(err)?;
        drop(w);
        let cert_path = dir.join("certificate.json");
        fs::write(&cert_path, cert.to_json()).map_err(err)?;
        write_manifest("pipeline", a, &[], &[&proof_path, &cert_path, &dir.join("report.csv")])?;
    }
    println!(
        "status=UNSAT checked=true steps={} solve_seconds={:.3} check_seconds={:.3} bound={}",
        pipeline.steps.len(),
        out.solve_time.as_secs_f64(),
        check.stats.wall.as_secs_f64(),
        cert.conclusion
    );
    Ok(0)
}

fn cmd_certify(a: &CertifyArgs) -> CliResult {
    let i = &a.instance;
    let direct = encode(i.r, i.k, i.c, &EncodingOptions::direct()).map_err(err)?;
    let text = fs::read(&a.proof).map_err(err)?;
    let steps = parse_drat(&text[..]).map_err(err)?;
    let outcome = check_steps(&direct.formula, &steps, &[]).map_err(|e| format!("proof rejected: {e}"))?;
    if !outcome.refuted {
        return Err("proof rejected: no empty clause derived".into());
    }
    let evidence = UnsatEvidence {
        r: i.r,
        k: i.k,
        c: i.c,
        proof_digest: Sha256::digest(&text).iter().map(|b| format!("{b:02x}")).collect(),
        checked: true,
        trusted_symmetry: false,
    };
    let prior = PriorBound {
        value: a.prior,
        source: a.prior_source.clone(),
    };
    let cert = certify_bound(i.r, i.k, i.c, prior, &evidence).map_err(err)?;
    match &a.output {
        Some(p) => {
            fs::write(p, cert.to_json()).map_err(err)?;
            write_manifest("certify", a, &[&a.proof], &[p])?;
        }
        None => println!("{}", cert.to_json()),
    }
    eprintln!("{}", cert.conclusion);
    Ok(0)
}

fn cmd_sweep(a: &SweepArgs) -> CliResult {
    let mut csv = String::from("c,status,seconds,conflicts\n");
    for c in 1..=a.k {
        let enc = encode(a.r, a.k, c, &a.encoding.options(a.k)).map_err(err)?;
        let opts = SolveOptions {
            seed: a.seed,
            ..SolveOptions::default()
        };
        let res = solve(&enc.formula, &[], &opts).map_err(err)?;
        csv.push_str(&format!(
            "{c},{},{:.6},{}\n",
            status_word(res.status),
            res.stats.wall.as_secs_f64(),
            res.stats.conflicts
        ));
    }
    match &a.output {
        Some(p) => {
            fs::write(p, &csv).map_err(err)?;
            write_manifest("sweep-center", a, &[], &[p])?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_dimacs(a: &DimacsArgs) -> CliResult {
    let file = fs::File::open(&a.input).map_err(err)?;
    let f: Formula = parse_dimacs(io::BufReader::new(file)).map_err(err)?;
    let opts = SolveOptions {
        seed: a.seed,
        ..SolveOptions::default()
    };
    let res = solve(&f, &[], &opts).map_err(err)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match res.status {
        SolveStatus::Sat => {
            writeln!(out, "s SATISFIABLE").map_err(err)?;
            let model = res.model.unwrap_or_default();
            let mut line = String::from("v");
            for (i, &val) in model.iter().enumerate() {
                let lit = if val { i as i64 + 1 } else { -(i as i64 + 1) };
                line.push_str(&format!(" {lit}"));
                if line.len() > 70 {
                    writeln!(out, "{line}").map_err(err)?;
                    line = String::from("v");
                }
            }
            writeln!(out, "{line} 0").map_err(err)?;
        }
        SolveStatus::Unsat => writeln!(out, "s UNSATISFIABLE").map_err(err)?,
        SolveStatus::Unknown => writeln!(out, "s UNKNOWN").map_err(err)?,
    }
    Ok(status_code(res.status))
}
