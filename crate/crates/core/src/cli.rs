//! Command-line front end.
//!
//! Exit status: 0 when the outcome is the expected one, 1 on a mathematical
//! surprise, 2 on usage or input errors, 3 when the node budget runs out.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;

use crate::bounds;
use crate::catalog::{self, Outcome, Status};
use crate::error::Error;
use crate::poonen::{
    default_probes, find_c, inequality_of, k_value, min_k_search, prove_not_fc, verify_fc,
    BranchOrder, Certificate, Discovery, SearchOptions, SearchOutcome, Verdict, WeightVector,
};
use crate::rational::{fmt_q, fmt_q_list};
use crate::ratlp::{feasible, Feasibility, FeasibilityProblem};
use crate::setfam::{format_injection, Family, GeneratorSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SURPRISE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "fcforge",
    version,
    about = "Verify and search for FC-families of union-closed sets"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Node budget for exhaustive searches (overrides FCFORGE_BUDGET).
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Fc,
    Counterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Include,
    Exclude,
}

#[derive(Args, Debug)]
pub struct GensArg {
    /// Generator system file.
    #[arg(long)]
    pub gens: PathBuf,

    /// Widen the ground set to this size.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the union-closed family generated by a system.
    Close(GensArg),
    /// Check one weight vector against every admissible family.
    Verify {
        #[command(flatten)]
        gens: GensArg,
        /// Weights, e.g. `3,3,2,2,2` or `1/2,1/4,1/4`.
        #[arg(long)]
        c: String,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        #[arg(long, value_enum, default_value_t = Order::Include)]
        order: Order,
        /// Re-run a successful verification with the other branch order.
        #[arg(long)]
        recheck: bool,
    },
    /// Search for weights, or certify that none exist.
    FindC {
        #[command(flatten)]
        gens: GensArg,
        /// Extra probe family files.
        #[arg(long)]
        probe: Vec<PathBuf>,
    },
    /// Farkas certificate from probe families (default probes if none given).
    ProveNotFc {
        #[command(flatten)]
        gens: GensArg,
        #[arg(long)]
        probe: Vec<PathBuf>,
    },
    /// Exact minimum of K over admissible families, with a witness.
    MinK {
        #[command(flatten)]
        gens: GensArg,
        #[arg(long)]
        c: String,
    },
    /// Counting bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Level comparison for families with many 2-sets.
    Vcj {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with_all = ["samples", "seed"])]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Built-in families.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Compare the default probes with full verification.
    ProbeCompare {
        #[command(flatten)]
        gens: GensArg,
        /// Use these weights instead of solving the probe system.
        #[arg(long)]
        c: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    Dj {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: u128,
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    Cascade {
        #[arg(long)]
        r: u128,
        #[arg(long)]
        k: usize,
    },
    Window {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
    },
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
    },
    Pigeonhole {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogCmd {
    List,
    Verify {
        #[arg(long)]
        id: Option<String>,
        /// Print per-entry wall time.
        #[arg(long)]
        timings: bool,
    },
    Detect {
        #[arg(long)]
        family: PathBuf,
    },
    Scan {
        #[arg(long, default_value = "5.2")]
        lemma: String,
    },
}

/// Failure that maps to an exit status.
#[derive(Debug)]
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(EXIT_USAGE, e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            // The reader went away; nothing left to report.
            return Fail(EXIT_OK, String::new());
        }
        Fail(EXIT_USAGE, e.to_string())
    }
}

type CliResult = std::result::Result<i32, Fail>;

struct Out<'a> {
    w: &'a mut dyn Write,
    format: Format,
}

impl Out<'_> {
    fn line(&mut self, s: impl AsRef<str>) -> io::Result<()> {
        writeln!(self.w, "{}", s.as_ref())
    }

    fn header(&mut self) -> io::Result<()> {
        if self.format == Format::Machine {
            self.line("format=1")?;
        }
        Ok(())
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> io::Result<()> {
        writeln!(self.w, "{key}={value}")
    }

    fn block(&mut self, label: &str, text: &str) -> io::Result<()> {
        self.line(label)?;
        for l in text.lines() {
            self.line(l)?;
        }
        Ok(())
    }
}

/// Parses arguments and runs; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                let _ = writeln!(err, "error: {msg}");
            }
            code
        }
    }
}

fn budget(cli: &Cli) -> std::result::Result<u64, Fail> {
    let b = match cli.budget {
        Some(b) => b,
        None => match std::env::var("FCFORGE_BUDGET") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Fail(EXIT_USAGE, format!("FCFORGE_BUDGET is not a number: `{v}`")))?,
            Err(_) => DEFAULT_BUDGET,
        },
    };
    if b == 0 {
        return Err(Fail(EXIT_USAGE, "budget must be positive".into()));
    }
    Ok(b)
}

fn search_options(cli: &Cli) -> std::result::Result<SearchOptions, Fail> {
    let mut opts = SearchOptions {
        budget: budget(cli)?,
        ..SearchOptions::default()
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Fail(EXIT_USAGE, "--threads must be positive".into()));
        }
        opts.threads = t;
    }
    Ok(opts)
}

fn read(path: &Path) -> std::result::Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: crate::error::Result<T>) -> std::result::Result<T, Fail> {
    r.map_err(|e| Fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_gens(arg: &GensArg) -> std::result::Result<GeneratorSystem, Fail> {
    let s = with_path(&arg.gens, read(&arg.gens)?.parse::<GeneratorSystem>())?;
    match arg.n {
        Some(n) => Ok(s.widen(n)?),
        None => Ok(s),
    }
}

fn load_family(path: &Path) -> std::result::Result<Family, Fail> {
    with_path(path, read(path)?.parse::<Family>())
}

fn load_probes(paths: &[PathBuf], n: usize) -> std::result::Result<Vec<Family>, Fail> {
    paths
        .iter()
        .map(|p| {
            let f = load_family(p)?;
            if f.ground() != n {
                return Err(Fail(
                    EXIT_USAGE,
                    format!(
                        "{}: ground set {} differs from {n}",
                        p.display(),
                        f.ground()
                    ),
                ));
            }
            Ok(f)
        })
        .collect()
}

fn weights(s: &str, n: usize) -> std::result::Result<WeightVector, Fail> {
    let c = WeightVector::parse(s)?;
    if c.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: c.len(),
        }
        .into());
    }
    Ok(c)
}

fn execute(cli: &Cli, w: &mut dyn Write) -> CliResult {
    if let Some(t) = cli.threads {
        // Ignored if a global pool already exists (e.g. repeated in-process runs).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
    let mut out = Out {
        w,
        format: cli.format,
    };
    out.header()?;
    match &cli.command {
        Command::Close(g) => {
            let fam = load_gens(g)?.close();
            write!(out.w, "{fam}")?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            gens,
            c,
            expect,
            order,
            recheck,
        } => cmd_verify(cli, &mut out, gens, c, *expect, *order, *recheck),
        Command::FindC { gens, probe } => cmd_find_c(cli, &mut out, gens, probe),
        Command::ProveNotFc { gens, probe } => {
            let b = load_gens(gens)?.close();
            let probes = load_probes(probe, b.ground())?;
            match prove_not_fc(&b, &probes)? {
                Some(wit) => {
                    let ok = wit.recheck(&b);
                    write_certificate(&mut out, &Certificate::NotFc(wit))?;
                    Ok(if ok { EXIT_OK } else { EXIT_SURPRISE })
                }
                None => {
                    out.line("no certificate from these probes")?;
                    Ok(EXIT_OK)
                }
            }
        }
        Command::MinK { gens, c } => {
            let b = load_gens(gens)?.close();
            let c = weights(c, b.ground())?;
            match min_k_search(&b, &c, &search_options(cli)?)? {
                SearchOutcome::Complete {
                    min_k,
                    witness,
                    nodes,
                } => {
                    out.kv("minK", fmt_q(&min_k))?;
                    out.kv("nodes", nodes)?;
                    out.block("witness:", &witness.to_string())?;
                    Ok(EXIT_OK)
                }
                SearchOutcome::Exhausted {
                    nodes,
                    best_k,
                    best_family,
                } => {
                    out.line("Inconclusive")?;
                    out.kv("nodes", nodes)?;
                    out.kv("bestK", fmt_q(&best_k))?;
                    out.block("best:", &best_family.to_string())?;
                    Ok(EXIT_BUDGET)
                }
            }
        }
        Command::Bounds(b) => cmd_bounds(&mut out, b),
        Command::Vcj {
            n,
            exhaustive,
            samples,
            seed,
        } => {
            let report = if *exhaustive || (samples.is_none() && seed.is_none() && *n <= 5) {
                bounds::vcj_exhaustive(*n)?
            } else {
                let seed = seed.unwrap_or_else(|| {
                    SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map(|d| d.as_nanos() as u64)
                        .unwrap_or(0)
                });
                bounds::vcj_sampled(*n, samples.unwrap_or(100_000), seed)?
            };
            match out.format {
                Format::Text => out.line(report.to_string())?,
                Format::Machine => {
                    for l in report.machine_lines() {
                        out.line(l)?;
                    }
                }
            }
            if let (Format::Text, Some(f)) = (out.format, &report.first_violation) {
                out.block("violation:", &f.to_string())?;
            }
            Ok(if report.ok() { EXIT_OK } else { EXIT_SURPRISE })
        }
        Command::Catalog(c) => cmd_catalog(cli, &mut out, c),
        Command::ProbeCompare { gens, c } => cmd_probe_compare(cli, &mut out, gens, c.as_deref()),
    }
}

fn write_certificate(out: &mut Out<'_>, cert: &Certificate) -> io::Result<()> {
    out.line(cert.to_string())?;
    if let Certificate::NotFc(w) = cert {
        for p in &w.probes {
            out.block(&format!("probe {}", p.content_hash()), &p.to_string())?;
        }
    }
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    out: &mut Out<'_>,
    gens: &GensArg,
    c: &str,
    expect: Option<Expect>,
    order: Order,
    recheck: bool,
) -> CliResult {
    let b = load_gens(gens)?.close();
    let c = weights(c, b.ground())?;
    let mut opts = search_options(cli)?;
    opts.order = match order {
        Order::Include => BranchOrder::IncludeFirst,
        Order::Exclude => BranchOrder::ExcludeFirst,
    };
    let verdict = verify_fc(&b, &c, &opts)?;
    out.line(verdict.to_string())?;
    let got = match &verdict {
        Verdict::FcVerified { .. } => Expect::Fc,
        Verdict::CounterexampleFound { family, k, .. } => {
            out.block("counterexample:", &family.to_string())?;
            let sound = crate::poonen::check_admissible(family, &b).is_ok()
                && k_value(family, &c)? == *k
                && k.is_negative();
            if !sound {
                out.line("counterexample failed re-check")?;
                return Ok(EXIT_SURPRISE);
            }
            Expect::Counterexample
        }
        Verdict::Inconclusive { .. } => return Ok(EXIT_BUDGET),
        Verdict::NotFc(_) => unreachable!("verify_fc never certifies non-FC"),
    };
    if recheck && got == Expect::Fc {
        opts.order = match opts.order {
            BranchOrder::IncludeFirst => BranchOrder::ExcludeFirst,
            BranchOrder::ExcludeFirst => BranchOrder::IncludeFirst,
        };
        let again = verify_fc(&b, &c, &opts)?;
        out.line(format!("recheck {again}"))?;
        match again {
            Verdict::FcVerified { .. } => {}
            Verdict::Inconclusive { .. } => return Ok(EXIT_BUDGET),
            _ => return Ok(EXIT_SURPRISE),
        }
    }
    Ok(match expect {
        Some(e) if e != got => EXIT_SURPRISE,
        _ => EXIT_OK,
    })
}

fn cmd_find_c(cli: &Cli, out: &mut Out<'_>, gens: &GensArg, probe: &[PathBuf]) -> CliResult {
    let b = load_gens(gens)?.close();
    let probes = load_probes(probe, b.ground())?;
    match find_c(&b, &probes, &search_options(cli)?)? {
        Discovery::Certified(cert) => {
            write_certificate(out, &cert)?;
            let sound = match &cert {
                Certificate::Fc(w) => !w.min_k.is_negative(),
                Certificate::NotFc(w) => w.recheck(&b),
            };
            Ok(if sound { EXIT_OK } else { EXIT_SURPRISE })
        }
        Discovery::Inconclusive { rounds, nodes } => {
            out.line(format!("Inconclusive rounds={rounds} nodes={nodes}"))?;
            Ok(EXIT_BUDGET)
        }
    }
}

fn cmd_bounds(out: &mut Out<'_>, b: &BoundsCmd) -> CliResult {
    match b {
        BoundsCmd::Dj { n, k, r, j } => out.line(bounds::d_j(*n, *k, *r, *j)?.to_string())?,
        BoundsCmd::Cascade { r, k } => {
            let c = bounds::cascade(*r, *k)?;
            match out.format {
                Format::Text => out.line(format!("{} = {}", r, c))?,
                Format::Machine => {
                    for (a, i) in c.indexed() {
                        out.line(format!("a_{i}={a}"))?;
                    }
                }
            }
        }
        BoundsCmd::Window { r, n, w } => {
            out.line(fmt_q(&bounds::window_contribution(*r, *n, *w)?))?
        }
        BoundsCmd::Threshold { n, k } => out.line(bounds::non_fc_threshold(*n, *k)?.to_string())?,
        BoundsCmd::Construct { n, k, r } => {
            write!(out.w, "{}", bounds::construct_b(*n, *k, *r)?)?;
        }
        BoundsCmd::Pigeonhole { k, n, m } => {
            let (k2, n2, m2) = bounds::pigeonhole_reduce(*k, *n, *m)?;
            out.line(format!("k={k2} n={n2} m={m2}"))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_catalog(cli: &Cli, out: &mut Out<'_>, c: &CatalogCmd) -> CliResult {
    match c {
        CatalogCmd::List => {
            for e in catalog::entries() {
                let status = match &e.status {
                    Status::Fc { c } => format!("FC c={}", join(c)),
                    Status::NotFc => "NotFC".to_string(),
                    Status::Counterexample { c } => format!("Counterexample c={}", join(c)),
                };
                let gens: Vec<String> = e
                    .generators
                    .gens()
                    .iter()
                    .map(|g| g.elements().map(|x| x.to_string()).collect::<String>())
                    .collect();
                out.line(format!(
                    "{} n={} gens={} {}",
                    e.id,
                    e.ground(),
                    gens.join(","),
                    status
                ))?;
            }
            Ok(EXIT_OK)
        }
        CatalogCmd::Verify { id, timings } => {
            if let Some(id) = id {
                if catalog::find(id).is_none() {
                    return Err(Fail(EXIT_USAGE, format!("no catalog entry `{id}`")));
                }
            }
            let results = catalog::verify_catalog(id.as_deref(), &search_options(cli)?)?;
            let mut code = EXIT_OK;
            for r in &results {
                if *timings {
                    out.line(format!("{r} time={:.3}s", r.elapsed.as_secs_f64()))?;
                } else {
                    out.line(r.to_string())?;
                }
                match r.outcome {
                    Outcome::Mismatch(_) => code = EXIT_SURPRISE,
                    Outcome::Inconclusive { .. } if code == EXIT_OK => code = EXIT_BUDGET,
                    _ => {}
                }
            }
            let ok = results.iter().filter(|r| r.ok()).count();
            out.line(format!("summary {ok}/{} ok", results.len()))?;
            Ok(code)
        }
        CatalogCmd::Detect { family } => {
            let s = with_path(family, read(family)?.parse::<GeneratorSystem>())?;
            match catalog::detect_fc(&s) {
                Some(d) => out.line(format!("{} {}", d.id, format_injection(&d.injection)))?,
                None => out.line("none")?,
            }
            Ok(EXIT_OK)
        }
        CatalogCmd::Scan { lemma } => {
            if lemma != "5.2" {
                return Err(Fail(
                    EXIT_USAGE,
                    format!("unknown scan `{lemma}`; available: 5.2"),
                ));
            }
            let report = catalog::lemma_5_2_scan();
            for l in report.lines() {
                out.line(l)?;
            }
            Ok(if report.violators.is_empty() {
                EXIT_OK
            } else {
                EXIT_SURPRISE
            })
        }
    }
}

fn join(c: &[i64]) -> String {
    c.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_probe_compare(cli: &Cli, out: &mut Out<'_>, gens: &GensArg, c: Option<&str>) -> CliResult {
    let b = load_gens(gens)?.close();
    let n = b.ground();
    let probes = default_probes(&b);
    let c = match c {
        Some(s) => weights(s, n)?,
        None => {
            let rows = probes
                .iter()
                .map(|p| inequality_of(p).map(|r| r.w))
                .collect::<crate::error::Result<Vec<_>>>()?;
            match feasible(&FeasibilityProblem::new(n, rows)?) {
                Feasibility::Point { c, .. } => WeightVector::new(c)?,
                Feasibility::Infeasible(cert) => {
                    out.line(format!(
                        "probes infeasible lambda={}",
                        fmt_q_list(&cert.lambda)
                    ))?;
                    return Ok(EXIT_OK);
                }
            }
        }
    };
    let ints: Vec<String> = c.to_integers().iter().map(|x| x.to_string()).collect();
    out.kv("c", ints.join(","))?;
    let ks = probes
        .iter()
        .map(|p| k_value(p, &c))
        .collect::<crate::error::Result<Vec<_>>>()?;
    out.kv("probeK", fmt_q_list(&ks))?;
    let probes_ok = ks.iter().all(|k| !k.is_negative());
    out.kv("probes_nonneg", probes_ok)?;
    match verify_fc(&b, &c, &search_options(cli)?)? {
        Verdict::FcVerified { min_k, nodes, .. } => {
            out.line(format!(
                "full FCVerified minK={} nodes={nodes}",
                fmt_q(&min_k)
            ))?;
        }
        Verdict::CounterexampleFound {
            family, k, nodes, ..
        } => {
            out.line(format!(
                "full CounterexampleFound K={} nodes={nodes}",
                fmt_q(&k)
            ))?;
            if probes_ok {
                out.block("separating:", &family.to_string())?;
            }
        }
        Verdict::Inconclusive { nodes, .. } => {
            out.line(format!("full Inconclusive nodes={nodes}"))?;
            return Ok(EXIT_BUDGET);
        }
        Verdict::NotFc(_) => unreachable!("verify_fc never certifies non-FC"),
    }
    Ok(EXIT_OK)
}
