//! `katona`: verify circle bounds over parameter grids, run free-form
//! extremal searches, and compute LYM sums and cyclic-order averages.

mod grid;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use katona::averaging::{exact_average, lym_sum, sample_average, LymMode, ENUMERATION_LIMIT};
use katona::constructions::ConstructionId;
use katona::predicates::PredicateId;
use katona::search::{maximize, verify_bound, Levels, SearchConfig, SearchProblem, Slot, TheoremId, Verification};
use katona::{ArcFamily, Error, SetFamily};
use rayon::prelude::*;

use grid::GridSpec;
use output::{Format, Printer};

const VERIFY_HELP: &str = "\
CSV columns: theorem,params,bound,achieved,tight,extremal_count,ok,failed_claims
(with --timing also nodes_explored,elapsed_ms).

Grid flags take a value, a comma list or an inclusive range: --n 4..12 --k 2,3.
Points outside a theorem's hypotheses are skipped with a warning on stderr.";

const SEARCH_HELP: &str = "\
The problem is a JSON object such as
  {\"n\": 6, \"slots\": [{\"arcs\": 3}], \"predicate\": \"intersecting\"}
read from FILE (or stdin with `-`), or built from --n, --k / --levels and
--predicate. CSV columns: optimum,extremal_count,extremal_count_complete,witnesses
(with --timing also nodes_explored,elapsed_ms).";

const FAMILY_HELP: &str = "\
The family is JSON, either {\"n\": 5, \"members\": [[1,2],[2,3]]} or
{\"n\": 5, \"levels\": {\"2\": [1,2]}} (arcs by length and head), read from FILE
(or stdin with `-`), or built with --construction.";

#[derive(Parser, Debug)]
#[command(name = "katona", version, about = "Extremal arc families on the Katona circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args, Debug, Clone)]
struct RunFlags {
    /// Output format; JSON is canonical, CSV a projection.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Stop a search after this many nodes.
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Stop a search after this many seconds.
    #[arg(long, global = true, env = "KATONA_BUDGET_SECONDS")]
    budget_seconds: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Include node counts and wall-clock times; these make output run-dependent.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a registered bound at every point of a parameter grid.
    #[command(after_help = VERIFY_HELP)]
    Verify {
        /// Theorem id, see `list-theorems`.
        theorem: String,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        l: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        q: Option<String>,
        /// Weights as integers or fractions p/q, comma separated.
        #[arg(long)]
        c: Option<String>,
        /// One tuple of arc lengths, e.g. 2,3,4; repeat for several.
        #[arg(long)]
        ls: Vec<String>,
    },
    /// Maximize over arc families or subsets under predicates.
    #[command(after_help = SEARCH_HELP)]
    Search {
        /// Problem JSON file, `-` for stdin.
        file: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        /// Single arc length.
        #[arg(long, conflicts_with = "levels")]
        k: Option<usize>,
        /// Arc lengths as an inclusive range a..b; all lengths when omitted.
        #[arg(long)]
        levels: Option<String>,
        /// Predicate such as intersecting or matching-at-most:2; repeatable.
        #[arg(long)]
        predicate: Vec<String>,
        /// Report one optimal family instead of all up to symmetry.
        #[arg(long)]
        optimum_only: bool,
    },
    /// LYM sums of a family in exact arithmetic.
    #[command(after_help = FAMILY_HELP)]
    Lym {
        #[command(flatten)]
        family: FamilyInput,
    },
    /// Average trace of a uniform family over all cyclic orders.
    #[command(after_help = FAMILY_HELP)]
    Average {
        #[command(flatten)]
        family: FamilyInput,
        /// Member size; inferred when the family is uniform.
        #[arg(long)]
        k: Option<usize>,
        /// Estimate from this many random cyclic orders instead of enumerating.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Registered theorem ids with their parameters.
    ListTheorems,
    /// Build a named construction, e.g. m_pq:6,3,3,5.
    Construct {
        /// Construction id; `katona construct list` shows examples.
        id: String,
    },
}

#[derive(Args, Debug)]
struct FamilyInput {
    /// Family JSON file, `-` for stdin.
    file: Option<PathBuf>,
    /// Use a named construction as the family.
    #[arg(long, conflicts_with = "file")]
    construction: Option<String>,
}

/// Failure with its exit code: 1 usage or domain, 2 falsified, 3 budget.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Falsified { .. } | Error::Internal(_) => 2,
            Error::Budget { .. } => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let flags = cli.run;
    if flags.budget_nodes == Some(0) {
        return Err(usage("--budget-nodes must be positive"));
    }
    if flags.budget_seconds.is_some_and(|s| s.is_nan() || s <= 0.0) {
        return Err(usage("--budget-seconds must be positive"));
    }
    if flags.jobs == Some(0) {
        return Err(usage("--jobs must be positive"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = flags.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| usage(e.to_string()))?;
    let printer = Printer::new(flags.format, flags.timing);
    pool.install(|| match cli.command {
        Command::Verify { theorem, n, k, l, s, r, q, c, ls } => {
            let parse = |v: Option<String>| v.as_deref().map(grid::parse_range).transpose();
            let spec = GridSpec {
                n: parse(n)?,
                k: parse(k)?,
                l: parse(l)?,
                s: parse(s)?,
                r: parse(r)?,
                q: parse(q)?,
                c: c.as_deref().map(grid::parse_scores).transpose()?,
                ls: ls.iter().map(|t| grid::parse_tuple(t)).collect::<katona::Result<_>>()?,
            };
            cmd_verify(&theorem, &spec, &flags, &printer)
        }
        Command::Search { file, n, k, levels, predicate, optimum_only } => {
            let problem = match file {
                Some(path) => {
                    if n.is_some() || k.is_some() || levels.is_some() || !predicate.is_empty() {
                        return Err(usage("give either a problem file or --n/--k/--levels/--predicate"));
                    }
                    serde_json::from_str(&read_input(&path)?).map_err(|e| usage(format!("problem JSON: {e}")))?
                }
                None => problem_from_flags(n, k, levels, &predicate)?,
            };
            cmd_search(&problem, optimum_only, &flags, &printer)
        }
        Command::Lym { family } => {
            let fam = load_family(&family)?;
            printer.lym(&fam, &[
                ("standard", lym_sum(&fam, LymMode::Standard)?),
                ("shifted", lym_sum(&fam, LymMode::Shifted)?),
                ("circle", lym_sum(&fam, LymMode::Circle)?),
            ]);
            Ok(0)
        }
        Command::Average { family, k, sample, seed } => {
            let fam = load_family(&family)?;
            let k = match k {
                Some(k) => k,
                None => fam.uniform_size()?.ok_or_else(|| usage("empty family; pass --k"))?,
            };
            match sample {
                Some(trials) => printer.sample(&sample_average(&fam, k, trials, seed)?),
                None if fam.n() > ENUMERATION_LIMIT => {
                    return Err(usage(format!(
                        "n = {} exceeds the exact enumeration limit {ENUMERATION_LIMIT}; pass --sample TRIALS",
                        fam.n()
                    )))
                }
                None => printer.average(&exact_average(&fam, k)?),
            }
            Ok(0)
        }
        Command::ListTheorems => {
            printer.theorems(&TheoremId::ALL);
            Ok(0)
        }
        Command::Construct { id } => {
            if id == "list" {
                for ex in ConstructionId::catalogue() {
                    println!("{ex}");
                }
                return Ok(0);
            }
            let cid: ConstructionId = id.parse()?;
            printer.construction(&cid, &cid.build()?);
            Ok(0)
        }
    })
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| usage(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load_family(input: &FamilyInput) -> Result<SetFamily, Failure> {
    if let Some(id) = &input.construction {
        let cid: ConstructionId = id.parse()?;
        return Ok(cid.build()?.to_sets());
    }
    let path = input.file.clone().ok_or_else(|| usage("give a family file, `-` for stdin, or --construction"))?;
    let text = read_input(&path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("family JSON: {e}")))?;
    let parsed = if value.get("levels").is_some() {
        serde_json::from_value::<ArcFamily>(value).map(|f| SetFamily::from(&f))
    } else {
        serde_json::from_value::<SetFamily>(value)
    };
    parsed.map_err(|e| usage(format!("family JSON: {e}")))
}

fn problem_from_flags(
    n: Option<usize>,
    k: Option<usize>,
    levels: Option<String>,
    predicates: &[String],
) -> Result<SearchProblem, Failure> {
    let n = n.ok_or_else(|| usage("search needs a problem file or --n"))?;
    let slot = match (k, levels) {
        (Some(k), _) => Slot::arcs(k),
        (None, Some(r)) => {
            let ks = grid::parse_range(&r)?;
            Slot::Arcs(Levels::Range([ks[0], ks[ks.len() - 1]]))
        }
        (None, None) => Slot::Arcs(Levels::all()),
    };
    let mut problem = SearchProblem::new(n, vec![slot]);
    for p in predicates {
        problem = problem.with(p.parse::<PredicateId>()?);
    }
    Ok(problem)
}

fn config(flags: &RunFlags) -> SearchConfig {
    SearchConfig {
        max_nodes: flags.budget_nodes,
        max_seconds: flags.budget_seconds,
        ..SearchConfig::default()
    }
}

fn cmd_verify(theorem: &str, spec: &GridSpec, flags: &RunFlags, printer: &Printer) -> Result<u8, Failure> {
    let id: TheoremId = theorem.parse()?;
    let points = spec.points(id)?;
    // Each point searches serially; the pool spreads points over workers.
    let cfg = SearchConfig { jobs: 1, ..config(flags) };
    let results: Vec<(katona::search::Params, katona::Result<Verification>)> =
        points.into_par_iter().map(|p| (p.clone(), verify_bound(id, &p, &cfg))).collect();
    let mut rows = Vec::new();
    let mut codes = Vec::new();
    for (p, res) in results {
        match res {
            Ok(v) => {
                if !v.ok() {
                    codes.push(2);
                }
                rows.push(v);
            }
            Err(Error::Hypothesis(msg)) => eprintln!("warning: skipping {id} {p}: {msg}"),
            Err(e) => {
                let f = Failure::from(e);
                eprintln!("error: {id} {p}: {}", f.message);
                codes.push(f.code);
            }
        }
    }
    printer.verifications(&rows);
    // A falsified bound outranks an exhausted budget, which outranks a usage error.
    Ok([2, 3, 1].into_iter().find(|c| codes.contains(c)).unwrap_or(0))
}

fn cmd_search(problem: &SearchProblem, optimum_only: bool, flags: &RunFlags, printer: &Printer) -> Result<u8, Failure> {
    let mut cfg = if optimum_only { SearchConfig::optimum_only() } else { SearchConfig::default() };
    cfg.max_nodes = flags.budget_nodes;
    cfg.max_seconds = flags.budget_seconds;
    cfg.jobs = flags.jobs.unwrap_or_else(rayon::current_num_threads);
    let start = Instant::now();
    match maximize(problem, &cfg) {
        Ok(report) => {
            printer.search(&report, start.elapsed());
            Ok(0)
        }
        Err(Error::Budget { nodes, log2_states, best, upper }) => {
            printer.budget(nodes, log2_states, best.as_deref(), &upper);
            Ok(3)
        }
        Err(e) => Err(e.into()),
    }
}
