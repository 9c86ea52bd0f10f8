use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use commprob::algebra::{GroupTable, Permutation, Subgroup};
use commprob::commprob::{abelian_decomposition, check_bounds, largest_abelian_normal, BoundContext, PrReport};
use commprob::constructions::{make, FamilySpec};
use commprob::egyptian::{self, UnitFractionMultiset};
use commprob::exec::Execution;
use commprob::survey::{self, CatalogEntry, Filter, Interval, PrCache, SurveyOptions, SurveyReport};
use commprob::Rational;

#[derive(Parser)]
#[command(name = "commprob", version, about = "Exact commuting probabilities of finite groups")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Shorthand for --format json.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for batch work (0 = all cores, 1 = sequential).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Report cache directory; overrides COMMPROB_CACHE_DIR.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Commuting probability of one group, with the inequality suite.
    Pr {
        #[command(flatten)]
        group: GroupSource,
        /// Print every bound in text mode.
        #[arg(long)]
        bounds: bool,
        /// Also evaluate the Fitting-subgroup bound.
        #[arg(long)]
        fitting: bool,
    },
    /// Unit-fraction form over an abelian normal subgroup.
    Decompose {
        #[command(flatten)]
        group: GroupSource,
        /// Generators of the subgroup, as element indices of the table.
        #[arg(long, value_delimiter = ',')]
        subgroup: Option<Vec<u32>>,
    },
    /// Sums of unit fractions.
    #[command(subcommand)]
    Egyptian(EgyptianCmd),
    /// Candidate commuting-probability values.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Batch survey of a catalog or the built-in corpus.
    Survey {
        #[command(flatten)]
        universe: Universe,
        /// Interval to scan, `lo..hi`.
        #[arg(long)]
        scan: Option<String>,
        #[command(flatten)]
        ends: Ends,
        /// Extra filter applied to the scan only.
        #[arg(long)]
        scan_filter: Option<String>,
    },
    /// Scan an interval for observed values.
    Scan {
        /// Interval `lo..hi`.
        interval: String,
        #[command(flatten)]
        universe: Universe,
        #[command(flatten)]
        ends: Ends,
    },
}

#[derive(Subcommand)]
enum EgyptianCmd {
    /// All multisets of `terms` unit fractions summing to `target`.
    Solve {
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        target: Rational,
    },
    /// Largest sum of `terms` unit fractions strictly below `at`.
    Below {
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        at: Rational,
    },
    /// Successive values below `at`.
    Descend {
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        at: Rational,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Whether `value` is a limit point of the `terms`-term sums.
    Limit {
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        value: Rational,
    },
}

#[derive(Subcommand)]
enum SpectrumCmd {
    /// Largest candidate strictly below `at` for abelian normal index `index`.
    Gap {
        #[arg(long)]
        index: u64,
        #[arg(long)]
        at: Rational,
    },
    /// Whether `value` is a candidate for abelian normal index `index`.
    Member {
        #[arg(long)]
        index: u64,
        #[arg(long)]
        value: Rational,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct SourceKind {
    /// Family name, or `family:params` terms joined by `*`.
    #[arg(long)]
    family: Option<String>,
    /// JSONL catalog; pick the entry with --name.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Cayley table as a JSON file or inline JSON rows.
    #[arg(long)]
    cayley: Option<String>,
    /// Generator in 1-based cycle notation (repeatable).
    #[arg(long)]
    perms: Vec<String>,
}

#[derive(Args)]
struct GroupSource {
    #[command(flatten)]
    kind: SourceKind,
    /// Family parameters.
    #[arg(long, value_delimiter = ',', requires = "family")]
    params: Vec<u64>,
    /// Entry name within --catalog.
    #[arg(long, requires = "catalog")]
    name: Option<String>,
    /// Permutation degree for --perms.
    #[arg(long, requires = "perms")]
    degree: Option<usize>,
}

#[derive(Args)]
struct Universe {
    /// JSONL catalog (default: built-in corpus).
    #[arg(long, conflicts_with = "corpus")]
    catalog: Option<PathBuf>,
    /// Built-in corpus up to this order.
    #[arg(long)]
    corpus: Option<u64>,
    /// Row filter, e.g. `nonabelian`, `p-group:7`, `order<=64,odd-order`.
    #[arg(long)]
    filter: Option<String>,
    /// Evaluate the Fitting-subgroup bound for every group.
    #[arg(long)]
    fitting: bool,
}

#[derive(Args)]
struct Ends {
    /// Both endpoints excluded (default).
    #[arg(long, conflicts_with_all = ["closed", "closed_left", "closed_right"])]
    open: bool,
    /// Both endpoints included.
    #[arg(long)]
    closed: bool,
    #[arg(long)]
    closed_left: bool,
    #[arg(long)]
    closed_right: bool,
}

impl Ends {
    fn flags(&self) -> (bool, bool) {
        (self.closed || self.closed_left, self.closed || self.closed_right)
    }
}

const DEFAULT_CORPUS: u64 = 64;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let format = if cli.json { Format::Json } else { cli.format };
    match run(&cli, format) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli, format: Format) -> Result<String> {
    match &cli.command {
        Command::Pr { group, bounds, fitting } => {
            let (g, spec) = load_group(group)?;
            let ctx = BoundContext {
                min_degree: spec.as_ref().and_then(|s| s.expected_d),
                skip_fitting: !fitting,
                ..Default::default()
            };
            let report = check_bounds(&g, &ctx);
            Ok(match format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
                Format::Text => pr_text(&report, *bounds),
            })
        }
        Command::Decompose { group, subgroup } => {
            let (g, _) = load_group(group)?;
            let h = match subgroup {
                Some(gens) => {
                    if let Some(&bad) = gens.iter().find(|&&x| x as usize >= g.order()) {
                        bail!("element {bad} out of range for order {}", g.order());
                    }
                    commprob::algebra::generate(&g, gens)
                }
                None => largest_abelian_normal(&g)?,
            };
            decompose_out(&g, &h, format)
        }
        Command::Egyptian(cmd) => egyptian_out(cmd, format),
        Command::Spectrum(cmd) => spectrum_out(cmd, format),
        Command::Survey { universe, scan, ends, scan_filter } => {
            let report = run_survey(cli, universe)?;
            match scan {
                Some(text) => {
                    let (lc, rc) = ends.flags();
                    let interval = Interval::parse(text, lc, rc)?;
                    let extra = scan_filter.as_deref().map(str::parse::<Filter>).transpose()?;
                    let finding = survey::scan_interval(&report, &interval, extra.as_ref());
                    Ok(match format {
                        Format::Json => json(&finding),
                        _ => format!("{}\n", finding.summary()),
                    })
                }
                None => Ok(match format {
                    Format::Json => report.to_json() + "\n",
                    Format::Csv => report.to_csv(),
                    Format::Text => survey_text(&report),
                }),
            }
        }
        Command::Scan { interval, universe, ends } => {
            let report = run_survey(cli, universe)?;
            let (lc, rc) = ends.flags();
            let finding = survey::scan_interval(&report, &Interval::parse(interval, lc, rc)?, None);
            Ok(match format {
                Format::Json => json(&finding),
                _ => {
                    let mut s = format!("{}\n", finding.summary());
                    for v in &finding.violations {
                        writeln!(s, "  {}  {}", v.pr, v.witnesses.join(" ")).unwrap();
                    }
                    s
                }
            })
        }
    }
}

fn load_group(src: &GroupSource) -> Result<(GroupTable, Option<FamilySpec>)> {
    let k = &src.kind;
    if let Some(f) = &k.family {
        let spec = if f.contains([':', '*']) {
            if !src.params.is_empty() {
                bail!("--params cannot be combined with inline parameters in --family");
            }
            FamilySpec::parse(f)?
        } else {
            FamilySpec::of(f.parse()?, &src.params)
        };
        let (g, spec) = make(&spec)?;
        return Ok((g.named(spec.label()), Some(spec)));
    }
    if let Some(path) = &k.catalog {
        let entries = survey::ingest(path)?;
        let entry = pick_entry(&entries, src.name.as_deref())?;
        let built = entry.build()?;
        return Ok((built.table, built.spec));
    }
    if let Some(c) = &k.cayley {
        let text = if c.trim_start().starts_with('[') {
            c.clone()
        } else {
            fs::read_to_string(c).with_context(|| format!("reading {c}"))?
        };
        let rows: Vec<Vec<usize>> = serde_json::from_str(&text).context("parsing Cayley table")?;
        return Ok((GroupTable::from_cayley(&rows)?, None));
    }
    let degree = src.degree.ok_or_else(|| anyhow!("--perms needs --degree"))?;
    let gens = k.perms.iter().map(|p| Permutation::parse_cycles(degree, p)).collect::<Result<Vec<_>, _>>()?;
    Ok((GroupTable::from_permutations(degree, &gens)?, None))
}

fn pick_entry<'a>(entries: &'a [CatalogEntry], name: Option<&str>) -> Result<&'a CatalogEntry> {
    match name {
        Some(n) => entries.iter().find(|e| e.name == n).ok_or_else(|| anyhow!("no entry named {n:?}")),
        None if entries.len() == 1 => Ok(&entries[0]),
        None => bail!("catalog has {} entries; choose one with --name", entries.len()),
    }
}

fn pr_text(r: &PrReport, bounds: bool) -> String {
    let mut s = format!("{}\n", r.pr);
    if bounds {
        writeln!(s, "order {}  classes {}", r.order, r.k).unwrap();
        for b in &r.bounds {
            let side = |v: &Option<Rational>| v.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into());
            let status = serde_json::to_value(b.status).unwrap();
            write!(s, "{:<20} {} {} {}  {}", b.id, side(&b.lhs), b.relation, side(&b.rhs), status.as_str().unwrap())
                .unwrap();
            if let Some(n) = &b.note {
                write!(s, "  ({n})").unwrap();
            }
            s.push('\n');
        }
    }
    s
}

fn decompose_out(g: &GroupTable, h: &Subgroup<'_>, format: Format) -> Result<String> {
    let form = abelian_decomposition(g, h)?;
    Ok(match format {
        Format::Json => json(&form),
        Format::Csv => {
            let mut s = String::from("i,j,n_i,n_j,n_ij,s_ij\n");
            for i in 0..form.sizes.len() {
                for j in 0..form.sizes.len() {
                    writeln!(
                        s,
                        "{i},{j},{},{},{},{}",
                        form.sizes[i], form.sizes[j], form.pair_sizes[i][j], form.s_sizes[i][j]
                    )
                    .unwrap();
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "|G| = {}  |H| = {}  n = {}", g.order(), form.h_order, form.n).unwrap();
            writeln!(s, "coset reps: {:?}", form.coset_reps).unwrap();
            writeln!(s, "|S_ij|:").unwrap();
            for row in &form.s_sizes {
                let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
                writeln!(s, "  {}", cells.join(" ")).unwrap();
            }
            let xs: Vec<String> = form.x_list.iter().map(ToString::to_string).collect();
            writeln!(s, "x: {}", xs.join(" ")).unwrap();
            writeln!(s, "Pr = {}", form.pr).unwrap();
            s
        }
    })
}

fn multiset_line(m: &UnitFractionMultiset) -> String {
    m.terms.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn egyptian_out(cmd: &EgyptianCmd, format: Format) -> Result<String> {
    Ok(match cmd {
        EgyptianCmd::Solve { terms, target } => {
            let sols = egyptian::solve_exact(*terms, target)?;
            match format {
                Format::Json => json(&sols),
                Format::Csv => {
                    let mut s = String::from("terms,value\n");
                    for m in &sols {
                        writeln!(s, "{},{}", multiset_line(m), m.value).unwrap();
                    }
                    s
                }
                Format::Text => sols.iter().map(|m| multiset_line(m) + "\n").collect(),
            }
        }
        EgyptianCmd::Below { terms, at } => {
            let c = egyptian::max_below(*terms, at)?;
            match format {
                Format::Json => json(&c),
                Format::Csv => format!(
                    "n,l,max_below,epsilon,witness\n{},{},{},{},{}\n",
                    c.n,
                    c.l,
                    c.max_below.as_ref().unwrap(),
                    c.epsilon,
                    multiset_line(c.witness.as_ref().unwrap())
                ),
                Format::Text => format!(
                    "max_below = {}  epsilon = {}\nwitness: {}\n",
                    c.max_below.as_ref().unwrap(),
                    c.epsilon,
                    multiset_line(c.witness.as_ref().unwrap())
                ),
            }
        }
        EgyptianCmd::Descend { terms, at, count } => {
            let vs = egyptian::descend(*terms, at, *count)?;
            match format {
                Format::Json => json(&vs),
                Format::Csv => {
                    std::iter::once("value\n".to_string()).chain(vs.iter().map(|v| format!("{v}\n"))).collect()
                }
                Format::Text => vs.iter().map(|v| format!("{v}\n")).collect(),
            }
        }
        EgyptianCmd::Limit { terms, value } => {
            let a = egyptian::is_limit_point(*terms, value)?;
            match format {
                Format::Json => json(&a),
                _ => match &a.witness {
                    Some((m, w)) => format!("{}  ({m} terms: {})\n", a.is_limit, multiset_line(w)),
                    None => format!("{}\n", a.is_limit),
                },
            }
        }
    })
}

fn spectrum_out(cmd: &SpectrumCmd, format: Format) -> Result<String> {
    Ok(match cmd {
        SpectrumCmd::Gap { index, at } => {
            let q = egyptian::candidate_gap(*index, at)?;
            match format {
                Format::Json => json(&q),
                Format::Csv => {
                    format!("index,probe,max_below,epsilon\n{},{},{},{}\n", q.index, q.probe, q.max_below, q.epsilon)
                }
                Format::Text => format!("max_below = {}  epsilon = {}\n", q.max_below, q.epsilon),
            }
        }
        SpectrumCmd::Member { index, value } => {
            let m = egyptian::in_candidate_set(*index, value)?;
            match format {
                Format::Json => json(&serde_json::json!({ "index": index, "value": value, "candidate": m })),
                _ => format!("{m}\n"),
            }
        }
    })
}

fn run_survey(cli: &Cli, u: &Universe) -> Result<SurveyReport> {
    let entries = match &u.catalog {
        Some(path) => survey::ingest(path)?,
        None => survey::corpus_entries(u.corpus.unwrap_or(DEFAULT_CORPUS)),
    };
    let filter = u.filter.as_deref().map(str::parse::<Filter>).transpose()?;
    let cache = PrCache::resolve(cli.cache_dir.as_deref().map(Path::new))?;
    let opts = SurveyOptions {
        exec: if cli.jobs == 1 { Execution::Serial } else { Execution::Parallel },
        jobs: cli.jobs,
        cache: cache.as_ref(),
        full_bounds: u.fitting,
    };
    let report = survey::survey(&entries, filter.as_ref(), &opts);
    log::info!(
        "surveyed {} entries in {} ms (cache hits {}, misses {}, discarded {})",
        entries.len(),
        report.stats.elapsed_ms,
        report.stats.cache.hits,
        report.stats.cache.misses,
        report.stats.cache.discarded
    );
    Ok(report)
}

fn survey_text(r: &SurveyReport) -> String {
    let mut s = String::new();
    for row in &r.rows {
        match &row.facts {
            Some(f) => write!(s, "{:<16} {:>6} {:>5} {:>10}", row.name, f.order, f.k, f.pr.to_string()).unwrap(),
            None => write!(s, "{:<16} {:>6} {:>5} {:>10}", row.name, "-", "-", "-").unwrap(),
        }
        if !row.problems.is_empty() {
            write!(s, "  FAILED: {}", row.problems.join("; ")).unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "spectrum: {} values (universe: {} groups)", r.spectrum.len(), r.universe).unwrap();
    for p in &r.spectrum {
        writeln!(s, "  {:>10}  {}", p.pr.to_string(), p.witnesses.join(" ")).unwrap();
    }
    s
}
