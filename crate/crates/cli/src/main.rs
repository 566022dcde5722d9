use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use diamlab_core::bounds::{verify_report, BoundsError, VerifyOptions};
use diamlab_core::catalog::{catalog, resolve_group, CatalogError};
use diamlab_core::gensets::{
    abelianization_rank, is_generating, max_diameters, rank_with_budget, GensetError,
    SearchOptions, Strategy,
};
use diamlab_core::group::{
    closure, commutator_subgroup, derived_series, is_nilpotent, is_normal, split_top_level, ElemId,
    FiniteGroup, GroupError, Subgroup,
};
use diamlab_core::report::{emit_report, Format};
use diamlab_core::schreier::{SchreierError, SchreierLevel, SeriesDecomposer};
use diamlab_core::table_file::{emit_cayley_table, parse_cayley_table};
use diamlab_core::wordlen::{eval_word, length_table, shortest_word, Word};

#[derive(Parser)]
#[command(
    name = "diamlab",
    version,
    about = "Diameters of finite groups and their direct powers"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest direct power |G|^n that may be built.
    #[arg(
        long,
        global = true,
        env = "DIAMLAB_MAX_ELEMENTS",
        default_value_t = 1_000_000
    )]
    max_elements: u64,
    /// Largest number of candidate subsets an exact search may consider.
    #[arg(
        long,
        global = true,
        env = "DIAMLAB_BUDGET",
        default_value_t = 10_000_000
    )]
    budget: u64,
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true, env = "DIAMLAB_THREADS")]
    threads: Option<usize>,
}

/// Groups are given as a catalog name (`Q8`, `S3`), constructor syntax
/// (`dihedral(10)`, `product(cyclic(4),cyclic(2))`), either of those with
/// `^n` for a direct power, or `file:PATH` for a Cayley table file.
#[derive(Subcommand)]
enum Command {
    /// List the built-in catalog.
    Catalog {
        /// Rebuild every entry and check its stored invariants.
        #[arg(long)]
        check: bool,
    },
    /// Order, derived series and ranks.
    Info { group: String },
    /// Diameter of the Cayley graph for one generating list.
    Diam {
        group: String,
        /// Comma-separated element names or ids, e.g. `i,j`.
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long)]
        symmetric: bool,
    },
    /// Maximum diameters over all minimal generating sets.
    Dmax {
        group: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
        /// Exhaustive enumeration (the default).
        #[arg(long, conflicts_with = "sample")]
        exact: bool,
        /// Sample this many random minimal generating sets instead.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only enumerate sets up to this size.
        #[arg(long)]
        size_cap: Option<u32>,
        /// Print the certificate as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Certified words `g = h·t` over a normal subgroup.
    Schreier {
        group: String,
        /// `derived` (one level over G'), `series` (the whole derived
        /// series), `trivial`, `whole`, or a bracketed element list `{a,b}`
        /// whose normal subgroup is used.
        #[arg(long)]
        normal: String,
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        /// Decompose only this element (default: every element).
        #[arg(long, allow_hyphen_values = true)]
        element: Option<String>,
        #[arg(long)]
        symmetric: bool,
    },
    /// Compare computed diameters of G^n with every applicable bound.
    Verify {
        group: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Samples used when the exact search exceeds the budget.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0x5EED)]
        seed: u64,
        /// Skip the exact search and sample directly.
        #[arg(long)]
        sample_only: bool,
    },
    /// Print the Cayley table file of a group.
    Table { group: String },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Failed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Failed(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Failed(m) => m,
        }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Unknown(_) | CatalogError::BadParams { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<GensetError> for Failure {
    fn from(e: GensetError) -> Self {
        match e {
            GensetError::BudgetExceeded { .. } => {
                Failure::Budget(format!("{e}; raise --budget or sample instead"))
            }
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Genset(g) => g.into(),
            BoundsError::Group(GroupError::PowerTooLarge { .. }) => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::PowerTooLarge { .. } | GroupError::ZeroExponent => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<SchreierError> for Failure {
    fn from(e: SchreierError) -> Self {
        Failure::Failed(e.to_string())
    }
}

fn load_group(text: &str, max_elements: u64) -> Result<FiniteGroup, Failure> {
    if let Some(path) = text.strip_prefix("file:") {
        let body = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
        let name = PathBuf::from(path)
            .file_stem()
            .map_or("table".into(), |s| s.to_string_lossy().into_owned());
        return parse_cayley_table(&name, &body)
            .map_err(|e| Failure::Usage(format!("{path}: {e}")));
    }
    let direct = resolve_group(text);
    if direct.is_err() {
        if let Some((base, exp)) = text.rsplit_once('^') {
            if let Ok(n) = exp.trim().parse::<u32>() {
                let g = load_group(base, max_elements)?;
                return if n == 1 {
                    Ok(g)
                } else {
                    Ok(FiniteGroup::direct_power(&g, n, max_elements)?)
                };
            }
        }
    }
    Ok(direct?)
}

fn parse_elements(group: &FiniteGroup, list: &str) -> Result<Vec<ElemId>, Failure> {
    split_top_level(list, ',')
        .into_iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            group.parse_element(s).ok_or_else(|| {
                Failure::Usage(format!(
                    "`{}` is not an element of {}",
                    s.trim(),
                    group.name()
                ))
            })
        })
        .collect()
}

fn labels(group: &FiniteGroup, elements: &[ElemId]) -> String {
    let parts: Vec<String> = elements.iter().map(|&e| group.label(e)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn search_options(global: &Global, size_cap: Option<u32>) -> SearchOptions {
    SearchOptions {
        budget: global.budget,
        size_cap,
        threads: global.threads,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Catalog { check } => {
            println!(
                "{:<8} {:<36} {:>5} {:>8} {:>6} {:>5}",
                "name", "constructor", "order", "solvable", "length", "rank"
            );
            let mut bad = Vec::new();
            for entry in catalog() {
                let e = &entry.expected;
                let length = e.derived_length.map_or("-".to_string(), |l| l.to_string());
                println!(
                    "{:<8} {:<36} {:>5} {:>8} {:>6} {:>5}",
                    entry.name,
                    entry.spec.to_string(),
                    e.order,
                    e.solvable,
                    length,
                    e.rank
                );
                if check {
                    if let Err(err) = entry.build().and_then(|grp| entry.self_check(&grp)) {
                        bad.push(err.to_string());
                    }
                }
            }
            if check {
                if bad.is_empty() {
                    println!("all catalog entries self-check");
                } else {
                    return Err(Failure::Failed(bad.join("\n")));
                }
            }
        }
        Command::Info { group } => {
            let grp = load_group(&group, g.max_elements)?;
            let series = derived_series(&grp);
            println!("group: {}", grp.name());
            println!("order: {}", grp.order());
            println!("abelian: {}", grp.is_abelian());
            println!("nilpotent: {}", is_nilpotent(&grp));
            println!("exponent: {}", grp.exponent());
            if let Some(p) = grp.prime_power_base() {
                println!("p-group: p = {p}");
            }
            let orders: Vec<String> = series.orders().iter().map(ToString::to_string).collect();
            println!("derived series orders: {}", orders.join(" > "));
            match series.derived_length() {
                Ok(l) => println!("derived length: {l}"),
                Err(_) => println!("solvable: false"),
            }
            println!("rank: {}", rank_with_budget(&grp, g.budget)?);
            println!("rank of abelianization: {}", abelianization_rank(&grp)?);
        }
        Command::Diam {
            group,
            gens,
            symmetric,
        } => {
            let grp = load_group(&group, g.max_elements)?;
            let gens = parse_elements(&grp, &gens)?;
            let table = length_table(&grp, &gens, symmetric);
            if !table.generates() {
                return Err(Failure::Failed(format!(
                    "{} does not generate {} (reaches {} of {} elements)",
                    labels(&grp, &gens),
                    grp.name(),
                    table.reached(),
                    grp.order()
                )));
            }
            let w = table.witness();
            let word =
                shortest_word(&grp, &table, w).map_err(|e| Failure::Failed(e.to_string()))?;
            let kind = if symmetric {
                "symmetric diameter"
            } else {
                "diameter"
            };
            println!("{kind}: {}", table.diameter());
            println!("witness: {} = {}", grp.label(w), word.render(&grp, &gens));
        }
        Command::Dmax {
            group,
            power,
            exact: _,
            sample,
            seed,
            size_cap,
            json,
        } => {
            let base = load_group(&group, g.max_elements)?;
            let grp = if power == 1 {
                base
            } else {
                FiniteGroup::direct_power(&base, power, g.max_elements)?
            };
            let strategy = match sample {
                Some(samples) => Strategy::Sampled { samples, seed },
                None => Strategy::Exact,
            };
            let cert = max_diameters(&grp, strategy, &search_options(g, size_cap))?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&cert)
                        .map_err(|e| Failure::Failed(e.to_string()))?
                );
                return Ok(());
            }
            let qualifier = if cert.exhaustive {
                ""
            } else {
                " (lower bound)"
            };
            println!("group: {} (order {})", cert.group, cert.order);
            println!(
                "D = {}{qualifier} attained by {}",
                cert.value_positive,
                labels(&grp, &cert.argmax_positive.elements)
            );
            println!(
                "Ds = {}{qualifier} attained by {}",
                cert.value_symmetric,
                labels(&grp, &cert.argmax_symmetric.elements)
            );
            println!("minimal generating sets visited: {}", cert.gensets_visited);
            println!(
                "per-set diam <= 2(diam_s+1)(|X|+1)ln|G|: {} checked, {} violations, max ratio {:.4}",
                cert.babai.checked, cert.babai.violations, cert.babai.max_ratio
            );
            if cert.babai.violations > 0 {
                return Err(Failure::Failed("diameter inequality violated".into()));
            }
        }
        Command::Schreier {
            group,
            normal,
            gens,
            element,
            symmetric,
        } => {
            let grp = load_group(&group, g.max_elements)?;
            let gens = parse_elements(&grp, &gens)?;
            if !is_generating(&grp, &gens) {
                return Err(Failure::Failed(format!(
                    "{} does not generate {}",
                    labels(&grp, &gens),
                    grp.name()
                )));
            }
            let targets: Vec<ElemId> = match element {
                Some(e) => parse_elements(&grp, &e)?,
                None => grp.elements().collect(),
            };
            schreier_command(&grp, &normal, &gens, &targets, symmetric)?;
        }
        Command::Verify {
            group,
            power,
            out,
            format,
            samples,
            seed,
            sample_only,
        } => {
            let grp = load_group(&group, g.max_elements)?;
            let options = VerifyOptions {
                max_elements: g.max_elements,
                budget: g.budget,
                samples,
                seed,
                threads: g.threads,
                force_sampling: sample_only,
            };
            let report = verify_report(&grp, power, &options)?;
            let text = emit_report(&report, format).map_err(|e| Failure::Failed(e.to_string()))?;
            match out {
                Some(path) => fs::write(&path, &text)
                    .map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            for (name, verdict) in report.verdicts.iter() {
                eprintln!("{name}: {}", verdict.as_str());
            }
            if !report.all_pass() {
                return Err(Failure::Failed(format!(
                    "{}^{power}: some bounds fail",
                    report.group
                )));
            }
        }
        Command::Table { group } => {
            let grp = load_group(&group, g.max_elements)?;
            print!("{}", emit_cayley_table(&grp)?);
        }
    }
    Ok(())
}

fn normal_subgroup(group: &FiniteGroup, spec: &str) -> Result<Subgroup, Failure> {
    let spec = spec.trim();
    let sub = match spec {
        "derived" => commutator_subgroup(group, &Subgroup::whole(group)),
        "trivial" => Subgroup::trivial(group),
        "whole" => Subgroup::whole(group),
        _ => {
            let inner = spec
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| Failure::Usage(format!("unknown normal subgroup spec `{spec}`")))?;
            closure(group, &parse_elements(group, inner)?)
        }
    };
    if !is_normal(group, &sub) {
        return Err(Failure::Failed(format!(
            "subgroup of order {} is not normal",
            sub.order()
        )));
    }
    Ok(sub)
}

fn schreier_command(
    group: &FiniteGroup,
    normal: &str,
    gens: &[ElemId],
    targets: &[ElemId],
    symmetric: bool,
) -> Result<(), Failure> {
    let verbose = targets.len() <= 64;
    let mut longest = 0usize;
    let bound;
    if normal.trim() == "series" {
        let decomposer = SeriesDecomposer::new(group, gens, &derived_series(group), symmetric)?;
        bound = decomposer.certified_bound();
        let per_level: Vec<String> = decomposer
            .level_bounds()
            .iter()
            .map(ToString::to_string)
            .collect();
        println!("level bounds (top first): {}", per_level.join(", "));
        for &t in targets {
            let d = decomposer.decompose(group, t)?;
            check_word(group, gens, t, &d.word, bound)?;
            longest = longest.max(d.word.len());
            if verbose {
                println!("{} = {}", group.label(t), d.word.render(group, gens));
            }
        }
    } else {
        let sub = normal_subgroup(group, normal)?;
        let level = SchreierLevel::build(group, &sub, gens, symmetric)?;
        bound = level.certified_bound();
        println!(
            "transversal size: {}, Schreier generators: {}",
            level.transversal().len(),
            level.sub_gens().len()
        );
        for &t in targets {
            let d = level.decompose(group, t)?;
            check_word(group, gens, t, &d.word, bound)?;
            longest = longest.max(d.word.len());
            if verbose {
                println!(
                    "{} = {} * {} : {}",
                    group.label(t),
                    group.label(d.h),
                    group.label(d.t),
                    d.word.render(group, gens)
                );
            }
        }
    }
    println!(
        "decomposed {} elements; longest word {longest}; certified bound {bound}",
        targets.len()
    );
    Ok(())
}

fn check_word(
    group: &FiniteGroup,
    gens: &[ElemId],
    target: ElemId,
    word: &Word,
    bound: u64,
) -> Result<(), Failure> {
    let value = eval_word(group, gens, word).map_err(|e| Failure::Failed(e.to_string()))?;
    if value != target || word.len() as u64 > bound {
        return Err(Failure::Failed(format!(
            "decomposition of {} failed certification (length {}, bound {bound})",
            group.label(target),
            word.len()
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
