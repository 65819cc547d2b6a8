use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use nearcyc_core::census::{Cache, CensusOptions, Check, run_census};
use nearcyc_core::nearfield::{
    count_dickson_nearfields, verify_nearfield_axioms, DicksonNearField, DicksonPair,
};
use nearcyc_core::scheme::{self, AutGroup, CyclotomicScheme};
use nearcyc_core::zsigmondy::zsigmondy_primes;
use nearcyc_core::Elt;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nearcyc", version, about = "Cyclotomic schemes over Dickson near-fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dickson pair queries
    #[command(subcommand)]
    Pair(PairCmd),
    /// Near-field construction and counting
    #[command(subcommand)]
    Nf(NfCmd),
    /// Scheme construction, automorphisms, isomorphism
    #[command(subcommand)]
    Scheme(SchemeCmd),
    /// Zsigmondy primes Z_k(q, n)
    Zsig {
        q: u64,
        n: u32,
        /// Only report primes strictly greater than this threshold
        #[arg(long, default_value_t = 0)]
        min: u64,
    },
    /// Enumerate all schemes up to an order bound and run the checks
    Census {
        #[arg(long)]
        max_order: u64,
        /// Comma-separated subset of: primitivity,aut,agl,frobenius-socle,thm14,field-reduction
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Write the JSON report here (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a CSV mirror of the records
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Cache directory (overrides NEARCYC_CACHE_DIR)
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PairCmd {
    /// Check whether (Q, N) is a Dickson pair
    Check { q: u64, n: u32 },
}

#[derive(Subcommand)]
enum NfCmd {
    /// Build a near-field and verify the axioms exhaustively
    Build {
        q: u64,
        n: u32,
        #[arg(long, default_value_t = 0)]
        variant: usize,
        /// Write the multiplication table as CSV
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Number of near-fields (isomorphism classes) for the pair
    Count { q: u64, n: u32 },
}

#[derive(Args)]
struct SchemeAddr {
    q: u64,
    n: u32,
    #[arg(long, default_value_t = 0)]
    variant: usize,
    /// Index into the deterministic subgroup enumeration
    #[arg(long)]
    subgroup: usize,
}

#[derive(Subcommand)]
enum SchemeCmd {
    /// Build Cyc(K, NF) and print its parameters
    Build {
        #[command(flatten)]
        addr: SchemeAddr,
        /// Write the scheme as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Automorphism group, cross-checked against the brute-force oracle
    Aut {
        #[command(flatten)]
        addr: SchemeAddr,
    },
    /// Isomorphism test between two schemes over the same pair (Q, N)
    Iso {
        q: u64,
        n: u32,
        variant_a: usize,
        subgroup_a: usize,
        variant_b: usize,
        subgroup_b: usize,
    },
}

fn load_scheme(q: u64, n: u32, variant: usize, subgroup: usize) -> anyhow::Result<CyclotomicScheme> {
    let nf = DicksonNearField::new(q, n, variant)?;
    let mg = nf.mult_group()?;
    let subs = mg.subgroups();
    let sub = subs
        .get(subgroup)
        .with_context(|| format!("subgroup index {subgroup} out of range (have {})", subs.len()))?;
    let k: Vec<Elt> = sub.iter().map(|&i| mg.elements[i]).collect();
    Ok(scheme::build_cyclotomic(&nf, &k)?)
}

/// Ok(true) = checks pass (exit 0), Ok(false) = a check failed (exit 1).
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Pair(PairCmd::Check { q, n }) => {
            let valid = DicksonPair::is_valid(q, n)?;
            println!("({q}, {n}) is {}a Dickson pair", if valid { "" } else { "not " });
            Ok(valid)
        }
        Command::Nf(NfCmd::Build { q, n, variant, table }) => {
            let nf = DicksonNearField::new(q, n, variant)?;
            let report = verify_nearfield_axioms(&nf)?;
            println!(
                "near-field of order {} (p={}, d={}, n={}), variant {} (twist u={})",
                nf.order(),
                nf.pair.p,
                nf.pair.d,
                nf.pair.n,
                nf.variant,
                nf.variant_rep,
            );
            println!("axioms: {}", if report.all_pass() { "pass" } else { "FAIL" });
            if let Some(path) = table {
                std::fs::write(&path, nf.mult_table_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("table written to {}", path.display());
            }
            Ok(report.all_pass())
        }
        Command::Nf(NfCmd::Count { q, n }) => {
            println!("{}", count_dickson_nearfields(q, n)?);
            Ok(true)
        }
        Command::Scheme(SchemeCmd::Build { addr, json }) => {
            let c = load_scheme(addr.q, addr.n, addr.variant, addr.subgroup)?;
            println!(
                "Cyc(K, NF): N={}, rank={}, valency={}, primitive={}",
                c.scheme.n,
                c.scheme.rank,
                c.valency,
                c.scheme.is_primitive(),
            );
            if let Some(path) = json {
                std::fs::write(&path, c.scheme.to_json(c.valency))
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("scheme written to {}", path.display());
            }
            Ok(true)
        }
        Command::Scheme(SchemeCmd::Aut { addr }) => {
            let c = load_scheme(addr.q, addr.n, addr.variant, addr.subgroup)?;
            match scheme::aut_group(&c)? {
                AutGroup::Symmetric(n) => {
                    println!("trivial scheme: Aut = Sym({n})");
                    Ok(true)
                }
                AutGroup::Group(g) => {
                    println!("|Aut| = {}", g.order());
                    let oracle = scheme::aut_bruteforce(&c.scheme)?;
                    let agree = g.same_group(&oracle);
                    println!(
                        "brute-force oracle: |Aut| = {} ({})",
                        oracle.order(),
                        if agree { "agrees" } else { "MISMATCH" }
                    );
                    Ok(agree)
                }
            }
        }
        Command::Scheme(SchemeCmd::Iso {
            q,
            n,
            variant_a,
            subgroup_a,
            variant_b,
            subgroup_b,
        }) => {
            let a = load_scheme(q, n, variant_a, subgroup_a)?;
            let b = load_scheme(q, n, variant_b, subgroup_b)?;
            let (iso, _) = scheme::are_isomorphic(&a, &b)?;
            println!("{}", if iso { "isomorphic" } else { "not isomorphic" });
            Ok(true)
        }
        Command::Zsig { q, n, min } => {
            let primes = zsigmondy_primes(q, n, min)?;
            if primes.is_empty() {
                println!("no Zsigmondy primes for ({q}, {n}) above {min}");
            } else {
                println!(
                    "{}",
                    primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
                );
            }
            Ok(true)
        }
        Command::Census {
            max_order,
            checks,
            out,
            csv,
            cache_dir,
        } => {
            let mut opts = CensusOptions::new(max_order);
            if let Some(names) = checks {
                opts.checks = names
                    .iter()
                    .map(|s| s.trim().parse::<Check>())
                    .collect::<Result<Vec<_>, _>>()?;
                if opts.checks.is_empty() {
                    bail!("--checks must name at least one check");
                }
            }
            opts.cache_dir = Cache::resolve(cache_dir);
            let report = run_census(&opts)?;
            let json = report.to_json();
            match &out {
                Some(path) => std::fs::write(path, &json)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            if let Some(path) = &csv {
                std::fs::write(path, report.to_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!(
                "{} records, {} failures, {} errors",
                report.summary.records, report.summary.failures, report.summary.errors
            );
            Ok(report.summary.failures == 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
