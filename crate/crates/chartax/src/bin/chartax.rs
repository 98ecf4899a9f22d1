//! Batch experiment driver: every module as a subcommand with
//! reproducible JSON/CSV output. Identical invocations produce
//! byte-identical reports; all randomness flows from `--seed` through a
//! seeded ChaCha stream that is recorded in the output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use chartax::characters::{DirichletCharacter, GroupStructure};
use chartax::dichotomy::{extremal_example, theorem1_check, theorem2_check};
use chartax::distance::{
    char_delta, default_grid_step, g_delta, minimize_over_t, phase_sum_for, weighted_delta,
    Objective, WeightMode,
};
use chartax::multiplicative::{Builtin, MultiplicativeFunction, SupportSet};
use chartax::report::{csv_lines, Report};
use chartax::sieve::{
    large_sieve_check, polya_vinogradov_max, q_with_modulus_primes, selberg_weights,
    sieve_quadratic_form, smooth_count_chain_check, smooth_progression_count, LargeSieveInstance,
};
use chartax::taxonomy::{taxonomy_report, Normalization, TaxonomyParams};
use chartax::{verify, PrimeTable, Result};

#[derive(Parser)]
#[command(
    name = "chartax",
    version,
    about = "character sums, pretentious distances, and the order taxonomy — batch experiment driver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for reports
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every randomized object in the run
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for sweeps (0 = rayon default)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GName {
    Moebius,
    Liouville,
    Unit,
    Character,
    Random,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum NormArg {
    Phi,
    Modulus,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum WeightArg {
    None,
    Char,
    SelfNorm,
}

#[derive(Subcommand)]
enum Command {
    /// Group table mod D: components, characters, orders, P-V maxima
    Characters(CharactersArgs),
    /// Distance profiles and twist scans
    Distance(DistanceArgs),
    /// Theorem 1/2 verdicts, single cell or full character sweep
    Dichotomy(DichotomyArgs),
    /// Full taxonomy report for one (g, D, x, eps, a) instance
    Taxonomy(TaxonomyArgs),
    /// Maximal-gap large-sieve instance
    Largesieve(LargesieveArgs),
    /// Smooth-number counts in progressions with chain diagnostics
    Smooth(SmoothArgs),
    /// Run the acceptance suite (exit 1 on any failure)
    Verify(VerifyArgs),
}

#[derive(Args, Serialize)]
struct CharactersArgs {
    #[arg(long, alias = "D")]
    d: u64,
    /// Include the Polya-Vinogradov maximum per non-principal character
    #[arg(long)]
    pv: bool,
}

#[derive(Args, Serialize)]
struct DistanceArgs {
    #[arg(long, alias = "D")]
    d: u64,
    #[arg(long)]
    x: u64,
    /// Character exponents, comma-separated (e.g. "2" or "1,0")
    #[arg(long, default_value = "0")]
    chi: String,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Compare g against the twisted character instead of the constant 1
    #[arg(long, value_enum)]
    g: Option<GName>,
    /// Support density for --g random
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, value_enum, default_value_t = WeightArg::None)]
    weighted: WeightArg,
    /// Emit the full (t, value) grid over [-t-max, t-max]
    #[arg(long)]
    scan: bool,
    /// Minimize over |t| <= t-max and report (t*, value)
    #[arg(long)]
    minimize: bool,
    #[arg(long, default_value_t = 2.0)]
    t_max: f64,
}

#[derive(Args, Serialize)]
struct DichotomyArgs {
    #[arg(long, alias = "D")]
    d: u64,
    #[arg(long)]
    x: u64,
    /// Character exponents; ignored in --sweep mode
    #[arg(long, default_value = "1")]
    chi: String,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Support: "full", "random", or "rpower:<r>"
    #[arg(long, default_value = "full")]
    support: String,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Check the order-r bound too
    #[arg(long)]
    r: Option<u64>,
    /// One row per (character, t) cell over all characters mod D
    #[arg(long)]
    sweep: bool,
    /// Comma-separated t values for --sweep
    #[arg(long, default_value = "0.0")]
    t_list: String,
}

#[derive(Args, Serialize)]
struct TaxonomyArgs {
    #[arg(long, value_enum)]
    g: GName,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Character exponents when --g character
    #[arg(long, default_value = "1")]
    chi: String,
    #[arg(long, alias = "D")]
    d: u64,
    #[arg(long)]
    x: u64,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long)]
    a: u64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Override the exceptional threshold delta (default eps^2/2)
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = NormArg::Phi)]
    normalization: NormArg,
}

#[derive(Args, Serialize)]
struct LargesieveArgs {
    #[arg(long, alias = "D")]
    d: u64,
    #[arg(long, default_value_t = 1)]
    q: u64,
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Number of characters (first J in enumeration order)
    #[arg(long, default_value_t = 1)]
    j: usize,
    /// Coefficient support size
    #[arg(long, default_value_t = 4000)]
    n: usize,
    /// Unimodular random coefficients instead of +-1
    #[arg(long)]
    unimodular: bool,
    /// Fold the prime divisors of D into Q first
    #[arg(long)]
    reduce: bool,
    /// Also report the Selberg weights and quadratic form for (Q, H, eps)
    #[arg(long)]
    selberg: bool,
}

#[derive(Args, Serialize)]
struct SmoothArgs {
    #[arg(long)]
    x: u64,
    #[arg(long, alias = "D")]
    d: u64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    a: u64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Include the rm^2 / gcd-reduction diagnostics
    #[arg(long)]
    chain: bool,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Criteria 1-3, 6, 7 only
    #[arg(long)]
    quick: bool,
}

fn parse_exponents(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| chartax::Error::invalid(format!("bad exponent '{tok}'")))
        })
        .collect()
}

fn build_table(x: u64) -> Result<PrimeTable> {
    PrimeTable::build(x.max(1000))
}

fn character_for(group: &std::sync::Arc<GroupStructure>, s: &str) -> Result<DirichletCharacter> {
    group.character(&parse_exponents(s)?)
}

fn make_g(
    name: GName,
    density: f64,
    seed: u64,
    chi: Option<&DirichletCharacter>,
    table: &PrimeTable,
    window: (u64, u64),
) -> Result<MultiplicativeFunction> {
    match name {
        GName::Moebius => {
            MultiplicativeFunction::make_builtin(Builtin::Moebius, table, Some(window))
        }
        GName::Liouville => {
            MultiplicativeFunction::make_builtin(Builtin::Liouville, table, Some(window))
        }
        GName::Unit => MultiplicativeFunction::make_builtin(Builtin::Unit, table, Some(window)),
        GName::Character => {
            let chi = chi.ok_or_else(|| chartax::Error::invalid("--g character needs --chi"))?;
            MultiplicativeFunction::make_builtin(Builtin::Character(chi), table, Some(window))
        }
        GName::Random => MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom { seed, density },
            table,
            Some(window),
        ),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) {
    match out {
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
        }
        Some(path) => {
            std::fs::write(path, text).unwrap_or_else(|e| {
                eprintln!("error: cannot write {}: {e}", path.display());
                std::process::exit(2);
            });
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    let format = cli.format;
    let out = cli.out.clone();
    let seed = cli.seed;

    match cli.command {
        Command::Characters(args) => {
            let group = GroupStructure::build(args.d)?;
            #[derive(Serialize)]
            struct CharRow {
                id: u64,
                exponents: Vec<u64>,
                order: u64,
                real: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                pv_max: Option<f64>,
                #[serde(skip_serializing_if = "Option::is_none")]
                pv_bound: Option<f64>,
            }
            #[derive(Serialize)]
            struct GroupOut {
                modulus: u64,
                phi: u64,
                exponent: u64,
                /// (prime-power factor, generator, order) per component
                components: Vec<(u64, u64, u64)>,
                characters: Vec<CharRow>,
            }
            let mut rows = Vec::new();
            for chi in group.enumerate() {
                let (pv_max, pv_bound) = if args.pv && !chi.is_principal() {
                    let (m, b) = polya_vinogradov_max(&chi)?;
                    (Some(m), Some(b))
                } else {
                    (None, None)
                };
                rows.push(CharRow {
                    id: chi.id(),
                    exponents: chi.exponents().to_vec(),
                    order: chi.order(),
                    real: chi.is_real(),
                    pv_max,
                    pv_bound,
                });
            }
            let result = GroupOut {
                modulus: group.modulus(),
                phi: group.phi(),
                exponent: group.exponent(),
                components: group
                    .components()
                    .iter()
                    .map(|c| (c.factor, c.generator, c.order))
                    .collect(),
                characters: rows,
            };
            match format {
                Format::Json => emit(&out, &Report::new("characters", &args, &result).to_json()),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = result
                        .characters
                        .iter()
                        .map(|r| {
                            vec![
                                r.id.to_string(),
                                format!("{:?}", r.exponents).replace(' ', ""),
                                r.order.to_string(),
                                r.real.to_string(),
                                r.pv_max.map(|v| v.to_string()).unwrap_or_default(),
                                r.pv_bound.map(|v| v.to_string()).unwrap_or_default(),
                            ]
                        })
                        .collect();
                    emit(
                        &out,
                        &csv_lines(
                            &["id", "exponents", "order", "real", "pv_max", "pv_bound"],
                            &rows,
                        ),
                    );
                }
            }
        }

        Command::Distance(args) => {
            let table = build_table(args.x)?;
            let group = GroupStructure::build(args.d)?;
            let chi = character_for(&group, &args.chi)?;
            let window = (args.d, args.x);
            let g = match args.g {
                None => None,
                Some(name) => Some(make_g(
                    name,
                    args.density,
                    seed,
                    Some(&chi),
                    &table,
                    window,
                )?),
            };
            if args.scan || args.minimize {
                let support;
                let obj = match &g {
                    None => {
                        support = SupportSet::full_window(&table, args.d, args.x)?;
                        Objective::CharDelta {
                            support: &support,
                            chi: &chi,
                            d: args.d,
                            x: args.x,
                        }
                    }
                    Some(gf) => Objective::GDelta {
                        g: gf,
                        chi: &chi,
                        d: args.d,
                        x: args.x,
                    },
                };
                if args.minimize {
                    let (t_star, value) = minimize_over_t(&obj, args.t_max, &table)?;
                    #[derive(Serialize)]
                    struct MinOut {
                        t_star: f64,
                        value: f64,
                    }
                    emit(
                        &out,
                        &Report::new("distance-minimize", &args, &MinOut { t_star, value })
                            .to_json(),
                    );
                } else {
                    let ps = phase_sum_for(&obj, &table)?;
                    let step = default_grid_step(args.x);
                    let n = (2.0 * args.t_max / step).floor() as usize + 1;
                    let vals = ps.grid_scan(-args.t_max, step, n);
                    match format {
                        Format::Csv => {
                            let rows: Vec<Vec<String>> = vals
                                .iter()
                                .enumerate()
                                .map(|(j, v)| {
                                    vec![(-args.t_max + step * j as f64).to_string(), v.to_string()]
                                })
                                .collect();
                            emit(&out, &csv_lines(&["t", "value"], &rows));
                        }
                        Format::Json => {
                            #[derive(Serialize)]
                            struct ScanOut {
                                step: f64,
                                points: Vec<(f64, f64)>,
                            }
                            let points = vals
                                .iter()
                                .enumerate()
                                .map(|(j, &v)| (-args.t_max + step * j as f64, v))
                                .collect();
                            emit(
                                &out,
                                &Report::new("distance-scan", &args, &ScanOut { step, points })
                                    .to_json(),
                            );
                        }
                    }
                }
            } else {
                let profile = match (&g, args.weighted) {
                    (None, _) => {
                        let s = SupportSet::full_window(&table, args.d, args.x)?;
                        char_delta(&s, &chi, args.t, &table, args.d, args.x)?
                    }
                    (Some(gf), WeightArg::None) => {
                        g_delta(gf, &chi, args.t, &table, args.d, args.x)?
                    }
                    (Some(gf), WeightArg::Char) => weighted_delta(
                        gf,
                        &chi,
                        args.t,
                        &table,
                        args.d,
                        args.x,
                        WeightMode::CharWeighted,
                    )?,
                    (Some(gf), WeightArg::SelfNorm) => weighted_delta(
                        gf,
                        &chi,
                        args.t,
                        &table,
                        args.d,
                        args.x,
                        WeightMode::SelfNormalized,
                    )?,
                };
                emit(&out, &Report::new("distance", &args, &profile).to_json());
            }
        }

        Command::Dichotomy(args) => {
            let table = build_table(args.x)?;
            let make_support = |chi_seed: u64| -> Result<SupportSet> {
                if args.support == "full" {
                    SupportSet::full_window(&table, args.d, args.x)
                } else if args.support == "random" {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ chi_seed);
                    SupportSet::from_predicate(&table, args.d, args.x, |_| {
                        rng.random::<f64>() < args.density
                    })
                } else if let Some(rs) = args.support.strip_prefix("rpower:") {
                    let r: u64 = rs
                        .parse()
                        .map_err(|_| chartax::Error::invalid("bad rpower:<r> support"))?;
                    Ok(extremal_example(args.d, r, args.x, &table)?.0)
                } else {
                    Err(chartax::Error::invalid(format!(
                        "unknown support '{}' (full | random | rpower:<r>)",
                        args.support
                    )))
                }
            };
            if args.sweep {
                let group = GroupStructure::build(args.d)?;
                let ts: Vec<f64> = args
                    .t_list
                    .split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<f64>()
                            .map_err(|_| chartax::Error::invalid(format!("bad t '{tok}'")))
                    })
                    .collect::<Result<_>>()?;
                let mut rows = Vec::new();
                let mut verdicts = Vec::new();
                for chi in group.enumerate() {
                    let support = make_support(chi.id())?;
                    for &t in &ts {
                        let v = match args.r {
                            None => {
                                theorem1_check(&support, &chi, t, args.b, &table, args.d, args.x)?
                            }
                            Some(r) => theorem2_check(
                                &support, &chi, t, r, args.b, &table, args.d, args.x,
                            )?,
                        };
                        rows.push(vec![
                            chi.id().to_string(),
                            t.to_string(),
                            v.delta_star.map(|d| d.to_string()).unwrap_or_default(),
                            v.order.to_string(),
                            v.horn1_slack.to_string(),
                            v.horn2_holds.to_string(),
                            v.in_hypothesis.to_string(),
                            v.chain
                                .as_ref()
                                .map(|c| {
                                    (c.small_gamma_ok && c.expansion_ok && c.large_gamma_ok)
                                        .to_string()
                                })
                                .unwrap_or_default(),
                        ]);
                        verdicts.push(v);
                    }
                }
                match format {
                    Format::Csv => emit(
                        &out,
                        &csv_lines(
                            &[
                                "chi_id",
                                "t",
                                "delta_star",
                                "order",
                                "horn1_slack",
                                "horn2_holds",
                                "in_hypothesis",
                                "chain_ok",
                            ],
                            &rows,
                        ),
                    ),
                    Format::Json => emit(
                        &out,
                        &Report::new("dichotomy-sweep", &args, &verdicts).to_json(),
                    ),
                }
            } else {
                let group = GroupStructure::build(args.d)?;
                let chi = character_for(&group, &args.chi)?;
                let support = make_support(chi.id())?;
                let v = match args.r {
                    None => theorem1_check(&support, &chi, args.t, args.b, &table, args.d, args.x)?,
                    Some(r) => {
                        theorem2_check(&support, &chi, args.t, r, args.b, &table, args.d, args.x)?
                    }
                };
                emit(&out, &Report::new("dichotomy", &args, &v).to_json());
            }
        }

        Command::Taxonomy(args) => {
            let table = build_table(args.x)?;
            let group = GroupStructure::build(args.d)?;
            let chi = character_for(&group, &args.chi)?;
            let g = make_g(
                args.g,
                args.density,
                seed,
                Some(&chi),
                &table,
                (args.d, args.x),
            )?;
            let params = TaxonomyParams {
                eps: args.eps,
                b_param: args.b,
                delta: args.delta,
                normalization: match args.normalization {
                    NormArg::Phi => Normalization::Phi,
                    NormArg::Modulus => Normalization::Modulus,
                },
            };
            let rep = taxonomy_report(&g, args.d, args.a, args.x, &params, &table)?;
            match format {
                Format::Json => emit(&out, &Report::new("taxonomy", &args, &rep).to_json()),
                Format::Csv => {
                    let scan = chartax::taxonomy::find_exceptional(
                        &g, args.d, args.x, args.eps, args.b, args.delta, &table,
                    )?;
                    let rows: Vec<Vec<String>> = scan
                        .per_character
                        .iter()
                        .map(|r| {
                            vec![
                                r.id.to_string(),
                                r.order.to_string(),
                                r.t_star.to_string(),
                                r.distance.to_string(),
                                (r.id != 0 && r.distance <= scan.threshold).to_string(),
                            ]
                        })
                        .collect();
                    emit(
                        &out,
                        &csv_lines(
                            &["chi_id", "order", "t_star", "distance", "exceptional"],
                            &rows,
                        ),
                    );
                }
            }
        }

        Command::Largesieve(args) => {
            let group = GroupStructure::build(args.d)?;
            let chars: Vec<_> = group.enumerate().into_iter().take(args.j.max(1)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<Complex64> = (0..=args.n)
                .map(|n| {
                    if n == 0 {
                        Complex64::new(0.0, 0.0)
                    } else if args.unimodular {
                        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        Complex64::new(th.cos(), th.sin())
                    } else if rng.random::<f64>() < 0.5 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(-1.0, 0.0)
                    }
                })
                .collect();
            let q = if args.reduce {
                q_with_modulus_primes(args.q, args.d)
            } else {
                args.q
            };
            let inst = LargeSieveInstance {
                modulus: args.d,
                q,
                h: args.h,
                eps: args.eps,
                chars,
                coeffs,
            };
            let rep = large_sieve_check(&inst)?;
            #[derive(Serialize)]
            struct LsOut {
                report: chartax::sieve::LargeSieveReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                selberg: Option<(
                    chartax::sieve::SelbergWeights,
                    chartax::sieve::QuadraticFormReport,
                )>,
            }
            let selberg = if args.selberg {
                let w = selberg_weights(q, args.h.max(1.0), args.eps)?;
                let form = sieve_quadratic_form(&w);
                Some((w, form))
            } else {
                None
            };
            match format {
                Format::Json => emit(
                    &out,
                    &Report::new(
                        "largesieve",
                        &args,
                        &LsOut {
                            report: rep,
                            selberg,
                        },
                    )
                    .to_json(),
                ),
                Format::Csv => {
                    let rows = vec![vec![
                        rep.modulus.to_string(),
                        rep.q.to_string(),
                        rep.h.to_string(),
                        rep.j.to_string(),
                        rep.lhs.to_string(),
                        rep.rhs_shape.to_string(),
                        rep.ratio.to_string(),
                    ]];
                    emit(
                        &out,
                        &csv_lines(&["d", "q", "h", "j", "lhs", "rhs_shape", "ratio"], &rows),
                    );
                }
            }
        }

        Command::Smooth(args) => {
            let table = build_table(args.x)?;
            let rep = smooth_progression_count(args.x, args.d, args.c, args.a, args.k, &table)?;
            #[derive(Serialize)]
            struct SmoothOut {
                count: chartax::sieve::SmoothCountReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                chain: Option<chartax::sieve::SmoothChainReport>,
            }
            let chain = if args.chain {
                Some(smooth_count_chain_check(
                    args.x, args.d, args.c, args.a, args.k, &table,
                )?)
            } else {
                None
            };
            match format {
                Format::Json => emit(
                    &out,
                    &Report::new("smooth", &args, &SmoothOut { count: rep, chain }).to_json(),
                ),
                Format::Csv => {
                    let rows = vec![vec![
                        rep.x.to_string(),
                        rep.d.to_string(),
                        rep.c.to_string(),
                        rep.a.to_string(),
                        rep.k.to_string(),
                        rep.count.to_string(),
                        rep.bound_shape.to_string(),
                        rep.ratio.to_string(),
                    ]];
                    emit(
                        &out,
                        &csv_lines(
                            &["x", "d", "c", "a", "k", "count", "bound_shape", "ratio"],
                            &rows,
                        ),
                    );
                }
            }
        }

        Command::Verify(args) => {
            let outcomes = if args.quick {
                verify::run_quick()
            } else {
                verify::run_full()
            };
            for o in &outcomes {
                println!("{}", o.line());
            }
            let all_ok = outcomes.iter().all(|o| o.passed);
            if let Some(path) = &out {
                let rep = Report::new("verify", &args, &outcomes);
                std::fs::write(path, rep.to_json()).map_err(|e| {
                    chartax::Error::invalid(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            return Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
