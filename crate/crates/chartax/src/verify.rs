//! The acceptance suite: every quantitative claim of the library as a
//! pass/fail criterion with pinned tolerances. The CLI `verify`
//! subcommand and the `acceptance` integration test both run these.
//!
//! Sweep results are memoized per process so the quick suite, the full
//! suite, and individual criteria can share the heavy computations.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::GroupStructure;
use crate::dichotomy::{extremal_example, fejer, nearest_integer_distance, theorem1_check};
use crate::distance::{char_delta, g_delta, halasz_bound, minimize_over_t, Objective};
use crate::multiplicative::{
    twisted_from_residues, Builtin, MultiplicativeFunction, PowerMode, SupportSet,
};
use crate::primes::PrimeTable;
use crate::sieve::{
    large_sieve_check, polya_vinogradov_max, selberg_weights, sieve_indicator_check,
    sieve_quadratic_form, smooth_count_chain_check, smooth_progression_count, LargeSieveInstance,
};
use crate::taxonomy::{taxonomy_report, TaxonomyParams, TaxonomyReport};

/// Result of one acceptance criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub seconds: f64,
    pub details: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} ({:.2}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.details
        )
    }
}

fn outcome(
    id: u32,
    name: &str,
    started: Instant,
    passed: bool,
    details: String,
) -> CriterionOutcome {
    CriterionOutcome {
        id,
        name: name.to_string(),
        passed,
        seconds: started.elapsed().as_secs_f64(),
        details,
    }
}

static TABLE_1E6: OnceLock<Arc<PrimeTable>> = OnceLock::new();

/// Shared sieve to 10^6, built once per process.
pub fn table_1e6() -> Arc<PrimeTable> {
    TABLE_1E6
        .get_or_init(|| Arc::new(PrimeTable::build(1_000_000).expect("sieve to 1e6")))
        .clone()
}

// ---------------------------------------------------------------------
// criterion 1: Fejér identity and kernel lower bound
// ---------------------------------------------------------------------

pub fn criterion_01_fejer() -> CriterionOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xFEA2);
    let mut max_dev = 0.0f64;
    let mut ok = true;
    for _ in 0..1000 {
        let th: f64 = rng.random_range(-4.0..4.0);
        if nearest_integer_distance(th) < 1e-6 {
            continue;
        }
        for n in 1..=64u64 {
            let closed = fejer(n, th);
            let mut expo = 1.0;
            for m in 1..n {
                expo += 2.0
                    * (1.0 - m as f64 / n as f64)
                    * (2.0 * std::f64::consts::PI * m as f64 * th).cos();
            }
            let dev = (closed - expo).abs();
            max_dev = max_dev.max(dev);
            if dev > 1e-10 || closed < -1e-12 {
                ok = false;
            }
        }
    }
    // kernel >= 4N/pi^2 whenever 2N ||theta|| <= 1, on a 1e4-point grid
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let mut min_margin = f64::INFINITY;
    for n in 1..=16u64 {
        for j in 0..10_000 {
            let th = j as f64 / 10_000.0;
            if 2.0 * n as f64 * nearest_integer_distance(th) <= 1.0 {
                let margin = fejer(n, th) - 4.0 * n as f64 / pi2;
                min_margin = min_margin.min(margin);
                if margin < -1e-9 {
                    ok = false;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let runtime_ok = elapsed < 5.0;
    outcome(
        1,
        "fejer identity and lower bound",
        start,
        ok && runtime_ok,
        format!("max form deviation {max_dev:.3e}, min lower-bound margin {min_margin:.3e}"),
    )
}

// ---------------------------------------------------------------------
// criterion 2: orthogonality, multiplicativity, orders for all D <= 50
// ---------------------------------------------------------------------

pub fn criterion_02_characters() -> CriterionOutcome {
    let start = Instant::now();
    let results: Vec<(f64, bool)> = (1..=50u64)
        .into_par_iter()
        .map(|d| {
            let g = GroupStructure::build(d).expect("group");
            let chars = g.enumerate();
            let phi = g.phi() as f64;
            let mut worst = 0.0f64;
            let mut ok = true;
            // orthogonality over all coprime residue pairs
            for a in 1..=d {
                if !g.is_unit(a % d) {
                    continue;
                }
                for b in 1..=d {
                    if !g.is_unit(b % d) {
                        continue;
                    }
                    let mut s = Complex64::new(0.0, 0.0);
                    for chi in &chars {
                        s += chi.eval(a) * chi.eval(b).conj();
                    }
                    let expect = if a % d == b % d { phi } else { 0.0 };
                    let dev = (s - Complex64::new(expect, 0.0)).norm();
                    worst = worst.max(dev);
                    if dev > 1e-9 {
                        ok = false;
                    }
                }
            }
            // complete multiplicativity on all residue pairs
            for chi in &chars {
                for a in 0..d {
                    for b in 0..d {
                        let dev = (chi.eval(a * b) - chi.eval(a) * chi.eval(b)).norm();
                        worst = worst.max(dev);
                        if dev > 1e-9 {
                            ok = false;
                        }
                    }
                }
                // order by brute-force powering
                let mut acc = chi.clone();
                let mut k = 1u64;
                while !acc.is_principal() {
                    acc = acc.product(chi).expect("same modulus");
                    k += 1;
                }
                if k != chi.order() || !g.phi().is_multiple_of(k) {
                    ok = false;
                }
            }
            (worst, ok)
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let ok = results.iter().all(|r| r.1);
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        2,
        "character orthogonality, multiplicativity, orders (D <= 50)",
        start,
        ok && elapsed < 10.0,
        format!("worst deviation {worst:.3e} over all D <= 50"),
    )
}

// ---------------------------------------------------------------------
// criterion 3: exact decomposition identity on 100 random instances
// ---------------------------------------------------------------------

pub fn criterion_03_decomposition() -> CriterionOutcome {
    let start = Instant::now();
    let table = table_1e6();
    let worst: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xDEC0 + i);
            let d = rng.random_range(2..=30u64);
            let x = rng.random_range(500..=10_000u64);
            let density = rng.random_range(0.3..1.0);
            let g = MultiplicativeFunction::make_builtin(
                Builtin::UnimodularRandom {
                    seed: 7000 + i,
                    density,
                },
                &table,
                None,
            )
            .expect("function");
            let group = GroupStructure::build(d).expect("group");
            let a = loop {
                let a = rng.random_range(1..d.max(2));
                if group.is_unit(a % d) {
                    break a;
                }
            };
            let chars = group.enumerate();
            let residues = g.residue_sums(x, d, &table).expect("residues");
            let direct = g.progression_sum(x, d, a % d, &table).expect("progression");
            let mut recon = Complex64::new(0.0, 0.0);
            for chi in &chars {
                recon += chi.eval(a).conj() * twisted_from_residues(&residues, chi);
            }
            recon /= group.phi() as f64;
            (direct - recon).norm()
        })
        .collect();
    let max_dev = worst.iter().fold(0.0f64, |m, &v| m.max(v));
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        3,
        "exact orthogonality decomposition (100 random instances)",
        start,
        max_dev <= 1e-9 && elapsed < 60.0,
        format!("max identity deviation {max_dev:.3e}"),
    )
}

// ---------------------------------------------------------------------
// criteria 4 + 5: theorem-1 proof-chain and dichotomy sweep
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SweepCellResult {
    pub d: u64,
    pub chi_id: u64,
    pub t: f64,
    pub density: f64,
    pub delta_star: Option<f64>,
    pub in_hypothesis: bool,
    pub horn1_slack: f64,
    pub horn2_holds: bool,
    pub has_chain: bool,
    pub chain_ok: bool,
    pub side_condition_ok: bool,
}

fn sweep_cells() -> Vec<(u64, usize, f64, f64)> {
    let ds = [7u64, 12, 25, 47, 101];
    let ts = [0.0f64, 0.5, -1.25, 2.0, -3.3, 4.7];
    let densities = [0.15f64, 0.3, 0.45, 0.95];
    let mut cells = Vec::new();
    for &d in &ds {
        for sel in 0..5usize {
            for &t in &ts {
                for &rho in &densities {
                    if sel == 0 && t == 0.0 {
                        continue; // principal at t=0 is the delta*=0 sentinel
                    }
                    cells.push((d, sel, t, rho));
                }
            }
        }
    }
    cells
}

fn run_dichotomy_sweep(x: u64) -> Vec<SweepCellResult> {
    let table = table_1e6();
    sweep_cells()
        .into_par_iter()
        .map(|(d, sel, t, rho)| {
            let group = GroupStructure::build(d).expect("group");
            let chars = group.enumerate();
            let ids = [0usize, 1, 2, 3, chars.len() - 1];
            let chi = &chars[ids[sel] % chars.len()];
            let seed = d
                .wrapping_mul(1_000_003)
                .wrapping_add(sel as u64 * 7919)
                .wrapping_add((t * 1000.0).abs() as u64 * 31)
                .wrapping_add((rho * 100.0) as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let support = SupportSet::from_predicate(&table, d, x, |_| rng.random::<f64>() < rho)
                .expect("support");
            let v = theorem1_check(&support, chi, t, 1.0, &table, d, x).expect("verdict");
            let (has_chain, chain_ok) = match &v.chain {
                None => (false, true),
                Some(c) => (
                    true,
                    c.small_gamma_ok && c.expansion_ok && c.large_gamma_ok && c.assembled_ok,
                ),
            };
            SweepCellResult {
                d,
                chi_id: chi.id(),
                t,
                density: rho,
                delta_star: v.delta_star,
                in_hypothesis: v.in_hypothesis,
                horn1_slack: v.horn1_slack,
                horn2_holds: v.horn2_holds,
                has_chain,
                chain_ok,
                side_condition_ok: v.side_condition_nt.unwrap_or(true),
            }
        })
        .collect()
}

static SWEEP_1E5: OnceLock<Vec<SweepCellResult>> = OnceLock::new();
static SWEEP_1E6: OnceLock<Vec<SweepCellResult>> = OnceLock::new();

pub fn sweep_at(x: u64) -> &'static Vec<SweepCellResult> {
    match x {
        100_000 => SWEEP_1E5.get_or_init(|| run_dichotomy_sweep(100_000)),
        1_000_000 => SWEEP_1E6.get_or_init(|| run_dichotomy_sweep(1_000_000)),
        _ => panic!("sweep memoized only for x = 1e5 and 1e6"),
    }
}

/// Matrix-wide empirical horn-1 constant: max positive slack over
/// in-hypothesis cells where horn 2 fails.
pub fn empirical_envelope(cells: &[SweepCellResult]) -> f64 {
    cells
        .iter()
        .filter(|c| c.in_hypothesis && !c.horn2_holds)
        .map(|c| c.horn1_slack)
        .fold(0.0f64, f64::max)
        .max(0.0)
}

pub fn criterion_04_chain() -> CriterionOutcome {
    let start = Instant::now();
    let cells = sweep_at(1_000_000);
    let with_chain = cells.iter().filter(|c| c.has_chain).count();
    let violations = cells
        .iter()
        .filter(|c| c.has_chain && !(c.chain_ok && c.side_condition_ok))
        .count();
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        4,
        "theorem-1 proof chain (>= 500 cells at x = 1e6)",
        start,
        with_chain >= 500 && violations == 0 && elapsed < 300.0,
        format!("{with_chain} chain cells, {violations} violations"),
    )
}

pub fn criterion_05_dichotomy() -> CriterionOutcome {
    let start = Instant::now();
    let big = sweep_at(1_000_000);
    let small = sweep_at(100_000);
    let c6 = empirical_envelope(big);
    let c5 = empirical_envelope(small);
    let in_hyp = big.iter().filter(|c| c.in_hypothesis).count();
    // every in-hypothesis cell satisfies one horn with the envelope
    let horn_ok = big
        .iter()
        .filter(|c| c.in_hypothesis)
        .all(|c| c.horn2_holds || c.horn1_slack <= c6 + 1e-12);
    // envelope stability: treat sub-1e-9 envelopes as zero
    let z5 = if c5 < 1e-9 { 0.0 } else { c5 };
    let z6 = if c6 < 1e-9 { 0.0 } else { c6 };
    let stable = if z5 == 0.0 { z6 == 0.0 } else { z6 <= 1.5 * z5 };
    let max_slack = big
        .iter()
        .filter(|c| c.in_hypothesis && !c.horn2_holds)
        .map(|c| c.horn1_slack)
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        5,
        "theorem-1 dichotomy with empirical envelope",
        start,
        horn_ok && stable && in_hyp > 0,
        format!(
            "{in_hyp} in-hypothesis cells, c_emp(1e5) = {c5:.3e}, c_emp(1e6) = {c6:.3e}, max horn-1 slack {max_slack:.3e}"
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 6: extremal sharpness on r-th power residue supports
// ---------------------------------------------------------------------

pub fn criterion_06_extremal() -> CriterionOutcome {
    let start = Instant::now();
    let table = table_1e6();
    let mut ok = true;
    let mut lines = Vec::new();
    for &(d, r) in &[(7u64, 3u64), (5, 2), (13, 3)] {
        let (support, chars) = match extremal_example(d, r, 1_000_000, &table) {
            Ok(v) => v,
            Err(_) => {
                ok = false;
                continue;
            }
        };
        if chars.is_empty() {
            ok = false;
            continue;
        }
        let l = table.reciprocal_sum(d, 1_000_000).expect("L");
        let mass = support.mass(&table);
        let anchor = l / r as f64;
        if (mass - anchor).abs() > 0.2 * anchor {
            ok = false;
        }
        for chi in &chars {
            let prof = char_delta(&support, chi, 0.0, &table, d, 1_000_000).expect("delta");
            if prof.raw != 0.0 {
                ok = false;
            }
        }
        lines.push(format!("(D={d},r={r}): mass/L*r = {:.4}", mass / anchor));
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        6,
        "extremal sharpness (delta* = 0 exactly, mass near L/r)",
        start,
        ok && elapsed < 60.0,
        lines.join("; "),
    )
}

// ---------------------------------------------------------------------
// criterion 7: Cauchy-Schwarz combination and squared-character step
// ---------------------------------------------------------------------

pub fn criterion_07_combination() -> CriterionOutcome {
    let start = Instant::now();
    let table = table_1e6();
    let worst: Vec<(f64, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC5 + i);
            let d = rng.random_range(3..=30u64);
            let x = 10_000u64;
            let group = GroupStructure::build(d).expect("group");
            let chars = group.enumerate();
            let density = rng.random_range(0.2..1.0);
            let g = MultiplicativeFunction::make_builtin(
                Builtin::UnimodularRandom {
                    seed: 9000 + i,
                    density,
                },
                &table,
                Some((d, x)),
            )
            .expect("g");
            let i1 = rng.random_range(0..chars.len());
            let i2 = rng.random_range(0..chars.len());
            let (t1, t2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let a = g_delta(&g, &chars[i1], t1, &table, d, x).expect("A").raw;
            let b = g_delta(&g, &chars[i2], t2, &table, d, x).expect("B").raw;
            let prod = chars[i1].product(&chars[i2].conjugate()).expect("product");
            let comb = char_delta(g.support(), &prod, t1 - t2, &table, d, x)
                .expect("combined")
                .raw;
            let cs_excess = comb - 2.0 * (a + b);

            // real-valued g: squared-character implication
            let gr = MultiplicativeFunction::from_prime_fn(
                "real-random",
                &table,
                Some((d, x)),
                PowerMode::CompletelyMultiplicative,
                |p| {
                    let mut h = ChaCha8Rng::seed_from_u64(p ^ (0xBEEF + i));
                    Complex64::new(h.random_range(-1.0..1.0), 0.0)
                },
            )
            .expect("real g");
            let t = rng.random_range(-2.0..2.0);
            let chi = &chars[rng.random_range(0..chars.len())];
            let gd = g_delta(&gr, chi, t, &table, d, x).expect("gd").raw;
            let sq = char_delta(gr.support(), &chi.pow(2), -2.0 * t, &table, d, x)
                .expect("sq")
                .raw;
            let sq_excess = sq - 4.0 * gd;
            (cs_excess, sq_excess)
        })
        .collect();
    let max_cs = worst.iter().map(|w| w.0).fold(f64::NEG_INFINITY, f64::max);
    let max_sq = worst.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
    let ok = max_cs <= 1e-9 && max_sq <= 1e-9;
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        7,
        "Cauchy-Schwarz combination and real-g squared character (1000 instances)",
        start,
        ok && elapsed < 30.0,
        format!("max combination excess {max_cs:.3e}, max squared-character excess {max_sq:.3e}"),
    )
}

// ---------------------------------------------------------------------
// criteria 8 + 9: taxonomy structural closure and envelope stability
// ---------------------------------------------------------------------

static TAX_1E5: OnceLock<Vec<TaxonomyReport>> = OnceLock::new();
static TAX_1E6: OnceLock<Vec<TaxonomyReport>> = OnceLock::new();

fn run_taxonomy_matrix(x: u64) -> Vec<TaxonomyReport> {
    let table = table_1e6();
    let ds = [5u64, 7, 12, 13, 35, 49];
    #[derive(Clone)]
    enum Gk {
        Moebius,
        Liouville,
        Random(u64, f64),
        /// g = conj(chi) for the character with this id — a perfect pretender.
        Pretender(u64),
        /// g = conj(chi) p^{i t0}: a twisted pretender.
        TwistedPretender(u64, f64),
    }
    let mut kinds = vec![Gk::Moebius, Gk::Liouville];
    for i in 0..20u64 {
        let density = if i < 7 {
            0.9
        } else if i < 14 {
            0.6
        } else {
            0.4
        };
        kinds.push(Gk::Random(2025 + i, density));
    }
    kinds.push(Gk::Pretender(1));
    kinds.push(Gk::TwistedPretender(1, 1.3));
    let mut jobs = Vec::new();
    for (ki, kind) in kinds.iter().enumerate() {
        for &d in &ds {
            jobs.push((ki, kind.clone(), d));
        }
    }
    jobs.into_par_iter()
        .map(|(_, kind, d)| {
            let g = match kind {
                Gk::Moebius => {
                    MultiplicativeFunction::make_builtin(Builtin::Moebius, &table, Some((d, x)))
                }
                Gk::Liouville => {
                    MultiplicativeFunction::make_builtin(Builtin::Liouville, &table, Some((d, x)))
                }
                Gk::Random(seed, density) => MultiplicativeFunction::make_builtin(
                    Builtin::UnimodularRandom { seed, density },
                    &table,
                    Some((d, x)),
                ),
                Gk::Pretender(id) => {
                    let group = GroupStructure::build(d).expect("group");
                    let chi = group.enumerate()[id as usize % group.phi() as usize].conjugate();
                    MultiplicativeFunction::make_builtin(
                        Builtin::Character(&chi),
                        &table,
                        Some((d, x)),
                    )
                }
                Gk::TwistedPretender(id, t0) => {
                    let group = GroupStructure::build(d).expect("group");
                    let chi = group.enumerate()[id as usize % group.phi() as usize].conjugate();
                    MultiplicativeFunction::from_prime_fn(
                        "twisted-pretender",
                        &table,
                        Some((d, x)),
                        PowerMode::CompletelyMultiplicative,
                        |p| {
                            let ang = t0 * (p as f64).ln();
                            chi.eval(p) * Complex64::new(ang.cos(), ang.sin())
                        },
                    )
                }
            }
            .expect("function");
            let params = TaxonomyParams::default();
            taxonomy_report(&g, d, d - 1, x, &params, &table).expect("taxonomy report")
        })
        .collect()
}

pub fn taxonomy_matrix_at(x: u64) -> &'static Vec<TaxonomyReport> {
    match x {
        100_000 => TAX_1E5.get_or_init(|| run_taxonomy_matrix(100_000)),
        1_000_000 => TAX_1E6.get_or_init(|| run_taxonomy_matrix(1_000_000)),
        _ => panic!("taxonomy matrix memoized only for x = 1e5 and 1e6"),
    }
}

pub fn criterion_08_taxonomy_structure() -> CriterionOutcome {
    let start = Instant::now();
    let reports = taxonomy_matrix_at(1_000_000);
    let mut ok = true;
    let mut moebius_exc = 0usize;
    let mut max_exc = 0usize;
    let mut pretender_hits = 0usize;
    for rep in reports.iter() {
        if !rep.structural_ok || rep.audit_error > 1e-9 {
            ok = false;
        }
        max_exc = max_exc.max(rep.exceptional.len());
        if rep.g.name == "moebius" {
            moebius_exc = moebius_exc.max(rep.exceptional.len());
            if rep.exceptional.len() > 1 {
                ok = false;
            }
            if rep.exceptional.iter().any(|e| e.order > 2) {
                ok = false;
            }
            if (rep.beta - 1.0).abs() > 1e-9 {
                ok = false;
            }
        }
        // planted pretenders must be detected, with the twist recovered
        if rep.g.name == "character" || rep.g.name == "twisted-pretender" {
            if rep.exceptional.is_empty() {
                ok = false;
            } else {
                pretender_hits += 1;
                let lead = &rep.exceptional[0];
                let target = if rep.g.name == "twisted-pretender" {
                    1.3
                } else {
                    0.0
                };
                if (lead.t_star - target).abs() > 1e-3 || lead.distance > 1e-4 {
                    ok = false;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        8,
        "taxonomy structural closure (24 functions x 6 moduli at x = 1e6)",
        start,
        ok && elapsed < 300.0,
        format!(
            "{} instances, max exceptional set {max_exc}, moebius exceptional <= {moebius_exc} (real), {pretender_hits} planted pretenders recovered",
            reports.len()
        ),
    )
}

pub fn criterion_09_envelope_stability() -> CriterionOutcome {
    let start = Instant::now();
    let big = taxonomy_matrix_at(1_000_000);
    let small = taxonomy_matrix_at(100_000);
    let max_ratio = |reps: &[TaxonomyReport]| {
        reps.iter()
            .filter_map(|r| r.residual_ratio)
            .fold(0.0f64, f64::max)
    };
    let r6 = max_ratio(big);
    let r5 = max_ratio(small);
    let ok = if r5 <= 0.0 { r6 <= 0.0 } else { r6 <= 2.0 * r5 };
    outcome(
        9,
        "residual-vs-envelope stability (x = 1e5 vs 1e6)",
        start,
        ok,
        format!("max residual/envelope: {r5:.3e} at 1e5, {r6:.3e} at 1e6"),
    )
}

// ---------------------------------------------------------------------
// criterion 10: Selberg weights, Polya-Vinogradov, large-sieve matrix
// ---------------------------------------------------------------------

pub fn criterion_10_large_sieve() -> CriterionOutcome {
    let start = Instant::now();
    let mut ok = true;

    // Selberg weight invariants on a random matrix
    let mut rng = ChaCha8Rng::seed_from_u64(0x5E1B);
    for _ in 0..1000 {
        let q = rng.random_range(1..10_000u64);
        let h = rng.random_range(2.0..1e6);
        let eps = rng.random_range(0.05..0.95);
        let w = selberg_weights(q, h, eps).expect("weights");
        if w.weights[&1] != 1.0 {
            ok = false;
        }
        for (&d, &l) in &w.weights {
            if l.abs() > 1.0 || d as f64 > w.cutoff + 1e-9 || q % d != 0 {
                ok = false;
            }
        }
        let form = sieve_quadratic_form(&w);
        if form.g_value <= 0.0 {
            ok = false;
        }
    }
    // upper-bound sieve over-counts the coprimality indicator
    let w = selberg_weights(30, 1e4, 0.8).expect("weights");
    let (weighted, coprime) = sieve_indicator_check(&w, 10_000);
    if weighted < coprime as f64 {
        ok = false;
    }

    // Polya-Vinogradov exhaustively for all non-principal chi, D <= 200
    let pv_ok: Vec<bool> = (3..=200u64)
        .into_par_iter()
        .map(|d| {
            let g = GroupStructure::build(d).expect("group");
            g.enumerate().iter().all(|chi| {
                chi.is_principal()
                    || polya_vinogradov_max(chi)
                        .map(|(m, b)| m <= b)
                        .unwrap_or(false)
            })
        })
        .collect();
    if !pv_ok.iter().all(|&b| b) {
        ok = false;
    }

    // large-sieve ratio matrix
    let mut params = Vec::new();
    for &d in &[11u64, 101] {
        for &j in &[1usize, 5, 10] {
            for &h in &[100.0f64, 1000.0] {
                for &q in &[1u64, 6, 30] {
                    for pat in 0..3u64 {
                        params.push((d, j, h, q, pat));
                    }
                }
            }
        }
    }
    let ratios: Vec<f64> = params
        .into_par_iter()
        .map(|(d, j, h, q, pat)| {
            let group = GroupStructure::build(d).expect("group");
            let chars: Vec<_> = group.enumerate().into_iter().take(j).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(d * 1000 + j as u64 * 100 + q + pat);
            let n_max = 4000usize;
            let coeffs: Vec<Complex64> = (0..=n_max)
                .map(|n| {
                    if n == 0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    match pat {
                        0 => {
                            if rng.random::<f64>() < 0.5 {
                                Complex64::new(1.0, 0.0)
                            } else {
                                Complex64::new(-1.0, 0.0)
                            }
                        }
                        1 => {
                            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                            Complex64::new(th.cos(), th.sin())
                        }
                        _ => {
                            if rng.random::<f64>() < 0.1 {
                                Complex64::new(rng.random_range(-1.0..1.0), 0.0)
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        }
                    }
                })
                .collect();
            let inst = LargeSieveInstance {
                modulus: d,
                q,
                h,
                eps: 0.5,
                chars,
                coeffs,
            };
            large_sieve_check(&inst).expect("large sieve").ratio
        })
        .collect();
    let max_ratio = ratios.iter().fold(0.0f64, |m, &r| m.max(r));
    if !(max_ratio.is_finite() && max_ratio <= 10.0) {
        ok = false;
    }
    let count = ratios.len();
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        10,
        "Selberg weights, Polya-Vinogradov (D <= 200), large-sieve matrix",
        start,
        ok && count >= 100 && elapsed < 300.0,
        format!("{count} sieve instances, max empirical ratio {max_ratio:.3}"),
    )
}

// ---------------------------------------------------------------------
// criterion 11: smooth counts in progressions
// ---------------------------------------------------------------------

pub fn criterion_11_smooth() -> CriterionOutcome {
    let start = Instant::now();
    let table = table_1e6();
    let mut ok = true;

    // the pinned oracle cell
    let rep = smooth_progression_count(100, 4, 1.0, 1, 1, &table).expect("count");
    if rep.count != 1 {
        ok = false;
    }

    // ratio envelope: cellwise growth from 1e4 to 1e6 bounded by 2x
    let mut worst_growth = 0.0f64;
    let cells: Vec<(u64, f64, u32)> = (4..=64u64)
        .flat_map(|d| {
            [1.0f64, 2.0]
                .into_iter()
                .flat_map(move |c| (1..=3u32).map(move |k| (d, c, k)))
        })
        .collect();
    let growths: Vec<(f64, bool)> = cells
        .into_par_iter()
        .map(|(d, c, k)| {
            let lo = smooth_progression_count(10_000, d, c, 1, k, &table).expect("lo");
            let hi = smooth_progression_count(1_000_000, d, c, 1, k, &table).expect("hi");
            if lo.count == 0 {
                (0.0, hi.count == 0)
            } else {
                (hi.ratio / lo.ratio, hi.ratio <= 2.0 * lo.ratio)
            }
        })
        .collect();
    for (g, cell_ok) in &growths {
        worst_growth = worst_growth.max(*g);
        if !cell_ok {
            ok = false;
        }
    }

    // chain diagnostics exact on a representative subset
    for &(x, d, c, a, k) in &[
        (10_000u64, 6u64, 1.0f64, 1u64, 2u32),
        (10_000, 6, 1.0, 3, 2),
        (100_000, 12, 1.0, 5, 1),
        (100_000, 36, 1.5, 7, 3),
        (1_000_000, 64, 1.0, 1, 2),
        (10_000, 10, 0.4, 5, 1),
    ] {
        let rep = smooth_count_chain_check(x, d, c, a, k, &table).expect("chain");
        if !(rep.log_weight_ok && rep.rm2_split_ok && rep.gcd_reduction_ok) {
            ok = false;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        11,
        "smooth counts: oracle cell, ratio envelope, rm^2 and gcd reductions",
        start,
        ok && elapsed < 300.0,
        format!("worst cellwise ratio growth 1e4->1e6: {worst_growth:.3}"),
    )
}

// ---------------------------------------------------------------------
// criterion 12: Halász bound matrix and planted-twist recovery
// ---------------------------------------------------------------------

pub fn criterion_12_halasz() -> CriterionOutcome {
    let start = Instant::now();
    let table = table_1e6();
    let x = 1_000_000u64;
    #[derive(Clone)]
    enum Gk {
        Moebius,
        Liouville,
        Unit,
        Random(u64, f64),
    }
    let kinds = vec![
        Gk::Moebius,
        Gk::Liouville,
        Gk::Unit,
        Gk::Random(1, 1.0),
        Gk::Random(2, 1.0),
        Gk::Random(3, 0.7),
        Gk::Random(4, 0.7),
        Gk::Random(5, 0.4),
        Gk::Random(6, 0.4),
    ];
    let mut jobs = Vec::new();
    for (i, k) in kinds.iter().enumerate() {
        for &y in &[100u64, 1000] {
            for &t_range in &[2.0f64, 10.0, 100.0] {
                jobs.push((i, k.clone(), y, t_range));
            }
        }
    }
    let ratios: Vec<f64> = jobs
        .into_par_iter()
        .map(|(_, kind, y, t_range)| {
            let g = match kind {
                Gk::Moebius => {
                    MultiplicativeFunction::make_builtin(Builtin::Moebius, &table, Some((y, x)))
                }
                Gk::Liouville => {
                    MultiplicativeFunction::make_builtin(Builtin::Liouville, &table, Some((y, x)))
                }
                Gk::Unit => {
                    MultiplicativeFunction::make_builtin(Builtin::Unit, &table, Some((y, x)))
                }
                Gk::Random(seed, density) => MultiplicativeFunction::make_builtin(
                    Builtin::UnimodularRandom { seed, density },
                    &table,
                    Some((y, x)),
                ),
            }
            .expect("function");
            halasz_bound(&g, y, x, t_range, &table)
                .expect("halasz")
                .ratio
        })
        .collect();
    let count = ratios.len();
    let max_ratio = ratios.iter().fold(0.0f64, |m, &r| m.max(r));
    let mut ok = count >= 50 && max_ratio <= 10.0;

    // planted-twist recovery: g(p) = p^{-i t0} has m(t) minimized at t0
    let t0 = 0.7;
    let planted = MultiplicativeFunction::from_prime_fn(
        "planted",
        &table,
        Some((100, x)),
        PowerMode::CompletelyMultiplicative,
        |p| {
            let ang = -t0 * (p as f64).ln();
            Complex64::new(ang.cos(), ang.sin())
        },
    )
    .expect("planted");
    let (t_star, m) = minimize_over_t(
        &Objective::HalaszM {
            g: &planted,
            y: 100,
            x,
        },
        2.0,
        &table,
    )
    .expect("minimize");
    if (t_star - t0).abs() > 1e-4 || m.abs() > 1e-6 {
        ok = false;
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        12,
        "Halász ratio matrix and planted-twist recovery",
        start,
        ok && elapsed < 180.0,
        format!(
            "{count} instances, max actual/bound {max_ratio:.3}, recovered t* = {t_star:.6} (target {t0})"
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 13: suite runtime budgets
// ---------------------------------------------------------------------

pub fn criterion_13_budgets(quick_seconds: f64, full_seconds: Option<f64>) -> CriterionOutcome {
    let start = Instant::now();
    let quick_ok = quick_seconds < 120.0;
    let full_ok = full_seconds.map(|s| s < 1800.0).unwrap_or(true);
    outcome(
        13,
        "suite runtime budgets",
        start,
        quick_ok && full_ok,
        format!(
            "quick suite {quick_seconds:.1}s (< 120s), full suite {}",
            match full_seconds {
                Some(s) => format!("{s:.1}s (< 1800s)"),
                None => "not timed in this run".to_string(),
            }
        ),
    )
}

/// Criteria 1-3, 6, 7 — the quick suite, plus its budget check.
pub fn run_quick() -> Vec<CriterionOutcome> {
    let start = Instant::now();
    let mut out = vec![
        criterion_01_fejer(),
        criterion_02_characters(),
        criterion_03_decomposition(),
        criterion_06_extremal(),
        criterion_07_combination(),
    ];
    out.push(criterion_13_budgets(start.elapsed().as_secs_f64(), None));
    out
}

/// The full acceptance suite, criteria 1-13.
pub fn run_full() -> Vec<CriterionOutcome> {
    let start = Instant::now();
    let quick_start = Instant::now();
    let c1 = criterion_01_fejer();
    let c2 = criterion_02_characters();
    let c3 = criterion_03_decomposition();
    let c6 = criterion_06_extremal();
    let c7 = criterion_07_combination();
    let quick_seconds = quick_start.elapsed().as_secs_f64();
    let c4 = criterion_04_chain();
    let c5 = criterion_05_dichotomy();
    let c8 = criterion_08_taxonomy_structure();
    let c9 = criterion_09_envelope_stability();
    let c10 = criterion_10_large_sieve();
    let c11 = criterion_11_smooth();
    let c12 = criterion_12_halasz();
    let full_seconds = start.elapsed().as_secs_f64();
    let c13 = criterion_13_budgets(quick_seconds, Some(full_seconds));
    let mut out = vec![c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13];
    out.sort_by_key(|c| c.id);
    out
}
