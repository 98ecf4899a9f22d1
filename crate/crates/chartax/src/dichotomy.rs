//! The Fejér-kernel machinery behind the support-mass / character-order
//! dichotomy, with every intermediate inequality of the argument exposed
//! as a checkable diagnostic, plus the sharp power-residue extremal
//! construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{CharacterSpec, DirichletCharacter, GroupStructure};
use crate::distance::char_delta;
use crate::error::{Error, Result};
use crate::multiplicative::SupportSet;
use crate::numeric::{frac, PairwiseAcc};
use crate::primes::PrimeTable;

/// Below this, a computed delta* is treated as exactly zero (infinite
/// horn-2 threshold, no kernel chain).
pub const DELTA_STAR_FLOOR: f64 = 1e-12;

/// Kernel sizes above this skip the per-m chain diagnostics; within the
/// hypothesis range `delta >= 8 D^{-3B}` the kernel size stays far below it.
pub const CHAIN_N_CAP: u64 = 1024;

/// Fejér kernel `(1/N)(sin pi N theta / sin pi theta)^2`.
///
/// Away from integers the closed form is used; inside `1e-6` of an integer
/// the exponential-sum form `sum (1 - |m|/N) e^{2 pi i m theta}` avoids the
/// sine cancellation.
pub fn fejer(n: u64, theta: f64) -> f64 {
    assert!(n >= 1, "fejer kernel needs N >= 1");
    if n == 1 {
        return 1.0;
    }
    let th = frac(theta);
    let dist = th.min(1.0 - th);
    if dist < 1e-6 {
        let mut s = 1.0;
        let nf = n as f64;
        for m in 1..n {
            let w = 1.0 - m as f64 / nf;
            s += 2.0 * w * (2.0 * std::f64::consts::PI * m as f64 * th).cos();
        }
        s
    } else {
        let num = (std::f64::consts::PI * n as f64 * th).sin();
        let den = (std::f64::consts::PI * th).sin();
        num * num / (n as f64 * den * den)
    }
}

/// Distance of `theta` to the nearest integer, in `[0, 1/2]`.
pub fn nearest_integer_distance(theta: f64) -> f64 {
    let f = frac(theta);
    f.min(1.0 - f)
}

/// The angles `gamma_p` with `2 pi gamma_p = arg chi(p) + t log p`, reduced
/// to `[0, 1)`, for every prime in the support.
pub fn gamma_angles(
    support: &SupportSet,
    chi: &DirichletCharacter,
    t: f64,
    table: &PrimeTable,
) -> Result<Vec<(u64, f64)>> {
    let phases = chi.phase_table();
    let m = chi.phase_denominator() as f64;
    let modulus = chi.modulus();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(support.len());
    for i in support.iter_indices() {
        let p = u64::from(table.primes()[i]);
        let k = phases[(p % modulus) as usize];
        if k == u32::MAX {
            return Err(Error::invalid(format!(
                "support prime {p} divides the modulus {modulus}"
            )));
        }
        let gamma = frac(f64::from(k) / m + t * table.ln_primes()[i] / two_pi);
        out.push((p, gamma));
    }
    Ok(out)
}

/// The per-step inequalities of the kernel argument, evaluated on one
/// instance. All bounds here are unconditional, holding whether or not
/// the instance is inside the hypothesis range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    /// Kernel size `N = floor(2 delta*^{-1/3})`.
    pub n_kernel: u64,
    /// `sum_{p in S, 2N||gamma_p|| <= 1} 1/p`.
    pub small_gamma_mass: f64,
    /// `sum_{p in S, 2N||gamma_p|| > 1} 1/p`.
    pub large_gamma_mass: f64,
    /// `sum_{D < p <= x} fejer(N, gamma_p) / p`.
    pub fejer_weighted_total: f64,
    /// Same total through the exponential-sum expansion.
    pub expansion_total: f64,
    /// `Re sum_{D < p <= x} (chi(p) p^{it})^m / p` for `m = 1..N-1`.
    pub char_sums_re: Vec<f64>,
    pub max_abs_char_sum: f64,
    /// `(N^2 delta*/4 + pi^2/(4N)) L`.
    pub assembled_bound: f64,
    /// `support_mass - assembled_bound`; the argument bounds this by the
    /// kernel-weighted character sums alone.
    pub assembled_slack: f64,
    /// `(pi^2/(2N)) sum_m (1 - m/N) max(Re S_m, 0)` — what the character
    /// sums actually contribute to the assembled bound.
    pub bookkeeping_bound: f64,
    pub small_gamma_ok: bool,
    pub expansion_ok: bool,
    pub large_gamma_ok: bool,
    pub assembled_ok: bool,
}

/// Order-r refinement data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderBoundPart {
    pub r: u64,
    /// `r^3 delta* <= 1`.
    pub hypothesis_r3_delta_ok: bool,
    pub order_at_least_r: bool,
    /// `(1 + (r^3 delta*)^{1/2}) L / r`.
    pub bound: f64,
    /// `support_mass - bound` (the empirical constant).
    pub slack: f64,
    /// Kernel lower bound `fejer(r, gamma) >= r (1 - (pi r ||gamma||)^2 / 6)`
    /// verified for every support angle with `2 r ||gamma|| <= 1`.
    pub kernel_lower_ok: bool,
    pub kernel_worst_margin: f64,
}

/// Everything recorded for one dichotomy instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub modulus: u64,
    pub x: u64,
    pub b_param: f64,
    pub chi: CharacterSpec,
    pub t: f64,
    pub support_size: usize,
    pub support_window: Option<(u64, u64)>,
    pub support_mass: f64,
    pub l_value: f64,
    /// `None` when the prime window is empty.
    pub delta_star: Option<f64>,
    /// Kernel size `N = floor(2 delta*^{-1/3})`; `None` at delta* = 0.
    pub n_kernel: Option<u64>,
    pub order: u64,
    /// `support_mass - 4 delta*^{1/3} L`; the first horn holds when this
    /// stays below the (empirical) constant.
    pub horn1_slack: f64,
    /// `2 delta*^{-1/3}`; `None` is the infinite sentinel at delta* = 0.
    pub horn2_threshold: Option<f64>,
    pub horn2_holds: bool,
    /// `8 D^{-3B} <= delta* <= 1` and `|t| <= D^B` and a nonempty window.
    pub in_hypothesis: bool,
    /// `N |t| <= D^{2B}`, checked whenever `delta* >= 8 D^{-3B}`.
    pub side_condition_nt: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_bound: Option<OrderBoundPart>,
}

fn kernel_size(delta_star: f64) -> u64 {
    (2.0 * delta_star.powf(-1.0 / 3.0)).floor() as u64
}

struct InstanceSums {
    small_gamma_mass: f64,
    large_gamma_mass: f64,
    fejer_weighted_total: f64,
    char_sums_re: Vec<f64>,
}

/// One pass over the window `(d, x]` collecting every gamma-dependent sum
/// the chain needs. Powers `(chi(p) p^{it})^m` advance by repeated
/// multiplication of the unit rotor, renormalized every 64 steps.
fn instance_sums(
    support: &SupportSet,
    chi: &DirichletCharacter,
    t: f64,
    table: &PrimeTable,
    d: u64,
    x: u64,
    n: u64,
) -> InstanceSums {
    let phases = chi.phase_table();
    let m_denom = chi.phase_denominator() as f64;
    let modulus = chi.modulus();
    let two_pi = 2.0 * std::f64::consts::PI;
    let nf = n as f64;

    let mut small_mass = PairwiseAcc::new();
    let mut large_mass = PairwiseAcc::new();
    let mut fejer_total = PairwiseAcc::new();
    let mut char_sums = vec![0.0f64; n as usize];

    const CHUNK: usize = 4096;
    let mut chunk_sums = vec![0.0f64; n as usize];
    let range = table.prime_index_range(d, x);
    let primes = table.primes();
    let lnp = table.ln_primes();
    let mut idx = range.start;
    while idx < range.end {
        let end = (idx + CHUNK).min(range.end);
        for v in chunk_sums.iter_mut() {
            *v = 0.0;
        }
        for i in idx..end {
            let p = u64::from(primes[i]);
            let k = phases[(p % modulus) as usize];
            if k == u32::MAX {
                continue;
            }
            let inv_p = 1.0 / p as f64;
            let gamma = frac(f64::from(k) / m_denom + t * lnp[i] / two_pi);
            fejer_total.push(fejer(n, gamma) * inv_p);
            if support.contains_index(i) {
                let dist = gamma.min(1.0 - gamma);
                if 2.0 * nf * dist <= 1.0 {
                    small_mass.push(inv_p);
                } else {
                    large_mass.push(inv_p);
                }
            }
            if n >= 2 {
                let ang = two_pi * gamma;
                let rot = Complex64::new(ang.cos(), ang.sin());
                let mut z = rot;
                for (m, slot) in chunk_sums.iter_mut().enumerate().skip(1) {
                    *slot += z.re * inv_p;
                    z *= rot;
                    if m % 64 == 63 {
                        let norm = z.norm();
                        if norm > 0.0 {
                            z /= norm;
                        }
                    }
                }
            }
        }
        for (acc, c) in char_sums.iter_mut().zip(&chunk_sums) {
            *acc += c;
        }
        idx = end;
    }

    InstanceSums {
        small_gamma_mass: small_mass.total(),
        large_gamma_mass: large_mass.total(),
        fejer_weighted_total: fejer_total.total(),
        char_sums_re: if n >= 2 {
            char_sums[1..].to_vec()
        } else {
            Vec::new()
        },
    }
}

/// Full dichotomy check: distance, horns, and the three chain inequalities
/// of the kernel argument. Out-of-hypothesis inputs yield a flagged
/// verdict, never an error.
pub fn theorem1_check(
    support: &SupportSet,
    chi: &DirichletCharacter,
    t: f64,
    b_param: f64,
    table: &PrimeTable,
    d: u64,
    x: u64,
) -> Result<DichotomyVerdict> {
    let profile = char_delta(support, chi, t, table, d, x)?;
    let l_value = profile.l_value;
    let support_mass = support.mass(table);
    let order = chi.order();
    let df = d as f64;
    let t_in_range = t.abs() <= df.powf(b_param);

    let mut verdict = DichotomyVerdict {
        modulus: chi.modulus(),
        x,
        b_param,
        chi: chi.spec(),
        t,
        support_size: support.len(),
        support_window: support.window(),
        support_mass,
        l_value,
        delta_star: profile.delta_star,
        n_kernel: None,
        order,
        horn1_slack: support_mass,
        horn2_threshold: None,
        horn2_holds: true,
        in_hypothesis: false,
        side_condition_nt: None,
        chain: None,
        order_bound: None,
    };

    let delta = match profile.delta_star {
        None => return Ok(verdict), // empty window: left out-of-hypothesis
        Some(ds) => ds,
    };

    if delta <= DELTA_STAR_FLOOR {
        // horn 2 vacuous: threshold infinite, any order qualifies
        return Ok(verdict);
    }

    let threshold = 2.0 * delta.powf(-1.0 / 3.0);
    verdict.horn1_slack = support_mass - 4.0 * delta.cbrt() * l_value;
    verdict.horn2_threshold = Some(threshold);
    verdict.horn2_holds = (order as f64) < threshold;
    verdict.in_hypothesis = delta >= 8.0 * df.powf(-3.0 * b_param) && delta <= 1.0 && t_in_range;

    let n = kernel_size(delta);
    verdict.n_kernel = Some(n);
    if delta >= 8.0 * df.powf(-3.0 * b_param) {
        let lhs = n as f64 * t.abs();
        verdict.side_condition_nt = Some(lhs <= df.powf(2.0 * b_param) * (1.0 + 1e-9));
    }

    if (1..=CHAIN_N_CAP).contains(&n) {
        let sums = instance_sums(support, chi, t, table, d, x, n);
        let nf = n as f64;
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;

        let mut expansion = l_value;
        let mut bookkeeping = 0.0;
        let mut max_abs = 0.0f64;
        for (m, &s) in sums.char_sums_re.iter().enumerate() {
            let w = 1.0 - (m + 1) as f64 / nf;
            expansion += 2.0 * w * s;
            bookkeeping += pi2 / (2.0 * nf) * w * s.max(0.0);
            max_abs = max_abs.max(s.abs());
        }

        let small_ok = 4.0 * nf / pi2 * sums.small_gamma_mass <= sums.fejer_weighted_total + 1e-9;
        let expansion_ok = (sums.fejer_weighted_total - expansion).abs() <= 1e-8;
        let large_ok = if sums.large_gamma_mass == 0.0 {
            true
        } else {
            sums.large_gamma_mass < nf * nf / 4.0 * profile.raw + 1e-12
        };
        let assembled_bound = (nf * nf * delta / 4.0 + pi2 / (4.0 * nf)) * l_value;
        let assembled_slack = support_mass - assembled_bound;
        let assembled_ok = assembled_slack <= bookkeeping + 1e-6;

        verdict.chain = Some(ChainDiagnostics {
            n_kernel: n,
            small_gamma_mass: sums.small_gamma_mass,
            large_gamma_mass: sums.large_gamma_mass,
            fejer_weighted_total: sums.fejer_weighted_total,
            expansion_total: expansion,
            char_sums_re: sums.char_sums_re,
            max_abs_char_sum: max_abs,
            assembled_bound,
            assembled_slack,
            bookkeeping_bound: bookkeeping,
            small_gamma_ok: small_ok,
            expansion_ok,
            large_gamma_ok: large_ok,
            assembled_ok,
        });
    }

    Ok(verdict)
}

/// Order-r variant: `sum_{p in S} 1/p <= (1 + (r^3 delta)^{1/2}) L / r + c`,
/// plus the pointwise kernel lower bound it rests on.
#[allow(clippy::too_many_arguments)]
pub fn theorem2_check(
    support: &SupportSet,
    chi: &DirichletCharacter,
    t: f64,
    r: u64,
    b_param: f64,
    table: &PrimeTable,
    d: u64,
    x: u64,
) -> Result<DichotomyVerdict> {
    if r < 1 {
        return Err(Error::invalid("order bound r must be >= 1"));
    }
    let mut verdict = theorem1_check(support, chi, t, b_param, table, d, x)?;
    let delta = verdict.delta_star.unwrap_or(0.0).max(0.0);
    let l_value = verdict.l_value;
    let rf = r as f64;
    let r3d = rf * rf * rf * delta;
    let bound = (1.0 + r3d.sqrt()) * l_value / rf;

    let mut kernel_ok = true;
    let mut worst = f64::INFINITY;
    for (_, gamma) in gamma_angles(support, chi, t, table)? {
        let dist = gamma.min(1.0 - gamma);
        if 2.0 * rf * dist <= 1.0 {
            let lower = rf * (1.0 - (std::f64::consts::PI * rf * dist).powi(2) / 6.0);
            let margin = fejer(r, gamma) - lower;
            worst = worst.min(margin);
            if margin < -1e-12 {
                kernel_ok = false;
            }
        }
    }
    if worst == f64::INFINITY {
        worst = 0.0;
    }

    verdict.order_bound = Some(OrderBoundPart {
        r,
        hypothesis_r3_delta_ok: r3d <= 1.0,
        order_at_least_r: verdict.order >= r,
        bound,
        slack: verdict.support_mass - bound,
        kernel_lower_ok: kernel_ok,
        kernel_worst_margin: worst,
    });
    verdict.in_hypothesis = verdict.in_hypothesis && r3d <= 1.0 && verdict.order >= r;
    Ok(verdict)
}

/// The sharp example: `S` = primes in `(d, x]` that are r-th power
/// residues mod a prime `d ≡ 1 (mod r)`, together with every character of
/// order exactly `r`. Each such character is identically 1 on `S`.
pub fn extremal_example(
    d: u64,
    r: u64,
    x: u64,
    table: &PrimeTable,
) -> Result<(SupportSet, Vec<DirichletCharacter>)> {
    if r == 0 {
        return Err(Error::invalid("r must be >= 1"));
    }
    if !table.is_prime(d) {
        return Err(Error::invalid(format!(
            "extremal example requires a prime modulus, got {d}"
        )));
    }
    if !(d - 1).is_multiple_of(r) {
        return Err(Error::invalid(format!(
            "r = {r} must divide D - 1 = {}",
            d - 1
        )));
    }
    let mut is_rth_power = vec![false; d as usize];
    for a in 1..d {
        let mut acc = 1u64;
        for _ in 0..r {
            acc = acc * a % d;
        }
        is_rth_power[acc as usize] = true;
    }
    let support = SupportSet::from_predicate(table, d, x, |p| is_rth_power[(p % d) as usize])?;
    let group = GroupStructure::build(d)?;
    let chars = group
        .enumerate()
        .into_iter()
        .filter(|c| c.order() == r)
        .collect();
    Ok((support, chars))
}
