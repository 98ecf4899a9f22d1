//! The taxonomy of exceptional characters: support density, the order
//! bound `r` from `beta >= 1/r + eps`, exceptional-character location by
//! twist-minimized distance, the progression decomposition with its exact
//! orthogonality audit, and the error envelope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{CharacterSpec, DirichletCharacter, GroupStructure};
use crate::distance::{char_delta, default_grid_step, g_delta_on, g_delta_phase_sum};
use crate::error::{Error, Result};
use crate::multiplicative::{
    twisted_from_residues, FunctionSpec, MultiplicativeFunction, SupportSet,
};
use crate::numeric::{golden_section_min, PairwiseAcc};
use crate::primes::PrimeTable;

/// Default cap on the order bound search.
pub const DEFAULT_R_CAP: u64 = 12;

/// Which factor normalizes the error envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `1 / phi(D)`.
    Phi,
    /// `1 / D` (the modulus refinement).
    Modulus,
}

/// `beta = (sum_{p in S} 1/p) / L` over the window `(d, x]`.
pub fn support_density(support: &SupportSet, table: &PrimeTable, d: u64, x: u64) -> Result<f64> {
    let l = table.reciprocal_sum(d.max(2), x)?;
    if l <= 0.0 {
        return Err(Error::invalid(format!(
            "empty prime window ({d}, {x}]: L = 0"
        )));
    }
    Ok(support.restrict(table, d, x)?.mass(table) / l)
}

/// Least `r >= 2` with `beta >= 1/r + eps`, up to `r_cap`; `None` when no
/// admissible order bound exists.
pub fn select_order_bound(beta: f64, eps: f64, r_cap: u64) -> Result<Option<u64>> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(Error::invalid(format!(
            "eps must lie in (0, 1/4], got {eps}"
        )));
    }
    if !(-1e-9..=1.0 + 1e-9).contains(&beta) {
        return Err(Error::invalid(format!(
            "beta must lie in [0, 1], got {beta}"
        )));
    }
    Ok((2..=r_cap).find(|&r| beta >= 1.0 / r as f64 + eps))
}

/// `omega_r = (1/4) min(1/r^3, eps^2/r)` — the error-exponent gain.
pub fn omega_r(r: u64, eps: f64) -> f64 {
    let rf = r as f64;
    0.25 * (1.0 / (rf * rf * rf)).min(eps * eps / rf)
}

/// Scan row for one character.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharScanRow {
    pub chi: CharacterSpec,
    pub id: u64,
    pub order: u64,
    pub t_star: f64,
    pub distance: f64,
}

/// An exceptional character with its minimizing twist.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionalCharacter {
    pub chi: CharacterSpec,
    pub id: u64,
    pub order: u64,
    pub t_star: f64,
    pub distance: f64,
}

/// Full output of the exceptional-character scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionalScan {
    pub d: u64,
    pub x: u64,
    pub eps: f64,
    pub b_param: f64,
    /// The `delta` defining the threshold `delta L / 4`.
    pub delta: f64,
    pub threshold: f64,
    pub beta: f64,
    pub r: Option<u64>,
    pub l_value: f64,
    /// Non-principal characters below the threshold, sorted by
    /// (distance, id).
    pub exceptional: Vec<ExceptionalCharacter>,
    /// The global minimizer among non-principal characters.
    pub chi1: Option<ExceptionalCharacter>,
    /// Every character's minimized distance (principal included).
    pub per_character: Vec<CharScanRow>,
    /// Every exceptional chi is chi1 * psi with order(psi) < r.
    pub structural_ok: bool,
    pub structural_violations: Vec<(u64, u64)>,
}

/// Locate exceptional characters for `g` mod `d`: minimize the g-distance
/// of every character over `|t| <= d^B` and keep the non-principal ones
/// below `delta L / 4` (default `delta = eps^2 / 2`).
pub fn find_exceptional(
    g: &MultiplicativeFunction,
    d: u64,
    x: u64,
    eps: f64,
    b_param: f64,
    delta_override: Option<f64>,
    table: &PrimeTable,
) -> Result<ExceptionalScan> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(Error::invalid(format!(
            "eps must lie in (0, 1/4], got {eps}"
        )));
    }
    let l_value = table.reciprocal_sum(d.max(2), x)?;
    if l_value <= 0.0 {
        return Err(Error::invalid(format!("empty prime window ({d}, {x}]")));
    }
    let support = g.support().restrict(table, d, x)?;
    let beta = support.mass(table) / l_value;
    let r = select_order_bound(beta.min(1.0), eps, DEFAULT_R_CAP)?;
    let delta = delta_override.unwrap_or(0.5 * eps * eps);
    let threshold = 0.25 * delta * l_value;

    let group = GroupStructure::build(d)?;
    let chars = group.enumerate();
    let t_max = (d as f64).powf(b_param);
    let step = default_grid_step(x);
    let n_grid = (2.0 * t_max / step).floor() as usize + 1;

    // residue-binned scan: A_b(t_j) = sum_{p in S, p ≡ b} (g(p)/p) e^{-i t_j log p}
    // shared by every character, plus the chi-independent constant.
    let dm = d as usize;
    let mut bins = vec![Complex64::new(0.0, 0.0); dm * n_grid];
    let mut bins_zero = vec![Complex64::new(0.0, 0.0); dm];
    let mut constant = PairwiseAcc::new();
    {
        const CHUNK: usize = 4096;
        let primes = table.primes();
        let lnp = table.ln_primes();
        let mut chunk: Vec<usize> = Vec::with_capacity(CHUNK);
        let mut iter = support.iter_indices().peekable();
        while iter.peek().is_some() {
            chunk.clear();
            for _ in 0..CHUNK {
                match iter.next() {
                    Some(i) => chunk.push(i),
                    None => break,
                }
            }
            for &i in &chunk {
                let p = u64::from(primes[i]);
                let b = (p % d) as usize;
                let gv = g.prime_value(i);
                let c = gv / p as f64;
                constant.push((1.0 + gv.norm_sqr()) / p as f64);
                bins_zero[b] += c;
                let ang0 = t_max * lnp[i]; // at t = -t_max: e^{+i t_max ln p}
                let mut z = c * Complex64::new(ang0.cos(), ang0.sin());
                let da = -step * lnp[i];
                let rot = Complex64::new(da.cos(), da.sin());
                let row = &mut bins[b * n_grid..(b + 1) * n_grid];
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot += z;
                    z *= rot;
                    if j % 256 == 255 {
                        let norm = z.norm();
                        if norm > 0.0 {
                            z = z / norm * c.norm();
                        }
                    }
                }
            }
        }
    }
    let constant = constant.total();

    let mut rows: Vec<CharScanRow> = Vec::with_capacity(chars.len());
    for chi in &chars {
        let phases = chi.phase_table();
        let m = chi.phase_denominator() as f64;
        // character values on residues
        let chi_vals: Vec<Complex64> = (0..dm)
            .map(|b| match phases[b] {
                u32::MAX => Complex64::new(0.0, 0.0),
                k => {
                    let th = 2.0 * std::f64::consts::PI * f64::from(k) / m;
                    Complex64::new(th.cos(), th.sin())
                }
            })
            .collect();
        let cross = |col: &dyn Fn(usize) -> Complex64| -> f64 {
            let mut s = Complex64::new(0.0, 0.0);
            for (b, &cv) in chi_vals.iter().enumerate() {
                if cv != Complex64::new(0.0, 0.0) {
                    s += cv * col(b);
                }
            }
            s.re
        };
        // grid argmin with deterministic tie-break, t = 0 as extra candidate
        let mut best_t = 0.0f64;
        let mut best_v = constant - 2.0 * cross(&|b| bins_zero[b]);
        for j in 0..n_grid {
            let tj = -t_max + step * j as f64;
            let v = constant - 2.0 * cross(&|b| bins[b * n_grid + j]);
            if v < best_v || (v == best_v && (tj.abs() < best_t.abs())) {
                best_t = tj;
                best_v = v;
            }
        }
        // golden-section refinement on the exact objective
        let ps = g_delta_phase_sum(&support, g, chi, d, x, table)?;
        let direct_best = ps.eval(best_t);
        let (tr, vr) = golden_section_min(
            |t| ps.eval(t),
            (best_t - step).max(-t_max),
            (best_t + step).min(t_max),
            1e-6,
        );
        let (t_star, distance) = if vr < direct_best {
            (tr, vr)
        } else {
            (best_t, direct_best)
        };
        rows.push(CharScanRow {
            chi: chi.spec(),
            id: chi.id(),
            order: chi.order(),
            t_star,
            distance,
        });
    }

    let mut exceptional: Vec<ExceptionalCharacter> = rows
        .iter()
        .filter(|row| row.id != 0 && row.distance <= threshold)
        .map(|row| ExceptionalCharacter {
            chi: row.chi.clone(),
            id: row.id,
            order: row.order,
            t_star: row.t_star,
            distance: row.distance,
        })
        .collect();
    exceptional.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap()
            .then(a.id.cmp(&b.id))
    });
    let chi1 = exceptional.first().cloned().or_else(|| {
        rows.iter()
            .filter(|row| row.id != 0)
            .min_by(|a, b| {
                a.distance
                    .partial_cmp(&b.distance)
                    .unwrap()
                    .then(a.id.cmp(&b.id))
            })
            .map(|row| ExceptionalCharacter {
                chi: row.chi.clone(),
                id: row.id,
                order: row.order,
                t_star: row.t_star,
                distance: row.distance,
            })
    });

    // structural closure: every exceptional chi should be chi1 * psi with
    // a low-order psi; violations are kept and flagged, never discarded.
    let mut violations = Vec::new();
    if let (Some(rr), Some(c1)) = (r, exceptional.first()) {
        let chi1_char = DirichletCharacter::from_spec(&group, &c1.chi)?;
        for e in &exceptional {
            let chi_e = DirichletCharacter::from_spec(&group, &e.chi)?;
            let psi = chi_e.product(&chi1_char.conjugate())?;
            if psi.order() >= rr {
                violations.push((c1.id, e.id));
            }
        }
    }

    Ok(ExceptionalScan {
        d,
        x,
        eps,
        b_param,
        delta,
        threshold,
        beta,
        r,
        l_value,
        exceptional,
        chi1,
        per_character: rows,
        structural_ok: violations.is_empty(),
        structural_violations: violations,
    })
}

/// One progression decomposition with its exact orthogonality audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub progression: Complex64,
    pub main_term: Complex64,
    /// One term per exceptional character, aligned with the input list.
    pub char_terms: Vec<Complex64>,
    pub residual: Complex64,
    /// `|residual - (1/phi) sum_{chi not exceptional, chi != chi0} ...|`.
    pub audit_error: f64,
    pub audit_ok: bool,
}

/// `sum_{n <= x, n ≡ a} g(n) = main + exceptional terms + residual`, with
/// the residual audited against the exact orthogonality identity.
pub fn decompose(
    g: &MultiplicativeFunction,
    d: u64,
    a: u64,
    x: u64,
    exceptional: &[DirichletCharacter],
    table: &PrimeTable,
) -> Result<Decomposition> {
    if d == 0 || crate::numeric::gcd(a, d) != 1 {
        return Err(Error::invalid(format!(
            "decompose requires gcd(a, D) = 1, got a={a}, D={d}"
        )));
    }
    let group = GroupStructure::build(d)?;
    for chi in exceptional {
        if chi.modulus() != d {
            return Err(Error::invalid(format!(
                "exceptional character is mod {}, decomposition is mod {d}",
                chi.modulus()
            )));
        }
    }
    let phi = group.phi() as f64;
    let residues = g.residue_sums(x, d, table)?;
    let progression = residues[(a % d) as usize];
    let main_term = twisted_from_residues(&residues, &group.principal()) / phi;
    let mut char_terms = Vec::with_capacity(exceptional.len());
    let mut total = main_term;
    for chi in exceptional {
        let term = chi.eval(a).conj() * twisted_from_residues(&residues, chi) / phi;
        char_terms.push(term);
        total += term;
    }
    let residual = progression - total;

    // audit: the residual must equal the sum over the remaining characters
    let exc_ids: std::collections::BTreeSet<u64> = exceptional.iter().map(|c| c.id()).collect();
    let mut rest = Complex64::new(0.0, 0.0);
    for chi in group.enumerate() {
        if chi.id() == 0 || exc_ids.contains(&chi.id()) {
            continue;
        }
        rest += chi.eval(a).conj() * twisted_from_residues(&residues, &chi) / phi;
    }
    let audit_error = (residual - rest).norm();
    Ok(Decomposition {
        progression,
        main_term,
        char_terms,
        residual,
        audit_error,
        audit_ok: audit_error <= 1e-9,
    })
}

/// Error-envelope values for one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub normalization: Normalization,
    pub omega: f64,
    /// `prod_{p in S, p <= x} (1 + 1/p)`.
    pub support_product: f64,
    /// General-case envelope
    /// `(1/norm)(x/log x) prod (1+1/p) (log D/log x)^{omega_r} log(log x/log D)`.
    pub primary: f64,
    /// Closed Case-1/2 form when `r` is 2 or 3, with exponent
    /// `1 - beta + eps^2/8` resp. `1 - beta + eps^2/12`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_exponent: Option<f64>,
}

/// Evaluate the error envelope for the window `2 <= D <= x^{3/4}`.
#[allow(clippy::too_many_arguments)]
pub fn error_envelope(
    beta: f64,
    r: u64,
    eps: f64,
    d: u64,
    x: u64,
    support: &SupportSet,
    normalization: Normalization,
    table: &PrimeTable,
) -> Result<EnvelopeReport> {
    let xf = x as f64;
    let df = d as f64;
    if d < 2 || df > xf.powf(0.75) {
        return Err(Error::invalid(format!(
            "envelope window requires 2 <= D <= x^(3/4), got D={d}, x={x}"
        )));
    }
    if r < 2 {
        return Err(Error::invalid("envelope requires r >= 2"));
    }
    let norm = match normalization {
        Normalization::Phi => table.euler_phi(d)? as f64,
        Normalization::Modulus => df,
    };
    let mut log_prod = PairwiseAcc::new();
    for i in support.iter_indices() {
        let p = u64::from(table.primes()[i]);
        if p <= x {
            log_prod.push((1.0 + 1.0 / p as f64).ln());
        }
    }
    let support_product = log_prod.total().exp();
    let omega = omega_r(r, eps);
    let log_ratio = df.ln() / xf.ln();
    let primary = (1.0 / norm)
        * (xf / xf.ln())
        * support_product
        * log_ratio.powf(omega)
        * (xf.ln() / df.ln()).ln();
    let (case_form, case_exponent) = match r {
        2 => {
            let e = 1.0 - beta + eps * eps / 8.0;
            (
                Some((1.0 / norm) * xf * log_ratio.powf(e) * (xf.ln() / df.ln()).ln() / df.ln()),
                Some(e),
            )
        }
        3 => {
            let e = 1.0 - beta + eps * eps / 12.0;
            (
                Some((1.0 / norm) * xf * log_ratio.powf(e) * (xf.ln() / df.ln()).ln() / df.ln()),
                Some(e),
            )
        }
        _ => (None, None),
    };
    Ok(EnvelopeReport {
        normalization,
        omega,
        support_product,
        primary,
        case_form,
        case_exponent,
    })
}

/// Outcome of the real-valued refinement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementOutcome {
    pub case_r: u64,
    pub adjusted: Vec<ExceptionalCharacter>,
    /// Case 1: the leading character was swapped for a real one.
    pub replaced_with_real: bool,
    /// Case 1: set when no real character meets the threshold.
    pub real_replacement_failed: bool,
    /// `char_delta(S, chi^2, -2t) <= 4 g_delta(g, chi, t)` per character.
    pub squared_checks_ok: bool,
    pub squared_margins: Vec<f64>,
}

/// For real-valued `g`: normalize the exceptional set per case (`r = 2`:
/// the leading character may be taken real; `r = 3`: it is dropped), and
/// verify the squared-character inequality behind that step.
pub fn real_g_refinement(
    g: &MultiplicativeFunction,
    scan: &ExceptionalScan,
    table: &PrimeTable,
) -> Result<RefinementOutcome> {
    if !g.is_real_valued() {
        return Err(Error::invalid("real_g_refinement requires a real-valued g"));
    }
    let r = scan.r.unwrap_or(2);
    let group = GroupStructure::build(scan.d)?;
    let support = g.support().restrict(table, scan.d, scan.x)?;

    let mut margins = Vec::new();
    let mut checks_ok = true;
    for e in &scan.exceptional {
        let chi = DirichletCharacter::from_spec(&group, &e.chi)?;
        let gd = g_delta_on(&support, g, &chi, e.t_star, table, scan.d, scan.x)?.raw;
        let sq = char_delta(
            &support,
            &chi.pow(2),
            -2.0 * e.t_star,
            table,
            scan.d,
            scan.x,
        )?
        .raw;
        let margin = 4.0 * gd - sq;
        margins.push(margin);
        if margin < -1e-9 {
            checks_ok = false;
        }
    }

    let mut adjusted = scan.exceptional.clone();
    let mut replaced = false;
    let mut failed = false;
    if !adjusted.is_empty() {
        if r <= 2 {
            // Case 1: at most one exceptional character, and it may be
            // assumed real when a real character meets the threshold.
            let leader = adjusted[0].clone();
            if leader.order > 2 {
                let best_real = scan
                    .per_character
                    .iter()
                    .filter(|row| row.id != 0 && row.order <= 2 && row.distance <= scan.threshold)
                    .min_by(|a, b| {
                        a.distance
                            .partial_cmp(&b.distance)
                            .unwrap()
                            .then(a.id.cmp(&b.id))
                    });
                match best_real {
                    Some(row) => {
                        adjusted = vec![ExceptionalCharacter {
                            chi: row.chi.clone(),
                            id: row.id,
                            order: row.order,
                            t_star: row.t_star,
                            distance: row.distance,
                        }];
                        replaced = true;
                    }
                    None => {
                        adjusted = vec![leader];
                        failed = true;
                    }
                }
            } else {
                adjusted = vec![leader];
            }
        } else {
            // Case 2: the leading character is deleted altogether.
            adjusted.remove(0);
        }
    }

    Ok(RefinementOutcome {
        case_r: r,
        adjusted,
        replaced_with_real: replaced,
        real_replacement_failed: failed,
        squared_checks_ok: checks_ok,
        squared_margins: margins,
    })
}

/// Parameters shared by a full taxonomy run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaxonomyParams {
    pub eps: f64,
    pub b_param: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub normalization: Normalization,
}

impl Default for TaxonomyParams {
    fn default() -> Self {
        TaxonomyParams {
            eps: 0.25,
            b_param: 1.0,
            delta: None,
            normalization: Normalization::Phi,
        }
    }
}

/// Everything about one `(g, D, x, eps, a)` instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaxonomyReport {
    pub g: FunctionSpec,
    pub d: u64,
    pub x: u64,
    pub a: u64,
    pub eps: f64,
    pub b_param: f64,
    pub beta: f64,
    pub r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub delta_threshold: f64,
    pub exceptional: Vec<ExceptionalCharacter>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi1: Option<ExceptionalCharacter>,
    pub structural_ok: bool,
    pub progression: Complex64,
    pub main_term: Complex64,
    pub char_terms: Vec<Complex64>,
    pub residual: Complex64,
    pub audit_error: f64,
    pub normalization: Normalization,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<f64>,
    /// `|residual| / envelope` — reported, never hard-asserted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_ratio: Option<f64>,
}

/// Full pipeline: scan, decompose, envelope.
pub fn taxonomy_report(
    g: &MultiplicativeFunction,
    d: u64,
    a: u64,
    x: u64,
    params: &TaxonomyParams,
    table: &PrimeTable,
) -> Result<TaxonomyReport> {
    let scan = find_exceptional(g, d, x, params.eps, params.b_param, params.delta, table)?;
    let group = GroupStructure::build(d)?;
    let exc_chars: Vec<DirichletCharacter> = scan
        .exceptional
        .iter()
        .map(|e| DirichletCharacter::from_spec(&group, &e.chi))
        .collect::<Result<_>>()?;
    let dec = decompose(g, d, a, x, &exc_chars, table)?;
    let support = g.support().restrict(table, d, x)?;
    let envelope = match scan.r {
        Some(r) => Some(
            error_envelope(
                scan.beta,
                r,
                params.eps,
                d,
                x,
                &support,
                params.normalization,
                table,
            )?
            .primary,
        ),
        None => None,
    };
    let residual_ratio = envelope.map(|e| dec.residual.norm() / e);
    Ok(TaxonomyReport {
        g: g.spec().clone(),
        d,
        x,
        a,
        eps: params.eps,
        b_param: params.b_param,
        beta: scan.beta,
        r: scan.r,
        omega: scan.r.map(|r| omega_r(r, params.eps)),
        delta_threshold: scan.delta,
        exceptional: scan.exceptional.clone(),
        chi1: scan.chi1.clone(),
        structural_ok: scan.structural_ok,
        progression: dec.progression,
        main_term: dec.main_term,
        char_terms: dec.char_terms,
        residual: dec.residual,
        audit_error: dec.audit_error,
        normalization: params.normalization,
        envelope,
        residual_ratio,
    })
}
