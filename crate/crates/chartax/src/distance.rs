//! Pretentious distance functionals between a unit-disc multiplicative
//! function (or the constant 1) and twisted characters, minimization over
//! the twist, and the Halász-type mean-value bound.
//!
//! Sign conventions, pinned by tests: `char_delta` uses `p^{+it}`,
//! `g_delta` uses `p^{-it}`, the weighted variants use `p^{+it}`, and the
//! Halász objective is `sum p^{-1} (1 - Re g(p) p^{+it})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{CharacterSpec, DirichletCharacter};
use crate::error::{Error, Result};
use crate::multiplicative::{MultiplicativeFunction, SupportSet};
use crate::numeric::{frac, golden_section_min, PairwiseAcc};
use crate::primes::PrimeTable;

/// Which weighting a profile was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    Unweighted,
    CharWeighted,
    SelfNormalized,
}

/// Result of one distance computation over a window `(D, x]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub chi: CharacterSpec,
    pub t: f64,
    /// The raw distance sum.
    pub raw: f64,
    /// `raw / L`; `None` is the sentinel for an empty prime window (L = 0).
    pub delta_star: Option<f64>,
    pub l_value: f64,
    pub window: (u64, u64),
    pub mode: WeightMode,
    /// `sum_{D < p <= x} |g(p)| / p` for the weighted variants.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted_mass: Option<f64>,
}

impl DistanceProfile {
    fn finish(
        chi: &DirichletCharacter,
        t: f64,
        raw: f64,
        l_value: f64,
        window: (u64, u64),
        mode: WeightMode,
        weighted_mass: Option<f64>,
    ) -> Self {
        let delta_star = if l_value > 0.0 {
            Some(raw / l_value)
        } else {
            None
        };
        DistanceProfile {
            chi: chi.spec(),
            t,
            raw,
            delta_star,
            l_value,
            window,
            mode,
            weighted_mass,
        }
    }
}

fn check_window(table: &PrimeTable, d: u64, x: u64) -> Result<()> {
    if d < 1 || d > x || x > table.limit() {
        return Err(Error::invalid(format!(
            "window requires 1 <= D <= x <= {}, got D={d}, x={x}",
            table.limit()
        )));
    }
    Ok(())
}

fn check_support_in(support: &SupportSet, table: &PrimeTable, d: u64, x: u64) -> Result<()> {
    if support.is_empty() {
        return Ok(());
    }
    if d >= x {
        return Err(Error::invalid(format!(
            "empty prime window ({d}, {x}] with nonempty support"
        )));
    }
    if let Some((wd, wx)) = support.window() {
        if wd >= d && wx <= x {
            return Ok(());
        }
    }
    for i in support.iter_indices() {
        let p = u64::from(table.primes()[i]);
        if p <= d || p > x {
            return Err(Error::invalid(format!(
                "support prime {p} outside window ({d}, {x}]"
            )));
        }
    }
    Ok(())
}

/// `sum_{p in S} |1 - chi(p) p^{it}|^2 / p` over the window `(d, x]`.
///
/// Computed through the angle form `|1 - e^{2 pi i gamma_p}| = 2 |sin pi gamma_p|`,
/// which keeps the sum exactly zero on sets where `chi(p) = 1` and `t = 0`.
pub fn char_delta(
    support: &SupportSet,
    chi: &DirichletCharacter,
    t: f64,
    table: &PrimeTable,
    d: u64,
    x: u64,
) -> Result<DistanceProfile> {
    check_window(table, d, x)?;
    check_support_in(support, table, d, x)?;
    let l_value = table.reciprocal_sum(d.max(2), x)?;
    let phases = chi.phase_table();
    let m = chi.phase_denominator() as f64;
    let modulus = chi.modulus();
    let primes = table.primes();
    let lnp = table.ln_primes();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut acc = PairwiseAcc::new();
    for i in support.iter_indices() {
        let p = u64::from(primes[i]);
        let k = phases[(p % modulus) as usize];
        if k == u32::MAX {
            return Err(Error::invalid(format!(
                "support prime {p} divides the modulus {modulus}"
            )));
        }
        let gamma = frac(f64::from(k) / m + t * lnp[i] / two_pi);
        let s = (std::f64::consts::PI * gamma).sin();
        acc.push(4.0 * s * s / p as f64);
    }
    Ok(DistanceProfile::finish(
        chi,
        t,
        acc.total(),
        l_value,
        (d, x),
        WeightMode::Unweighted,
        None,
    ))
}

/// `sum_{p in S} |1 - g(p) chi(p) p^{-it}|^2 / p` (the Case-1 sign),
/// over the whole support of `g`.
pub fn g_delta(
    g: &MultiplicativeFunction,
    chi: &DirichletCharacter,
    t: f64,
    table: &PrimeTable,
    d: u64,
    x: u64,
) -> Result<DistanceProfile> {
    g_delta_on(g.support(), g, chi, t, table, d, x)
}

/// As [`g_delta`] but over an explicit subset of the support (the taxonomy
/// restricts `g` to the window `(d, x]` before measuring distances).
#[allow(clippy::too_many_arguments)]
pub fn g_delta_on(
    support: &SupportSet,
    g: &MultiplicativeFunction,
    chi: &DirichletCharacter,
    t: f64,
    table: &PrimeTable,
    d: u64,
    x: u64,
) -> Result<DistanceProfile> {
    check_window(table, d, x)?;
    check_support_in(support, table, d, x)?;
    let l_value = table.reciprocal_sum(d.max(2), x)?;
    let phases = chi.phase_table();
    let m = chi.phase_denominator() as f64;
    let modulus = chi.modulus();
    let primes = table.primes();
    let lnp = table.ln_primes();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut acc = PairwiseAcc::new();
    let one = Complex64::new(1.0, 0.0);
    for i in support.iter_indices() {
        let p = u64::from(primes[i]);
        let k = phases[(p % modulus) as usize];
        let gv = g.prime_value(i);
        let z = if k == u32::MAX {
            Complex64::new(0.0, 0.0)
        } else {
            let ang = two_pi * f64::from(k) / m - t * lnp[i];
            gv * Complex64::new(ang.cos(), ang.sin())
        };
        acc.push((one - z).norm_sqr() / p as f64);
    }
    Ok(DistanceProfile::finish(
        chi,
        t,
        acc.total(),
        l_value,
        (d, x),
        WeightMode::Unweighted,
        None,
    ))
}

/// Weighted comparison distances. `CharWeighted` computes
/// `sum |g(p)| |1 - chi(p) p^{it}|^2 / p`; `SelfNormalized` computes
/// `sum_{g(p) != 0} |g(p)| |1 - |g(p)|^{-1} g(p) chi(p) p^{it}|^2 / p`.
/// Both also report the weighted support mass `sum |g(p)|/p`.
pub fn weighted_delta(
    g: &MultiplicativeFunction,
    chi: &DirichletCharacter,
    t: f64,
    table: &PrimeTable,
    d: u64,
    x: u64,
    mode: WeightMode,
) -> Result<DistanceProfile> {
    if mode == WeightMode::Unweighted {
        return g_delta(g, chi, t, table, d, x);
    }
    check_window(table, d, x)?;
    check_support_in(g.support(), table, d, x)?;
    let l_value = table.reciprocal_sum(d.max(2), x)?;
    let phases = chi.phase_table();
    let m = chi.phase_denominator() as f64;
    let modulus = chi.modulus();
    let primes = table.primes();
    let lnp = table.ln_primes();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut acc = PairwiseAcc::new();
    let mut mass = PairwiseAcc::new();
    let one = Complex64::new(1.0, 0.0);
    for i in g.support().iter_indices() {
        let p = u64::from(primes[i]);
        let k = phases[(p % modulus) as usize];
        if k == u32::MAX {
            return Err(Error::invalid(format!(
                "support prime {p} divides the modulus {modulus}"
            )));
        }
        let gv = g.prime_value(i);
        let gn = gv.norm();
        mass.push(gn / p as f64);
        if gn == 0.0 {
            continue;
        }
        let ang = two_pi * f64::from(k) / m + t * lnp[i];
        let twist = Complex64::new(ang.cos(), ang.sin());
        let term = match mode {
            WeightMode::CharWeighted => gn * (one - twist).norm_sqr(),
            WeightMode::SelfNormalized => gn * (one - (gv / gn) * twist).norm_sqr(),
            WeightMode::Unweighted => unreachable!(),
        };
        acc.push(term / p as f64);
    }
    Ok(DistanceProfile::finish(
        chi,
        t,
        acc.total(),
        l_value,
        (d, x),
        mode,
        Some(mass.total()),
    ))
}

/// A distance-style objective reduced to `constant + scale * Re sum c_p e^{i t w_p}`,
/// supporting fast uniform grid scans via per-prime incremental rotation.
pub struct PhaseSum {
    constant: f64,
    scale: f64,
    w: Vec<f64>,
    c: Vec<Complex64>,
}

impl PhaseSum {
    pub fn new(constant: f64, scale: f64, w: Vec<f64>, c: Vec<Complex64>) -> Self {
        assert_eq!(w.len(), c.len());
        PhaseSum {
            constant,
            scale,
            w,
            c,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = PairwiseAcc::new();
        for (wp, cp) in self.w.iter().zip(&self.c) {
            let ang = t * wp;
            acc.push(cp.re * ang.cos() - cp.im * ang.sin());
        }
        self.constant + self.scale * acc.total()
    }

    /// Values at `t0 + j*step` for `j in 0..n`, one rotation per prime per
    /// grid point. Rotors are renormalized periodically to shed drift; the
    /// argmin consumer re-evaluates winners directly.
    pub fn grid_scan(&self, t0: f64, step: f64, n: usize) -> Vec<f64> {
        let mut total = vec![0.0f64; n];
        const CHUNK: usize = 4096;
        let mut chunk_acc = vec![0.0f64; n];
        let mut idx = 0;
        while idx < self.w.len() {
            let end = (idx + CHUNK).min(self.w.len());
            for v in chunk_acc.iter_mut() {
                *v = 0.0;
            }
            for i in idx..end {
                let wp = self.w[i];
                let ang0 = t0 * wp;
                let mut z = self.c[i] * Complex64::new(ang0.cos(), ang0.sin());
                let da = step * wp;
                let rot = Complex64::new(da.cos(), da.sin());
                for (j, slot) in chunk_acc.iter_mut().enumerate() {
                    *slot += z.re;
                    z *= rot;
                    if j % 256 == 255 {
                        let norm = z.norm();
                        if norm > 0.0 {
                            z = z / norm * self.c[i].norm();
                        }
                    }
                }
            }
            for (tj, cj) in total.iter_mut().zip(&chunk_acc) {
                *tj += cj;
            }
            idx = end;
        }
        total
            .iter()
            .map(|&s| self.constant + self.scale * s)
            .collect()
    }

    /// Grid scan over `[-t_max, t_max]` with the given step, deterministic
    /// argmin (ties toward smaller `|t|`, then smaller `t`), then
    /// golden-section refinement of the winning bracket down to `refine_tol`.
    /// `t = 0` is always a candidate.
    pub fn minimize(&self, t_max: f64, step: f64, refine_tol: f64) -> (f64, f64) {
        let n = (2.0 * t_max / step).floor() as usize + 1;
        let grid = self.grid_scan(-t_max, step, n);
        let mut best_j = 0usize;
        for j in 1..n {
            let tj = -t_max + step * j as f64;
            let tb = -t_max + step * best_j as f64;
            if grid[j] < grid[best_j]
                || (grid[j] == grid[best_j]
                    && (tj.abs() < tb.abs() || (tj.abs() == tb.abs() && tj < tb)))
            {
                best_j = j;
            }
        }
        let t_grid = -t_max + step * best_j as f64;
        let lo = (t_grid - step).max(-t_max);
        let hi = (t_grid + step).min(t_max);
        let (t_ref, v_ref) = golden_section_min(|t| self.eval(t), lo, hi, refine_tol);
        // deterministic candidate set; exact grid winner and t = 0 included
        let mut best = (t_grid, self.eval(t_grid));
        for cand in [(t_ref, v_ref), (0.0, self.eval(0.0))] {
            if cand.1 < best.1 || (cand.1 == best.1 && cand.0.abs() < best.0.abs()) {
                best = cand;
            }
        }
        best
    }
}

/// Grid step `0.5 / log x`: the phase `t log p` then moves by at most 0.5
/// per step over the whole window.
pub fn default_grid_step(x: u64) -> f64 {
    0.5 / (x as f64).ln()
}

/// Objectives accepted by [`minimize_over_t`].
pub enum Objective<'a> {
    CharDelta {
        support: &'a SupportSet,
        chi: &'a DirichletCharacter,
        d: u64,
        x: u64,
    },
    GDelta {
        g: &'a MultiplicativeFunction,
        chi: &'a DirichletCharacter,
        d: u64,
        x: u64,
    },
    HalaszM {
        g: &'a MultiplicativeFunction,
        y: u64,
        x: u64,
    },
}

/// Build the `PhaseSum` form of an objective.
pub fn phase_sum_for(obj: &Objective<'_>, table: &PrimeTable) -> Result<PhaseSum> {
    let primes = table.primes();
    let lnp = table.ln_primes();
    match obj {
        Objective::CharDelta { support, chi, d, x } => {
            check_window(table, *d, *x)?;
            check_support_in(support, table, *d, *x)?;
            let phases = chi.phase_table();
            let m = chi.phase_denominator() as f64;
            let modulus = chi.modulus();
            let mut w = Vec::with_capacity(support.len());
            let mut c = Vec::with_capacity(support.len());
            let mut constant = PairwiseAcc::new();
            for i in support.iter_indices() {
                let p = u64::from(primes[i]);
                let k = phases[(p % modulus) as usize];
                if k == u32::MAX {
                    return Err(Error::invalid(format!(
                        "support prime {p} divides the modulus {modulus}"
                    )));
                }
                let th = 2.0 * std::f64::consts::PI * f64::from(k) / m;
                constant.push(2.0 / p as f64);
                w.push(lnp[i]);
                c.push(Complex64::new(th.cos(), th.sin()) / p as f64);
            }
            Ok(PhaseSum::new(constant.total(), -2.0, w, c))
        }
        Objective::GDelta { g, chi, d, x } => g_delta_phase_sum(g.support(), g, chi, *d, *x, table),
        Objective::HalaszM { g, y, x } => {
            if *y < 2 || y > x || *x > table.limit() {
                return Err(Error::invalid(format!(
                    "halasz window requires 2 <= Y <= x <= {}, got Y={y}, x={x}",
                    table.limit()
                )));
            }
            let mut w = Vec::new();
            let mut c = Vec::new();
            let mut constant = PairwiseAcc::new();
            for i in table.prime_index_range(*y, *x) {
                let p = u64::from(primes[i]);
                constant.push(1.0 / p as f64);
                let gv = g.prime_value(i);
                if gv != Complex64::new(0.0, 0.0) {
                    w.push(lnp[i]);
                    c.push(gv / p as f64);
                }
            }
            Ok(PhaseSum::new(constant.total(), -1.0, w, c))
        }
    }
}

/// `PhaseSum` form of the g-distance over an explicit support subset.
pub fn g_delta_phase_sum(
    support: &SupportSet,
    g: &MultiplicativeFunction,
    chi: &DirichletCharacter,
    d: u64,
    x: u64,
    table: &PrimeTable,
) -> Result<PhaseSum> {
    check_window(table, d, x)?;
    check_support_in(support, table, d, x)?;
    let primes = table.primes();
    let lnp = table.ln_primes();
    let phases = chi.phase_table();
    let m = chi.phase_denominator() as f64;
    let modulus = chi.modulus();
    let mut w = Vec::with_capacity(support.len());
    let mut c = Vec::with_capacity(support.len());
    let mut constant = PairwiseAcc::new();
    for i in support.iter_indices() {
        let p = u64::from(primes[i]);
        let k = phases[(p % modulus) as usize];
        let gv = g.prime_value(i);
        let z = if k == u32::MAX {
            Complex64::new(0.0, 0.0)
        } else {
            let th = 2.0 * std::f64::consts::PI * f64::from(k) / m;
            gv * Complex64::new(th.cos(), th.sin())
        };
        constant.push((1.0 + z.norm_sqr()) / p as f64);
        w.push(-lnp[i]);
        c.push(z / p as f64);
    }
    Ok(PhaseSum::new(constant.total(), -2.0, w, c))
}

/// Minimize an objective over `|t| <= t_max`: grid scan at step
/// `0.5 / log x` plus golden-section refinement to `1e-6`.
pub fn minimize_over_t(obj: &Objective<'_>, t_max: f64, table: &PrimeTable) -> Result<(f64, f64)> {
    if let Objective::HalaszM { .. } = obj {
        if t_max < 2.0 {
            return Err(Error::invalid(format!(
                "the Halász objective requires T >= 2, got {t_max}"
            )));
        }
    }
    if t_max <= 0.0 {
        return Err(Error::invalid(format!(
            "t range must be positive, got {t_max}"
        )));
    }
    let x = match obj {
        Objective::CharDelta { x, .. } | Objective::GDelta { g: _, x, .. } => *x,
        Objective::HalaszM { x, .. } => *x,
    };
    let ps = phase_sum_for(obj, table)?;
    Ok(ps.minimize(t_max, default_grid_step(x), 1e-6))
}

/// Output of [`halasz_bound`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalaszReport {
    pub y: u64,
    pub x: u64,
    pub t_range: f64,
    pub m: f64,
    pub t_star: f64,
    /// `(m + 1) e^{-m} + T^{-1/2}`.
    pub bound: f64,
    /// `x^{-1} log Y |sum_{n <= x} g(n)|`.
    pub actual: f64,
    /// `actual / bound` — the empirical implied constant.
    pub ratio: f64,
}

/// Evaluate both sides of the Halász-type bound for a function supported
/// on primes in `(y, x]`.
pub fn halasz_bound(
    g: &MultiplicativeFunction,
    y: u64,
    x: u64,
    t_range: f64,
    table: &PrimeTable,
) -> Result<HalaszReport> {
    if y < 2 || y > x || x > table.limit() {
        return Err(Error::invalid(format!(
            "halasz_bound requires 2 <= Y <= x <= {}, got Y={y}, x={x}",
            table.limit()
        )));
    }
    if t_range < 2.0 {
        return Err(Error::invalid(format!(
            "halasz_bound requires T >= 2, got {t_range}"
        )));
    }
    // the lemma's hypothesis: g vanishes on primes outside (Y, x]
    for i in g.support().iter_indices() {
        let p = u64::from(table.primes()[i]);
        if p <= y || p > x {
            return Err(Error::invalid(format!(
                "halasz_bound requires support within ({y}, {x}], found prime {p}"
            )));
        }
    }
    let (t_star, m) = minimize_over_t(&Objective::HalaszM { g, y, x }, t_range, table)?;
    let bound = (m + 1.0) * (-m).exp() + t_range.powf(-0.5);
    let total = g.progression_sum(x, 1, 0, table)?.norm();
    let actual = (y as f64).ln() * total / x as f64;
    Ok(HalaszReport {
        y,
        x,
        t_range,
        m,
        t_star,
        bound,
        actual,
        ratio: actual / bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::GroupStructure;
    use crate::multiplicative::{Builtin, PowerMode};

    fn table() -> PrimeTable {
        PrimeTable::build(100_000).unwrap()
    }

    #[test]
    fn principal_distance_is_exactly_zero() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let chi0 = g5.principal();
        let s = SupportSet::from_predicate(&t, 5, 10_000, |p| p % 5 != 0).unwrap();
        let prof = char_delta(&s, &chi0, 0.0, &t, 5, 10_000).unwrap();
        assert_eq!(prof.raw, 0.0);
        assert_eq!(prof.delta_star, Some(0.0));
    }

    #[test]
    fn cubic_residue_support_has_zero_distance() {
        let t = table();
        let g7 = GroupStructure::build(7).unwrap();
        // order-3 character: exponent 2 on the order-6 component
        let chi = g7.character(&[2]).unwrap();
        assert_eq!(chi.order(), 3);
        // cubes mod 7 are {1, 6}
        let mut cubes = std::collections::BTreeSet::new();
        for r in 1..7u64 {
            cubes.insert(r * r % 7 * r % 7);
        }
        assert_eq!(cubes.into_iter().collect::<Vec<_>>(), vec![1, 6]);
        let s = SupportSet::from_predicate(&t, 7, 100_000, |p| p % 7 == 1 || p % 7 == 6).unwrap();
        assert!(!s.is_empty());
        let prof = char_delta(&s, &chi, 0.0, &t, 7, 100_000).unwrap();
        assert_eq!(prof.raw, 0.0);
    }

    #[test]
    fn char_delta_matches_naive_loop() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let quad = g5.character(&[2]).unwrap();
        let s = SupportSet::full_window(&t, 10, 100).unwrap();
        for &tt in &[0.0, 0.37, -1.2] {
            let prof = char_delta(&s, &quad, tt, &t, 10, 100).unwrap();
            let mut naive = 0.0;
            for i in t.prime_index_range(10, 100) {
                let p = u64::from(t.primes()[i]);
                let z = quad.eval(p) * Complex64::new(0.0, tt * (p as f64).ln()).exp();
                naive += (Complex64::new(1.0, 0.0) - z).norm_sqr() / p as f64;
            }
            assert!((prof.raw - naive).abs() < 1e-10, "t={tt}");
            assert!(prof.raw <= 4.0 * prof.l_value + 1e-12);
        }
    }

    #[test]
    fn g_delta_examples() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let chi = g5.character(&[1]).unwrap();
        // g = conj(chi) on its support: distance 0
        let conj = chi.conjugate();
        let g =
            MultiplicativeFunction::make_builtin(Builtin::Character(&conj), &t, Some((5, 50_000)))
                .unwrap();
        let prof = g_delta(&g, &chi, 0.0, &t, 5, 50_000).unwrap();
        assert!(prof.raw < 1e-20, "raw = {}", prof.raw);

        // g = mu windowed, principal character: every term is 4/p
        let mu =
            MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, Some((5, 50_000))).unwrap();
        let chi0 = g5.principal();
        let prof = g_delta(&mu, &chi0, 0.0, &t, 5, 50_000).unwrap();
        let beta_l = mu.support().mass(&t);
        assert!((prof.raw - 4.0 * beta_l).abs() < 1e-12);

        // random unimodular stays in [0, 4L]
        let r = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 11,
                density: 0.5,
            },
            &t,
            Some((5, 50_000)),
        )
        .unwrap();
        let prof = g_delta(&r, &chi, 0.83, &t, 5, 50_000).unwrap();
        assert!(prof.raw >= 0.0 && prof.raw <= 4.0 * prof.l_value + 1e-12);
    }

    #[test]
    fn weighted_examples() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let chi = g5.character(&[1]).unwrap();
        // |g| = 1 on S: char-weighted equals char_delta on S
        let u = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 2,
                density: 1.0,
            },
            &t,
            Some((5, 20_000)),
        )
        .unwrap();
        let wprof = weighted_delta(&u, &chi, 0.4, &t, 5, 20_000, WeightMode::CharWeighted).unwrap();
        let cprof = char_delta(u.support(), &chi, 0.4, &t, 5, 20_000).unwrap();
        assert!((wprof.raw - cprof.raw).abs() < 1e-10);

        // g = (1/2) conj(chi): self-normalized distance 0, mass = beta L / 2
        let conj = chi.conjugate();
        let half = MultiplicativeFunction::from_prime_fn(
            "half-conj",
            &t,
            Some((5, 20_000)),
            PowerMode::CompletelyMultiplicative,
            |p| conj.eval(p) * 0.5,
        )
        .unwrap();
        let prof =
            weighted_delta(&half, &chi, 0.0, &t, 5, 20_000, WeightMode::SelfNormalized).unwrap();
        assert!(prof.raw < 1e-20);
        let beta_l = SupportSet::from_predicate(&t, 5, 20_000, |p| p % 5 != 0)
            .unwrap()
            .mass(&t);
        assert!((prof.weighted_mass.unwrap() - beta_l / 2.0).abs() < 1e-12);

        // zero function: zero sums
        let zero = MultiplicativeFunction::from_prime_fn(
            "zero",
            &t,
            Some((5, 20_000)),
            PowerMode::CompletelyMultiplicative,
            |_| Complex64::new(0.0, 0.0),
        )
        .unwrap();
        let prof =
            weighted_delta(&zero, &chi, 0.0, &t, 5, 20_000, WeightMode::CharWeighted).unwrap();
        assert_eq!(prof.raw, 0.0);
        assert_eq!(prof.weighted_mass, Some(0.0));
    }

    #[test]
    fn grid_scan_matches_direct_eval() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let chi = g5.character(&[1]).unwrap();
        let g = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 5,
                density: 0.7,
            },
            &t,
            Some((5, 50_000)),
        )
        .unwrap();
        let ps = phase_sum_for(
            &Objective::GDelta {
                g: &g,
                chi: &chi,
                d: 5,
                x: 50_000,
            },
            &t,
        )
        .unwrap();
        let grid = ps.grid_scan(-1.0, 0.25, 9);
        for (j, &v) in grid.iter().enumerate() {
            let tj = -1.0 + 0.25 * j as f64;
            assert!((v - ps.eval(tj)).abs() < 1e-9, "j={j}");
        }
    }

    #[test]
    fn planted_twist_recovery() {
        let t = table();
        let g1 = GroupStructure::build(1).unwrap();
        let chi0 = g1.principal();
        let t0 = 0.7;
        let planted = MultiplicativeFunction::from_prime_fn(
            "planted",
            &t,
            Some((2, 100_000)),
            PowerMode::CompletelyMultiplicative,
            |p| {
                let ang = t0 * (p as f64).ln();
                Complex64::new(ang.cos(), ang.sin())
            },
        )
        .unwrap();
        let obj = Objective::GDelta {
            g: &planted,
            chi: &chi0,
            d: 2,
            x: 100_000,
        };
        let (ts, val) = minimize_over_t(&obj, 2.0, &t).unwrap();
        assert!((ts - t0).abs() < 1e-4, "t* = {ts}");
        assert!(val.abs() < 1e-6, "val = {val}");
    }

    #[test]
    fn minimizer_never_beats_zero_candidate() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let chi = g5.character(&[2]).unwrap();
        let g = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 17,
                density: 0.4,
            },
            &t,
            Some((5, 20_000)),
        )
        .unwrap();
        let obj = Objective::GDelta {
            g: &g,
            chi: &chi,
            d: 5,
            x: 20_000,
        };
        let ps = phase_sum_for(&obj, &t).unwrap();
        let (_, val) = minimize_over_t(&obj, 3.0, &t).unwrap();
        assert!(val <= ps.eval(0.0) + 1e-12);
    }

    #[test]
    fn halasz_unit_function() {
        let t = table();
        let unit =
            MultiplicativeFunction::make_builtin(Builtin::Unit, &t, Some((100, 100_000))).unwrap();
        let rep = halasz_bound(&unit, 100, 100_000, 10.0, &t).unwrap();
        assert!(rep.m.abs() < 1e-9);
        assert!((rep.bound - (1.0 + 10.0f64.powf(-0.5))).abs() < 1e-9);
        assert!(rep.t_star.abs() < 1e-9);
    }

    #[test]
    fn halasz_m_nonnegative_and_mu_ok() {
        let t = table();
        let mu = MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, Some((100, 100_000)))
            .unwrap();
        let rep = halasz_bound(&mu, 100, 100_000, 10.0, &t).unwrap();
        assert!(rep.m >= 0.0);
        assert!(rep.ratio <= 10.0, "ratio = {}", rep.ratio);
    }

    #[test]
    fn halasz_empty_support() {
        let t = table();
        let zero = MultiplicativeFunction::from_prime_fn(
            "zero",
            &t,
            Some((100, 100_000)),
            PowerMode::CompletelyMultiplicative,
            |_| Complex64::new(0.0, 0.0),
        )
        .unwrap();
        let rep = halasz_bound(&zero, 100, 100_000, 2.0, &t).unwrap();
        // only n = 1 contributes to the mean
        let expect = (100f64).ln() / 100_000.0;
        assert!((rep.actual - expect).abs() < 1e-15);
    }

    #[test]
    fn empty_window_sentinel() {
        let t = table();
        // (29, 30] holds no primes: L = 0, delta* is the None sentinel
        let empty = SupportSet::empty(&t);
        let g29 = GroupStructure::build(29).unwrap();
        let chi = g29.character(&[1]).unwrap();
        let prof = char_delta(&empty, &chi, 0.0, &t, 29, 30).unwrap();
        assert_eq!(prof.raw, 0.0);
        assert_eq!(prof.l_value, 0.0);
        assert!(prof.delta_star.is_none());
        // a nonempty support cannot live in an empty window
        let s = SupportSet::from_predicate(&t, 29, 100, |_| true).unwrap();
        assert!(char_delta(&s, &chi, 0.0, &t, 29, 30).is_err());
    }

    #[test]
    fn halasz_preconditions() {
        let t = table();
        let mu = MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, Some((100, 100_000)))
            .unwrap();
        assert!(halasz_bound(&mu, 100, 100_000, 1.5, &t).is_err());
        // support outside (Y, x] rejected
        assert!(halasz_bound(&mu, 1_000, 100_000, 10.0, &t).is_err());
    }

    #[test]
    fn halasz_objective_is_lipschitz_on_grid() {
        let t = table();
        let mu = MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, Some((100, 50_000)))
            .unwrap();
        let ps = phase_sum_for(
            &Objective::HalaszM {
                g: &mu,
                y: 100,
                x: 50_000,
            },
            &t,
        )
        .unwrap();
        // Lipschitz constant: sum log p / p over the support window
        let mut lip = 0.0;
        for i in t.prime_index_range(100, 50_000) {
            let p = f64::from(t.primes()[i]);
            lip += p.ln() / p;
        }
        let dt = 0.05;
        let grid = ps.grid_scan(-2.0, dt, 81);
        for w in grid.windows(2) {
            assert!((w[1] - w[0]).abs() <= lip * dt + 1e-9);
        }
    }
}
