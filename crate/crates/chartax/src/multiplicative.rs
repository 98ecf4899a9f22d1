//! Unit-disc multiplicative functions with an explicit prime support set,
//! evaluated through the spf table, plus the progression / twisted partial
//! sums on both sides of the orthogonality decomposition.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::numeric::PairwiseAcc;
use crate::primes::PrimeTable;

/// Prime window `(d, x]`.
pub type Window = (u64, u64);

/// Set of primes (by prime index of a fixed table) with an optional
/// containment window `(D, x]`.
#[derive(Debug, Clone)]
pub struct SupportSet {
    bits: Vec<u64>,
    window: Option<Window>,
    count: usize,
}

impl SupportSet {
    fn with_capacity(n: usize, window: Option<Window>) -> Self {
        SupportSet {
            bits: vec![0u64; n.div_ceil(64)],
            window,
            count: 0,
        }
    }

    /// All primes in `(d, x]`.
    pub fn full_window(table: &PrimeTable, d: u64, x: u64) -> Result<Self> {
        Self::from_predicate(table, d, x, |_| true)
    }

    /// Primes `p` in `(d, x]` with `pred(p)` true.
    pub fn from_predicate(
        table: &PrimeTable,
        d: u64,
        x: u64,
        mut pred: impl FnMut(u64) -> bool,
    ) -> Result<Self> {
        if d > x || x > table.limit() {
            return Err(Error::invalid(format!(
                "support window requires D <= x <= {}, got D={d}, x={x}",
                table.limit()
            )));
        }
        let mut s = Self::with_capacity(table.prime_count(), Some((d, x)));
        for i in table.prime_index_range(d, x) {
            if pred(u64::from(table.primes()[i])) {
                s.insert(i);
            }
        }
        Ok(s)
    }

    pub fn empty(table: &PrimeTable) -> Self {
        Self::with_capacity(table.prime_count(), None)
    }

    fn insert(&mut self, idx: usize) {
        let w = &mut self.bits[idx / 64];
        let m = 1u64 << (idx % 64);
        if *w & m == 0 {
            *w |= m;
            self.count += 1;
        }
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        idx / 64 < self.bits.len() && self.bits[idx / 64] & (1u64 << (idx % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn window(&self) -> Option<Window> {
        self.window
    }

    /// Prime indices in ascending order.
    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &bits)| {
            let mut b = bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let tz = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(w * 64 + tz)
                }
            })
        })
    }

    /// The subset lying in the window `(d, x]`, re-windowed.
    pub fn restrict(&self, table: &PrimeTable, d: u64, x: u64) -> Result<SupportSet> {
        if d > x || x > table.limit() {
            return Err(Error::invalid(format!(
                "support window requires D <= x <= {}, got D={d}, x={x}",
                table.limit()
            )));
        }
        let mut s = Self::with_capacity(table.prime_count(), Some((d, x)));
        for i in table.prime_index_range(d, x) {
            if self.contains_index(i) {
                s.insert(i);
            }
        }
        Ok(s)
    }

    /// `sum_{p in S} 1/p`, pairwise-summed.
    pub fn mass(&self, table: &PrimeTable) -> f64 {
        let mut acc = PairwiseAcc::new();
        for i in self.iter_indices() {
            acc.push(1.0 / f64::from(table.primes()[i]));
        }
        acc.total()
    }
}

/// How `g(p^k)` extends beyond stored values for `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerMode {
    /// `g(p^k) = g(p)^k`.
    CompletelyMultiplicative,
    /// `g(p^k) = 0` for `k >= 2` (Moebius-style).
    SquarefreeSupport,
}

/// Replayable descriptor of a function instance, embedded in reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    pub mode: PowerMode,
}

/// A multiplicative function with values in the closed unit disc and
/// support set `S` on the primes of one table.
#[derive(Debug, Clone)]
pub struct MultiplicativeFunction {
    spec: FunctionSpec,
    prime_vals: Vec<Complex64>,
    support: SupportSet,
    mode: PowerMode,
    overrides: BTreeMap<(u64, u32), Complex64>,
}

/// Named builtin constructors.
#[derive(Debug, Clone)]
pub enum Builtin<'a> {
    Moebius,
    Liouville,
    Unit,
    Character(&'a DirichletCharacter),
    UnimodularRandom { seed: u64, density: f64 },
}

impl MultiplicativeFunction {
    /// Build one of the named functions, optionally restricted to a prime
    /// window `(d, x]`.
    pub fn make_builtin(
        builtin: Builtin<'_>,
        table: &PrimeTable,
        window: Option<Window>,
    ) -> Result<Self> {
        let (d, x) = window.unwrap_or((1, table.limit()));
        match builtin {
            Builtin::Moebius => Self::from_prime_fn(
                "moebius",
                table,
                window,
                PowerMode::SquarefreeSupport,
                |_| Complex64::new(-1.0, 0.0),
            ),
            Builtin::Liouville => Self::from_prime_fn(
                "liouville",
                table,
                window,
                PowerMode::CompletelyMultiplicative,
                |_| Complex64::new(-1.0, 0.0),
            ),
            Builtin::Unit => Self::from_prime_fn(
                "unit",
                table,
                window,
                PowerMode::CompletelyMultiplicative,
                |_| Complex64::new(1.0, 0.0),
            ),
            Builtin::Character(chi) => {
                let mut f = Self::from_prime_fn(
                    "character",
                    table,
                    window,
                    PowerMode::CompletelyMultiplicative,
                    |p| chi.eval(p),
                )?;
                f.spec.modulus = Some(chi.modulus());
                Ok(f)
            }
            Builtin::UnimodularRandom { seed, density } => {
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::invalid(format!(
                        "unimodular-random density must be in [0, 1], got {density}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut support = SupportSet::with_capacity(table.prime_count(), window);
                let mut vals = vec![Complex64::new(0.0, 0.0); table.prime_count()];
                for i in table.prime_index_range(d, x) {
                    let keep: f64 = rng.random();
                    let u: f64 = rng.random();
                    if keep < density {
                        let th = 2.0 * std::f64::consts::PI * u;
                        vals[i] = Complex64::new(th.cos(), th.sin());
                        support.insert(i);
                    }
                }
                Ok(MultiplicativeFunction {
                    spec: FunctionSpec {
                        name: "unimodular-random".into(),
                        seed: Some(seed),
                        density: Some(density),
                        modulus: None,
                        window,
                        mode: PowerMode::CompletelyMultiplicative,
                    },
                    prime_vals: vals,
                    support,
                    mode: PowerMode::CompletelyMultiplicative,
                    overrides: BTreeMap::new(),
                })
            }
        }
    }

    /// Build from an arbitrary per-prime value function. Values must lie in
    /// the closed unit disc (a 1e-9 overshoot is renormalized; beyond that
    /// is an error). Primes where `f` returns 0 are excluded from `S`.
    pub fn from_prime_fn(
        name: &str,
        table: &PrimeTable,
        window: Option<Window>,
        mode: PowerMode,
        f: impl Fn(u64) -> Complex64,
    ) -> Result<Self> {
        let (d, x) = window.unwrap_or((1, table.limit()));
        if d > x || x > table.limit() {
            return Err(Error::invalid(format!(
                "function window requires D <= x <= {}, got D={d}, x={x}",
                table.limit()
            )));
        }
        let mut support = SupportSet::with_capacity(table.prime_count(), window);
        let mut vals = vec![Complex64::new(0.0, 0.0); table.prime_count()];
        for i in table.prime_index_range(d, x) {
            let p = u64::from(table.primes()[i]);
            let mut v = f(p);
            let norm = v.norm();
            if norm > 1.0 + 1e-9 {
                return Err(Error::invalid(format!(
                    "g(p) must lie in the closed unit disc, |g({p})| = {norm}"
                )));
            }
            if norm > 1.0 {
                v /= norm;
            }
            if v != Complex64::new(0.0, 0.0) {
                vals[i] = v;
                support.insert(i);
            }
        }
        Ok(MultiplicativeFunction {
            spec: FunctionSpec {
                name: name.into(),
                seed: None,
                density: None,
                modulus: None,
                window,
                mode,
            },
            prime_vals: vals,
            support,
            mode,
            overrides: BTreeMap::new(),
        })
    }

    /// Explicitly store a prime-power value `g(p^k)`.
    pub fn set_prime_power(&mut self, p: u64, k: u32, v: Complex64) -> Result<()> {
        if v.norm() > 1.0 + 1e-9 {
            return Err(Error::invalid(format!(
                "g(p^k) must lie in the closed unit disc, |value| = {}",
                v.norm()
            )));
        }
        self.overrides.insert((p, k), v);
        Ok(())
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn mode(&self) -> PowerMode {
        self.mode
    }

    /// `g(p)` by prime index of the owning table.
    pub fn prime_value(&self, idx: usize) -> Complex64 {
        self.prime_vals[idx]
    }

    /// True when every stored prime value has zero imaginary part.
    pub fn is_real_valued(&self) -> bool {
        self.support
            .iter_indices()
            .all(|i| self.prime_vals[i].im.abs() <= 1e-12)
    }

    fn prime_power(&self, table: &PrimeTable, p: u64, k: u32) -> Complex64 {
        if let Some(&v) = self.overrides.get(&(p, k)) {
            return v;
        }
        let idx = table.primes().partition_point(|&q| u64::from(q) < p);
        let base = self.prime_vals[idx];
        match (k, self.mode) {
            (1, _) => base,
            (_, PowerMode::CompletelyMultiplicative) => base.powi(k as i32),
            (_, PowerMode::SquarefreeSupport) => Complex64::new(0.0, 0.0),
        }
    }

    /// `g(n)` via the spf factorization. `g(1) = 1`.
    pub fn evaluate(&self, n: u64, table: &PrimeTable) -> Result<Complex64> {
        if n == 0 || n > table.limit() {
            return Err(Error::invalid(format!(
                "evaluate requires 1 <= n <= {}, got {n}",
                table.limit()
            )));
        }
        let mut v = Complex64::new(1.0, 0.0);
        for (p, e) in table.factorize(n)? {
            v *= self.prime_power(table, p, e);
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        Ok(v)
    }

    /// Values `g(0..=x)` (index 0 unused), computed with one spf walk.
    pub fn bulk_values(&self, x: u64, table: &PrimeTable) -> Result<Vec<Complex64>> {
        if x > table.limit() {
            return Err(Error::invalid(format!(
                "bulk_values requires x <= {}, got {x}",
                table.limit()
            )));
        }
        let n = x as usize;
        let mut vals = vec![Complex64::new(0.0, 0.0); n + 1];
        if n >= 1 {
            vals[1] = Complex64::new(1.0, 0.0);
        }
        let spf = table.spf_slice();
        for i in 2..=n {
            let p = spf[i] as usize;
            let mut m = i;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            vals[i] = vals[m] * self.prime_power(table, p as u64, e);
        }
        Ok(vals)
    }

    /// `sum_{n <= x, n ≡ a (mod d)} g(n)`.
    pub fn progression_sum(&self, x: u64, d: u64, a: u64, table: &PrimeTable) -> Result<Complex64> {
        if d == 0 || a >= d {
            return Err(Error::invalid(format!(
                "progression_sum requires 0 <= a < D, got a={a}, D={d}"
            )));
        }
        let vals = self.bulk_values(x, table)?;
        Ok(strided_sum(&vals, d as usize, a as usize))
    }

    /// `sum_{n <= x, gcd(n, D) = 1} g(n)`.
    pub fn coprime_sum(&self, x: u64, d: u64, table: &PrimeTable) -> Result<Complex64> {
        if d == 0 {
            return Err(Error::invalid("coprime_sum requires D >= 1"));
        }
        let vals = self.bulk_values(x, table)?;
        let mut re = PairwiseAcc::new();
        let mut im = PairwiseAcc::new();
        for (n, v) in vals.iter().enumerate().skip(1) {
            if crate::numeric::gcd(n as u64, d) == 1 {
                re.push(v.re);
                im.push(v.im);
            }
        }
        Ok(Complex64::new(re.total(), im.total()))
    }

    /// `sum_{n <= x} g(n) chi(n) n^{-it}`.
    pub fn twisted_sum(
        &self,
        chi: &DirichletCharacter,
        t: f64,
        x: u64,
        table: &PrimeTable,
    ) -> Result<Complex64> {
        let vals = self.bulk_values(x, table)?;
        let d = chi.modulus();
        let phases = chi.phase_table();
        let m = chi.phase_denominator() as f64;
        let mut re = PairwiseAcc::new();
        let mut im = PairwiseAcc::new();
        for (n, v) in vals.iter().enumerate().skip(1) {
            let k = phases[(n as u64 % d) as usize];
            if k == u32::MAX {
                continue;
            }
            let mut w = *v * root_at(f64::from(k) / m);
            if t != 0.0 {
                let ang = -t * (n as f64).ln();
                w *= Complex64::new(ang.cos(), ang.sin());
            }
            re.push(w.re);
            im.push(w.im);
        }
        Ok(Complex64::new(re.total(), im.total()))
    }

    /// Residue-class sums `R_b = sum_{n <= x, n ≡ b (mod d)} g(n)` for all
    /// `b`, one pass. Character twists at `t = 0` then cost `O(phi(d))`
    /// each via [`twisted_from_residues`].
    pub fn residue_sums(&self, x: u64, d: u64, table: &PrimeTable) -> Result<Vec<Complex64>> {
        if d == 0 {
            return Err(Error::invalid("residue_sums requires D >= 1"));
        }
        let vals = self.bulk_values(x, table)?;
        let mut out = vec![Complex64::new(0.0, 0.0); d as usize];
        let mut res = vec![(PairwiseAcc::new(), PairwiseAcc::new())];
        res.resize_with(d as usize, || (PairwiseAcc::new(), PairwiseAcc::new()));
        for (n, v) in vals.iter().enumerate().skip(1) {
            let b = n % d as usize;
            res[b].0.push(v.re);
            res[b].1.push(v.im);
        }
        for (b, (re, im)) in res.iter().enumerate() {
            out[b] = Complex64::new(re.total(), im.total());
        }
        Ok(out)
    }
}

/// `sum_b chi(b) R_b` — the twisted sum at `t = 0` from residue-class sums.
pub fn twisted_from_residues(residues: &[Complex64], chi: &DirichletCharacter) -> Complex64 {
    let phases = chi.phase_table();
    let m = chi.phase_denominator() as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for (b, r) in residues.iter().enumerate() {
        let k = phases[b];
        if k != u32::MAX {
            s += *r * root_at(f64::from(k) / m);
        }
    }
    s
}

fn root_at(frac_turn: f64) -> Complex64 {
    if frac_turn == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if frac_turn == 0.5 {
        Complex64::new(-1.0, 0.0)
    } else {
        let th = 2.0 * std::f64::consts::PI * frac_turn;
        Complex64::new(th.cos(), th.sin())
    }
}

fn strided_sum(vals: &[Complex64], d: usize, a: usize) -> Complex64 {
    let mut re = PairwiseAcc::new();
    let mut im = PairwiseAcc::new();
    let mut n = if a == 0 { d } else { a };
    while n < vals.len() {
        re.push(vals[n].re);
        im.push(vals[n].im);
        n += d;
    }
    Complex64::new(re.total(), im.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::GroupStructure;

    fn table() -> PrimeTable {
        PrimeTable::build(100_000).unwrap()
    }

    fn naive_moebius(n: u64) -> f64 {
        let mut m = n;
        let mut cnt = 0;
        let mut d = 2;
        while d * d <= m {
            if m.is_multiple_of(d) {
                m /= d;
                if m.is_multiple_of(d) {
                    return 0.0;
                }
                cnt += 1;
            }
            d += 1;
        }
        if m > 1 {
            cnt += 1;
        }
        if cnt % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    #[test]
    fn moebius_values() {
        let t = table();
        let mu = MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, None).unwrap();
        assert_eq!(mu.evaluate(10, &t).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(mu.evaluate(4, &t).unwrap(), Complex64::new(0.0, 0.0));
        for n in 1..=2000u64 {
            let v = mu.evaluate(n, &t).unwrap();
            assert!((v.re - naive_moebius(n)).abs() < 1e-12, "mu({n})");
            assert!(v.im == 0.0);
        }
    }

    #[test]
    fn unit_function_is_one_everywhere() {
        let t = table();
        let u = MultiplicativeFunction::make_builtin(Builtin::Unit, &t, None).unwrap();
        for n in [1u64, 2, 64, 97, 99_991] {
            assert_eq!(u.evaluate(n, &t).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn character_function_matches_character() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let quad = g5.character(&[2]).unwrap();
        let g = MultiplicativeFunction::make_builtin(Builtin::Character(&quad), &t, None).unwrap();
        // chi(6) = chi(2)chi(3) = (-1)(-1) = 1
        assert_eq!(g.evaluate(6, &t).unwrap(), Complex64::new(1.0, 0.0));
        for n in 1..=200u64 {
            assert!((g.evaluate(n, &t).unwrap() - quad.eval(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn bulk_values_match_pointwise() {
        let t = table();
        let g5 = GroupStructure::build(5).unwrap();
        let chi = g5.character(&[1]).unwrap();
        for f in [
            MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, Some((10, 5000))).unwrap(),
            MultiplicativeFunction::make_builtin(Builtin::Liouville, &t, None).unwrap(),
            MultiplicativeFunction::make_builtin(Builtin::Character(&chi), &t, None).unwrap(),
            MultiplicativeFunction::make_builtin(
                Builtin::UnimodularRandom {
                    seed: 7,
                    density: 0.6,
                },
                &t,
                Some((2, 5000)),
            )
            .unwrap(),
        ] {
            let bulk = f.bulk_values(5000, &t).unwrap();
            for n in 1..=5000u64 {
                let direct = f.evaluate(n, &t).unwrap();
                assert!(
                    (bulk[n as usize] - direct).norm() < 1e-12,
                    "{} at n={n}",
                    f.name()
                );
            }
        }
    }

    #[test]
    fn evaluation_in_unit_disc_and_multiplicative() {
        let t = table();
        let f = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 42,
                density: 0.8,
            },
            &t,
            None,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let m = rng.random_range(1..300u64);
            let n = rng.random_range(1..300u64);
            if crate::numeric::gcd(m, n) != 1 {
                continue;
            }
            let lhs = f.evaluate(m * n, &t).unwrap();
            let rhs = f.evaluate(m, &t).unwrap() * f.evaluate(n, &t).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            assert!(lhs.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn support_restriction_is_exact() {
        let t = table();
        let f = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 3,
                density: 0.5,
            },
            &t,
            Some((100, 10_000)),
        )
        .unwrap();
        for (i, &p) in t.primes().iter().enumerate() {
            let inside = f.support().contains_index(i);
            let v = f.evaluate(u64::from(p), &t).unwrap();
            if inside {
                assert!((100..=10_000).contains(&u64::from(p)));
                assert!((v.norm() - 1.0).abs() < 1e-12);
            } else {
                assert_eq!(v, Complex64::new(0.0, 0.0));
            }
            if u64::from(p) > 10_000 {
                break;
            }
        }
    }

    #[test]
    fn random_support_density_law_of_large_numbers() {
        let t = PrimeTable::build(1_000_000).unwrap();
        let f = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 1,
                density: 0.5,
            },
            &t,
            Some((1_000, 1_000_000)),
        )
        .unwrap();
        let total = t.prime_index_range(1_000, 1_000_000).len();
        let frac = f.support().len() as f64 / total as f64;
        assert!((frac - 0.5).abs() < 0.01, "support fraction {frac}");
    }

    #[test]
    fn progression_sum_examples() {
        let t = table();
        let mu = MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, None).unwrap();
        // Mertens M(10) by direct tabulation: 1 -1 -1 0 -1 1 -1 0 0 1 = -1
        let m10 = mu.progression_sum(10, 1, 0, &t).unwrap();
        assert!((m10 - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        // empty progression
        let empty = mu.progression_sum(4, 10, 5, &t).unwrap();
        assert_eq!(empty, Complex64::new(0.0, 0.0));
        let unit = MultiplicativeFunction::make_builtin(Builtin::Unit, &t, None).unwrap();
        let c = unit.progression_sum(100, 4, 1, &t).unwrap();
        assert!((c - Complex64::new(25.0, 0.0)).norm() < 1e-12);
        assert!(mu.progression_sum(10, 4, 7, &t).is_err());
    }

    #[test]
    fn twisted_sum_examples() {
        let t = table();
        let mu = MultiplicativeFunction::make_builtin(Builtin::Moebius, &t, None).unwrap();
        let g1 = GroupStructure::build(1).unwrap();
        let chi1 = g1.principal();
        let a = mu.twisted_sum(&chi1, 0.0, 1234, &t).unwrap();
        let b = mu.progression_sum(1234, 1, 0, &t).unwrap();
        assert!((a - b).norm() < 1e-9);

        // full periods of a non-principal character sum to zero
        let g5 = GroupStructure::build(5).unwrap();
        let chi = g5.character(&[1]).unwrap();
        let unit = MultiplicativeFunction::make_builtin(Builtin::Unit, &t, None).unwrap();
        let z = unit.twisted_sum(&chi, 0.0, 1000, &t).unwrap();
        assert!(z.norm() < 1e-9, "|{z}|");

        // independent naive double-loop oracle
        let quad = g5.character(&[2]).unwrap();
        let got = mu.twisted_sum(&quad, 0.0, 100, &t).unwrap();
        let mut want = Complex64::new(0.0, 0.0);
        for n in 1..=100u64 {
            want += Complex64::new(naive_moebius(n), 0.0) * quad.eval(n);
        }
        assert!((got - want).norm() < 1e-10);
    }

    #[test]
    fn residue_sums_match_progressions() {
        let t = table();
        let f = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 9,
                density: 0.7,
            },
            &t,
            None,
        )
        .unwrap();
        let d = 12u64;
        let rs = f.residue_sums(5000, d, &t).unwrap();
        for a in 0..d {
            let direct = f.progression_sum(5000, d, a, &t).unwrap();
            assert!((rs[a as usize] - direct).norm() < 1e-10);
        }
        // and the t=0 twisted sum assembles from residues
        let g12 = GroupStructure::build(12).unwrap();
        for chi in g12.enumerate() {
            let via_res = twisted_from_residues(&rs, &chi);
            let direct = f.twisted_sum(&chi, 0.0, 5000, &t).unwrap();
            assert!((via_res - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn orthogonality_decomposition_identity() {
        let t = table();
        let f = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom {
                seed: 4,
                density: 0.9,
            },
            &t,
            None,
        )
        .unwrap();
        for d in [5u64, 12, 30] {
            let g = GroupStructure::build(d).unwrap();
            let chars = g.enumerate();
            let phi = g.phi() as f64;
            let x = 4000u64;
            let rs = f.residue_sums(x, d, &t).unwrap();
            for a in 1..d {
                if !g.is_unit(a) {
                    continue;
                }
                let direct = f.progression_sum(x, d, a, &t).unwrap();
                let mut recon = Complex64::new(0.0, 0.0);
                for chi in &chars {
                    recon += chi.eval(a).conj() * twisted_from_residues(&rs, chi);
                }
                recon /= phi;
                assert!((direct - recon).norm() < 1e-9, "D={d}, a={a}");
            }
        }
    }

    #[test]
    fn unit_disc_violation_rejected() {
        let t = table();
        let err = MultiplicativeFunction::from_prime_fn(
            "too-big",
            &t,
            None,
            PowerMode::CompletelyMultiplicative,
            |_| Complex64::new(1.5, 0.0),
        );
        assert!(err.is_err());
    }
}
