//! Dirichlet character groups mod `D` via the CRT decomposition of
//! `(Z/DZ)*` into cyclic components with precomputed discrete-log tables.
//!
//! Character values are carried as exact rational phases `k/M` (`M` the
//! group exponent) and only converted to `Complex64` through a cached
//! root-of-unity table. Phase `0` maps to exactly `1.0 + 0i`, so distance
//! sums over sets where the character is identically one vanish exactly.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gcd, lcm, PairwiseAcc};
use crate::primes::PrimeTable;

/// Default cap on the modulus for group construction.
pub const DEFAULT_MODULUS_CAP: u64 = 1_000_000;

const DLOG_NONE: u32 = u32::MAX;

/// One cyclic component of `(Z/DZ)*`, attached to a prime-power factor of
/// the modulus. The dlog table is indexed by residues mod that factor.
#[derive(Debug)]
pub struct Component {
    /// Prime-power factor `p^a` of the modulus this component lives in.
    pub factor: u64,
    pub generator: u64,
    pub order: u64,
    dlog: Vec<u32>,
}

impl Component {
    fn dlog_of(&self, n: u64) -> u32 {
        self.dlog[(n % self.factor) as usize]
    }
}

/// The multiplicative group mod `D`, decomposed into cyclic components.
#[derive(Debug)]
pub struct GroupStructure {
    modulus: u64,
    factors: Vec<(u64, u32)>,
    components: Vec<Component>,
    phi: u64,
    /// Group exponent: lcm of the component orders (1 for the trivial group).
    exponent: u64,
    /// `roots[k] = e^{2 pi i k / exponent}`, with exact cardinal values.
    roots: Vec<Complex64>,
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (u128::from(acc) * u128::from(base) % u128::from(m)) as u64;
        }
        base = (u128::from(base) * u128::from(base) % u128::from(m)) as u64;
        exp >>= 1;
    }
    acc
}

fn trial_factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Least primitive root mod the odd prime power `p^a`.
fn least_primitive_root(p: u64, a: u32) -> u64 {
    let modulus = p.pow(a);
    let phi = modulus / p * (p - 1);
    let phi_factors: Vec<u64> = trial_factorize(phi).into_iter().map(|(q, _)| q).collect();
    'cand: for g in 2..modulus {
        if g % p == 0 {
            continue;
        }
        for &q in &phi_factors {
            if pow_mod(g, phi / q, modulus) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("odd prime powers always have a primitive root");
}

fn roots_of_unity(m: u64) -> Vec<Complex64> {
    let mut roots = vec![Complex64::new(0.0, 0.0); m as usize];
    for k in 0..=m / 2 {
        // exact values on the axes keep phase-0 sums identically zero
        let v = if k == 0 {
            Complex64::new(1.0, 0.0)
        } else if 2 * k == m {
            Complex64::new(-1.0, 0.0)
        } else if 4 * k == m {
            Complex64::new(0.0, 1.0)
        } else {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
            Complex64::new(theta.cos(), theta.sin())
        };
        roots[k as usize] = v;
        if k != 0 {
            // mirror so conjugate characters take exactly conjugate values
            roots[(m - k) as usize] = v.conj();
        }
    }
    roots
}

impl GroupStructure {
    /// Build the group for modulus `d` with the default cap.
    pub fn build(d: u64) -> Result<Arc<Self>> {
        Self::build_with_cap(d, DEFAULT_MODULUS_CAP)
    }

    pub fn build_with_cap(d: u64, cap: u64) -> Result<Arc<Self>> {
        if d == 0 || d > cap {
            return Err(Error::invalid(format!(
                "modulus must satisfy 1 <= D <= {cap}, got {d}"
            )));
        }
        let factors = trial_factorize(d);
        let mut components = Vec::new();
        for &(p, a) in &factors {
            if p == 2 {
                match a {
                    1 => {}
                    2 => {
                        let mut dlog = vec![DLOG_NONE; 4];
                        dlog[1] = 0;
                        dlog[3] = 1;
                        components.push(Component {
                            factor: 4,
                            generator: 3,
                            order: 2,
                            dlog,
                        });
                    }
                    _ => {
                        let m = 1u64 << a;
                        let half_order = m / 4; // 2^(a-2)
                        let mut dlog_sign = vec![DLOG_NONE; m as usize];
                        let mut dlog_five = vec![DLOG_NONE; m as usize];
                        for i in 0..2u64 {
                            let mut r = if i == 0 { 1 } else { m - 1 };
                            for j in 0..half_order {
                                dlog_sign[r as usize] = i as u32;
                                dlog_five[r as usize] = j as u32;
                                r = r * 5 % m;
                            }
                        }
                        components.push(Component {
                            factor: m,
                            generator: m - 1,
                            order: 2,
                            dlog: dlog_sign,
                        });
                        components.push(Component {
                            factor: m,
                            generator: 5,
                            order: half_order,
                            dlog: dlog_five,
                        });
                    }
                }
            } else {
                let factor = p.pow(a);
                let order = factor / p * (p - 1);
                let g = least_primitive_root(p, a);
                let mut dlog = vec![DLOG_NONE; factor as usize];
                let mut r = 1u64;
                for j in 0..order {
                    dlog[r as usize] = j as u32;
                    r = (u128::from(r) * u128::from(g) % u128::from(factor)) as u64;
                }
                components.push(Component {
                    factor,
                    generator: g,
                    order,
                    dlog,
                });
            }
        }
        let phi: u64 = components.iter().map(|c| c.order).product();
        let exponent = components.iter().fold(1u64, |m, c| lcm(m, c.order));
        let roots = roots_of_unity(exponent);
        Ok(Arc::new(GroupStructure {
            modulus: d,
            factors,
            components,
            phi,
            exponent,
            roots,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Group exponent (the common phase denominator `M`).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_unit(&self, n: u64) -> bool {
        self.factors.iter().all(|&(p, _)| !n.is_multiple_of(p))
    }

    /// Phase numerator of residue `n` under the character with the given
    /// exponent vector: `chi(n) = e^{2 pi i k / M}`. `None` when
    /// `gcd(n, D) > 1`.
    fn phase_numerator(&self, exponents: &[u64], n: u64) -> Option<u64> {
        let r = n % self.modulus;
        if self.modulus > 1 && !self.is_unit(r) {
            return None;
        }
        let m = self.exponent;
        let mut k: u64 = 0;
        for (comp, &e) in self.components.iter().zip(exponents) {
            let d = u64::from(comp.dlog_of(r));
            let stride = m / comp.order;
            let term = (u128::from(e) * u128::from(d) % u128::from(comp.order)) as u64;
            k = (k + term * stride) % m;
        }
        Some(k)
    }

    pub fn principal(self: &Arc<Self>) -> DirichletCharacter {
        DirichletCharacter {
            group: Arc::clone(self),
            exponents: vec![0; self.components.len()],
        }
    }

    /// Construct a character from an exponent vector (reduced mod the
    /// component orders).
    pub fn character(self: &Arc<Self>, exponents: &[u64]) -> Result<DirichletCharacter> {
        if exponents.len() != self.components.len() {
            return Err(Error::invalid(format!(
                "expected {} exponents for modulus {}, got {}",
                self.components.len(),
                self.modulus,
                exponents.len()
            )));
        }
        let exps = exponents
            .iter()
            .zip(&self.components)
            .map(|(&e, c)| e % c.order)
            .collect();
        Ok(DirichletCharacter {
            group: Arc::clone(self),
            exponents: exps,
        })
    }

    /// The character with the given mixed-radix enumeration id.
    pub fn character_by_id(self: &Arc<Self>, id: u64) -> Result<DirichletCharacter> {
        if id >= self.phi {
            return Err(Error::invalid(format!(
                "character id {id} out of range for phi = {}",
                self.phi
            )));
        }
        let mut exps = Vec::with_capacity(self.components.len());
        let mut rest = id;
        for c in &self.components {
            exps.push(rest % c.order);
            rest /= c.order;
        }
        Ok(DirichletCharacter {
            group: Arc::clone(self),
            exponents: exps,
        })
    }

    /// All `phi(D)` characters, principal first, in mixed-radix id order.
    pub fn enumerate(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        let mut out = Vec::with_capacity(self.phi as usize);
        let mut exps = vec![0u64; self.components.len()];
        loop {
            out.push(DirichletCharacter {
                group: Arc::clone(self),
                exponents: exps.clone(),
            });
            let mut j = 0;
            loop {
                if j == self.components.len() {
                    return out;
                }
                exps[j] += 1;
                if exps[j] < self.components[j].order {
                    break;
                }
                exps[j] = 0;
                j += 1;
            }
        }
    }
}

/// Serializable character descriptor used in all report output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub modulus: u64,
    pub exponents: Vec<u64>,
}

/// A Dirichlet character mod the modulus of its group, stored as an
/// exponent vector over the cyclic components.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<GroupStructure>,
    exponents: Vec<u64>,
}

impl DirichletCharacter {
    pub fn group(&self) -> &Arc<GroupStructure> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn spec(&self) -> CharacterSpec {
        CharacterSpec {
            modulus: self.group.modulus,
            exponents: self.exponents.clone(),
        }
    }

    pub fn from_spec(group: &Arc<GroupStructure>, spec: &CharacterSpec) -> Result<Self> {
        if spec.modulus != group.modulus {
            return Err(Error::invalid(format!(
                "character spec is mod {}, group is mod {}",
                spec.modulus, group.modulus
            )));
        }
        group.character(&spec.exponents)
    }

    /// Mixed-radix enumeration index; the principal character has id 0.
    pub fn id(&self) -> u64 {
        let mut id = 0u64;
        let mut stride = 1u64;
        for (e, c) in self.exponents.iter().zip(self.group.components.iter()) {
            id += e * stride;
            stride *= c.order;
        }
        id
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Real characters are exactly those of order 1 or 2.
    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    /// Phase numerator `k` with `chi(n) = e^{2 pi i k / M}`; `None` when
    /// `gcd(n, D) > 1`.
    pub fn phase(&self, n: u64) -> Option<u64> {
        self.group.phase_numerator(&self.exponents, n)
    }

    /// Phase as a fraction of a full turn, in `[0, 1)`.
    pub fn phase_f64(&self, n: u64) -> Option<f64> {
        self.phase(n).map(|k| k as f64 / self.group.exponent as f64)
    }

    /// Common phase denominator `M` (the group exponent).
    pub fn phase_denominator(&self) -> u64 {
        self.group.exponent
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        match self.phase(n) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => self.group.roots[k as usize],
        }
    }

    /// Per-residue phase numerators mod the modulus, `DLOG_NONE`-style
    /// sentinel `u32::MAX` for residues sharing a factor with `D`. Hot
    /// prime loops index this by `p mod D`.
    pub fn phase_table(&self) -> Vec<u32> {
        (0..self.group.modulus)
            .map(|r| match self.phase(r) {
                None => u32::MAX,
                Some(k) => k as u32,
            })
            .collect()
    }

    /// Least `k >= 1` with `chi^k` principal.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.components.iter())
            .fold(1u64, |m, (&e, c)| lcm(m, c.order / gcd(c.order, e)))
    }

    pub fn product(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        if self.group.modulus != other.group.modulus {
            return Err(Error::invalid(format!(
                "mixed moduli: {} vs {}",
                self.group.modulus, other.group.modulus
            )));
        }
        let exps = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(&self.group.components)
            .map(|((&a, &b), c)| (a + b) % c.order)
            .collect();
        Ok(DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents: exps,
        })
    }

    pub fn conjugate(&self) -> DirichletCharacter {
        let exps = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(&e, c)| if e == 0 { 0 } else { c.order - e })
            .collect();
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents: exps,
        }
    }

    pub fn pow(&self, k: u64) -> DirichletCharacter {
        let exps = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(&e, c)| (u128::from(e) * u128::from(k) % u128::from(c.order)) as u64)
            .collect();
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents: exps,
        }
    }

    /// `Re sum_{w < p <= y} chi(p) p^{-sigma} e^{-i t log p}`, the prime sum
    /// whose boundedness for non-principal characters the experiments
    /// measure. Requires `sigma >= 1` and `D <= w <= y <= table.limit()`.
    pub fn char_prime_sum(
        &self,
        table: &PrimeTable,
        w: u64,
        y: u64,
        sigma: f64,
        t: f64,
    ) -> Result<f64> {
        if sigma < 1.0 {
            return Err(Error::invalid(format!(
                "char_prime_sum requires sigma >= 1, got {sigma}"
            )));
        }
        if w < self.modulus().max(1) || w > y || y > table.limit() {
            return Err(Error::invalid(format!(
                "char_prime_sum requires D <= w <= y <= {}, got w={w}, y={y}",
                table.limit()
            )));
        }
        let m = self.group.exponent as f64;
        let phases = self.phase_table();
        let d = self.group.modulus;
        let mut acc = PairwiseAcc::new();
        let range = table.prime_index_range(w, y);
        let primes = table.primes();
        let lnp = table.ln_primes();
        for i in range {
            let p = u64::from(primes[i]);
            let k = phases[(p % d) as usize];
            if k == u32::MAX {
                continue;
            }
            let amp = if sigma == 1.0 {
                1.0 / p as f64
            } else {
                (p as f64).powf(-sigma)
            };
            let angle = 2.0 * std::f64::consts::PI * f64::from(k) / m - t * lnp[i];
            acc.push(amp * angle.cos());
        }
        Ok(acc.total())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_order_mod(g: u64, d: u64) -> u64 {
        let mut k = 1;
        let mut r = g % d;
        while r != 1 {
            r = r * g % d;
            k += 1;
        }
        k
    }

    #[test]
    fn group_mod_5_has_one_component_generator_2() {
        let g = GroupStructure::build(5).unwrap();
        assert_eq!(g.components().len(), 1);
        assert_eq!(g.components()[0].generator, 2);
        assert_eq!(g.components()[0].order, 4);
        assert_eq!(brute_order_mod(2, 5), 4);
        assert_eq!(g.phi(), 4);
    }

    #[test]
    fn trivial_group_mod_1() {
        let g = GroupStructure::build(1).unwrap();
        assert_eq!(g.phi(), 1);
        let chars = g.enumerate();
        assert_eq!(chars.len(), 1);
        assert_eq!(chars[0].eval(7), Complex64::new(1.0, 0.0));
        assert_eq!(chars[0].eval(0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn group_mod_8_splits_two_by_two() {
        let g = GroupStructure::build(8).unwrap();
        let mut orders: Vec<u64> = g.components().iter().map(|c| c.order).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![2, 2]);
        // brute force over (Z/8Z)* = {1,3,5,7}: every element squares to 1
        for r in [1u64, 3, 5, 7] {
            assert_eq!(r * r % 8, 1);
        }
    }

    #[test]
    fn modulus_0_and_over_cap_rejected() {
        assert!(GroupStructure::build(0).is_err());
        assert!(GroupStructure::build_with_cap(100, 50).is_err());
    }

    #[test]
    fn enumerate_counts_and_principal_first() {
        for d in [1u64, 5, 12, 16, 35, 49] {
            let g = GroupStructure::build(d).unwrap();
            let chars = g.enumerate();
            assert_eq!(chars.len() as u64, g.phi(), "D = {d}");
            assert!(chars[0].is_principal());
            for (i, c) in chars.iter().enumerate() {
                assert_eq!(c.id(), i as u64);
            }
        }
        // phi(12) = 4 and every character mod 12 is real
        let g = GroupStructure::build(12).unwrap();
        let chars = g.enumerate();
        assert_eq!(chars.len(), 4);
        assert!(chars.iter().all(|c| c.is_real()));
    }

    #[test]
    fn evaluation_examples_mod_5() {
        let g = GroupStructure::build(5).unwrap();
        let chars = g.enumerate();
        let chi0 = &chars[0];
        assert_eq!(chi0.eval(3), Complex64::new(1.0, 0.0));
        // the quadratic character has exponent 2 on the order-4 component
        let quad = g.character(&[2]).unwrap();
        assert_eq!(quad.order(), 2);
        // 2 is a quadratic non-residue mod 5 (squares are 1 and 4)
        assert_eq!(quad.eval(2), Complex64::new(-1.0, 0.0));
        for chi in &chars {
            assert_eq!(chi.eval(10), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn unit_modulus_on_coprime_arguments() {
        for d in [5u64, 12, 24, 49] {
            let g = GroupStructure::build(d).unwrap();
            for chi in g.enumerate() {
                for n in 1..=d {
                    let v = chi.eval(n);
                    if g.is_unit(n % d) {
                        assert!((v.norm() - 1.0).abs() < 1e-12);
                    } else {
                        assert_eq!(v, Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn complete_multiplicativity_sampled() {
        let g = GroupStructure::build(36).unwrap();
        for chi in g.enumerate() {
            for m in 1..=50u64 {
                for n in 1..=50u64 {
                    let lhs = chi.eval(m * n);
                    let rhs = chi.eval(m) * chi.eval(n);
                    assert!((lhs - rhs).norm() < 1e-12, "chi mod 36, m={m}, n={n}");
                }
            }
        }
    }

    #[test]
    fn orders_match_brute_force_powering() {
        let g = GroupStructure::build(7).unwrap();
        let chars = g.enumerate();
        assert_eq!(chars[0].order(), 1);
        let gen_char = g.character(&[1]).unwrap();
        assert_eq!(gen_char.order(), 6);
        for chi in &chars {
            // brute force: repeatedly multiply until principal
            let mut acc = chi.clone();
            let mut k = 1;
            while !acc.is_principal() {
                acc = acc.product(chi).unwrap();
                k += 1;
            }
            assert_eq!(k, chi.order(), "chi id {}", chi.id());
        }
        let quad5 = GroupStructure::build(5).unwrap().character(&[2]).unwrap();
        assert_eq!(quad5.order(), 2);
    }

    #[test]
    fn product_conjugate_identities() {
        let g = GroupStructure::build(5).unwrap();
        let chars = g.enumerate();
        let chi0 = &chars[0];
        for chi in &chars {
            let inv = chi.product(&chi.conjugate()).unwrap();
            assert!(inv.is_principal());
            let idp = chi0.product(chi).unwrap();
            assert_eq!(idp.exponents(), chi.exponents());
        }
        let quad = g.character(&[2]).unwrap();
        let sq = quad.product(&quad).unwrap();
        for n in 1..5u64 {
            assert!((sq.eval(n) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // mixed moduli rejected
        let g7 = GroupStructure::build(7).unwrap();
        assert!(chars[1].product(&g7.principal()).is_err());
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let g = GroupStructure::build(40).unwrap();
        let chars = g.enumerate();
        for a in chars.iter().step_by(3) {
            for b in chars.iter().step_by(5) {
                let prod = a.product(b).unwrap();
                for n in 1..40u64 {
                    let lhs = prod.eval(n);
                    let rhs = a.eval(n) * b.eval(n);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn orthogonality_sampled() {
        for d in [5u64, 8, 12, 21] {
            let g = GroupStructure::build(d).unwrap();
            let chars = g.enumerate();
            let phi = g.phi() as f64;
            for a in 1..d {
                if !g.is_unit(a) {
                    continue;
                }
                for b in 1..d {
                    if !g.is_unit(b) {
                        continue;
                    }
                    let mut s = Complex64::new(0.0, 0.0);
                    for chi in &chars {
                        s += chi.eval(a) * chi.eval(b).conj();
                    }
                    let expect = if a % d == b % d { phi } else { 0.0 };
                    assert!(
                        (s - Complex64::new(expect, 0.0)).norm() < 1e-9,
                        "D={d} a={a} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn char_prime_sum_examples() {
        let table = PrimeTable::build(1_000_000).unwrap();
        let g = GroupStructure::build(5).unwrap();
        let chi0 = g.principal();
        assert_eq!(chi0.char_prime_sum(&table, 97, 97, 1.0, 0.0).unwrap(), 0.0);
        // direct-summation oracle over primes in (5, 100]
        let direct: f64 = table.primes()[table.prime_index_range(5, 100)]
            .iter()
            .map(|&p| 1.0 / f64::from(p))
            .sum();
        let got = chi0.char_prime_sum(&table, 5, 100, 1.0, 0.0).unwrap();
        assert!((got - direct).abs() < 1e-12);
        // non-principal sums stay bounded as y grows (measured, not assumed)
        let chi = g.character(&[1]).unwrap();
        for &y in &[1_000u64, 10_000, 100_000, 1_000_000] {
            let v = chi.char_prime_sum(&table, 5, y, 1.0, 0.0).unwrap();
            assert!(v.abs() < 3.0, "y={y}: {v}");
        }
        assert!(chi.char_prime_sum(&table, 5, 100, 0.5, 0.0).is_err());
        assert!(chi.char_prime_sum(&table, 2, 100, 1.0, 0.0).is_err());
        assert!(chi.char_prime_sum(&table, 200, 100, 1.0, 0.0).is_err());
    }

    #[test]
    fn phase_table_agrees_with_eval() {
        let g = GroupStructure::build(36).unwrap();
        let m = g.exponent() as f64;
        for chi in g.enumerate() {
            let tab = chi.phase_table();
            for n in 0..36u64 {
                let v = chi.eval(n);
                if tab[n as usize] == u32::MAX {
                    assert_eq!(v, Complex64::new(0.0, 0.0));
                } else {
                    let th = 2.0 * std::f64::consts::PI * f64::from(tab[n as usize]) / m;
                    assert!((v - Complex64::new(th.cos(), th.sin())).norm() < 1e-12);
                }
            }
        }
    }
}
