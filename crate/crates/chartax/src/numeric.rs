//! Deterministic summation and small numeric helpers shared by the
//! prime-sum loops.

use num_complex::Complex64;

/// Block size below which pairwise summation falls back to a plain loop.
const PAIRWISE_BASE: usize = 64;

/// Pairwise (cascade) summation of a slice. Error grows like
/// O(log n · eps) instead of O(n · eps), and the reduction tree depends
/// only on the slice length, so results are bit-reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BASE {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Pairwise summation of complex terms (componentwise tree).
pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= PAIRWISE_BASE {
        let mut s = Complex64::new(0.0, 0.0);
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
    }
}

/// Streaming pairwise accumulator: terms are buffered in blocks and the
/// block sums are combined binary-counter style, so the reduction tree is
/// a function of the number of terms pushed, never of timing.
#[derive(Debug, Clone)]
pub struct PairwiseAcc {
    buf: Vec<f64>,
    // (level, partial); levels strictly increase toward the bottom
    stack: Vec<(u32, f64)>,
}

impl Default for PairwiseAcc {
    fn default() -> Self {
        Self::new()
    }
}

impl PairwiseAcc {
    pub fn new() -> Self {
        PairwiseAcc {
            buf: Vec::with_capacity(PAIRWISE_BASE),
            stack: Vec::new(),
        }
    }

    pub fn push(&mut self, x: f64) {
        self.buf.push(x);
        if self.buf.len() == PAIRWISE_BASE {
            let mut s = 0.0;
            for &v in &self.buf {
                s += v;
            }
            self.buf.clear();
            self.push_block(s);
        }
    }

    fn push_block(&mut self, mut s: f64) {
        let mut level = 0u32;
        while let Some(&(l, p)) = self.stack.last() {
            if l != level {
                break;
            }
            self.stack.pop();
            s += p;
            level += 1;
        }
        self.stack.push((level, s));
    }

    pub fn total(&self) -> f64 {
        let mut s = 0.0;
        for &v in &self.buf {
            s += v;
        }
        // combine shallowest-first
        for &(_, p) in self.stack.iter().rev() {
            s += p;
        }
        s
    }
}

/// Fractional part mapped into `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Golden-section search for a local minimum of `f` on `[a, b]`,
/// terminating when the bracket is shorter than `tol`. Returns the best
/// abscissa and value seen.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small() {
        let xs: Vec<f64> = (1..=1000).map(|k| 1.0 / k as f64).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }

    #[test]
    fn streaming_acc_matches_slice_sum() {
        let xs: Vec<f64> = (1..=10_000).map(|k| (k as f64).sqrt().recip()).collect();
        let mut acc = PairwiseAcc::new();
        for &x in &xs {
            acc.push(x);
        }
        assert!((acc.total() - pairwise_sum(&xs)).abs() < 1e-9);
    }

    #[test]
    fn golden_section_finds_parabola_min() {
        let (x, v) = golden_section_min(|t| (t - 0.3).powi(2) + 1.0, -1.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frac_is_in_unit_interval() {
        for &x in &[-3.7, -1.0, -0.2, 0.0, 0.4, 1.0, 12.9] {
            let f = frac(x);
            assert!((0.0..1.0).contains(&f), "frac({x}) = {f}");
        }
        assert_eq!(frac(-1.0), 0.0);
    }
}
