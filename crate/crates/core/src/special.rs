//! Factorials, binomials and generalized Laguerre polynomials.
//!
//! `laguerre_general` evaluates the explicit finite series with generalized
//! binomial coefficients, which stays valid for negative integer superscripts.
//! The series alternates in sign, so it is accumulated in double-double
//! arithmetic; the rounding error is then bounded by roughly 1e-32 times the
//! sum of the absolute terms instead of 1e-16.

const FACTORIALS: [u64; 21] = [
    1,
    1,
    2,
    6,
    24,
    120,
    720,
    5040,
    40320,
    362880,
    3628800,
    39916800,
    479001600,
    6227020800,
    87178291200,
    1307674368000,
    20922789888000,
    355687428096000,
    6402373705728000,
    121645100408832000,
    2432902008176640000,
];

/// ln(n!).
///
/// Table lookup for n ≤ 20, Stirling series beyond (accurate to a few ulp there).
pub fn log_factorial(n: usize) -> f64 {
    if n < FACTORIALS.len() {
        return (FACTORIALS[n] as f64).ln();
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln Γ(x) for x ≥ 22
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// n! as a float. Overflows to infinity past 170.
pub fn factorial(n: usize) -> f64 {
    if n < FACTORIALS.len() {
        FACTORIALS[n] as f64
    } else {
        log_factorial(n).exp()
    }
}

/// ln C(n, k); `-inf` when k > n.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// C(n, j) with the convention C(n, j) = 0 for j < 0 or j > n.
pub fn binomial(n: i64, j: i64) -> f64 {
    if n < 0 || j < 0 || j > n {
        return 0.0;
    }
    let j = j.min(n - j);
    let mut c = 1.0;
    for r in 0..j {
        c = c * (n - r) as f64 / (r + 1) as f64;
    }
    c.round()
}

/// Generalized binomial C(top, r) = top (top-1) ... (top-r+1) / r! for any integer `top`.
///
/// Uses the product form, so negative `top` needs no gamma-function poles.
pub fn generalized_binomial(top: i64, r: usize) -> f64 {
    generalized_binomial_dd(top, r).to_f64()
}

fn generalized_binomial_dd(top: i64, r: usize) -> DoubleDouble {
    let mut c = DoubleDouble::ONE;
    for s in 0..r {
        c = c.mul(DoubleDouble::from((top - s as i64) as f64));
        c = c.div(DoubleDouble::from((s + 1) as f64));
    }
    c
}

/// Generalized Laguerre polynomial L_n^a(x) for integer `a` (possibly negative).
///
/// Evaluates Σ_{i=0}^{n} (-1)^i C(n+a, n-i) x^i / i! by Horner's rule in
/// double-double arithmetic.
pub fn laguerre_general(n: usize, a: i64, x: f64) -> f64 {
    let top = n as i64 + a;
    // coefficient of x^i is (-1)^i C(top, n-i) / i!; build C(top, n-i) for
    // i = n down to 0 by the product form, and 1/i! alongside
    let mut binoms = Vec::with_capacity(n + 1);
    let mut c = DoubleDouble::ONE;
    binoms.push(c); // i = n  →  C(top, 0)
    for r in 1..=n {
        c = c
            .mul(DoubleDouble::from((top - (r as i64 - 1)) as f64))
            .div(DoubleDouble::from(r as f64));
        binoms.push(c);
    }
    let xd = DoubleDouble::from(x);
    let mut acc = DoubleDouble::ZERO;
    // Horner over the scaled variable: Σ c_i x^i with c_i = (-1)^i binom_{n-i} / i!,
    // written as ((c_n x + c_{n-1}) x + ...) with 1/i! folded in as x/i per step:
    // Σ_i (-1)^i b_i x^i/i! = b_0 - x(b_1 - x/2 (b_2 - x/3 (b_3 - ...)))
    for i in (0..=n).rev() {
        let b = binoms[n - i];
        if i == n {
            acc = b;
        } else {
            let step = xd.div(DoubleDouble::from((i + 1) as f64));
            acc = b.sub(step.mul(acc));
        }
    }
    acc.to_f64()
}

/// L_n^a(x) by the three-term recurrence in the degree; plain f64.
///
/// Faster than [`laguerre_general`]; used in the hot Wigner loops.
pub fn laguerre_recurrence(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl DoubleDouble {
    const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Self::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Self::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }.add(Self::from(q3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn laguerre_low_degrees() {
        for &(a, x) in &[(0, 0.3), (-3, 2.0), (5, -1.5)] {
            assert_eq!(laguerre_general(0, a, x), 1.0);
        }
        assert_eq!(laguerre_general(1, 0, 2.0), -1.0);
        // L_2^{-1}(2) = (-2)(1!/2!) L_1^1(2) = 0
        assert!(laguerre_general(2, -1, 2.0).abs() < 1e-15);
    }

    #[test]
    fn laguerre_matches_closed_forms() {
        let x = 1.7;
        // L_2^a(x) = (a+1)(a+2)/2 - (a+2)x + x^2/2
        for a in -4..5 {
            let af = a as f64;
            let expected = (af + 1.0) * (af + 2.0) / 2.0 - (af + 2.0) * x + x * x / 2.0;
            assert_relative_eq!(laguerre_general(2, a, x), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn negative_superscript_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(1..=18usize);
            let j = rng.gen_range(1..=n);
            let x: f64 = rng.gen_range(-10.0..20.0);
            let lhs = laguerre_general(n, -(j as i64), x);
            let rhs = (-x).powi(j as i32) * (log_factorial(n - j) - log_factorial(n)).exp()
                * laguerre_general(n - j, j as i64, x);
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * scale,
                "n={n} j={j} x={x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn three_term_recurrence_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=20usize);
            let a = rng.gen_range(-10..=10i64);
            let x: f64 = rng.gen_range(-25.0..25.0);
            let nf = n as f64;
            let af = a as f64;
            let lhs = (nf + 1.0) * laguerre_general(n + 1, a, x);
            let t1 = (2.0 * nf + 1.0 + af - x) * laguerre_general(n, a, x);
            let t2 = (nf + af) * laguerre_general(n - 1, a, x);
            let scale = lhs.abs().max(t1.abs()).max(t2.abs()).max(1e-300);
            assert!(
                (lhs - (t1 - t2)).abs() <= 1e-10 * scale,
                "n={n} a={a} x={x}"
            );
        }
    }

    #[test]
    fn recurrence_agrees_with_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(0..=15usize);
            let a = rng.gen_range(0..=12i64);
            let x: f64 = rng.gen_range(0.0..30.0);
            let s = laguerre_general(n, a, x);
            let r = laguerre_recurrence(n, a as f64, x);
            let scale = (0..=n)
                .map(|i| generalized_binomial(n as i64 + a, n - i).abs() * x.powi(i as i32) / factorial(i))
                .sum::<f64>();
            assert!((s - r).abs() <= 1e-12 * scale, "n={n} a={a} x={x}");
        }
    }

    #[test]
    fn log_factorial_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert_relative_eq!(log_factorial(10), 3628800f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(log_factorial(10), 15.1044125731, epsilon = 1e-10);
        // continuity across the table boundary
        let direct: f64 = (1..=30).map(|i| (i as f64).ln()).sum();
        assert_relative_eq!(log_factorial(30), direct, max_relative = 1e-14);
        let direct: f64 = (1..=21).map(|i| (i as f64).ln()).sum();
        assert_relative_eq!(log_factorial(21), direct, max_relative = 1e-14);
        for n in 1..300 {
            assert!(log_factorial(n + 1) > log_factorial(n));
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(5, -1), 0.0);
        assert_eq!(binomial(5, 6), 0.0);
        assert_eq!(generalized_binomial(-3, 2), 6.0); // (-3)(-4)/2
        assert_eq!(generalized_binomial(2, 3), 0.0);
        assert_relative_eq!(ln_binomial(40, 20).exp(), 137846528820.0, max_relative = 1e-13);
    }
}
