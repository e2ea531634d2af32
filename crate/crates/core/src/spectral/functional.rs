//! Variance, entropy and Dirichlet forms, exact and in floating point.

use super::Generator;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A finite sum `Σ c_k log r_k` with rational coefficients and positive rational arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LogCombination {
    terms: BTreeMap<BigRational, BigRational>,
}

const TRIAL_DIVISION_BOUND: u64 = 100_000;

/// Prime factorization of a positive integer by trial division; a cofactor
/// without small prime factors is kept as a single atom.
fn factor(mut x: BigInt) -> Vec<(BigInt, i64)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_BOUND {
        let bp = BigInt::from(p);
        if &bp * &bp > x {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = x.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            x = q;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if x > BigInt::one() {
        out.push((x, 1));
    }
    out
}

impl LogCombination {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff · log(arg)`. Terms with `arg = 1` or zero coefficient vanish.
    pub fn add(&mut self, coeff: BigRational, arg: BigRational) {
        assert!(arg.is_positive(), "logarithm of a non-positive number");
        if coeff.is_zero() || arg.is_one() {
            return;
        }
        let slot = self.terms.entry(arg.clone()).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&arg);
        }
    }

    /// The single term `coeff · log(arg)`.
    pub fn term(coeff: BigRational, arg: BigRational) -> Self {
        let mut l = Self::new();
        l.add(coeff, arg);
        l
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &BigRational)> {
        self.terms.iter().map(|(a, c)| (c, a))
    }

    /// Coefficients on the prime (or irreducible cofactor) logarithms.
    pub fn canonical(&self) -> BTreeMap<BigInt, BigRational> {
        let mut out: BTreeMap<BigInt, BigRational> = BTreeMap::new();
        for (arg, c) in &self.terms {
            for (sign, part) in [(1i64, arg.numer().clone()), (-1, arg.denom().clone())] {
                for (p, e) in factor(part) {
                    *out.entry(p).or_insert_with(BigRational::zero) += c * BigRational::from_integer(BigInt::from(sign * e));
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Exact equality of the represented real numbers, up to the factorization bound.
    pub fn exact_eq(&self, other: &LogCombination) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(a, c)| c.to_f64().unwrap_or(f64::NAN) * ln_rational(a)).sum()
    }
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_rational(a: &BigRational) -> f64 {
    ln_bigint(a.numer()) - ln_bigint(a.denom())
}

impl fmt::Display for LogCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(a, c)| format!("({c})·log({a})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Var_μ(f) = ½ Σ_{x,y} μ(x) μ(y) (f(x) − f(y))²`, computed as `E f² − (E f)²`.
pub fn variance_exact(mu: &[BigRational], f: &[BigRational]) -> BigRational {
    let m1: BigRational = mu.iter().zip(f).map(|(p, v)| p * v).sum();
    let m2: BigRational = mu.iter().zip(f).map(|(p, v)| p * v * v).sum();
    m2 - &m1 * &m1
}

/// `E_μ(f, f) = ½ Σ_{x,y} Q(x, y) (f(x) − f(y))² μ(x)`.
pub fn dirichlet_exact(mu: &[BigRational], q: &Generator, f: &[BigRational]) -> BigRational {
    let mut total = BigRational::zero();
    for (x, row) in q.off.iter().enumerate() {
        for (y, r) in row {
            let diff = &f[x] - &f[*y];
            let rate = BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
            total += &mu[x] * rate * &diff * &diff;
        }
    }
    total / BigRational::from_integer(BigInt::from(2))
}

/// `Ent_μ(f²) = E_μ[f² log f²] − E_μ f² log E_μ f²`, with `0 log 0 = 0`.
pub fn entropy_sq_exact(mu: &[BigRational], f: &[BigRational]) -> Result<LogCombination> {
    if f.iter().any(|v| v.is_negative()) {
        return Err(Error::NegativeForEntropy);
    }
    let mut out = LogCombination::new();
    let mut m = BigRational::zero();
    for (p, v) in mu.iter().zip(f) {
        let sq = v * v;
        m += p * &sq;
        if !sq.is_zero() {
            out.add(p * &sq, sq);
        }
    }
    if !m.is_zero() {
        out.add(-m.clone(), m);
    }
    Ok(out)
}

/// Floating-point [`variance_exact`].
pub fn variance(mu: &[f64], f: &[f64]) -> f64 {
    let m1: f64 = mu.iter().zip(f).map(|(p, v)| p * v).sum();
    mu.iter().zip(f).map(|(p, v)| p * (v - m1) * (v - m1)).sum()
}

/// Floating-point [`dirichlet_exact`].
pub fn dirichlet(mu: &[f64], q: &Generator, f: &[f64]) -> f64 {
    let mut total = 0.0;
    for (x, row) in q.off_f64.iter().enumerate() {
        for &(y, r) in row {
            let diff = f[x] - f[y];
            total += mu[x] * r * diff * diff;
        }
    }
    total / 2.0
}

/// `x ln x − x + 1` for `x ≥ 0`, accurate near `x = 1`.
pub(crate) fn entropy_kernel(x: f64) -> f64 {
    let t = x - 1.0;
    if t.abs() < 1e-2 {
        let mut sum = 0.0;
        let mut pow = t * t;
        for k in 2..14 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * pow / (k * (k - 1)) as f64;
            pow *= t;
        }
        sum
    } else if x == 0.0 {
        1.0
    } else {
        x * x.ln() - t
    }
}

/// Floating-point [`entropy_sq_exact`], summed as `Σ μ(x) m φ(f(x)²/m)` with `φ(x) = x ln x − x + 1`.
pub fn entropy_sq(mu: &[f64], f: &[f64]) -> Result<f64> {
    if f.iter().any(|&v| v < 0.0) {
        return Err(Error::NegativeForEntropy);
    }
    let m: f64 = mu.iter().zip(f).map(|(p, v)| p * v * v).sum();
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(mu.iter().zip(f).map(|(p, v)| p * m * entropy_kernel(v * v / m)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn log_combinations_canonicalize_through_primes() {
        let a = LogCombination::term(r(1, 1), r(4, 1));
        let b = LogCombination::term(r(2, 1), r(2, 1));
        assert!(a.exact_eq(&b));
        let mut c = LogCombination::term(r(1, 1), r(6, 1));
        c.add(r(-1, 1), r(3, 1));
        assert!(c.exact_eq(&LogCombination::term(r(1, 1), r(2, 1))));
        assert!((c.to_f64() - 2f64.ln()).abs() < 1e-15);
        assert!(!a.exact_eq(&LogCombination::new()));
    }

    #[test]
    fn factor_keeps_large_cofactors() {
        let big = BigInt::from(1_000_003u64) * BigInt::from(1_000_033u64);
        let f = factor(&big * BigInt::from(12));
        assert_eq!(f[0], (BigInt::from(2), 2));
        assert_eq!(f[1], (BigInt::from(3), 1));
        assert_eq!(f[2], (big, 1));
    }

    #[test]
    fn entropy_kernel_matches_direct_formula_away_from_one() {
        for x in [0.0, 0.2, 0.98, 0.995, 1.0, 1.005, 1.02, 3.0] {
            let direct = if x == 0.0 { 1.0 } else { x * f64::ln(x) - x + 1.0 };
            assert!((entropy_kernel(x) - direct).abs() < 1e-14, "{x}");
        }
        let t = 1e-9;
        assert!((entropy_kernel(1.0 + t) / (t * t / 2.0) - 1.0).abs() < 1e-6);
    }
}
