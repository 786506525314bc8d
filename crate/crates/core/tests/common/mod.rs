//! Exact-arithmetic oracles. Nothing here calls into the library's
//! numerical routines; all sums are carried out over big integers.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Fixed-point scale, in bits, for sums that involve square roots.
const SCALE_BITS: u64 = 256;

pub fn choose(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

/// `ln (x · 2^-scale)` for a positive big integer, without cancellation
/// between `ln x` and `scale · ln 2`.
pub fn ln_scaled(x: &BigUint, scale: u64) -> f64 {
    let bits = x.bits();
    let top = if bits > 64 { x >> (bits - 64) } else { x << (64 - bits) };
    // top / 2^64 lies in [0.5, 1).
    let mantissa = top.to_f64().unwrap() / 2f64.powi(64);
    mantissa.ln() + (bits as f64 - scale as f64) * std::f64::consts::LN_2
}

pub fn ln_big(x: &BigUint) -> f64 {
    ln_scaled(x, 0)
}

/// `num / den` as `f64`, with full relative precision.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = (den.bits() + 64).saturating_sub(num.bits());
    let q = (num << shift) / den;
    q.to_f64().unwrap() * 2f64.powi(-(shift as i32))
}

/// The exact binary rational `p / 2^e` equal to a finite `f64` in (0, 1).
pub fn dyadic(z: f64) -> (BigUint, u64) {
    let r = BigRational::from_float(z).unwrap();
    let den = r.denom().to_biguint().unwrap();
    let e = den.bits() - 1;
    assert_eq!(den, BigUint::one() << e, "denominator must be a power of two");
    (r.numer().to_biguint().unwrap(), e)
}

/// `I_z(k, n − k + 1) = Σ_{j ≥ k} C(n, j) z^j (1 − z)^{n − j}`, exactly,
/// for the binary value of `z`.
pub fn incomplete_beta_binomial_sum(k: u64, n: u64, z: f64) -> f64 {
    let (p, e) = dyadic(z);
    let total = BigUint::one() << e;
    let q = &total - &p;
    let mut num = BigUint::zero();
    for j in k..=n {
        num += choose(n, j) * p.pow(j as u32) * q.pow((n - j) as u32);
    }
    let den = BigUint::one() << (e * n);
    ratio_to_f64(&num, &den)
}

/// `ln C(n, k)` from exact factorials.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    ln_big(&choose(n, k))
}

/// `Γ(m / 2) = r · √π^h` for positive integer `m`, returning `(r, h)`.
fn gamma_half_multiple(m: u64) -> (BigRational, bool) {
    let mut r = BigRational::one();
    if m.is_multiple_of(2) {
        // Γ(k) = (k − 1)!
        for i in 1..m / 2 {
            r *= BigRational::from_integer(i.into());
        }
        (r, false)
    } else {
        // Γ(k + ½) = √π · Π_{i<k} (i + ½)
        for i in 0..m / 2 {
            r *= BigRational::new((2 * i + 1).into(), 2.into());
        }
        (r, true)
    }
}

/// `ln Be(a, b)` for integer or half-integer shapes, given as `2a` and `2b`.
pub fn ln_beta_exact(two_a: u64, two_b: u64) -> f64 {
    let (ra, ha) = gamma_half_multiple(two_a);
    let (rb, hb) = gamma_half_multiple(two_b);
    let (rab, hab) = gamma_half_multiple(two_a + two_b);
    let r = ra * rb / rab;
    let sqrt_pi_power = ha as i32 + hb as i32 - hab as i32;
    let num = r.numer().to_biguint().unwrap();
    let den = r.denom().to_biguint().unwrap();
    ln_big(&num) - ln_big(&den) + 0.5 * sqrt_pi_power as f64 * std::f64::consts::PI.ln()
}

#[derive(Clone, Copy, Debug)]
pub enum Weighting {
    /// Exponents `y + ½`, `N − y + ½`; estimate `(y + ½)/(N + 1)`.
    Matched,
    /// Plain pmf at the ML estimate `y / N`, `0^0 = 1`.
    Plain,
}

/// Rational estimate `tn / td`, clipped to the binary value of `z`.
fn oracle_estimate(x: u64, n: u64, z: Option<f64>, w: Weighting) -> (BigUint, BigUint) {
    let (tn, td) = match w {
        Weighting::Matched => (BigUint::from(2 * x + 1), BigUint::from(2 * n + 2)),
        Weighting::Plain => (BigUint::from(x), BigUint::from(n)),
    };
    match z {
        Some(z) => {
            let (p, e) = dyadic(z);
            let zd = BigUint::one() << e;
            if &tn * &zd <= &p * &td {
                (tn, td)
            } else {
                (p, zd)
            }
        }
        None => (tn, td),
    }
}

/// `floor(term · 2^SCALE)` for one weighted likelihood term, through its
/// exact square.
fn fixed_term(x: u64, n: u64, z: Option<f64>, w: Weighting) -> BigUint {
    let (tn, td) = oracle_estimate(x, n, z, w);
    let extra = match w {
        Weighting::Matched => 1,
        Weighting::Plain => 0,
    };
    let e1 = (2 * x + extra) as u32;
    let e2 = (2 * (n - x) + extra) as u32;
    let c = choose(n, x);
    let rest = &td - &tn;
    let num = &c * &c * tn.pow(e1) * rest.pow(e2);
    let den = td.pow(e1 + e2);
    ((num << (2 * SCALE_BITS)) / den).sqrt()
}

/// `ln Σ_x p^L(x | θ̂_x)` enumerated over big integers.
pub fn ln_normalizer_exact(n: u64, z: Option<f64>, w: Weighting) -> f64 {
    let mut sum = BigUint::zero();
    for x in 0..=n {
        sum += fixed_term(x, n, z, w);
    }
    ln_scaled(&sum, SCALE_BITS)
}
