//! The explicit index-bound tower: exact integer exponent formulas, the
//! named constants they use, and upper bounds far beyond machine-float
//! range kept in a three-tier representation (exact rational, log10, or
//! log10 of log10 of the value). Every floating-point step rounds upward,
//! so a stored value is always an upper bound for the quantity it tracks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    /// A formula was evaluated outside the parameter range it is stated for.
    #[error("side condition violated: {0}")]
    SideConditionViolated(&'static str),
    /// Malformed or inconsistent input data.
    #[error("invalid inputs: {0}")]
    InvalidInputs(String),
    /// Two magnitudes agree to within the comparison slack, so the stored
    /// representations cannot order them reliably.
    #[error("representations too close to compare at this precision")]
    IncomparableRepresentations,
}

// ---------------------------------------------------------------------------
// Named constants.

/// Exponent applied to the field/height data in the headline bound.
pub const GAMMA: u64 = 10_000_000_000_000; // 10^13

/// The absolute factor in the headline bound, exp(exp(exp(12))), kept
/// symbolically; see [`delta_loglog10`] for its magnitude.
pub const DELTA_TEXT: &str = "exp(exp(exp(12)))";

/// Rational upper bound for zeta(2) = pi^2/6, accurate to 3e-7.
pub const ZETA2_UPPER_NUM: u64 = 1_644_935;
pub const ZETA2_UPPER_DEN: u64 = 1_000_000;

/// Degree cap used for the pairwise isogeny bound: 2 * 48^2.
pub const PAIR_EXTENSION_DEGREE: u64 = 4608;

/// Degree cap absorbing the two-power torsion field: 3^2 * 2^16.
pub const TWO_POWER_EXTENSION_DEGREE: u64 = 589_824;

/// Constant term of the per-prime exponent at odd primes.
pub const F_ODD_CONSTANT: u64 = 800;
/// Coefficient of the isogeny valuations at odd primes.
pub const F_ODD_COEFFICIENT: u64 = 1024;
/// Constant term of the per-prime exponent at 2.
pub const F_TWO_CONSTANT: u64 = 15_421;
/// Coefficient of the isogeny valuations at 2.
pub const F_TWO_COEFFICIENT: u64 = 19_008;

/// zeta(2) upper bound as an exact rational.
pub fn zeta2_upper() -> BigRational {
    BigRational::new(BigInt::from(ZETA2_UPPER_NUM), BigInt::from(ZETA2_UPPER_DEN))
}

/// Exponent on the pairwise bound inside the adelic product: 5000 n(n-1).
pub fn adelic_exponent(n: u64) -> u64 {
    5000 * n * (n - 1)
}

fn up(x: f64) -> f64 {
    x.next_up()
}

fn log10_up(x: f64) -> f64 {
    up(x.log10())
}

/// log10 of 10^a + 10^b, rounded upward.
fn logadd_up(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let z = up(10f64.powf(lo - hi));
    up(hi + up(z.ln_1p() / std::f64::consts::LN_10))
}

/// log10(log10(delta)) where delta = exp(exp(exp(12))), rounded upward:
/// exp(12) * log10(e) - log10(ln 10).
pub fn delta_loglog10() -> f64 {
    up(up(up(12f64.exp()) * up(std::f64::consts::LOG10_E)) - 10f64.ln().log10().next_down())
}

fn log10_bigint_up(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 900 {
        log10_up(n.to_f64().expect("positive bigint to f64"))
    } else {
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        up(log10_up(top.to_f64().unwrap()) + up(shift as f64 * up(2f64.log10())))
    }
}

fn log10_bigint_down(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 900 {
        n.to_f64().unwrap().log10().next_down().next_down()
    } else {
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        (top.to_f64().unwrap().log10().next_down()
            + (shift as f64 * 2f64.log10().next_down()).next_down())
        .next_down()
    }
}

fn log10_rational_up(r: &BigRational) -> f64 {
    up(log10_bigint_up(r.numer()) - log10_bigint_down(r.denom()))
}

// ---------------------------------------------------------------------------
// Three-tier magnitudes.

/// A positive magnitude stored at the coarsest tier that still carries
/// ~10 significant digits: exactly, as log10, or as log10(log10).
/// Floating tiers always hold upper bounds of the represented value.
#[derive(Debug, Clone, PartialEq)]
pub enum BigLogNumber {
    /// The value itself. Promoted to `Log10` once it exceeds ~2048 bits.
    Exact(BigRational),
    /// log10 of the value, for values whose log10 fits comfortably in f64.
    Log10(f64),
    /// log10(log10(value)), for values whose log10 itself overflows f64
    /// precision (promotion happens once log10 exceeds 1e15).
    LogLog10(f64),
}

const EXACT_BIT_LIMIT: u64 = 2048;
const LOG10_LIMIT: f64 = 1e15;

impl BigLogNumber {
    pub fn one() -> Self {
        BigLogNumber::Exact(BigRational::one())
    }

    pub fn from_u64(v: u64) -> Self {
        assert!(v > 0, "magnitudes must be positive");
        BigLogNumber::Exact(BigRational::from(BigInt::from(v)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        assert!(r.is_positive(), "magnitudes must be positive");
        BigLogNumber::Exact(r).normalized()
    }

    /// Build from an upper bound on log10 of the value.
    pub fn from_log10(log: f64) -> Self {
        assert!(log.is_finite());
        BigLogNumber::Log10(log).normalized()
    }

    /// Build from an upper bound on log10(log10) of the value.
    pub fn from_loglog10(loglog: f64) -> Self {
        assert!(loglog.is_finite());
        if loglog < 15.0 {
            BigLogNumber::Log10(up(10f64.powf(loglog)))
        } else {
            BigLogNumber::LogLog10(loglog)
        }
    }

    fn normalized(self) -> Self {
        match self {
            BigLogNumber::Exact(r) => {
                if r.numer().bits() + r.denom().bits() > EXACT_BIT_LIMIT {
                    BigLogNumber::Log10(log10_rational_up(&r))
                } else {
                    BigLogNumber::Exact(r)
                }
            }
            BigLogNumber::Log10(x) => {
                if x > LOG10_LIMIT {
                    BigLogNumber::LogLog10(log10_up(x))
                } else {
                    BigLogNumber::Log10(x)
                }
            }
            other => other,
        }
    }

    /// Upper bound on log10 of the value; +inf if it exceeds f64 range.
    pub fn log10_upper(&self) -> f64 {
        match self {
            BigLogNumber::Exact(r) => log10_rational_up(r),
            BigLogNumber::Log10(x) => *x,
            BigLogNumber::LogLog10(x) => {
                if *x < 300.0 {
                    up(10f64.powf(*x))
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Upper bound on log10(log10(value)); -inf for values <= 1.
    pub fn loglog10_upper(&self) -> f64 {
        match self {
            BigLogNumber::LogLog10(x) => *x,
            other => {
                let l = other.log10_upper();
                if l <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    log10_up(l)
                }
            }
        }
    }

    pub fn mul(&self, other: &BigLogNumber) -> BigLogNumber {
        use BigLogNumber::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a * b).normalized(),
            (LogLog10(a), rhs) | (rhs, LogLog10(a)) => {
                let l = rhs.log10_upper();
                if l == f64::INFINITY {
                    // both astronomically large: add their log10s in log space
                    LogLog10(logadd_up(*a, rhs.loglog10_upper()))
                } else if l <= 0.0 {
                    // multiplying by a value <= 1 keeps the upper bound valid
                    LogLog10(*a)
                } else {
                    LogLog10(logadd_up(*a, log10_up(l)))
                }
            }
            (lhs, rhs) => Log10(up(lhs.log10_upper() + rhs.log10_upper())).normalized(),
        }
    }

    pub fn pow_u64(&self, exp: u64) -> BigLogNumber {
        use BigLogNumber::*;
        if exp == 0 {
            return BigLogNumber::one();
        }
        match self {
            Exact(r) => {
                let result_bits = (r.numer().bits() + r.denom().bits()) * exp;
                if result_bits <= EXACT_BIT_LIMIT && exp <= i32::MAX as u64 {
                    Exact(r.pow(exp as i32)).normalized()
                } else {
                    Log10(up(exp as f64 * log10_rational_up(r))).normalized()
                }
            }
            Log10(x) => Log10(up(exp as f64 * *x)).normalized(),
            LogLog10(x) => LogLog10(up(*x + log10_up(exp as f64))),
        }
    }

    /// Directed comparison of two magnitudes. Exact pairs compare exactly;
    /// otherwise the stored bounds are compared with `slack` as the
    /// resolution limit, and a gap inside the slack is reported as
    /// incomparable rather than silently ordered.
    pub fn cmp_upper(&self, other: &BigLogNumber, slack: f64) -> Result<Ordering, BoundsError> {
        use BigLogNumber::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Ok(a.cmp(b)),
            _ if matches!(self, LogLog10(_)) || matches!(other, LogLog10(_)) => {
                slack_order(self.loglog10_upper(), other.loglog10_upper(), slack)
            }
            _ => slack_order(self.log10_upper(), other.log10_upper(), slack),
        }
    }
}

fn slack_order(a: f64, b: f64, slack: f64) -> Result<Ordering, BoundsError> {
    if !(a.is_finite() || b.is_finite()) && a == b {
        return Err(BoundsError::IncomparableRepresentations);
    }
    if (a - b).abs() <= slack {
        return Err(BoundsError::IncomparableRepresentations);
    }
    Ok(if a < b { Ordering::Less } else { Ordering::Greater })
}

// ---------------------------------------------------------------------------
// Integer exponent formulas.

/// Genus-dependent exponent 1024 g^3.
pub fn alpha_g(g: u32) -> u64 {
    1024 * (g as u64).pow(3)
}

/// Depth gained by the commutator argument at odd primes:
/// 2k + max(2k, 8 n1, 8 n2).
pub fn pink_exponent_odd(k: u64, n1: u64, n2: u64) -> u64 {
    2 * k + (2 * k).max(8 * n1).max(8 * n2)
}

/// Depth pair for the two-adic commutator argument; stated for
/// n1, n2 >= 4 and k >= 2.
pub fn pink_exponent_two(k: u64, n1: u64, n2: u64) -> Result<(u64, u64), BoundsError> {
    if n1 < 4 || n2 < 4 {
        return Err(BoundsError::SideConditionViolated("two-adic depth pair needs n1, n2 >= 4"));
    }
    if k < 2 {
        return Err(BoundsError::SideConditionViolated("two-adic depth pair needs k >= 2"));
    }
    Ok((
        12 * (k + 11 * n2 + 5 * n1 + 12) + 1,
        12 * (k + 11 * n1 + 5 * n2 + 12) + 1,
    ))
}

/// Working depth for a pair of curves at one prime:
/// floor(v_b0 / 2) + 16 max(n1, n2) + 11 v + 7.
pub fn f_pair(v_b0: u64, n1: u64, n2: u64, v: u64) -> u64 {
    v_b0 / 2 + 16 * n1.max(n2) + 11 * v + 7
}

/// Depth at which the trace-matching step stabilizes:
/// floor(v_b0 / 2) + 11 n1 + n2 + 7 v + 7.
pub fn t_max(v_b0: u64, n1: u64, n2: u64, v: u64) -> u64 {
    v_b0 / 2 + 11 * n1 + n2 + 7 * v + 7
}

/// Ball exponent for the pair: 4f at odd primes, 12(f + 17 max(n1,n2) + 13) + 1
/// at 2. Side conditions: n_i >= 2 when l = 2, n_i >= 1 when l is 3 or 5.
pub fn ball_exponent_pair(ell: u64, f: u64, n1: u64, n2: u64) -> Result<u64, BoundsError> {
    if ell == 2 {
        if n1 < 2 || n2 < 2 {
            return Err(BoundsError::SideConditionViolated("two-adic ball exponent needs n_i >= 2"));
        }
        Ok(12 * (f + 17 * n1.max(n2) + 13) + 1)
    } else {
        if (ell == 3 || ell == 5) && (n1 < 1 || n2 < 1) {
            return Err(BoundsError::SideConditionViolated(
                "ball exponent at 3 and 5 needs n_i >= 1",
            ));
        }
        Ok(4 * f)
    }
}

/// Closed-form per-prime exponent absorbing the whole pair chain:
/// 2 v_b0 + 1024 max(v_d1, v_d2) + 800 at odd primes,
/// 6 v_b0 + 19008 max(v_d1, v_d2) + 15421 at 2.
pub fn f_of_ell(ell: u64, v_b0_pair: u64, v_d1: u64, v_d2: u64) -> u64 {
    let vmax = v_d1.max(v_d2);
    if ell == 2 {
        6 * v_b0_pair + F_TWO_COEFFICIENT * vmax + F_TWO_CONSTANT
    } else {
        2 * v_b0_pair + F_ODD_COEFFICIENT * vmax + F_ODD_CONSTANT
    }
}

/// Per-curve depth from the isogeny valuation: 16 v + 12 at odd primes,
/// 48 v + 38 at 2.
pub fn n_j_from_valuations(ell: u64, v_dj: u64) -> u64 {
    if ell == 2 {
        48 * v_dj + 38
    } else {
        16 * v_dj + 12
    }
}

// ---------------------------------------------------------------------------
// Tower bounds.

/// Isogeny bound for one abelian variety over a degree-`deg` field:
/// ((14 g)^{64 g^2} * deg * max(h, ln deg, 1)^2)^{1024 g^3}.
pub fn b_iso(deg: u64, g: u32, h: f64) -> Result<BigLogNumber, BoundsError> {
    if deg == 0 || g == 0 {
        return Err(BoundsError::InvalidInputs("degree and genus must be positive".into()));
    }
    if !h.is_finite() {
        return Err(BoundsError::InvalidInputs("height must be finite".into()));
    }
    let g64 = g as u64;
    let hmax = h.max(up((deg as f64).ln())).max(1.0);
    let log_base = up(up((64 * g64 * g64) as f64 * log10_up(14.0 * g as f64))
        + up(log10_up(deg as f64) + up(2.0 * log10_up(hmax))));
    Ok(BigLogNumber::from_log10(up(alpha_g(g) as f64 * log_base)))
}

/// Isogeny bound after adjoining a degree-`d` extension:
/// 4^{e (d (1 + ln d)^2)^{1024 g^3}} * b^{1 + 1024 g^3 ln(d (1 + ln d)^2)}
/// where b is the base bound over the degree-`deg` field.
pub fn b_with_degree(deg: u64, g: u32, h: f64, d: u64) -> Result<BigLogNumber, BoundsError> {
    if d == 0 {
        return Err(BoundsError::InvalidInputs("extension degree must be positive".into()));
    }
    let b_log = match b_iso(deg, g, h)? {
        BigLogNumber::Log10(x) => x,
        other => other.log10_upper(),
    };
    let alpha = alpha_g(g) as f64;
    let lnd = up((d as f64).ln());
    let base = up(d as f64 * up((1.0 + lnd) * (1.0 + lnd)));
    // first factor: 4^{e * base^alpha}, tracked as loglog
    let log10_e_pow = up(alpha * log10_up(base)); // log10(base^alpha)
    let term1 = BigLogNumber::from_loglog10(up(
        up(std::f64::consts::E * up(4f64.log10())).log10() + log10_e_pow,
    ));
    // second factor: b^{1 + alpha ln(base)}
    let expo = up(1.0 + up(alpha * up(base.ln())));
    let term2 = BigLogNumber::from_log10(up(b_log * expo));
    Ok(term1.mul(&term2))
}

/// Product of bad-prime contributions for a pair of curves:
/// 30 * b0(E1; 60) * b0(E1^2; 2) * b0(E2; 60) * b0(E2^2; 2) * b0(E1 x E2; 2),
/// with each b0 replaced by its isogeny upper bound.
pub fn bad_prime_product_bound(k_degree: u64, h1: f64, h2: f64) -> Result<BigLogNumber, BoundsError> {
    let mut acc = BigLogNumber::from_u64(30);
    acc = acc.mul(&b_with_degree(k_degree, 1, h1, 60)?);
    acc = acc.mul(&b_with_degree(k_degree, 2, 2.0 * h1, 2)?);
    acc = acc.mul(&b_with_degree(k_degree, 1, h2, 60)?);
    acc = acc.mul(&b_with_degree(k_degree, 2, 2.0 * h2, 2)?);
    acc = acc.mul(&b_with_degree(k_degree, 2, h1 + h2, 2)?);
    Ok(acc)
}

/// Index bound for one pair of curves: b(E1 x E2; 2 * 48^2)^{10^4}.
pub fn pair_index_bound(k_degree: u64, h1: f64, h2: f64) -> Result<BigLogNumber, BoundsError> {
    Ok(b_with_degree(k_degree, 2, h1 + h2, PAIR_EXTENSION_DEGREE)?.pow_u64(10_000))
}

/// Adelic index bound for n curves:
/// 8^{n(n-2)} * zeta(2)^{n(n-1)} * [K:Q] * max_{i != j} b(Ei x Ej; 4608)^{5000 n(n-1)}.
pub fn adelic_index_bound(
    n: u64,
    k_degree: u64,
    heights: &[f64],
) -> Result<BigLogNumber, BoundsError> {
    if n < 2 || heights.len() != n as usize {
        return Err(BoundsError::InvalidInputs(
            "need n >= 2 curves with one height each".into(),
        ));
    }
    let mut pair_max: Option<BigLogNumber> = None;
    for i in 0..heights.len() {
        for j in (i + 1)..heights.len() {
            let b = b_with_degree(k_degree, 2, heights[i] + heights[j], PAIR_EXTENSION_DEGREE)?;
            let better = match &pair_max {
                None => true,
                Some(cur) => b.loglog10_upper() > cur.loglog10_upper(),
            };
            if better {
                pair_max = Some(b);
            }
        }
    }
    let pair_term = pair_max.unwrap().pow_u64(adelic_exponent(n));
    let prefactor = BigLogNumber::from_u64(8)
        .pow_u64(n * (n - 2))
        .mul(&BigLogNumber::from_rational(zeta2_upper()).pow_u64(n * (n - 1)))
        .mul(&BigLogNumber::from_u64(k_degree));
    Ok(prefactor.mul(&pair_term))
}

/// Height aggregate H = max(1, ln [K:Q], max_i h_i).
pub fn height_aggregate(k_degree: u64, heights: &[f64]) -> f64 {
    let mut h = up((k_degree as f64).ln()).max(1.0);
    for &hi in heights {
        h = h.max(hi);
    }
    h
}

/// Headline bound: delta^{n(n-1)} * ([K:Q] H^2)^{gamma n(n-1)} with
/// delta = exp(exp(exp(12))) and gamma = 10^13.
pub fn theorem1_bound(n: u64, k_degree: u64, heights: &[f64]) -> Result<BigLogNumber, BoundsError> {
    if n < 2 || heights.len() != n as usize {
        return Err(BoundsError::InvalidInputs(
            "need n >= 2 curves with one height each".into(),
        ));
    }
    let nn = n * (n - 1);
    let delta_term =
        BigLogNumber::from_loglog10(up(delta_loglog10() + log10_up(nn as f64)));
    let h = height_aggregate(k_degree, heights);
    let kh_log = up(log10_up(k_degree as f64) + up(2.0 * log10_up(h)));
    if kh_log <= 0.0 {
        return Ok(delta_term);
    }
    let field_term = BigLogNumber::from_log10(up((GAMMA * nn) as f64 * kh_log));
    Ok(delta_term.mul(&field_term))
}

/// Whether the adelic bound is dominated by the headline bound at the
/// given inputs, compared at slack 1e-6 in the stored representations.
pub fn check_implication(n: u64, k_degree: u64, heights: &[f64]) -> Result<bool, BoundsError> {
    let lhs = adelic_index_bound(n, k_degree, heights)?;
    let rhs = theorem1_bound(n, k_degree, heights)?;
    match lhs.cmp_upper(&rhs, 1e-6)? {
        Ordering::Less | Ordering::Equal => Ok(true),
        Ordering::Greater => Ok(false),
    }
}

// ---------------------------------------------------------------------------
// Input and report shapes.

/// Per-prime valuation data for one pair of curves.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrimeValuations {
    pub ell: u64,
    /// Valuation of the bad-prime product bound for the pair.
    pub v_b0_pair: u64,
    /// Valuation of the minimal-isogeny degree bound for the first curve.
    pub v_d1: u64,
    /// Same for the second curve.
    pub v_d2: u64,
}

/// Inputs for a full bound report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundInputs {
    /// Number of curves in the product (>= 2).
    pub n_curves: u32,
    /// Degree of the base field over the rationals.
    pub k_degree: u64,
    /// One stable height per curve.
    pub heights: Vec<f64>,
    /// Optional per-prime data for the first pair of curves.
    #[serde(default)]
    pub prime_data: Vec<PrimeValuations>,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<(), BoundsError> {
        if self.n_curves < 2 {
            return Err(BoundsError::InvalidInputs("need at least two curves".into()));
        }
        if self.k_degree == 0 {
            return Err(BoundsError::InvalidInputs("field degree must be positive".into()));
        }
        if self.heights.len() != self.n_curves as usize {
            return Err(BoundsError::InvalidInputs(format!(
                "expected {} heights, got {}",
                self.n_curves,
                self.heights.len()
            )));
        }
        if self.heights.iter().any(|h| !h.is_finite()) {
            return Err(BoundsError::InvalidInputs("heights must be finite".into()));
        }
        for p in &self.prime_data {
            if p.ell < 2 || (p.ell > 2 && p.ell % 2 == 0) {
                return Err(BoundsError::InvalidInputs(format!("bad prime {}", p.ell)));
            }
        }
        Ok(())
    }
}

/// A magnitude rendered for a report: which tier it is stored at, a
/// decimal rendering of the stored payload, and the payload as f64.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportNumber {
    pub tier: String,
    pub value: String,
    pub value_f64: f64,
}

impl From<&BigLogNumber> for ReportNumber {
    fn from(v: &BigLogNumber) -> Self {
        match v {
            BigLogNumber::Exact(r) => ReportNumber {
                tier: "exact".into(),
                value: format!("{}/{}", r.numer(), r.denom()),
                value_f64: r.to_f64().unwrap_or(f64::INFINITY),
            },
            BigLogNumber::Log10(x) => ReportNumber {
                tier: "log10".into(),
                value: format!("{x:.9}"),
                value_f64: *x,
            },
            BigLogNumber::LogLog10(x) => ReportNumber {
                tier: "loglog10".into(),
                value: format!("{x:.9}"),
                value_f64: *x,
            },
        }
    }
}

/// One bound with the literal formula it was computed from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NamedBound {
    pub name: String,
    pub formula: String,
    pub value: ReportNumber,
}

/// Constants echoed into every report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstantsBlock {
    pub gamma: u64,
    pub delta: String,
    pub delta_loglog10: f64,
    pub zeta2_upper: String,
    pub alpha_genus_1: u64,
    pub alpha_genus_2: u64,
    pub pair_extension_degree: u64,
    pub two_power_extension_degree: u64,
    pub f_odd_coefficient: u64,
    pub f_odd_constant: u64,
    pub f_two_coefficient: u64,
    pub f_two_constant: u64,
    pub adelic_exponent_formula: String,
    pub adelic_exponent_value: u64,
}

impl ConstantsBlock {
    pub fn for_n(n: u64) -> Self {
        ConstantsBlock {
            gamma: GAMMA,
            delta: DELTA_TEXT.into(),
            delta_loglog10: delta_loglog10(),
            zeta2_upper: format!("{ZETA2_UPPER_NUM}/{ZETA2_UPPER_DEN}"),
            alpha_genus_1: alpha_g(1),
            alpha_genus_2: alpha_g(2),
            pair_extension_degree: PAIR_EXTENSION_DEGREE,
            two_power_extension_degree: TWO_POWER_EXTENSION_DEGREE,
            f_odd_coefficient: F_ODD_COEFFICIENT,
            f_odd_constant: F_ODD_CONSTANT,
            f_two_coefficient: F_TWO_COEFFICIENT,
            f_two_constant: F_TWO_CONSTANT,
            adelic_exponent_formula: "5000 * n * (n - 1)".into(),
            adelic_exponent_value: adelic_exponent(n),
        }
    }
}

/// Integer exponents derived from one prime's valuation data.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrimeBlock {
    pub ell: u64,
    pub n1: u64,
    pub n2: u64,
    pub f_pair: u64,
    pub t_max: u64,
    pub ball_exponent: u64,
    pub f_closed_form: u64,
}

/// Full bound report for one product of curves.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundsReport {
    pub inputs: BoundInputs,
    pub constants: ConstantsBlock,
    pub per_prime: Vec<PrimeBlock>,
    pub bounds: Vec<NamedBound>,
    pub implication_holds: bool,
}

/// Evaluate the full tower for the given inputs.
pub fn compute_report(inputs: &BoundInputs) -> Result<BoundsReport, BoundsError> {
    inputs.validate()?;
    let n = inputs.n_curves as u64;
    let nn = n * (n - 1);

    let mut per_prime = Vec::new();
    for p in &inputs.prime_data {
        let n1 = n_j_from_valuations(p.ell, p.v_d1);
        let n2 = n_j_from_valuations(p.ell, p.v_d2);
        let f = f_pair(p.v_b0_pair, n1, n2, if p.ell == 2 { 1 } else { 0 });
        per_prime.push(PrimeBlock {
            ell: p.ell,
            n1,
            n2,
            f_pair: f,
            t_max: t_max(p.v_b0_pair, n1, n2, if p.ell == 2 { 1 } else { 0 }),
            ball_exponent: ball_exponent_pair(p.ell, f, n1, n2)?,
            f_closed_form: f_of_ell(p.ell, p.v_b0_pair, p.v_d1, p.v_d2),
        });
    }

    let mut bounds = Vec::new();
    for (i, &h) in inputs.heights.iter().enumerate() {
        bounds.push(NamedBound {
            name: format!("isogeny_bound_curve_{}", i + 1),
            formula: "((14 g)^(64 g^2) * deg * max(h, ln deg, 1)^2)^(1024 g^3), g = 1".into(),
            value: (&b_iso(inputs.k_degree, 1, h)?).into(),
        });
    }
    let h1 = inputs.heights[0];
    let h2 = inputs.heights[1];
    bounds.push(NamedBound {
        name: "bad_prime_product".into(),
        formula: "30 * b0(E1; 60) * b0(E1^2; 2) * b0(E2; 60) * b0(E2^2; 2) * b0(E1 x E2; 2)".into(),
        value: (&bad_prime_product_bound(inputs.k_degree, h1, h2)?).into(),
    });
    bounds.push(NamedBound {
        name: "pair_index".into(),
        formula: "b(E1 x E2; 2 * 48^2)^(10^4)".into(),
        value: (&pair_index_bound(inputs.k_degree, h1, h2)?).into(),
    });
    let adelic = adelic_index_bound(n, inputs.k_degree, &inputs.heights)?;
    bounds.push(NamedBound {
        name: "adelic_index".into(),
        formula:
            "8^(n(n-2)) * zeta(2)^(n(n-1)) * [K:Q] * max_{i != j} b(Ei x Ej; 4608)^(5000 n(n-1))"
                .into(),
        value: (&adelic).into(),
    });
    let delta_power = BigLogNumber::from_loglog10(up(delta_loglog10() + log10_up(nn as f64)));
    bounds.push(NamedBound {
        name: "delta_power_factor".into(),
        formula: "exp(exp(exp(12)))^(n(n-1))".into(),
        value: (&delta_power).into(),
    });
    let headline = theorem1_bound(n, inputs.k_degree, &inputs.heights)?;
    bounds.push(NamedBound {
        name: "main_index".into(),
        formula: "delta^(n(n-1)) * ([K:Q] H^2)^(gamma n(n-1)), H = max(1, ln [K:Q], max h_i)"
            .into(),
        value: (&headline).into(),
    });

    Ok(BoundsReport {
        inputs: inputs.clone(),
        constants: ConstantsBlock::for_n(n),
        per_prime,
        bounds,
        implication_holds: check_implication(n, inputs.k_degree, &inputs.heights)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn integer_formula_examples() {
        assert_eq!(alpha_g(1), 1024);
        assert_eq!(alpha_g(2), 8192);
        assert_eq!(pink_exponent_odd(204, 12, 12), 816);
        assert_eq!(pink_exponent_odd(1, 12, 12), 98);
        assert_eq!(pink_exponent_two(2, 4, 4).unwrap(), (937, 937));
        assert_eq!(pink_exponent_two(2, 4, 5).unwrap(), (1069, 997));
        assert!(matches!(
            pink_exponent_two(2, 3, 4),
            Err(BoundsError::SideConditionViolated(_))
        ));
        assert!(matches!(
            pink_exponent_two(1, 4, 4),
            Err(BoundsError::SideConditionViolated(_))
        ));
        assert_eq!(f_pair(10, 12, 12, 0), 204);
        assert_eq!(f_pair(0, 0, 0, 0), 7);
        assert_eq!(f_pair(0, 2, 2, 1), 50);
        assert_eq!(t_max(0, 2, 2, 1), 38);
        assert_eq!(t_max(0, 1, 1, 0), 19);
        assert_eq!(t_max(7, 1, 1, 0), 22);
        assert_eq!(ball_exponent_pair(5, 204, 12, 12).unwrap(), 816);
        assert_eq!(ball_exponent_pair(2, 50, 2, 2).unwrap(), 1165);
        assert_eq!(ball_exponent_pair(7, 0, 0, 0).unwrap(), 0);
        assert!(ball_exponent_pair(3, 4, 0, 1).is_err());
        assert!(ball_exponent_pair(2, 50, 1, 2).is_err());
        assert_eq!(f_of_ell(3, 0, 0, 0), 800);
        assert_eq!(f_of_ell(2, 0, 0, 0), 15421);
        assert_eq!(f_of_ell(3, 1, 1, 0), 1826);
        assert_eq!(n_j_from_valuations(3, 0), 12);
        assert_eq!(n_j_from_valuations(2, 0), 38);
        assert_eq!(n_j_from_valuations(3, 3), 60);
        assert_eq!(adelic_exponent(2), 10_000);
        assert_eq!(adelic_exponent(3), 30_000);
    }

    #[test]
    fn closed_form_dominates_pair_chain() {
        // The closed-form f(l) must bound the step-by-step chain it absorbs.
        for ell in [2u64, 3, 5, 7] {
            for v_b0 in [0u64, 1, 5, 20] {
                for v_d in [0u64, 1, 3] {
                    let n1 = n_j_from_valuations(ell, v_d);
                    let n2 = n_j_from_valuations(ell, 0);
                    let v = if ell == 2 { 1 } else { 0 };
                    let f = f_pair(v_b0, n1, n2, v);
                    let ball = ball_exponent_pair(ell, f, n1, n2).unwrap();
                    assert!(
                        ball <= f_of_ell(ell, v_b0, v_d, 0),
                        "chain exceeds closed form at ell={ell} v_b0={v_b0} v_d={v_d}"
                    );
                }
            }
        }
    }

    #[test]
    fn isogeny_bound_landmarks() {
        let b21 = b_iso(1, 2, 1.0).unwrap();
        let l21 = b21.log10_upper();
        assert!((l21 - 3_034_910.36).abs() < 0.5, "got {l21}");
        let b11 = b_iso(1, 1, 1.0).unwrap();
        let l11 = b11.log10_upper();
        assert!((l11 - 75_112.65).abs() < 0.1, "got {l11}");
        // monotone in every argument
        assert!(b_iso(2, 2, 1.0).unwrap().log10_upper() > l21);
        assert!(b_iso(1, 2, 2.0).unwrap().log10_upper() > l21);
    }

    #[test]
    fn degree_extension_landmarks() {
        // d = 1: ln d = 0, so the formula collapses to 4^e * b.
        let plain = b_iso(1, 2, 1.0).unwrap().log10_upper();
        let d1 = b_with_degree(1, 2, 1.0, 1).unwrap().log10_upper();
        let expected = std::f64::consts::E * 4f64.log10() + plain;
        assert!((d1 - expected).abs() < 1e-3, "got {d1}, expected {expected}");
        // d = 4608: the tower leaves f64 range; frozen loglog landmark.
        let big = b_with_degree(1, 2, 1.0, PAIR_EXTENSION_DEGREE).unwrap();
        let ll = big.loglog10_upper();
        assert!((ll - 45_982.2936).abs() < 0.01, "got {ll}");
        let pair = pair_index_bound(1, 0.5, 0.5).unwrap();
        let pll = pair.loglog10_upper();
        assert!((pll - 45_986.2936).abs() < 0.01, "got {pll}");
    }

    #[test]
    fn delta_landmarks() {
        let d = delta_loglog10();
        assert!((d - 70_683.14560089941).abs() < 1e-6, "got {d}");
        let d2 = d + 2f64.log10();
        assert!((d2 - 70_683.44663089508).abs() < 1e-6, "got {d2}");
    }

    #[test]
    fn headline_dominates_adelic_on_grid() {
        for n in [2u64, 3, 5] {
            for k in [1u64, 2, 100] {
                for h in [0.0f64, 1.0, 10.0] {
                    let heights = vec![h; n as usize];
                    assert_eq!(
                        check_implication(n, k, &heights).unwrap(),
                        true,
                        "fails at n={n} k={k} h={h}"
                    );
                }
            }
        }
    }

    #[test]
    fn headline_bound_value() {
        let t = theorem1_bound(2, 1, &[1.0, 1.0]).unwrap();
        // K = 1, H = 1: only the delta factor survives.
        let ll = t.loglog10_upper();
        assert!((ll - 70_683.44663089508).abs() < 1e-4, "got {ll}");
        // The field factor is invisible next to delta at loglog resolution,
        // so only weak monotonicity can be observed there.
        let bigger = theorem1_bound(2, 100, &[10.0, 1.0]).unwrap();
        assert!(bigger.loglog10_upper() >= ll);
        assert!(height_aggregate(100, &[10.0, 1.0]) == 10.0);
    }

    #[test]
    fn comparison_is_direction_safe() {
        let a = BigLogNumber::from_loglog10(100.0);
        let b = BigLogNumber::from_loglog10(100.0 + 5e-7);
        assert_eq!(a.cmp_upper(&b, 1e-6), Err(BoundsError::IncomparableRepresentations));
        let c = BigLogNumber::from_loglog10(101.0);
        assert_eq!(a.cmp_upper(&c, 1e-6).unwrap(), Ordering::Less);
        assert_eq!(c.cmp_upper(&a, 1e-6).unwrap(), Ordering::Greater);
        // mixed tiers
        let small = BigLogNumber::from_u64(1000);
        assert_eq!(small.cmp_upper(&c, 1e-6).unwrap(), Ordering::Less);
        let exact_a = BigLogNumber::from_u64(7);
        let exact_b = BigLogNumber::from_u64(8);
        assert_eq!(exact_a.cmp_upper(&exact_b, 1.0).unwrap(), Ordering::Less);
    }

    #[test]
    fn report_is_complete_and_serializable() {
        let inputs = BoundInputs {
            n_curves: 2,
            k_degree: 1,
            heights: vec![1.0, 1.0],
            prime_data: vec![
                PrimeValuations { ell: 2, v_b0_pair: 0, v_d1: 0, v_d2: 0 },
                PrimeValuations { ell: 3, v_b0_pair: 1, v_d1: 1, v_d2: 0 },
            ],
        };
        let report = compute_report(&inputs).unwrap();
        assert!(report.implication_holds);
        assert_eq!(report.per_prime.len(), 2);
        assert_eq!(report.per_prime[0].n1, 38);
        assert_eq!(report.per_prime[1].f_closed_form, 1826);
        let delta2 = report.bounds.iter().find(|b| b.name == "delta_power_factor").unwrap();
        assert_eq!(delta2.value.tier, "loglog10");
        assert!((delta2.value.value_f64 - 70_683.446631).abs() < 1e-4);
        let json = serde_json::to_string(&report).unwrap();
        let back: BoundsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let mut inputs = BoundInputs {
            n_curves: 1,
            k_degree: 1,
            heights: vec![1.0],
            prime_data: vec![],
        };
        assert!(inputs.validate().is_err());
        inputs.n_curves = 2;
        assert!(inputs.validate().is_err()); // height count mismatch
        inputs.heights = vec![1.0, f64::NAN];
        assert!(inputs.validate().is_err());
        inputs.heights = vec![1.0, 1.0];
        assert!(inputs.validate().is_ok());
    }

    proptest! {
        #[test]
        fn rounding_is_upward_on_products(a in 1u64..1_000_000, b in 1u64..1_000_000) {
            // exact product vs the log-tier product of the same values
            let exact = BigLogNumber::from_u64(a).mul(&BigLogNumber::from_u64(b));
            let lofted = BigLogNumber::from_log10((a as f64).log10())
                .mul(&BigLogNumber::from_log10((b as f64).log10()));
            let true_log = ((a as u128 * b as u128) as f64).log10();
            prop_assert!(exact.log10_upper() >= true_log.next_down());
            prop_assert!(lofted.log10_upper() >= true_log.next_down());
        }

        #[test]
        fn power_matches_repeated_multiplication(base in 2u64..50, exp in 1u64..6) {
            let direct = BigLogNumber::from_u64(base).pow_u64(exp);
            let mut acc = BigLogNumber::one();
            for _ in 0..exp {
                acc = acc.mul(&BigLogNumber::from_u64(base));
            }
            prop_assert_eq!(direct, acc);
        }

        #[test]
        fn bounds_monotone_in_heights(h in 0.0f64..20.0, bump in 0.1f64..5.0) {
            let lo = theorem1_bound(2, 3, &[h, h]).unwrap();
            let hi = theorem1_bound(2, 3, &[h + bump, h]).unwrap();
            prop_assert!(hi.loglog10_upper() >= lo.loglog10_upper());
        }
    }
}
