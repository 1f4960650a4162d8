//! Scalar arithmetic in `Z/l^N`, viewed as a finite truncation of the
//! l-adic integers.
//!
//! Valuations are capped at the working precision: `val(0) = N` by
//! convention. Operations whose answer would need digits beyond the cap
//! report [`PadicError::PrecisionExhausted`] rather than guess.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Errors from scalar operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    /// Inversion of an element divisible by `l`.
    #[error("{residue} is divisible by {ell} and has no inverse")]
    NonUnit { residue: u64, ell: u64 },
    /// A square-root argument with too small a valuation for the branch
    /// condition to make sense.
    #[error("argument valuation {got} is below the required {needed}")]
    BadValuation { needed: u32, got: u32 },
    /// Newton's hypothesis `val(p(a)) > 2 val(p'(a))` fails.
    #[error("Newton hypothesis fails: val(p(a)) = {value_val} <= 2 * {derivative_val} = 2 val(p'(a))")]
    HypothesisFails { value_val: u32, derivative_val: u32 },
    /// A valuation reached the precision cap, so the required strict
    /// inequality is undecidable at this precision.
    #[error("valuation reached the precision cap {cap}; undecidable at this precision")]
    PrecisionExhausted { cap: u32 },
}

/// A prime `l` together with a working precision `N`; all arithmetic
/// happens modulo `l^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    ell: u64,
    precision: u32,
    modulus: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PadicContext {
    /// Panics if `ell` is not prime, `precision` is zero, or `l^N`
    /// overflows a `u64`.
    pub fn new(ell: u64, precision: u32) -> Self {
        assert!(is_prime(ell), "modulus base {ell} is not prime");
        assert!(precision >= 1, "precision must be at least 1");
        let modulus = ell
            .checked_pow(precision)
            .unwrap_or_else(|| panic!("{ell}^{precision} does not fit in 64 bits"));
        PadicContext { ell, precision, modulus }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The valuation of 2: equals 1 when `l = 2` and 0 otherwise. This is
    /// the ramification penalty `v` appearing throughout the depth
    /// formulas.
    pub fn val_of_two(&self) -> u32 {
        if self.ell == 2 {
            1
        } else {
            0
        }
    }

    /// Embed a (possibly negative) integer.
    pub fn element(&self, n: i64) -> PadicInt {
        let m = self.modulus as i128;
        let r = ((n as i128 % m) + m) % m;
        PadicInt { residue: r as u64, ctx: *self }
    }

    pub fn from_u64(&self, n: u64) -> PadicInt {
        PadicInt { residue: n % self.modulus, ctx: *self }
    }

    pub fn zero(&self) -> PadicInt {
        PadicInt { residue: 0, ctx: *self }
    }

    pub fn one(&self) -> PadicInt {
        self.from_u64(1)
    }

    /// `l^k` as an element; `k >= N` gives zero.
    pub fn power_of_ell(&self, k: u32) -> PadicInt {
        if k >= self.precision {
            self.zero()
        } else {
            self.from_u64(self.ell.pow(k))
        }
    }

    /// Exact halving: multiplies by `2^{-1}` for odd `l`, shifts one digit
    /// down for `l = 2` (panicking there on odd input).
    pub fn halve(&self, x: PadicInt) -> PadicInt {
        if self.ell == 2 {
            x.shift_down(1)
        } else {
            let inv2 = self.element(2).inv_unit().expect("2 is a unit for odd l");
            x * inv2
        }
    }
}

/// An element of `Z/l^N`, tagged with its context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    residue: u64,
    ctx: PadicContext,
}

impl PadicInt {
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    /// The l-adic valuation, capped at the precision: `val(0) = N`.
    pub fn val(&self) -> u32 {
        if self.residue == 0 {
            return self.ctx.precision;
        }
        let mut r = self.residue;
        let mut v = 0;
        while r % self.ctx.ell == 0 {
            r /= self.ctx.ell;
            v += 1;
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn is_unit(&self) -> bool {
        self.residue % self.ctx.ell != 0
    }

    /// Whether `self - other` is divisible by `l^depth` (depths beyond the
    /// precision are clamped, so congruence mod `l^N` is the finest test).
    pub fn congruent(&self, other: PadicInt, depth: u32) -> bool {
        (*self - other).val() >= depth.min(self.ctx.precision)
    }

    /// Inverse of a unit, by extended Euclid on `(residue, l^N)`.
    pub fn inv_unit(&self) -> Result<PadicInt, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NonUnit { residue: self.residue, ell: self.ctx.ell });
        }
        let m = self.ctx.modulus as i128;
        let (mut r0, mut r1) = (self.residue as i128, m);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        let inv = ((s0 % m) + m) % m;
        Ok(PadicInt { residue: inv as u64, ctx: self.ctx })
    }

    /// Exact division by `l^k`. Requires `val(self) >= k` (panics
    /// otherwise: callers must check first). The result is certified only
    /// modulo `l^{N-k}`; its top `k` digits are zero.
    pub fn shift_down(&self, k: u32) -> PadicInt {
        if k == 0 {
            return *self;
        }
        assert!(
            self.val() >= k,
            "exact shift by l^{k} of an element with valuation {}",
            self.val()
        );
        if self.residue == 0 {
            return *self;
        }
        PadicInt { residue: self.residue / self.ctx.ell.pow(k), ctx: self.ctx }
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> PadicInt {
        let mut base = *self;
        let mut acc = self.ctx.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

fn check_ctx(a: &PadicInt, b: &PadicInt) {
    assert!(a.ctx == b.ctx, "mixed moduli: l^N differs between operands");
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: PadicInt) -> PadicInt {
        check_ctx(&self, &rhs);
        PadicInt { residue: (self.residue + rhs.residue) % self.ctx.modulus, ctx: self.ctx }
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: PadicInt) -> PadicInt {
        check_ctx(&self, &rhs);
        PadicInt {
            residue: (self.residue + self.ctx.modulus - rhs.residue) % self.ctx.modulus,
            ctx: self.ctx,
        }
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        self.ctx.zero() - self
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: PadicInt) -> PadicInt {
        check_ctx(&self, &rhs);
        let prod = (self.residue as u128 * rhs.residue as u128) % self.ctx.modulus as u128;
        PadicInt { residue: prod as u64, ctx: self.ctx }
    }
}

/// Square root of `1 + t`.
///
/// Requires `val(t) >= 1` for odd `l` and `val(t) >= 3` for `l = 2`
/// ([`PadicError::BadValuation`] otherwise). Returns the root congruent to
/// 1 mod `l` (odd case) resp. 1 mod 4 (`l = 2`). For odd `l` that root is
/// unique; for `l = 2` two such roots exist mod `2^N`, and this routine
/// returns the one matching the binomial-series limit on the zero-extended
/// residue, computed via Newton with one guard digit.
pub fn sqrt_one_plus(t: PadicInt) -> Result<PadicInt, PadicError> {
    let ctx = t.context();
    let needed = 2 * ctx.val_of_two() + 1;
    if t.val() < needed {
        return Err(PadicError::BadValuation { needed, got: t.val() });
    }
    if ctx.ell() == 2 {
        // One guard digit: the two 1-mod-4 roots mod 2^{N+1} differ by
        // exactly 2^N, so the reduction mod 2^N is canonical (and agrees
        // with the 2-adic series on the integer representative).
        let wide = PadicContext::new(2, ctx.precision() + 1);
        let x = sqrt_newton(wide.from_u64(t.residue()))?;
        return Ok(ctx.from_u64(x.residue()));
    }
    sqrt_newton(t)
}

fn sqrt_newton(t: PadicInt) -> Result<PadicInt, PadicError> {
    let ctx = t.context();
    let r = ctx.one() + t;
    let mut x = ctx.one();
    // Newton for f(x) = x^2 - r: the defect valuation strictly climbs
    // (e -> min(N, 2(e - val(2)))), so 2N rounds always suffice.
    for _ in 0..(2 * ctx.precision() + 2) {
        let fx = x * x - r;
        if fx.is_zero() {
            return Ok(x);
        }
        let v2 = ctx.val_of_two();
        let corr = fx.shift_down(v2) * (x + x).shift_down(v2).inv_unit()?;
        x = x - corr;
    }
    Err(PadicError::PrecisionExhausted { cap: ctx.precision() })
}

/// A monic polynomial of degree 1 to 3 over `Z/l^N`; the leading
/// coefficient 1 is implicit, `coeffs[i]` multiplies `x^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonicPoly {
    ctx: PadicContext,
    coeffs: Vec<PadicInt>,
}

impl MonicPoly {
    /// `lower` lists the non-leading coefficients from degree 0 upward;
    /// its length is the degree.
    pub fn new(ctx: PadicContext, lower: &[i64]) -> Self {
        assert!((1..=3).contains(&lower.len()), "degree must be 1..=3");
        MonicPoly { ctx, coeffs: lower.iter().map(|&c| ctx.element(c)).collect() }
    }

    pub fn from_elements(ctx: PadicContext, lower: Vec<PadicInt>) -> Self {
        assert!((1..=3).contains(&lower.len()), "degree must be 1..=3");
        MonicPoly { ctx, coeffs: lower }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    /// Horner evaluation, the implicit leading 1 first.
    pub fn eval(&self, x: PadicInt) -> PadicInt {
        let mut acc = self.ctx.one();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + *c;
        }
        acc
    }

    /// Value of the derivative at `x` (the derivative itself is not monic,
    /// so only evaluation is exposed).
    pub fn eval_derivative(&self, x: PadicInt) -> PadicInt {
        let n = self.coeffs.len() as i64;
        let mut acc = self.ctx.element(n);
        for (i, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + self.ctx.element(i as i64) * *c;
        }
        acc
    }
}

/// Newton lifting of an approximate root.
///
/// Requires `val(p(a)) > 2 val(p'(a))` with both valuations strictly below
/// the cap `N` (a capped valuation means the strict inequality is
/// undecidable, reported as [`PadicError::PrecisionExhausted`]). Returns
/// the unique root `x = a mod l^{val(p(a)) - val(p'(a))}`; `x` is
/// determined modulo `l^{N - val(p'(a))}` and satisfies `p(x) = 0 mod l^N`
/// exactly.
pub fn hensel_lift(p: &MonicPoly, alpha: PadicInt) -> Result<PadicInt, PadicError> {
    let ctx = alpha.context();
    let cap = ctx.precision();
    let fv = p.eval(alpha).val();
    let dv = p.eval_derivative(alpha).val();
    if fv >= cap || dv >= cap {
        return Err(PadicError::PrecisionExhausted { cap });
    }
    if fv <= 2 * dv {
        return Err(PadicError::HypothesisFails { value_val: fv, derivative_val: dv });
    }
    let mut x = alpha;
    for _ in 0..(2 * cap + 4) {
        let fx = p.eval(x);
        if fx.is_zero() {
            debug_assert!((x - alpha).val() >= fv - dv);
            return Ok(x);
        }
        let d = p.eval_derivative(x);
        debug_assert_eq!(d.val(), dv, "derivative valuation must be stable along the lift");
        let corr = fx.shift_down(dv) * d.shift_down(dv).inv_unit()?;
        x = x - corr;
    }
    Err(PadicError::PrecisionExhausted { cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        let c28 = PadicContext::new(2, 8);
        assert_eq!(c28.from_u64(12).val(), 2);
        let c35 = PadicContext::new(3, 5);
        assert_eq!(c35.zero().val(), 5);
        assert_eq!(c35.from_u64(9).val(), 2);
        assert_eq!(c35.from_u64(10).val(), 0);
    }

    #[test]
    fn inverse_example() {
        let ctx = PadicContext::new(3, 3);
        let inv = ctx.from_u64(2).inv_unit().unwrap();
        assert_eq!(inv.residue(), 14);
        assert!((inv * ctx.from_u64(2)).residue() == 1);
    }

    #[test]
    fn inverse_rejects_non_units() {
        let ctx = PadicContext::new(5, 4);
        assert_eq!(
            ctx.from_u64(10).inv_unit(),
            Err(PadicError::NonUnit { residue: 10, ell: 5 })
        );
    }

    #[test]
    fn sqrt_odd_example() {
        let ctx = PadicContext::new(3, 3);
        let r = sqrt_one_plus(ctx.from_u64(3)).unwrap();
        assert_eq!(r.residue(), 25);
        assert_eq!((r * r).residue(), 4);
        assert_eq!(r.residue() % 3, 1);
    }

    #[test]
    fn sqrt_two_adic_example() {
        // Roots of x^2 = 9 mod 32 in the 1-mod-4 branch are {13, 29};
        // Newton (and the exact binomial series: see the oracle tests)
        // lands on 29.
        let ctx = PadicContext::new(2, 5);
        let r = sqrt_one_plus(ctx.from_u64(8)).unwrap();
        assert_eq!(r.residue(), 29);
        assert_eq!((r * r).residue(), 9);
        assert_eq!(r.residue() % 4, 1);
    }

    #[test]
    fn sqrt_rejects_small_valuation() {
        let ctx = PadicContext::new(2, 6);
        assert_eq!(
            sqrt_one_plus(ctx.from_u64(4)),
            Err(PadicError::BadValuation { needed: 3, got: 2 })
        );
        let ctx3 = PadicContext::new(3, 4);
        assert_eq!(
            sqrt_one_plus(ctx3.from_u64(2)),
            Err(PadicError::BadValuation { needed: 1, got: 0 })
        );
    }

    #[test]
    fn hensel_example_quadratic() {
        let ctx = PadicContext::new(3, 3);
        let p = MonicPoly::new(ctx, &[-4, 0]); // x^2 - 4
        let root = hensel_lift(&p, ctx.one()).unwrap();
        assert_eq!(root.residue(), 25); // 25 = -2 mod 27, the root = 1 mod 3
        assert!(p.eval(root).is_zero());
    }

    #[test]
    fn hensel_example_split() {
        let ctx = PadicContext::new(3, 4);
        let p = MonicPoly::new(ctx, &[0, -1]); // x^2 - x
        let root = hensel_lift(&p, ctx.from_u64(3)).unwrap();
        assert_eq!(root.residue(), 0);
    }

    #[test]
    fn hensel_rejects_capped_valuation() {
        let ctx = PadicContext::new(3, 3);
        let p = MonicPoly::new(ctx, &[0, 0]); // x^2: p(0) = 0 exactly
        assert_eq!(
            hensel_lift(&p, ctx.zero()),
            Err(PadicError::PrecisionExhausted { cap: 3 })
        );
    }

    #[test]
    fn hensel_rejects_weak_hypothesis() {
        let ctx = PadicContext::new(3, 5);
        // p = x^2 - 9: at a = 0, val p = 2, val p' = cap -> exhausted.
        let p = MonicPoly::new(ctx, &[-9, 0]);
        assert_eq!(
            hensel_lift(&p, ctx.zero()),
            Err(PadicError::PrecisionExhausted { cap: 5 })
        );
        // At a = 3: p(3) = 0 exactly -> exhausted, not a silent success.
        assert_eq!(
            hensel_lift(&p, ctx.from_u64(3)),
            Err(PadicError::PrecisionExhausted { cap: 5 })
        );
        // x^2 - 3 at a = 0: val p = 1 <= 2 val p' is undecidable only when
        // the derivative caps; here p'(0) = 0 caps -> exhausted.
        let q = MonicPoly::new(ctx, &[-3, 0]);
        assert_eq!(
            hensel_lift(&q, ctx.zero()),
            Err(PadicError::PrecisionExhausted { cap: 5 })
        );
        // x^2 + x + 3 at a = 3: val p(3) = 1, val p'(3) = 0 -> 1 <= 2*0 fails? no, 1 > 0.
        // Use x^2 - 6x + 9 = (x-3)^2 at a = 0: val p = 2, val p' = 1 -> 2 <= 2.
        let r = MonicPoly::new(ctx, &[9, -6]);
        assert_eq!(
            hensel_lift(&r, ctx.zero()),
            Err(PadicError::HypothesisFails { value_val: 2, derivative_val: 1 })
        );
    }

    #[test]
    fn halving() {
        let c2 = PadicContext::new(2, 6);
        assert_eq!(c2.halve(c2.from_u64(10)).residue(), 5);
        let c7 = PadicContext::new(7, 3);
        let h = c7.halve(c7.from_u64(9));
        assert_eq!((h + h).residue(), 9);
    }

    #[test]
    #[should_panic(expected = "exact shift")]
    fn shift_down_rejects_inexact() {
        let ctx = PadicContext::new(3, 4);
        let _ = ctx.from_u64(5).shift_down(1);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_integer_model(a in 0u64..2187, b in 0u64..2187) {
            let ctx = PadicContext::new(3, 7);
            let (x, y) = (ctx.from_u64(a), ctx.from_u64(b));
            prop_assert_eq!((x + y).residue(), (a + b) % 2187);
            prop_assert_eq!((x * y).residue(), (a * b) % 2187);
            prop_assert_eq!((x - y).residue(), ((a as i64 - b as i64).rem_euclid(2187)) as u64);
        }

        #[test]
        fn inverse_is_two_sided(a in 0u64..16384) {
            let ctx = PadicContext::new(2, 14);
            let x = ctx.from_u64(2 * a + 1);
            let inv = x.inv_unit().unwrap();
            prop_assert_eq!((x * inv).residue(), 1);
            prop_assert_eq!((inv * x).residue(), 1);
        }

        #[test]
        fn valuation_is_additive_on_products(a in 1u64..6000, b in 1u64..6000) {
            let ctx = PadicContext::new(5, 6);
            let (x, y) = (ctx.from_u64(a), ctx.from_u64(b));
            let expected = (x.val() + y.val()).min(6);
            // Products can gain valuation only through the cap.
            if x.val() + y.val() < 6 {
                prop_assert_eq!((x * y).val(), expected);
            } else {
                prop_assert!((x * y).val() >= x.val().min(6));
            }
        }

        #[test]
        fn sqrt_square_is_exact_odd(t0 in 0u64..700) {
            let ctx = PadicContext::new(7, 4);
            let t = ctx.from_u64(7 * t0);
            let r = sqrt_one_plus(t).unwrap();
            prop_assert!((r * r - (ctx.one() + t)).is_zero());
            prop_assert_eq!(r.residue() % 7, 1);
        }

        #[test]
        fn sqrt_square_is_exact_two_adic(t0 in 0u64..4096) {
            let ctx = PadicContext::new(2, 15);
            let t = ctx.from_u64(8 * t0);
            let r = sqrt_one_plus(t).unwrap();
            prop_assert!((r * r - (ctx.one() + t)).is_zero());
            prop_assert_eq!(r.residue() % 4, 1);
        }

        #[test]
        fn hensel_finds_planted_root(r0 in 0u64..243, s_unit in 1u64..3, k in 1u32..4) {
            // p = (x - r)(x - s) with s - r a unit: from a = r + l^k the
            // lift must recover r exactly.
            let ctx = PadicContext::new(3, 5);
            let r = ctx.from_u64(r0);
            let s = r + ctx.from_u64(s_unit);
            let p = MonicPoly::from_elements(ctx, vec![r * s, -(r + s)]);
            let alpha = r + ctx.power_of_ell(k);
            let lifted = hensel_lift(&p, alpha).unwrap();
            prop_assert_eq!(lifted, r);
        }

        #[test]
        fn hensel_two_adic_ramified(r0 in 0u64..1024, k in 3u32..6) {
            // Roots r and r + 2u differ by valuation 1, so the recovered
            // root is pinned down mod 2^{N-1}.
            let ctx = PadicContext::new(2, 12);
            let r = ctx.from_u64(2 * r0 + 1);
            let s = r + ctx.from_u64(2);
            let p = MonicPoly::from_elements(ctx, vec![r * s, -(r + s)]);
            let alpha = r + ctx.power_of_ell(k);
            let lifted = hensel_lift(&p, alpha).unwrap();
            prop_assert!(p.eval(lifted).is_zero());
            prop_assert!((lifted - r).val() >= 11);
        }
    }
}
