//! Slow, independent reference implementations used to cross-check the
//! production paths: exhaustive root search, the exact-rational binomial
//! series for square roots, and small brute-force enumerations. Everything
//! here is deliberately naive and guarded to desk scale.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::padic::{MonicPoly, PadicContext, PadicInt};

/// All roots of `p` in `Z/l^N` by exhaustive evaluation.
pub fn exhaustive_roots(p: &MonicPoly) -> Vec<u64> {
    let ctx = p.context();
    assert!(ctx.modulus() <= 1 << 20, "exhaustive root search capped at modulus 2^20");
    (0..ctx.modulus()).filter(|&r| p.eval(ctx.from_u64(r)).is_zero()).collect()
}

/// Reduce an exact rational with `l`-integral value into `Z/l^N`.
/// Panics if the reduced denominator is divisible by `l`.
pub fn rational_mod(r: &BigRational, ctx: PadicContext) -> PadicInt {
    let m = BigInt::from(ctx.modulus());
    let num = ((r.numer() % &m) + &m) % &m;
    let den = ((r.denom() % &m) + &m) % &m;
    let num = ctx.from_u64(num.to_u64().unwrap());
    let den = ctx.from_u64(den.to_u64().unwrap());
    num * den.inv_unit().expect("denominator must be an l-unit")
}

/// The binomial series for `sqrt(1 + t)`, summed with exact rational
/// coefficients on the zero-extended residue of `t` until four consecutive
/// terms vanish mod `l^N`. Requires the same valuation bound as the
/// production square root (`val(t) >= 1`, or `>= 3` at `l = 2`), which
/// makes every term `l`-integral and the series convergent.
pub fn series_sqrt_one_plus(t: PadicInt) -> PadicInt {
    let ctx = t.context();
    assert!(t.val() >= 2 * ctx.val_of_two() + 1, "series argument valuation too small");
    let t_exact = BigRational::from(BigInt::from(t.residue()));
    let mut coeff = BigRational::one(); // binomial(1/2, k)
    let mut power = BigRational::one(); // t^k
    let mut acc = ctx.zero();
    let mut quiet_run = 0;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for k in 0u32.. {
        assert!(k < 8 * ctx.precision() + 64, "series failed to settle");
        let term = &coeff * &power;
        let reduced = rational_mod(&term, ctx);
        acc = acc + reduced;
        if reduced.is_zero() {
            quiet_run += 1;
            if quiet_run >= 4 {
                break;
            }
        } else {
            quiet_run = 0;
        }
        let k_next = BigRational::from(BigInt::from(k + 1));
        coeff *= (&half - BigRational::from(BigInt::from(k))) / k_next;
        power *= &t_exact;
    }
    acc
}

/// |SL2(Z/l^N)| by brute force over all entry tuples.
pub fn count_unimodular(ctx: PadicContext) -> u64 {
    let m = ctx.modulus();
    assert!(m <= 32, "exhaustive matrix enumeration capped at modulus 32");
    let mut count = 0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let det = (a as u128 * d as u128 + (m as u128 * m as u128)
                        - b as u128 * c as u128)
                        % m as u128;
                    if det == 1 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// |{x in SL2(Z/l^N) : x = Id mod l^s}| by brute force.
pub fn count_ball(ctx: PadicContext, s: u32) -> u64 {
    let m = ctx.modulus();
    assert!(m <= 32, "exhaustive matrix enumeration capped at modulus 32");
    let step = ctx.ell().pow(s.min(ctx.precision()));
    let mut count = 0;
    for a in (1..m + 1).step_by(step as usize).map(|x| x % m) {
        for b in (0..m).step_by(step as usize) {
            for c in (0..m).step_by(step as usize) {
                for d in (1..m + 1).step_by(step as usize).map(|x| x % m) {
                    let det = (a as u128 * d as u128 + (m as u128 * m as u128)
                        - b as u128 * c as u128)
                        % m as u128;
                    if det == 1 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Brute-force membership of `target` in the `Z/l^N`-span of `gens`,
/// by trying every coefficient tuple.
pub fn brute_membership(gens: &[Vec<PadicInt>], target: &[PadicInt]) -> bool {
    if gens.is_empty() {
        return target.iter().all(|x| x.is_zero());
    }
    let ctx = gens[0][0].context();
    let m = ctx.modulus();
    let combos = (m as u128).checked_pow(gens.len() as u32).expect("combo count overflow");
    assert!(combos <= 1 << 20, "brute-force membership capped at 2^20 combinations");
    let dim = target.len();
    for idx in 0..combos {
        let mut rest = idx;
        let mut sum = vec![ctx.zero(); dim];
        for g in gens {
            let c = ctx.from_u64((rest % m as u128) as u64);
            rest /= m as u128;
            for (s, gi) in sum.iter_mut().zip(g.iter()) {
                *s = *s + c * *gi;
            }
        }
        if sum.iter().zip(target.iter()).all(|(a, b)| a == b) {
            return true;
        }
    }
    false
}
