//! Seeded self-check suites. Each suite re-derives one of the library's
//! certified claims from an independent angle — exhaustive search, brute
//! enumeration, or planted instances with a known answer — and reports a
//! machine-readable outcome. All randomness flows from the caller's seed
//! through per-suite ChaCha streams, so a report is a pure function of its
//! seed and two runs serialize byte-identically.

use crate::bounds::{self, BoundInputs, ConstantsBlock, PrimeValuations};
use crate::group::{
    self, ball_generators, contains_ball, goursat_exponents, subgroup_closure, BallSpec,
};
use crate::inner::{construct_intertwiner, verify_trace_congruence, ApproxMorphism};
use crate::lattice::{conjugation_closure, conjugation_stable_gain, LieLattice, LieVector};
use crate::matrix::{adjoint_op, approx_eigen_defect, char_poly_adjoint, Mat2, TracelessMat};
use crate::oracle;
use crate::padic::{hensel_lift, MonicPoly, PadicContext, PadicInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Result of one suite: instance counts and a human-readable summary.
/// Deliberately contains no timings or other machine-dependent data.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub trials: u64,
    pub failures: u64,
    pub detail: String,
}

/// The full self-check report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerifyReport {
    pub seed: u64,
    pub all_passed: bool,
    pub suites: Vec<SuiteOutcome>,
}

fn suite_rng(seed: u64, salt: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

// ---------------------------------------------------------------------------
// Newton lifting vs. exhaustive root search.

/// Plants monic quadratics and cubics with a controlled approximate root
/// and checks the lifted root against the full root list mod `l^N`, plus
/// the predicted distance `val(root - start) >= val(p(start)) -
/// val(p'(start))`.
pub fn hensel_oracle_suite(seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 1);
    let mut trials = 0u64;
    let mut failures = 0u64;
    for &(ell, prec) in &[(2u64, 8u32), (3, 6), (5, 5)] {
        let ctx = PadicContext::new(ell, prec);
        let m = ctx.modulus();
        for _ in 0..1000 {
            let deg = 2 + rng.random_range(0..2usize);
            let start = ctx.from_u64(rng.random_range(0..m));
            // Derivative valuation e at the start, residual valuation j:
            // j > 2e is exactly the Newton hypothesis.
            let e = u32::from(rng.random_range(0..4u32) == 0);
            let q_lower = loop {
                let cand: Vec<PadicInt> =
                    (0..deg - 1).map(|_| ctx.from_u64(rng.random_range(0..m))).collect();
                let q = MonicPoly::from_elements(ctx, cand.clone());
                if q.eval(start).val() == e {
                    break cand;
                }
            };
            // p = (x - start) q + l^j u, so p(start) = l^j u and
            // p'(start) = q(start).
            let mut qc = q_lower;
            qc.push(ctx.one());
            let mut lower = Vec::with_capacity(deg);
            for k in 0..deg {
                let prev = if k == 0 { ctx.zero() } else { qc[k - 1] };
                lower.push(prev - start * qc[k]);
            }
            let j = rng.random_range(2 * e + 1..prec);
            let unit = loop {
                let r = rng.random_range(1..m);
                if r % ell != 0 {
                    break ctx.from_u64(r);
                }
            };
            lower[0] = lower[0] + ctx.power_of_ell(j) * unit;
            let p = MonicPoly::from_elements(ctx, lower);

            trials += 1;
            if p.eval(start).val() != j || p.eval_derivative(start).val() != e {
                failures += 1;
                continue;
            }
            match hensel_lift(&p, start) {
                Ok(root) => {
                    let listed = oracle::exhaustive_roots(&p).contains(&root.residue());
                    let close = (root - start).val() >= j - e;
                    if !(listed && close) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    SuiteOutcome {
        name: "hensel_oracle".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: format!(
            "{trials} planted Newton instances at (2,8), (3,6), (5,5); every lifted root \
             appears in the exhaustive root list and lands within the predicted distance \
             of its start"
        ),
    }
}

// ---------------------------------------------------------------------------
// Approximate-eigenvalue defect inequality.

fn defect_instance(
    lam: PadicInt,
    w: [PadicInt; 2],
    alphas: [PadicInt; 2],
    noise: [PadicInt; 4],
    n: u32,
) -> bool {
    // Rows of g - lam Id live in the annihilator of w mod l^n: an exact
    // multiple of (w2, -w1) plus the supplied depth-(n - b) noise.
    let ann = [w[1], -w[0]];
    let g = Mat2::from_elements([
        alphas[0] * ann[0] + noise[0] + lam,
        alphas[0] * ann[1] + noise[1],
        alphas[1] * ann[0] + noise[2],
        alphas[1] * ann[1] + noise[3] + lam,
    ]);
    approx_eigen_defect(&g, lam, w, n).is_ok()
}

/// Randomized and exhaustive instances of the defect inequality
/// `val(p_g(lambda)) >= n - b` for witnesses of depth `b`.
pub fn eigen_defect_suite(seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 2);
    let mut trials = 0u64;
    let mut failures = 0u64;

    for &(ell, prec, count) in &[(2u64, 10u32, 33_334u64), (3, 7, 33_333), (5, 6, 33_333)] {
        let ctx = PadicContext::new(ell, prec);
        let m = ctx.modulus();
        for _ in 0..count {
            let b = rng.random_range(0..3u32);
            let n = rng.random_range(b + 1..=prec);
            let (w1, w2) = loop {
                let a = rng.random_range(0..m);
                let c = rng.random_range(0..m);
                if a % ell != 0 || c % ell != 0 {
                    break (a, c);
                }
            };
            let scale = ctx.power_of_ell(b);
            let w = [ctx.from_u64(w1) * scale, ctx.from_u64(w2) * scale];
            let lam = ctx.from_u64(rng.random_range(0..m));
            let deep = ctx.power_of_ell(n - b);
            let alphas =
                [ctx.from_u64(rng.random_range(0..m)), ctx.from_u64(rng.random_range(0..m))];
            let noise = [
                ctx.from_u64(rng.random_range(0..m)) * deep,
                ctx.from_u64(rng.random_range(0..m)) * deep,
                ctx.from_u64(rng.random_range(0..m)) * deep,
                ctx.from_u64(rng.random_range(0..m)) * deep,
            ];
            trials += 1;
            if !defect_instance(lam, w, alphas, noise, n) {
                failures += 1;
            }
        }
    }

    // Exhaustive sweep mod 27: every witness, every eigenvalue, annihilator
    // multipliers over a fixed grid mixing units and ramified values.
    let ctx = PadicContext::new(3, 3);
    let grid = [0u64, 1, 2, 3, 9, 13];
    for w1 in 0..27u64 {
        for w2 in 0..27u64 {
            if w1 == 0 && w2 == 0 {
                continue;
            }
            let w = [ctx.from_u64(w1), ctx.from_u64(w2)];
            for lam_r in 0..27u64 {
                let lam = ctx.from_u64(lam_r);
                for &a1 in &grid {
                    for &a2 in &grid {
                        let alphas = [ctx.from_u64(a1), ctx.from_u64(a2)];
                        let zero = [ctx.zero(); 4];
                        trials += 1;
                        if !defect_instance(lam, w, alphas, zero, 3) {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }

    SuiteOutcome {
        name: "eigen_defect".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: format!(
            "{trials} instances: 100000 random witnesses at l = 2, 3, 5 plus an exhaustive \
             mod-27 sweep over all witnesses, all eigenvalues, and a 6x6 multiplier grid"
        ),
    }
}

// ---------------------------------------------------------------------------
// Adjoint characteristic polynomial identity.

/// `char_poly_adjoint(g) = t^3 + 4 det(g) t`, coefficient-exact, against
/// the characteristic polynomial of the explicit 3x3 commutator matrix.
pub fn adjoint_charpoly_suite(seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 3);
    let mut trials = 0u64;
    let mut failures = 0u64;
    for &(ell, prec) in &[(2u64, 8u32), (3, 6), (5, 5)] {
        let ctx = PadicContext::new(ell, prec);
        let m = ctx.modulus();
        for _ in 0..10_000 {
            let g = TracelessMat::from_coords(
                ctx,
                ctx.from_u64(rng.random_range(0..m)),
                ctx.from_u64(rng.random_range(0..m)),
                ctx.from_u64(rng.random_range(0..m)),
            );
            let closed_form = char_poly_adjoint(&g);
            let expanded = adjoint_op(&g).char_poly();
            let expected = MonicPoly::from_elements(
                ctx,
                vec![ctx.zero(), ctx.element(4) * g.det(), ctx.zero()],
            );
            trials += 1;
            if closed_form != expanded || closed_form != expected {
                failures += 1;
            }
        }
    }
    SuiteOutcome {
        name: "adjoint_charpoly".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: format!(
            "{trials} random traceless matrices at l = 2, 3, 5; the closed form \
             t^3 + 4 det(g) t matches the expanded 3x3 characteristic polynomial exactly"
        ),
    }
}

// ---------------------------------------------------------------------------
// Intertwiner reconstruction round trip.

/// Conjugation morphisms by random unimodular matrices, perturbed by noise
/// below working precision: the constructed intertwiner must certify the
/// predicted depth, obey the determinant-valuation cap, and pass the trace
/// congruence.
pub fn inner_reconstruction_suite(seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 4);
    let mut trials = 0u64;
    let mut failures = 0u64;
    for &(ell, prec, s) in &[(3u64, 14u32, 1u32), (5, 12, 1), (2, 18, 2)] {
        let ctx = PadicContext::new(ell, prec);
        let v = ctx.val_of_two();
        // Quality floor for an exact conjugation (alpha = s), pushing the
        // trace-congruence depth to exactly zero.
        let n = 11 * s + 5 * v + 6;
        for _ in 0..200 {
            trials += 1;
            let word = group::random_unimodular(ell, prec, &mut rng, 12);
            let m0 = Mat2::from_elements(word.map(|x| ctx.from_u64(x)));
            let phi = ApproxMorphism::from_conjugation(ctx, s, n, &m0)
                .and_then(|base| base.with_noise(&mut rng, n, n));
            let phi = match phi {
                Ok(p) => p,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            let cert = match construct_intertwiner(&phi) {
                Ok(c) => c,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            let depth = n.saturating_sub(cert.alpha + 6 * s + 4 * v + 6).min(prec);
            let mut ok = cert.alpha == s;
            ok &= cert.certified_precision == depth;
            ok &= cert.m.det().val() <= 4 * s + v;
            for a in phi.domain() {
                let lhs = cert.m * *a.as_mat();
                let rhs = match phi.apply(a) {
                    Some(img) => *img.as_mat() * cert.m,
                    None => {
                        ok = false;
                        break;
                    }
                };
                ok &= lhs.congruent(&rhs, depth);
            }
            ok &= verify_trace_congruence(&phi, &cert);
            if !ok {
                failures += 1;
            }
        }
    }
    SuiteOutcome {
        name: "inner_reconstruction".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: format!(
            "{trials} noisy conjugation morphisms at (3,14,1), (5,12,1), (2,18,2); every \
             intertwiner certifies depth 4s+v, keeps val(det) <= 4s+v, and passes the \
             trace congruence"
        ),
    }
}

// ---------------------------------------------------------------------------
// Product subgroups: pairwise depths predict a contained ball.

const ID2: [u64; 4] = [1, 0, 0, 1];

fn conj_entries(ctx: PadicContext, g: [u64; 4], t: [u64; 4]) -> [u64; 4] {
    let gm = Mat2::from_elements(g.map(|x| ctx.from_u64(x)));
    let tm = Mat2::from_elements(t.map(|x| ctx.from_u64(x)));
    let res = tm * gm * tm.inverse().expect("unimodular twist");
    res.entries().map(|x| x.residue())
}

/// The two elementary generators, duplicated across `blocks` copies, with
/// selected blocks twisted by conjugation.
fn diagonal_gens(
    ctx: PadicContext,
    blocks: usize,
    twists: &[(usize, [u64; 4])],
) -> Vec<Vec<[u64; 4]>> {
    [[1u64, 1, 0, 1], [1, 0, 1, 1]]
        .iter()
        .map(|&g| {
            (0..blocks)
                .map(|b| match twists.iter().find(|(i, _)| *i == b) {
                    Some((_, t)) => conj_entries(ctx, g, *t),
                    None => g,
                })
                .collect()
        })
        .collect()
}

/// Depth-`k` ball generators planted in the listed blocks, identity
/// elsewhere.
fn planted_ball_gens(
    ell: u64,
    prec: u32,
    blocks: usize,
    at: &[usize],
    k: u32,
) -> Vec<Vec<[u64; 4]>> {
    let mut out = Vec::new();
    for &b in at {
        for gen in ball_generators(ell, prec, k) {
            out.push((0..blocks).map(|i| if i == b { gen } else { ID2 }).collect());
        }
    }
    out
}

fn minus_one_in(blocks: usize, at: usize, modulus: u64) -> Vec<[u64; 4]> {
    (0..blocks)
        .map(|i| if i == at { [modulus - 1, 0, 0, modulus - 1] } else { ID2 })
        .collect()
}

struct ProductInstance {
    label: &'static str,
    ell: u64,
    prec: u32,
    blocks: usize,
    gens: Vec<Vec<[u64; 4]>>,
}

fn product_instances() -> Vec<ProductInstance> {
    let mut out = Vec::new();

    // Two blocks mod 8.
    let c2 = PadicContext::new(2, 3);
    let tw2 = [1u64, 1, 1, 2];
    let d2 = diagonal_gens(c2, 2, &[]);
    let ball2 = |at: &[usize]| planted_ball_gens(2, 3, 2, at, 2);
    let mut push2 = |label, gens| {
        out.push(ProductInstance { label, ell: 2, prec: 3, blocks: 2, gens });
    };
    push2("mod8 diagonal", d2.clone());
    push2("mod8 twisted diagonal", diagonal_gens(c2, 2, &[(1, tw2)]));
    push2("mod8 diagonal + ball in block 1", [d2.clone(), ball2(&[0])].concat());
    push2("mod8 diagonal + ball in block 2", [d2.clone(), ball2(&[1])].concat());
    push2("mod8 diagonal + balls in both blocks", [d2.clone(), ball2(&[0, 1])].concat());
    push2("mod8 ball product", ball2(&[0, 1]));
    push2("mod8 diagonal + (Id,-Id)", [d2.clone(), vec![minus_one_in(2, 1, 8)]].concat());
    push2(
        "mod8 diagonal + (Id,-Id) + ball in block 1",
        [d2, vec![minus_one_in(2, 1, 8)], ball2(&[0])].concat(),
    );

    // Three blocks mod 9.
    let c3 = PadicContext::new(3, 2);
    let tw3a = [1u64, 1, 1, 2];
    let tw3b = [2u64, 1, 1, 1];
    let d3 = diagonal_gens(c3, 3, &[]);
    let ball3 = |at: &[usize]| planted_ball_gens(3, 2, 3, at, 1);
    let mut push3 = |label, gens| {
        out.push(ProductInstance { label, ell: 3, prec: 2, blocks: 3, gens });
    };
    push3("mod9 diagonal", d3.clone());
    push3("mod9 twisted diagonal", diagonal_gens(c3, 3, &[(1, tw3a)]));
    push3("mod9 doubly twisted diagonal", diagonal_gens(c3, 3, &[(1, tw3a), (2, tw3b)]));
    push3("mod9 diagonal + ball in block 1", [d3.clone(), ball3(&[0])].concat());
    push3("mod9 diagonal + ball in block 2", [d3.clone(), ball3(&[1])].concat());
    push3("mod9 diagonal + ball in block 3", [d3.clone(), ball3(&[2])].concat());
    push3("mod9 diagonal + balls in blocks 1,2", [d3.clone(), ball3(&[0, 1])].concat());
    push3("mod9 diagonal + balls in blocks 1,3", [d3.clone(), ball3(&[0, 2])].concat());
    push3("mod9 diagonal + balls in blocks 2,3", [d3.clone(), ball3(&[1, 2])].concat());
    push3("mod9 ball product", ball3(&[0, 1, 2]));
    push3(
        "mod9 twisted diagonal + ball in block 1",
        [diagonal_gens(c3, 3, &[(1, tw3a)]), ball3(&[0])].concat(),
    );
    push3("mod9 diagonal + (Id,-Id,Id)", [d3, vec![minus_one_in(3, 1, 9)]].concat());

    out
}

/// Enumerates twenty product subgroups, scans each pair projection for its
/// smallest contained ball, and checks that the predicted blockwise
/// exponents name a ball the subgroup actually contains.
pub fn goursat_products_suite() -> SuiteOutcome {
    let mut trials = 0u64;
    let mut failures = 0u64;
    let mut max_order = 0usize;
    let mut nonvacuous = 0u64;
    let mut notes: Vec<String> = Vec::new();

    for inst in product_instances() {
        trials += 1;
        let closure = match subgroup_closure(inst.ell, inst.prec, inst.blocks, &inst.gens, 600_000)
        {
            Ok(c) => c,
            Err(_) => {
                failures += 1;
                notes.push(format!("{}: closure exceeded the cap", inst.label));
                continue;
            }
        };
        if closure.order() >= 500_000 {
            failures += 1;
            notes.push(format!("{}: order {} too large", inst.label, closure.order()));
            continue;
        }
        max_order = max_order.max(closure.order());

        let floor = if inst.ell == 2 { 2u32 } else { 1 };
        let n = inst.blocks;
        let mut s_matrix = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let proj = closure.project(&[i, j]);
                // The scan always terminates: at depth N the ball is
                // trivial and vacuously contained.
                let s = (floor..=inst.prec)
                    .find(|&s| {
                        contains_ball(&proj, &BallSpec { ell: inst.ell, exponents: vec![s, s] })
                    })
                    .unwrap_or(inst.prec);
                s_matrix[i][j] = u64::from(s);
                s_matrix[j][i] = u64::from(s);
            }
        }
        let exps = match goursat_exponents(&s_matrix, inst.ell, n) {
            Ok(e) => e,
            Err(_) => {
                failures += 1;
                notes.push(format!("{}: side condition rejected", inst.label));
                continue;
            }
        };
        let clamped: Vec<u32> =
            exps.iter().map(|&e| e.min(u64::from(inst.prec)) as u32).collect();
        if clamped.iter().any(|&k| k < inst.prec) {
            nonvacuous += 1;
        }
        if !contains_ball(&closure, &BallSpec { ell: inst.ell, exponents: clamped }) {
            failures += 1;
            notes.push(format!("{}: predicted ball not contained", inst.label));
        }
    }

    let summary = if notes.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", notes.join(" | "))
    };
    SuiteOutcome {
        name: "goursat_products".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: format!(
            "{trials} product subgroups mod 8 (two blocks) and mod 9 (three blocks); largest \
             closure {max_order} elements, {nonvacuous} instances with a nonvacuous exponent \
             prediction{summary}"
        ),
    }
}

// ---------------------------------------------------------------------------
// Lagrange consistency of the ball index.

/// `ball_index(l, s) * |B(s) mod l^N| = |SL2(Z/l^N)|`, with both orders
/// obtained by brute enumeration.
pub fn ball_index_suite() -> SuiteOutcome {
    let mut trials = 0u64;
    let mut failures = 0u64;
    for &(ell, prec, s) in &[(2u64, 3u32, 1u32), (2, 3, 2), (3, 2, 1)] {
        let ctx = PadicContext::new(ell, prec);
        let ball = u128::from(oracle::count_ball(ctx, s));
        let whole = u128::from(oracle::count_unimodular(ctx));
        trials += 1;
        let ok = group::ball_index(ell, s) * ball == whole
            && group::ball_order(ell, prec, s) == ball
            && group::sl2_order(ell, prec) == whole;
        if !ok {
            failures += 1;
        }
    }
    SuiteOutcome {
        name: "ball_index_lagrange".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: "index formula times enumerated ball order equals enumerated group order at \
                 (2,3,1), (2,3,2), (3,2,1)"
            .into(),
    }
}

// ---------------------------------------------------------------------------
// Conjugation-stable lattices gain four digits.

/// Plants conjugation-closed lattices of known depth t <= 3 at l = 5 and
/// checks that the stability certificate yields the scaled special linear
/// algebra at depth t + 4.
pub fn conjugation_gain_suite(seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 7);
    let mut trials = 0u64;
    let mut failures = 0u64;
    for i in 0..100u32 {
        let t = i % 4;
        let ctx = PadicContext::new(5, t + 9);
        let m = ctx.modulus();
        let (a, b, c) = loop {
            let a = rng.random_range(0..m);
            let b = rng.random_range(0..m);
            let c = rng.random_range(0..m);
            if a % 5 != 0 || b % 5 != 0 || c % 5 != 0 {
                break (a, b, c);
            }
        };
        let scale = ctx.power_of_ell(t);
        let seed_mat = TracelessMat::from_coords(
            ctx,
            ctx.from_u64(a) * scale,
            ctx.from_u64(b) * scale,
            ctx.from_u64(c) * scale,
        );
        let span = LieLattice::span(ctx, 1, &[LieVector::from_blocks(&[seed_mat])]);
        trials += 1;
        let ok = match conjugation_closure(&span, 1) {
            Ok(w) => w.min_val() == t && conjugation_stable_gain(&w, 1, t) == Ok(true),
            Err(_) => false,
        };
        if !ok {
            failures += 1;
        }
    }
    SuiteOutcome {
        name: "conjugation_gain".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: format!(
            "{trials} conjugation-closed lattices at l = 5 with planted depth t in 0..=3; \
             every one contains the depth-(t+4) scaled special linear algebra"
        ),
    }
}

// ---------------------------------------------------------------------------
// Constant identities in the bounds report.

/// Every fixed constant the bound evaluator reports, checked as an exact
/// string or integer identity.
pub fn bound_constants_suite() -> SuiteOutcome {
    let inputs = BoundInputs {
        n_curves: 2,
        k_degree: 1,
        heights: vec![1.0, 1.0],
        prime_data: vec![PrimeValuations { ell: 2, v_b0_pair: 2, v_d1: 0, v_d2: 0 }],
    };
    let report = match bounds::compute_report(&inputs) {
        Ok(r) => r,
        Err(e) => {
            return SuiteOutcome {
                name: "bound_constants".into(),
                passed: false,
                trials: 1,
                failures: 1,
                detail: format!("report construction failed: {e}"),
            }
        }
    };
    let c = &report.constants;
    let checks: Vec<(&str, bool)> = vec![
        ("gamma", c.gamma == 10_000_000_000_000),
        ("delta", c.delta == "exp(exp(exp(12)))"),
        ("f_odd_constant", c.f_odd_constant == 800),
        ("f_odd_coefficient", c.f_odd_coefficient == 1024),
        ("f_two_constant", c.f_two_constant == 15421),
        ("f_two_coefficient", c.f_two_coefficient == 19008),
        (
            "adelic_exponent",
            c.adelic_exponent_formula == "5000 * n * (n - 1)"
                && c.adelic_exponent_value == 10_000
                && ConstantsBlock::for_n(3).adelic_exponent_value == 30_000
                && ConstantsBlock::for_n(5).adelic_exponent_value == 100_000,
        ),
        ("alpha_genus_1", c.alpha_genus_1 == 1024),
        ("alpha_genus_2", c.alpha_genus_2 == 8192),
        ("pair_extension_degree", c.pair_extension_degree == 2 * 48 * 48),
        ("two_power_extension_degree", c.two_power_extension_degree == 9 * 65_536),
        ("zeta2_upper", c.zeta2_upper == "1644935/1000000"),
    ];
    let trials = checks.len() as u64;
    let failed: Vec<&str> =
        checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
    SuiteOutcome {
        name: "bound_constants".into(),
        passed: failed.is_empty(),
        trials,
        failures: failed.len() as u64,
        detail: if failed.is_empty() {
            format!("{trials} constant identities hold exactly in the report")
        } else {
            format!("mismatched constants: {}", failed.join(", "))
        },
    }
}

// ---------------------------------------------------------------------------
// Asymptotic dominance and the headline landmark.

/// The closed-form headline bound dominates the assembled product bound on
/// a grid of curve counts, field degrees, and heights; the smallest grid
/// cell is also compared against a recorded landmark value.
pub fn dominance_suite() -> SuiteOutcome {
    let mut trials = 0u64;
    let mut grid_failures = 0u64;
    for &n in &[2u64, 3, 5] {
        for &k in &[1u64, 10, 100] {
            for &h in &[1.0f64, 10.0] {
                trials += 1;
                let heights = vec![h; n as usize];
                if !matches!(bounds::check_implication(n, k, &heights), Ok(true)) {
                    grid_failures += 1;
                }
            }
        }
    }

    // At n = 2, [K:Q] = 1, h = 1 the headline bound degenerates to the
    // pure triple-exponential factor squared, a stable landmark.
    let landmark = match bounds::theorem1_bound(2, 1, &[1.0, 1.0]) {
        Ok(v) => v.loglog10_upper(),
        Err(_) => f64::NAN,
    };
    trials += 1;
    let reference = 70683.8;
    let hit = (landmark - reference).abs() <= 0.1;
    let ln_reading = landmark + std::f64::consts::LN_10.log10();
    let failures = grid_failures + u64::from(!hit);

    SuiteOutcome {
        name: "asymptotic_dominance".into(),
        passed: failures == 0,
        trials,
        failures,
        detail: format!(
            "dominance holds on {} of 18 grid cells at slack 1e-6 (10+ significant digits \
             on double-log values near 7e4); smallest-cell landmark log10(log10(.)) = \
             {landmark:.6} vs reference {reference} +/- 0.1: {}. The reference figure \
             matches log10(ln(.)) = {ln_reading:.6} instead, i.e. a natural-log reading of \
             the inner logarithm; the double-log10 reading cannot land in the stated window.",
            18 - grid_failures,
            if hit { "hit" } else { "missed" },
        ),
    }
}

// ---------------------------------------------------------------------------
// Assembly and the determinism check.

fn core_suites(seed: u64) -> Vec<SuiteOutcome> {
    vec![
        hensel_oracle_suite(seed),
        eigen_defect_suite(seed),
        adjoint_charpoly_suite(seed),
        inner_reconstruction_suite(seed),
        goursat_products_suite(),
        ball_index_suite(),
        conjugation_gain_suite(seed),
        bound_constants_suite(),
        dominance_suite(),
    ]
}

fn determinism_against(first: &[SuiteOutcome], seed: u64) -> SuiteOutcome {
    let second = core_suites(seed);
    let a = serde_json::to_string(first).expect("suite outcomes serialize");
    let b = serde_json::to_string(&second).expect("suite outcomes serialize");
    let passed = a == b;
    SuiteOutcome {
        name: "determinism".into(),
        passed,
        trials: 2,
        failures: u64::from(!passed),
        detail: if passed {
            format!("two passes with the same seed serialize to the same {} bytes", a.len())
        } else {
            "two passes with the same seed diverged".into()
        },
    }
}

/// Runs the eight seeded/constructive suites twice and compares the
/// serialized outcomes byte for byte.
pub fn determinism_suite(seed: u64) -> SuiteOutcome {
    determinism_against(&core_suites(seed), seed)
}

/// Runs every suite (the determinism check re-runs the other nine, so the
/// whole pass costs two evaluations) and assembles the report.
pub fn run_all(seed: u64) -> VerifyReport {
    let mut suites = core_suites(seed);
    suites.push(determinism_against(&suites, seed));
    let all_passed = suites.iter().all(|s| s.passed);
    VerifyReport { seed, all_passed, suites }
}
