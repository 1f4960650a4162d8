//! Finite congruence-subgroup machinery in products of SL2(Z/l^N):
//! deterministic subgroup closure, ball indices and generators,
//! ball-containment tests, and the fibered-product index predictions.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::collections::VecDeque;
use thiserror::Error;

use crate::bounds::{zeta2_upper, BigLogNumber};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    /// The closure grew past the configured element cap.
    #[error("subgroup closure exceeded the cap of {0} elements")]
    SizeCapExceeded(usize),
    /// A generator block is not in SL2.
    #[error("generator block has determinant {det} != 1 mod {modulus}")]
    NotUnimodular { det: u64, modulus: u64 },
    /// A formula was evaluated outside its stated parameter range.
    #[error("side condition violated: {0}")]
    SideConditionViolated(&'static str),
    /// Structurally malformed input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Multiply two 2x2 blocks mod `m` (row-major [a, b, c, d]).
fn block_mul(m: u64, a: &[u64], b: &[u64], out: &mut [u64]) {
    let mm = m as u128;
    out[0] = ((a[0] as u128 * b[0] as u128 + a[1] as u128 * b[2] as u128) % mm) as u64;
    out[1] = ((a[0] as u128 * b[1] as u128 + a[1] as u128 * b[3] as u128) % mm) as u64;
    out[2] = ((a[2] as u128 * b[0] as u128 + a[3] as u128 * b[2] as u128) % mm) as u64;
    out[3] = ((a[2] as u128 * b[1] as u128 + a[3] as u128 * b[3] as u128) % mm) as u64;
}

fn block_det(m: u64, a: &[u64]) -> u64 {
    let mm = m as u128;
    let pos = a[0] as u128 * a[3] as u128 % mm;
    let neg = a[1] as u128 * a[2] as u128 % mm;
    ((pos + mm - neg) % mm) as u64
}

fn modulus_of(ell: u64, precision: u32) -> u64 {
    ell.checked_pow(precision).expect("modulus must fit in u64")
}

/// An explicitly enumerated subgroup of SL2(Z/l^N)^blocks. Elements are
/// flat tuples of row-major 2x2 blocks, kept in deterministic discovery
/// order.
#[derive(Debug, Clone)]
pub struct FiniteMatrixGroup {
    ell: u64,
    precision: u32,
    modulus: u64,
    blocks: usize,
    elements: Vec<Box<[u64]>>,
    lookup: HashSet<Box<[u64]>>,
}

impl FiniteMatrixGroup {
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in discovery order, each a flat `[u64; 4 * blocks]` slice.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = &[u64]> {
        self.elements.iter().map(|e| &**e)
    }

    /// Membership of a flat tuple (entries are reduced mod the modulus).
    pub fn contains(&self, tuple: &[u64]) -> bool {
        assert_eq!(tuple.len(), 4 * self.blocks, "tuple width mismatch");
        let reduced: Box<[u64]> = tuple.iter().map(|&x| x % self.modulus).collect();
        self.lookup.contains(&reduced)
    }

    /// Projection onto the listed blocks (a subgroup of the smaller
    /// product), deduplicated in first-occurrence order.
    pub fn project(&self, keep: &[usize]) -> FiniteMatrixGroup {
        assert!(!keep.is_empty() && keep.iter().all(|&i| i < self.blocks));
        let mut elements = Vec::new();
        let mut lookup = HashSet::new();
        for e in &self.elements {
            let mut proj = Vec::with_capacity(4 * keep.len());
            for &b in keep {
                proj.extend_from_slice(&e[4 * b..4 * b + 4]);
            }
            let proj: Box<[u64]> = proj.into();
            if lookup.insert(proj.clone()) {
                elements.push(proj);
            }
        }
        FiniteMatrixGroup {
            ell: self.ell,
            precision: self.precision,
            modulus: self.modulus,
            blocks: keep.len(),
            elements,
            lookup,
        }
    }
}

/// Default element cap for closures.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000_000;

/// Deterministic BFS closure of the subgroup generated by `generators`
/// inside SL2(Z/l^N)^blocks. Each generator is one flat tuple of blocks.
pub fn subgroup_closure(
    ell: u64,
    precision: u32,
    blocks: usize,
    generators: &[Vec<[u64; 4]>],
    cap: usize,
) -> Result<FiniteMatrixGroup, GroupError> {
    assert!(blocks >= 1);
    let m = modulus_of(ell, precision);
    let mut gens: Vec<Box<[u64]>> = Vec::with_capacity(generators.len());
    for g in generators {
        if g.len() != blocks {
            return Err(GroupError::InvalidInput(format!(
                "generator has {} blocks, expected {blocks}",
                g.len()
            )));
        }
        let flat: Box<[u64]> =
            g.iter().flat_map(|b| b.iter().map(|&x| x % m)).collect();
        for b in 0..blocks {
            let det = block_det(m, &flat[4 * b..4 * b + 4]);
            if det != 1 {
                return Err(GroupError::NotUnimodular { det, modulus: m });
            }
        }
        gens.push(flat);
    }

    let mut identity = vec![0u64; 4 * blocks];
    for b in 0..blocks {
        identity[4 * b] = 1 % m;
        identity[4 * b + 3] = 1 % m;
    }
    let identity: Box<[u64]> = identity.into();

    let mut elements = vec![identity.clone()];
    let mut lookup: HashSet<Box<[u64]>> = HashSet::new();
    lookup.insert(identity.clone());
    let mut queue = VecDeque::new();
    queue.push_back(identity);

    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let mut y = vec![0u64; 4 * blocks];
            for b in 0..blocks {
                block_mul(m, &x[4 * b..4 * b + 4], &g[4 * b..4 * b + 4], &mut y[4 * b..4 * b + 4]);
            }
            let y: Box<[u64]> = y.into();
            if lookup.insert(y.clone()) {
                if elements.len() >= cap {
                    return Err(GroupError::SizeCapExceeded(cap));
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }

    Ok(FiniteMatrixGroup { ell, precision, modulus: m, blocks, elements, lookup })
}

/// Index of the depth-`s` congruence ball in SL2(Z_l):
/// 1 for s = 0, (l^2 - 1) l^{3s - 2} for s >= 1.
pub fn ball_index(ell: u64, s: u32) -> u128 {
    if s == 0 {
        return 1;
    }
    let e = ell as u128;
    (e * e - 1)
        .checked_mul(e.checked_pow(3 * s - 2).expect("ball index overflow"))
        .expect("ball index overflow")
}

/// |SL2(Z/l^N)| = l^{3N - 2} (l^2 - 1).
pub fn sl2_order(ell: u64, precision: u32) -> u128 {
    let e = ell as u128;
    e.checked_pow(3 * precision - 2)
        .and_then(|p| p.checked_mul(e * e - 1))
        .expect("group order overflow")
}

/// |B_l(s) mod l^N| for 0 <= s <= N.
pub fn ball_order(ell: u64, precision: u32, s: u32) -> u128 {
    assert!(s <= precision);
    if s == 0 {
        return sl2_order(ell, precision);
    }
    (ell as u128).checked_pow(3 * (precision - s)).expect("ball order overflow")
}

fn inv_mod(a: u64, m: u64) -> u64 {
    // extended Euclid; `a` must be a unit mod m
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "not a unit");
    t0.rem_euclid(m as i128) as u64
}

/// Generators of the image of B_l(k) in SL2(Z/l^N): the two elementary
/// matrices for k = 0, and Id + l^k e12, Id + l^k e21, the (1 + l^k)
/// diagonal unit for 1 <= k < N. For k >= N the ball is trivial and the
/// list is empty. The returned sets generate the full ball image (checked
/// against exhaustive enumeration in the tests).
pub fn ball_generators(ell: u64, precision: u32, k: u32) -> Vec<[u64; 4]> {
    let m = modulus_of(ell, precision);
    if k >= precision {
        return Vec::new();
    }
    if k == 0 {
        return vec![[1, 1, 0, 1], [1, 0, 1, 1]];
    }
    let p = ell.pow(k) % m;
    let u = (1 + p) % m;
    vec![[1, p, 0, 1], [1, 0, p, 1], [u, 0, 0, inv_mod(u, m)]]
}

/// Which ball to test for, blockwise: exponent k_i in block i.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BallSpec {
    pub ell: u64,
    pub exponents: Vec<u32>,
}

/// Whether `g` contains the product of blockwise balls B(k_1) x ... x B(k_n),
/// each embedded with the identity in the other blocks. Certified by
/// membership of every blockwise ball generator.
pub fn contains_ball(g: &FiniteMatrixGroup, spec: &BallSpec) -> bool {
    assert_eq!(spec.ell, g.ell, "prime mismatch");
    assert_eq!(spec.exponents.len(), g.blocks, "block count mismatch");
    assert!(
        spec.exponents.iter().all(|&k| k <= g.precision),
        "ball exponent exceeds working precision"
    );
    let m = g.modulus;
    for (i, &k) in spec.exponents.iter().enumerate() {
        for gen in ball_generators(g.ell, g.precision, k) {
            let mut tuple = vec![0u64; 4 * g.blocks];
            for b in 0..g.blocks {
                if b == i {
                    tuple[4 * b..4 * b + 4].copy_from_slice(&gen);
                } else {
                    tuple[4 * b] = 1 % m;
                    tuple[4 * b + 3] = 1 % m;
                }
            }
            if !g.contains(&tuple) {
                return false;
            }
        }
    }
    true
}

/// Blockwise ball exponents predicted for a fibered product with pairwise
/// depths `s_matrix`: the i-th exponent is sum_{j != i} s_ij + (n - 2) v,
/// v = val_l(2). Side conditions: s_ij >= 2 when l = 2, >= 1 when l = 3.
pub fn goursat_exponents(
    s_matrix: &[Vec<u64>],
    ell: u64,
    n: usize,
) -> Result<Vec<u64>, GroupError> {
    if s_matrix.len() != n || s_matrix.iter().any(|row| row.len() != n) {
        return Err(GroupError::InvalidInput(format!("s-matrix must be {n}x{n}")));
    }
    for i in 0..n {
        if s_matrix[i][i] != 0 {
            return Err(GroupError::InvalidInput("s-matrix diagonal must be zero".into()));
        }
        for j in 0..n {
            if s_matrix[i][j] != s_matrix[j][i] {
                return Err(GroupError::InvalidInput("s-matrix must be symmetric".into()));
            }
            if i != j {
                if ell == 2 && s_matrix[i][j] < 2 {
                    return Err(GroupError::SideConditionViolated(
                        "pairwise depths must be >= 2 at l = 2",
                    ));
                }
                if ell == 3 && s_matrix[i][j] < 1 {
                    return Err(GroupError::SideConditionViolated(
                        "pairwise depths must be >= 1 at l = 3",
                    ));
                }
            }
        }
    }
    let v = u64::from(ell == 2);
    Ok((0..n)
        .map(|i| {
            (0..n).filter(|&j| j != i).map(|j| s_matrix[i][j]).sum::<u64>()
                + (n as u64 - 2) * v
        })
        .collect())
}

/// Index bound for the fibered product: 2^{3n(n-2)} zeta(2)^{n(n-1)} c^{n(n-1)/2},
/// with zeta(2) replaced by its rational upper bound.
pub fn goursat_index_bound(c: u64, n: u64) -> Result<BigLogNumber, GroupError> {
    if c < 1 || n < 2 {
        return Err(GroupError::SideConditionViolated("need c >= 1 and n >= 2"));
    }
    let two_part = BigLogNumber::from_u64(2).pow_u64(3 * n * (n - 2));
    let zeta_part = BigLogNumber::from_rational(zeta2_upper()).pow_u64(n * (n - 1));
    let c_part = BigLogNumber::from_u64(c).pow_u64(n * (n - 1) / 2);
    Ok(two_part.mul(&zeta_part).mul(&c_part))
}

/// Wire format: {ell, N, n, generators}.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupSpec {
    pub ell: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    #[serde(rename = "n")]
    pub blocks: usize,
    pub generators: Vec<Vec<[u64; 4]>>,
}

impl GroupSpec {
    pub fn closure(&self, cap: usize) -> Result<FiniteMatrixGroup, GroupError> {
        subgroup_closure(self.ell, self.precision, self.blocks, &self.generators, cap)
    }
}

/// A pseudorandom SL2(Z/l^N) element: a word of `len` random elementary
/// matrices. Deterministic for a fixed RNG state.
pub fn random_unimodular(ell: u64, precision: u32, rng: &mut impl rand::Rng, len: usize) -> [u64; 4] {
    let m = modulus_of(ell, precision);
    let mut acc = [1u64, 0, 0, 1];
    let mut out = [0u64; 4];
    for step in 0..len.max(1) {
        let t = rng.random_range(0..m);
        let gen = if step % 2 == 0 { [1, t, 0, 1] } else { [1, 0, t, 1] };
        block_mul(m, &acc, &gen, &mut out);
        acc = out;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn full_sl2(ell: u64, precision: u32) -> FiniteMatrixGroup {
        subgroup_closure(
            ell,
            precision,
            1,
            &[vec![[1, 1, 0, 1]], vec![[1, 0, 1, 1]]],
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap()
    }

    #[test]
    fn ball_index_examples() {
        assert_eq!(ball_index(3, 1), 24);
        assert_eq!(ball_index(2, 2), 48);
        assert_eq!(ball_index(7, 0), 1);
        assert_eq!(ball_index(2, 1), 6);
    }

    #[test]
    fn closure_examples() {
        let trivial = subgroup_closure(3, 1, 1, &[], 10).unwrap();
        assert_eq!(trivial.order(), 1);
        assert_eq!(full_sl2(2, 1).order(), 6);
        let ball = subgroup_closure(
            3,
            2,
            1,
            &ball_generators(3, 2, 1).into_iter().map(|g| vec![g]).collect::<Vec<_>>(),
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap();
        assert_eq!(ball.order(), 27);
    }

    #[test]
    fn closure_rejects_bad_generators() {
        let err = subgroup_closure(3, 2, 1, &[vec![[2, 0, 0, 1]]], 100).unwrap_err();
        assert_eq!(err, GroupError::NotUnimodular { det: 2, modulus: 9 });
        let err = subgroup_closure(3, 2, 1, &[vec![[1, 1, 0, 1]]], 5).unwrap_err();
        assert_eq!(err, GroupError::SizeCapExceeded(5));
    }

    #[test]
    fn enumerated_orders_match_closed_form() {
        for (ell, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
            let g = full_sl2(ell, n);
            assert_eq!(g.order() as u128, sl2_order(ell, n), "at ({ell},{n})");
        }
    }

    #[test]
    fn lagrange_consistency() {
        for (ell, n, s) in [(2u64, 3u32, 1u32), (2, 3, 2), (3, 2, 1)] {
            let gens: Vec<_> = ball_generators(ell, n, s).into_iter().map(|g| vec![g]).collect();
            let ball = subgroup_closure(ell, n, 1, &gens, DEFAULT_CLOSURE_CAP).unwrap();
            assert_eq!(
                ball_index(ell, s) * ball.order() as u128,
                sl2_order(ell, n),
                "at ({ell},{n},{s})"
            );
        }
    }

    #[test]
    fn ball_generators_generate_the_full_ball() {
        // the containment test below relies on this
        for (ell, n, s) in [(2u64, 2u32, 1u32), (2, 3, 1), (2, 3, 2), (2, 4, 1), (3, 2, 1), (3, 3, 2)]
        {
            let gens: Vec<_> = ball_generators(ell, n, s).into_iter().map(|g| vec![g]).collect();
            let ball = subgroup_closure(ell, n, 1, &gens, DEFAULT_CLOSURE_CAP).unwrap();
            assert_eq!(ball.order() as u128, ball_order(ell, n, s), "at ({ell},{n},{s})");
        }
    }

    #[test]
    fn contains_ball_examples() {
        let g = full_sl2(3, 2);
        assert!(contains_ball(&g, &BallSpec { ell: 3, exponents: vec![0] }));

        let gens: Vec<_> = ball_generators(3, 2, 1).into_iter().map(|g| vec![g]).collect();
        let ball = subgroup_closure(3, 2, 1, &gens, DEFAULT_CLOSURE_CAP).unwrap();
        assert!(contains_ball(&ball, &BallSpec { ell: 3, exponents: vec![1] }));
        assert!(!contains_ball(&ball, &BallSpec { ell: 3, exponents: vec![0] }));

        // diagonal copy of SL2(Z/3) inside the square: no kernel directions
        let diag = subgroup_closure(
            3,
            1,
            2,
            &[vec![[1, 1, 0, 1], [1, 1, 0, 1]], vec![[1, 0, 1, 1], [1, 0, 1, 1]]],
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap();
        assert_eq!(diag.order(), 24);
        assert!(!contains_ball(&diag, &BallSpec { ell: 3, exponents: vec![0, 0] }));

        // full product contains the zero ball
        let full2 = subgroup_closure(
            3,
            1,
            2,
            &[
                vec![[1, 1, 0, 1], [1, 0, 0, 1]],
                vec![[1, 0, 1, 1], [1, 0, 0, 1]],
                vec![[1, 0, 0, 1], [1, 1, 0, 1]],
                vec![[1, 0, 0, 1], [1, 0, 1, 1]],
            ],
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap();
        assert_eq!(full2.order(), 576);
        assert!(contains_ball(&full2, &BallSpec { ell: 3, exponents: vec![0, 0] }));

        // depth at the cap is vacuously contained (the ball is trivial)
        assert!(contains_ball(&ball, &BallSpec { ell: 3, exponents: vec![2] }));
    }

    #[test]
    fn projection_recovers_factors() {
        let diag = subgroup_closure(
            3,
            1,
            2,
            &[vec![[1, 1, 0, 1], [1, 1, 0, 1]], vec![[1, 0, 1, 1], [1, 0, 1, 1]]],
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap();
        let p = diag.project(&[0]);
        assert_eq!(p.order(), 24);
        assert!(contains_ball(&p, &BallSpec { ell: 3, exponents: vec![0] }));
    }

    #[test]
    fn goursat_exponent_examples() {
        let s2 = vec![vec![0, 3], vec![3, 0]];
        assert_eq!(goursat_exponents(&s2, 5, 2).unwrap(), vec![3, 3]);
        let s3 = vec![vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]];
        assert_eq!(goursat_exponents(&s3, 2, 3).unwrap(), vec![5, 5, 5]);
        let z3 = vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 0]];
        assert_eq!(goursat_exponents(&z3, 5, 3).unwrap(), vec![0, 0, 0]);
        let s1 = vec![vec![0, 1], vec![1, 0]];
        assert!(matches!(
            goursat_exponents(&s1, 2, 2),
            Err(GroupError::SideConditionViolated(_))
        ));
        assert!(matches!(
            goursat_exponents(&z3, 3, 3),
            Err(GroupError::SideConditionViolated(_))
        ));
        let asym = vec![vec![0, 1], vec![2, 0]];
        assert!(goursat_exponents(&asym, 5, 2).is_err());
    }

    #[test]
    fn goursat_bound_examples() {
        let pi4_36 = std::f64::consts::PI.powi(4) / 36.0;
        let b = goursat_index_bound(1, 2).unwrap();
        let v = match &b {
            BigLogNumber::Exact(r) => num_traits::ToPrimitive::to_f64(r).unwrap(),
            _ => panic!("expected exact tier"),
        };
        assert!(v > pi4_36 && v < 2.70582, "got {v}");
        let b4 = goursat_index_bound(4, 2).unwrap();
        let v4 = match &b4 {
            BigLogNumber::Exact(r) => num_traits::ToPrimitive::to_f64(r).unwrap(),
            _ => panic!("expected exact tier"),
        };
        assert!((v4 - 4.0 * v).abs() < 1e-9, "got {v4}");
        let b3 = goursat_index_bound(1, 3).unwrap();
        let v3 = match &b3 {
            BigLogNumber::Exact(r) => num_traits::ToPrimitive::to_f64(r).unwrap(),
            _ => panic!("expected exact tier"),
        };
        assert!(v3 < 10150.1 && v3 > 10142.0, "got {v3}");
    }

    #[test]
    fn group_spec_round_trips() {
        let spec = GroupSpec {
            ell: 3,
            precision: 2,
            blocks: 1,
            generators: vec![vec![[1, 1, 0, 1]], vec![[1, 0, 1, 1]]],
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"N\":2") && json.contains("\"n\":1"));
        let back: GroupSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.closure(DEFAULT_CLOSURE_CAP).unwrap().order() as u128, sl2_order(3, 2));
    }

    #[test]
    fn closure_is_group_closed() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for (ell, n) in [(2u64, 2u32), (3, 1), (5, 1)] {
            let m = ell.pow(n);
            let gens: Vec<Vec<[u64; 4]>> = (0..2)
                .map(|_| vec![random_unimodular(ell, n, &mut rng, 6)])
                .collect();
            let g = subgroup_closure(ell, n, 1, &gens, DEFAULT_CLOSURE_CAP).unwrap();
            // sample products and inverses stay inside
            let elems: Vec<_> = g.elements().map(|e| e.to_vec()).collect();
            for i in (0..elems.len()).step_by(elems.len() / 20 + 1) {
                for j in (0..elems.len()).step_by(elems.len() / 10 + 1) {
                    let mut prod = [0u64; 4];
                    block_mul(m, &elems[i], &elems[j], &mut prod);
                    assert!(g.contains(&prod));
                }
                let e = &elems[i];
                let inv = [e[3], (m - e[1] % m) % m, (m - e[2] % m) % m, e[0]];
                assert!(g.contains(&inv));
            }
        }
    }
}
