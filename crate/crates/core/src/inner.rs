//! Approximate inner morphisms of sl2 over Z/l^N: construct an
//! intertwining matrix from an approximate Lie-algebra morphism by the
//! highest-weight procedure (adjoint eigenvalue near 2l^s, eigenvector,
//! second column from the lowering image), certify its congruences at
//! explicit depths, and provide the trace-congruence, graph-defect, and
//! scalar-matching falsification checks built on top of it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LieLattice, LinearSolver, SpecialBasis};
use crate::matrix::{char_poly_adjoint, Mat2, MatrixError, TracelessMat};
use crate::padic::{hensel_lift, sqrt_one_plus, PadicContext, PadicError, PadicInt};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InnerError {
    /// One of the raising/lowering images vanishes at full precision.
    #[error("a raising/lowering image vanishes at full precision")]
    Degenerate,
    /// A stated hypothesis of the construction fails on the given data.
    #[error("hypothesis fails: {0}")]
    HypothesisFails(&'static str),
    /// The working precision is too small to certify the construction.
    #[error("precision {cap} is too small to certify the construction")]
    PrecisionExhausted { cap: u32 },
    /// The shared determinant is not a square unit.
    #[error("determinant is not a square unit")]
    NonSquareDet,
    /// Two-adic scalar extraction cannot pick a square-root branch.
    #[error("two-adic trace is not 2 mod 8; square-root branch is ambiguous")]
    BranchAmbiguity,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// An approximate morphism phi of sl2-lattices: phi is given on a basis of
/// its domain (which must contain l^s sl2) and satisfies
/// [phi(a), phi(b)] = phi([a, b]) mod l^n. The images of the three scaled
/// standard vectors l^s e12, l^s h, l^s e21 are precomputed.
#[derive(Debug, Clone)]
pub struct ApproxMorphism {
    s: u32,
    n: u32,
    domain: Vec<TracelessMat>,
    images: Vec<TracelessMat>,
    x_img: TracelessMat,
    h_img: TracelessMat,
    y_img: TracelessMat,
}

impl ApproxMorphism {
    /// Build from explicit (basis vector, image) pairs. The scaled
    /// standard vectors must lie in the span of the domain basis.
    pub fn from_pairs(
        s: u32,
        n: u32,
        domain: Vec<TracelessMat>,
        images: Vec<TracelessMat>,
    ) -> Result<Self, InnerError> {
        assert_eq!(domain.len(), images.len(), "each basis vector needs an image");
        assert!(!domain.is_empty());
        let ctx = domain[0].context();
        let coords: Vec<Vec<PadicInt>> = domain.iter().map(|d| d.coords().to_vec()).collect();
        let solver = LinearSolver::new(ctx, 3, &coords);
        let ls = ctx.power_of_ell(s);
        let image_of = |target: [PadicInt; 3]| -> Result<TracelessMat, InnerError> {
            let c = solver.solve(&target).ok_or(InnerError::HypothesisFails(
                "domain does not contain the scaled standard basis",
            ))?;
            let mut acc = TracelessMat::zero(ctx);
            for (ci, im) in c.iter().zip(&images) {
                acc = acc + im.scale(*ci);
            }
            Ok(acc)
        };
        let x_img = image_of([ls, ctx.zero(), ctx.zero()])?;
        let h_img = image_of([ctx.zero(), ls, ctx.zero()])?;
        let y_img = image_of([ctx.zero(), ctx.zero(), ls])?;
        Ok(ApproxMorphism { s, n, domain, images, x_img, h_img, y_img })
    }

    /// The exact morphism g -> m0 g m0^{-1} restricted to l^s sl2; this is
    /// a true morphism, so any congruence quality n may be claimed.
    pub fn from_conjugation(
        ctx: PadicContext,
        s: u32,
        n: u32,
        m0: &Mat2,
    ) -> Result<Self, InnerError> {
        let ls = ctx.power_of_ell(s);
        let domain = vec![
            TracelessMat::from_coords(ctx, ls, ctx.zero(), ctx.zero()),
            TracelessMat::from_coords(ctx, ctx.zero(), ls, ctx.zero()),
            TracelessMat::from_coords(ctx, ctx.zero(), ctx.zero(), ls),
        ];
        let images = domain
            .iter()
            .map(|d| d.conjugate_by(m0))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_pairs(s, n, domain, images)
    }

    /// Perturb every image by an independent traceless matrix divisible by
    /// l^depth, reclaiming congruence quality `n`.
    pub fn with_noise(
        &self,
        rng: &mut impl rand::Rng,
        depth: u32,
        n: u32,
    ) -> Result<Self, InnerError> {
        let ctx = self.context();
        let scale = ctx.power_of_ell(depth);
        let noisy = self
            .images
            .iter()
            .map(|im| {
                let r = TracelessMat::from_coords(
                    ctx,
                    ctx.from_u64(rng.random_range(0..ctx.modulus())),
                    ctx.from_u64(rng.random_range(0..ctx.modulus())),
                    ctx.from_u64(rng.random_range(0..ctx.modulus())),
                );
                *im + r.scale(scale)
            })
            .collect();
        Self::from_pairs(self.s, n, self.domain.clone(), noisy)
    }

    pub fn context(&self) -> PadicContext {
        self.domain[0].context()
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn domain(&self) -> &[TracelessMat] {
        &self.domain
    }

    pub fn images(&self) -> &[TracelessMat] {
        &self.images
    }

    pub fn x_image(&self) -> &TracelessMat {
        &self.x_img
    }

    pub fn h_image(&self) -> &TracelessMat {
        &self.h_img
    }

    pub fn y_image(&self) -> &TracelessMat {
        &self.y_img
    }

    /// Evaluate phi on an arbitrary element of the domain span.
    pub fn apply(&self, g: &TracelessMat) -> Option<TracelessMat> {
        let ctx = self.context();
        let coords: Vec<Vec<PadicInt>> = self.domain.iter().map(|d| d.coords().to_vec()).collect();
        let solver = LinearSolver::new(ctx, 3, &coords);
        let c = solver.solve(&g.coords())?;
        let mut acc = TracelessMat::zero(ctx);
        for (ci, im) in c.iter().zip(&self.images) {
            acc = acc + im.scale(*ci);
        }
        Some(acc)
    }

    /// Spot-check the defining congruence on the three scaled standard
    /// vectors: their brackets have closed forms, e.g.
    /// [l^s e12, l^s e21] = l^s * (l^s h).
    pub fn bracket_defect_ok(&self) -> bool {
        let ctx = self.context();
        let depth = self.n.min(ctx.precision());
        let ls = ctx.power_of_ell(self.s);
        let two_ls = ctx.element(2) * ls;
        let xy = TracelessMat::bracket(&self.x_img, &self.y_img);
        let hx = TracelessMat::bracket(&self.h_img, &self.x_img);
        let hy = TracelessMat::bracket(&self.h_img, &self.y_img);
        xy.congruent(&self.h_img.scale(ls), depth)
            && hx.congruent(&self.x_img.scale(two_ls), depth)
            && hy.congruent(&self.y_img.scale(ctx.element(-2) * ls), depth)
    }
}

/// Minimal alpha such that both the raising and lowering images are
/// nonzero mod l^{alpha+1}: the larger of their minimal entry valuations.
pub fn alpha_of(phi: &ApproxMorphism) -> Result<u32, InnerError> {
    if phi.x_img.is_zero() || phi.y_img.is_zero() {
        return Err(InnerError::Degenerate);
    }
    Ok(phi.x_img.min_val().max(phi.y_img.min_val()))
}

/// The intertwining matrix together with its certified congruence data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerCertificate {
    pub m: Mat2,
    pub alpha: u32,
    /// All intertwining congruences hold mod l^certified_precision.
    pub certified_precision: u32,
    /// val(det m) never exceeds this.
    pub det_valuation_bound: u32,
}

/// Build the intertwining matrix M with M g = phi(g) M mod l^certified for
/// every g in the domain. Procedure: (1) the characteristic polynomial of
/// the adjoint operator of phi(l^s h) has a root near 2 l^s, found by
/// Newton lifting when it is not exact; (2) half of it is the eigenvalue
/// mu of phi(l^s h), and the minimal-valuation column of
/// adj(phi(l^s h) - mu Id), normalized to a unit coordinate, is an exact
/// eigenvector v+; (3) M has columns l^s v+ and phi(l^s e21) v+, divided
/// by l^delta with delta the minimal entry valuation.
pub fn construct_intertwiner(phi: &ApproxMorphism) -> Result<InnerCertificate, InnerError> {
    let ctx = phi.context();
    let cap = ctx.precision();
    let (s, n) = (phi.s(), phi.n());
    let v = ctx.val_of_two();
    let alpha = alpha_of(phi)?;
    if n < alpha + 10 * s + 5 * v + 6 {
        return Err(InnerError::HypothesisFails(
            "congruence quality n is below alpha + 10s + 5v + 6",
        ));
    }
    let certified = cap.min(n - alpha - 6 * s - 4 * v - 6);

    // eigenvalue of the adjoint operator near 2 l^s
    let p = char_poly_adjoint(phi.h_image());
    let t0 = ctx.element(2) * ctx.power_of_ell(s);
    let lambda = if p.eval(t0).is_zero() {
        t0 // exact root; Newton has nothing to improve
    } else {
        match hensel_lift(&p, t0) {
            Ok(root) => root,
            Err(PadicError::PrecisionExhausted { cap }) => {
                return Err(InnerError::PrecisionExhausted { cap })
            }
            Err(PadicError::HypothesisFails { .. }) => {
                return Err(InnerError::HypothesisFails(
                    "Newton hypothesis fails for the adjoint eigenvalue",
                ))
            }
            Err(e) => return Err(InnerError::Padic(e)),
        }
    };
    let mu = ctx.halve(lambda);
    // invariant: mu = l^s mod l^{n - alpha - 2s - 4v}
    debug_assert!(mu.congruent(ctx.power_of_ell(s), cap.min(n - alpha - 2 * s - 4 * v)));

    // exact eigenvector from the adjugate, normalized to a unit coordinate
    let a = *phi.h_image().as_mat() - Mat2::scalar(mu);
    let adj = a.adjugate();
    let cols = [
        [adj.entry(0, 0), adj.entry(1, 0)],
        [adj.entry(0, 1), adj.entry(1, 1)],
    ];
    let vals = [
        cols[0][0].val().min(cols[0][1].val()),
        cols[1][0].val().min(cols[1][1].val()),
    ];
    let pick = if vals[0] <= vals[1] { 0 } else { 1 };
    if vals[pick] >= cap {
        return Err(InnerError::PrecisionExhausted { cap });
    }
    let v_plus = [cols[pick][0].shift_down(vals[pick]), cols[pick][1].shift_down(vals[pick])];
    let v_minus = phi.y_image().as_mat().mul_vec(v_plus);

    let ls = ctx.power_of_ell(s);
    let m_tilde = Mat2::from_elements([ls * v_plus[0], v_minus[0], ls * v_plus[1], v_minus[1]]);
    let delta = m_tilde.min_val();
    if delta >= cap {
        return Err(InnerError::PrecisionExhausted { cap });
    }
    debug_assert!(delta <= s, "the first column realizes valuation s");
    let te = m_tilde.entries();
    let m = Mat2::from_elements([
        te[0].shift_down(delta),
        te[1].shift_down(delta),
        te[2].shift_down(delta),
        te[3].shift_down(delta),
    ]);

    let det_valuation_bound = 4 * s + v;
    if m.det().val() > det_valuation_bound && det_valuation_bound < cap {
        return Err(InnerError::HypothesisFails(
            "determinant valuation exceeds the certified bound",
        ));
    }
    for (g, img) in phi.domain().iter().zip(phi.images()) {
        let left = m * *g.as_mat();
        let right = *img.as_mat() * m;
        if !left.congruent(&right, certified) {
            return Err(InnerError::HypothesisFails(
                "intertwining congruence fails at the certified depth",
            ));
        }
    }
    Ok(InnerCertificate { m, alpha, certified_precision: certified, det_valuation_bound })
}

/// Check tr(phi(g)^2) = tr(g^2) mod l^{n - alpha - 10s - 5v - 6} on the
/// domain basis and all pairwise sums. False is a falsification signal.
pub fn verify_trace_congruence(phi: &ApproxMorphism, cert: &InnerCertificate) -> bool {
    let ctx = phi.context();
    let v = ctx.val_of_two();
    let depth = ctx
        .precision()
        .min(phi.n().saturating_sub(cert.alpha + 10 * phi.s() + 5 * v + 6));
    let mut samples: Vec<(TracelessMat, TracelessMat)> = Vec::new();
    for (g, img) in phi.domain().iter().zip(phi.images()) {
        samples.push((*g, *img));
    }
    let k = phi.domain().len();
    for i in 0..k {
        for j in (i + 1)..k {
            samples.push((
                phi.domain()[i] + phi.domain()[j],
                phi.images()[i] + phi.images()[j],
            ));
        }
    }
    samples.iter().all(|(g, img)| {
        let lhs = (*img.as_mat() * *img.as_mat()).trace();
        let rhs = (*g.as_mat() * *g.as_mat()).trace();
        lhs.congruent(rhs, depth)
    })
}

/// Whether every canonical basis vector (l1, l2) of a two-block lattice
/// satisfies l2 = phi(l1) mod l^t, where phi maps a_i to b_i from the
/// special basis. Kernel rows have l1 = 0, so for them this is the depth
/// condition l2 = 0 mod l^t.
pub fn graph_defect(l: &LieLattice, t: u32, sb: &SpecialBasis) -> bool {
    assert_eq!(l.blocks(), 2, "graph defect is a two-block statement");
    let ctx = l.context();
    let depth = t.min(ctx.precision());
    let a_coords: Vec<Vec<PadicInt>> = sb.pairs.iter().map(|(a, _)| a.coords().to_vec()).collect();
    let solver = LinearSolver::new(ctx, 3, &a_coords);
    for row in l.basis() {
        let l1 = row.block(0);
        let l2 = row.block(1);
        let Some(c) = solver.solve(&l1.coords()) else {
            return false; // projection escapes the a-span: not a graph
        };
        let mut img = TracelessMat::zero(ctx);
        for (ci, (_, b)) in c.iter().zip(sb.pairs.iter()) {
            img = img + b.scale(*ci);
        }
        if !l2.congruent(&img, depth) {
            return false;
        }
    }
    true
}

/// Square root of a unit, on the branch congruent to 1 mod l (mod 4 for
/// l = 2). For odd l the mod-l root is found by scanning the l residues.
fn square_root_of_unit(u: PadicInt) -> Result<PadicInt, InnerError> {
    let ctx = u.context();
    if !u.is_unit() {
        return Err(InnerError::NonSquareDet);
    }
    if ctx.ell() == 2 {
        let t = u - ctx.one();
        if t.is_zero() {
            return Ok(ctx.one());
        }
        if t.val() < 3 {
            return Err(InnerError::NonSquareDet); // squares of units are 1 mod 8
        }
        return sqrt_one_plus(t).map_err(|_| InnerError::NonSquareDet);
    }
    let ell = ctx.ell();
    let target = u.residue() % ell;
    let r0 = (1..ell)
        .find(|r| (r * r) % ell == target)
        .ok_or(InnerError::NonSquareDet)?;
    let r = ctx.from_u64(r0);
    let t = u * (r * r).inv_unit().expect("square of a unit") - ctx.one();
    if t.is_zero() {
        return Ok(r);
    }
    let correction = sqrt_one_plus(t).map_err(|_| InnerError::NonSquareDet)?;
    Ok(r * correction)
}

fn scalar_class_mod_ell(g: &Mat2) -> Option<u64> {
    let ell = g.context().ell();
    let e = g.entries();
    let (a, b, c, d) = (
        e[0].residue() % ell,
        e[1].residue() % ell,
        e[2].residue() % ell,
        e[3].residue() % ell,
    );
    (b == 0 && c == 0 && a == d).then_some(a)
}

/// Scalar-matching test for two group elements with equal square-unit
/// determinant: divide both by the shared square root, extract the scalar
/// parts lambda_i = tr(g_i')/2, and check lambda_1 = lambda_2 together
/// with g2 M = M g1, both mod l^{T - 2v}.
pub fn scalar_match(
    g1: &Mat2,
    g2: &Mat2,
    cert: &InnerCertificate,
    t: u32,
) -> Result<bool, InnerError> {
    let ctx = g1.context();
    let v = ctx.val_of_two();
    if g1.det() != g2.det() {
        return Err(InnerError::HypothesisFails("determinants differ"));
    }
    let root = square_root_of_unit(g1.det())?;
    let rinv = root.inv_unit().expect("branch root is a unit");
    let g1p = g1.scale(rinv);
    let g2p = g2.scale(rinv);
    if ctx.ell() == 2 {
        for gp in [&g1p, &g2p] {
            if !gp.trace().congruent(ctx.element(2), 3.min(ctx.precision())) {
                return Err(InnerError::BranchAmbiguity);
            }
        }
    } else if let (Some(c1), Some(c2)) = (scalar_class_mod_ell(&g1p), scalar_class_mod_ell(&g2p)) {
        // scalar reductions must land in the same class mod l
        if c1 != c2 {
            return Err(InnerError::HypothesisFails("scalar classes mod l differ"));
        }
    }
    let lam1 = ctx.halve(g1p.trace());
    let lam2 = ctx.halve(g2p.trace());
    let depth = t.saturating_sub(2 * v).min(ctx.precision());
    let lambda_ok = lam1.congruent(lam2, depth);
    let conj_ok = (*g2 * cert.m).congruent(&(cert.m * *g1), depth);
    Ok(lambda_ok && conj_ok)
}

// ---------------------------------------------------------------------------
// Wire format.

/// JSON shape of an approximate morphism: blockwise (x, h, y) coordinates
/// for the domain basis and its images.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MorphismSpec {
    pub ell: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub s: u32,
    pub n: u32,
    pub domain: Vec<[i64; 3]>,
    pub images: Vec<[i64; 3]>,
}

impl MorphismSpec {
    pub fn to_morphism(&self) -> Result<ApproxMorphism, InnerError> {
        let ctx = PadicContext::new(self.ell, self.precision);
        let lift = |rows: &[[i64; 3]]| -> Vec<TracelessMat> {
            rows.iter()
                .map(|r| {
                    TracelessMat::from_coords(
                        ctx,
                        ctx.element(r[0]),
                        ctx.element(r[1]),
                        ctx.element(r[2]),
                    )
                })
                .collect()
        };
        ApproxMorphism::from_pairs(self.s, self.n, lift(&self.domain), lift(&self.images))
    }

    pub fn from_morphism(phi: &ApproxMorphism) -> Self {
        let dump = |ms: &[TracelessMat]| -> Vec<[i64; 3]> {
            ms.iter()
                .map(|m| {
                    let c = m.coords();
                    [c[0].residue() as i64, c[1].residue() as i64, c[2].residue() as i64]
                })
                .collect()
        };
        MorphismSpec {
            ell: phi.context().ell(),
            precision: phi.context().precision(),
            s: phi.s(),
            n: phi.n(),
            domain: dump(phi.domain()),
            images: dump(phi.images()),
        }
    }
}

/// JSON shape of an intertwining certificate (matrix entries row-major).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateSpec {
    pub ell: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub m: [u64; 4],
    pub alpha: u32,
    pub certified_precision: u32,
    pub det_valuation_bound: u32,
}

impl CertificateSpec {
    pub fn from_certificate(ctx: PadicContext, cert: &InnerCertificate) -> Self {
        let e = cert.m.entries();
        CertificateSpec {
            ell: ctx.ell(),
            precision: ctx.precision(),
            m: [e[0].residue(), e[1].residue(), e[2].residue(), e[3].residue()],
            alpha: cert.alpha,
            certified_precision: cert.certified_precision,
            det_valuation_bound: cert.det_valuation_bound,
        }
    }

    pub fn to_certificate(&self) -> InnerCertificate {
        let ctx = PadicContext::new(self.ell, self.precision);
        InnerCertificate {
            m: Mat2::from_elements([
                ctx.from_u64(self.m[0]),
                ctx.from_u64(self.m[1]),
                ctx.from_u64(self.m[2]),
                ctx.from_u64(self.m[3]),
            ]),
            alpha: self.alpha,
            certified_precision: self.certified_precision,
            det_valuation_bound: self.det_valuation_bound,
        }
    }
}
