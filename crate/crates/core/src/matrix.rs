//! 2x2 and 3x3 matrix algebra over `Z/l^N`: the trace-zero projection,
//! adjugates, the adjoint (commutator) operator on the trace-zero plane,
//! and approximate-eigenvalue certificates.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::padic::{hensel_lift, MonicPoly, PadicContext, PadicError, PadicInt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// Trace-zero projection at `l = 2` needs `g = Id mod 2`.
    #[error("trace-zero projection at l = 2 requires g congruent to Id mod 2")]
    OddTrace,
    /// A matrix that was promised traceless is not.
    #[error("matrix has nonzero trace at full precision")]
    NotTraceless,
    #[error("hypothesis fails: {0}")]
    HypothesisFails(&'static str),
    /// A certified inequality that the theory guarantees was observed to
    /// fail; this is a falsification signal, never an input error.
    #[error("certified inequality violated ({what}): needed {needed}, got {got}")]
    CertificateViolated { what: &'static str, needed: u32, got: u32 },
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Row-major 2x2 matrix with entries in one shared context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    e: [PadicInt; 4],
}

impl Mat2 {
    pub fn new(ctx: PadicContext, entries: [i64; 4]) -> Self {
        Mat2 { e: entries.map(|x| ctx.element(x)) }
    }

    pub fn from_elements(e: [PadicInt; 4]) -> Self {
        let ctx = e[0].context();
        assert!(e.iter().all(|x| x.context() == ctx), "mixed contexts in matrix");
        Mat2 { e }
    }

    pub fn identity(ctx: PadicContext) -> Self {
        Mat2::new(ctx, [1, 0, 0, 1])
    }

    pub fn zero(ctx: PadicContext) -> Self {
        Mat2::new(ctx, [0, 0, 0, 0])
    }

    pub fn scalar(s: PadicInt) -> Self {
        let z = s.context().zero();
        Mat2 { e: [s, z, z, s] }
    }

    pub fn context(&self) -> PadicContext {
        self.e[0].context()
    }

    /// Entry at `(row, col)`, zero-indexed.
    pub fn entry(&self, row: usize, col: usize) -> PadicInt {
        self.e[2 * row + col]
    }

    pub fn entries(&self) -> [PadicInt; 4] {
        self.e
    }

    pub fn trace(&self) -> PadicInt {
        self.e[0] + self.e[3]
    }

    pub fn det(&self) -> PadicInt {
        self.e[0] * self.e[3] - self.e[1] * self.e[2]
    }

    /// The matrix `m*` with `m* . m = m . m* = det(m) . Id` exactly.
    pub fn adjugate(&self) -> Mat2 {
        Mat2 { e: [self.e[3], -self.e[1], -self.e[2], self.e[0]] }
    }

    pub fn scale(&self, s: PadicInt) -> Mat2 {
        Mat2 { e: self.e.map(|x| x * s) }
    }

    /// Inverse of a matrix with unit determinant valuation 0.
    pub fn inverse(&self) -> Result<Mat2, MatrixError> {
        let dinv = self.det().inv_unit()?;
        Ok(self.adjugate().scale(dinv))
    }

    /// `m . self . m^{-1}`.
    pub fn conjugate_by(&self, m: &Mat2) -> Result<Mat2, MatrixError> {
        Ok(*m * *self * m.inverse()?)
    }

    /// Minimal entry valuation (capped at `N`).
    pub fn min_val(&self) -> u32 {
        self.e.iter().map(|x| x.val()).min().unwrap()
    }

    /// Entrywise congruence mod `l^depth` (depth clamps at `N`).
    pub fn congruent(&self, other: &Mat2, depth: u32) -> bool {
        self.e.iter().zip(other.e.iter()).all(|(a, b)| a.congruent(*b, depth))
    }

    pub fn mul_vec(&self, v: [PadicInt; 2]) -> [PadicInt; 2] {
        [self.e[0] * v[0] + self.e[1] * v[1], self.e[2] * v[0] + self.e[3] * v[1]]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2 {
            e: [
                self.e[0] + rhs.e[0],
                self.e[1] + rhs.e[1],
                self.e[2] + rhs.e[2],
                self.e[3] + rhs.e[3],
            ],
        }
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2 { e: self.e.map(|x| -x) }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, r: Mat2) -> Mat2 {
        Mat2 {
            e: [
                self.e[0] * r.e[0] + self.e[1] * r.e[2],
                self.e[0] * r.e[1] + self.e[1] * r.e[3],
                self.e[2] * r.e[0] + self.e[3] * r.e[2],
                self.e[2] * r.e[1] + self.e[3] * r.e[3],
            ],
        }
    }
}

/// A 2x2 matrix with trace exactly zero mod `l^N`, i.e. of the shape
/// `[[h, x], [y, -h]]`. Coordinates are always reported in the `(x, h, y)`
/// order, matching the basis `(e12, diag(1,-1), e21)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TracelessMat {
    m: Mat2,
}

impl TracelessMat {
    pub fn from_mat(m: Mat2) -> Result<Self, MatrixError> {
        if !m.trace().is_zero() {
            return Err(MatrixError::NotTraceless);
        }
        Ok(TracelessMat { m })
    }

    pub fn from_coords(ctx: PadicContext, x: PadicInt, h: PadicInt, y: PadicInt) -> Self {
        let _ = ctx;
        TracelessMat { m: Mat2::from_elements([h, x, y, -h]) }
    }

    pub fn zero(ctx: PadicContext) -> Self {
        TracelessMat { m: Mat2::zero(ctx) }
    }

    pub fn as_mat(&self) -> &Mat2 {
        &self.m
    }

    pub fn context(&self) -> PadicContext {
        self.m.context()
    }

    pub fn x(&self) -> PadicInt {
        self.m.entry(0, 1)
    }

    pub fn h(&self) -> PadicInt {
        self.m.entry(0, 0)
    }

    pub fn y(&self) -> PadicInt {
        self.m.entry(1, 0)
    }

    pub fn coords(&self) -> [PadicInt; 3] {
        [self.x(), self.h(), self.y()]
    }

    pub fn det(&self) -> PadicInt {
        self.m.det()
    }

    pub fn scale(&self, s: PadicInt) -> TracelessMat {
        TracelessMat { m: self.m.scale(s) }
    }

    pub fn min_val(&self) -> u32 {
        self.m.min_val()
    }

    pub fn is_zero(&self) -> bool {
        self.m.min_val() >= self.m.context().precision()
    }

    pub fn congruent(&self, other: &TracelessMat, depth: u32) -> bool {
        self.m.congruent(&other.m, depth)
    }

    /// Commutator `[a, b] = ab - ba`; traceless exactly.
    pub fn bracket(a: &TracelessMat, b: &TracelessMat) -> TracelessMat {
        TracelessMat { m: a.m * b.m - b.m * a.m }
    }

    /// Conjugation `m . self . m^{-1}`; the trace is preserved exactly
    /// because `tr(mam^{-1}) = tr(a . m^{-1}m) = tr(a)`.
    pub fn conjugate_by(&self, m: &Mat2) -> Result<TracelessMat, MatrixError> {
        let c = self.m.conjugate_by(m)?;
        debug_assert!(c.trace().is_zero());
        Ok(TracelessMat { m: c })
    }
}

impl Add for TracelessMat {
    type Output = TracelessMat;
    fn add(self, rhs: TracelessMat) -> TracelessMat {
        TracelessMat { m: self.m + rhs.m }
    }
}

impl Sub for TracelessMat {
    type Output = TracelessMat;
    fn sub(self, rhs: TracelessMat) -> TracelessMat {
        TracelessMat { m: self.m - rhs.m }
    }
}

impl Neg for TracelessMat {
    type Output = TracelessMat;
    fn neg(self) -> TracelessMat {
        TracelessMat { m: -self.m }
    }
}

/// Trace-zero projection `g -> g - (tr(g)/2) Id`.
///
/// For `l = 2` this requires `g = Id mod 2` (odd diagonal, even
/// off-diagonal), which makes the trace even; the halving then loses one
/// digit, so the result is certified mod `2^{N-1}` there. For odd `l` the
/// projection is exact at full precision.
pub fn theta(g: &Mat2) -> Result<TracelessMat, MatrixError> {
    let ctx = g.context();
    if ctx.ell() == 2 {
        let ok = g.entry(0, 0).residue() % 2 == 1
            && g.entry(1, 1).residue() % 2 == 1
            && g.entry(0, 1).residue() % 2 == 0
            && g.entry(1, 0).residue() % 2 == 0;
        if !ok {
            return Err(MatrixError::OddTrace);
        }
    }
    let half = ctx.halve(g.trace());
    let m = *g - Mat2::scalar(half);
    debug_assert!(m.trace().is_zero());
    Ok(TracelessMat { m })
}

/// Row-major 3x3 matrix; used for the adjoint operator on the trace-zero
/// plane and as the exhaustive characteristic-polynomial oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mat3 {
    e: [PadicInt; 9],
}

impl Mat3 {
    pub fn from_elements(e: [PadicInt; 9]) -> Self {
        let ctx = e[0].context();
        assert!(e.iter().all(|x| x.context() == ctx), "mixed contexts in matrix");
        Mat3 { e }
    }

    pub fn context(&self) -> PadicContext {
        self.e[0].context()
    }

    pub fn entry(&self, row: usize, col: usize) -> PadicInt {
        self.e[3 * row + col]
    }

    pub fn mul_vec(&self, v: [PadicInt; 3]) -> [PadicInt; 3] {
        let mut out = [self.context().zero(); 3];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = self.context().zero();
            for (c, vc) in v.iter().enumerate() {
                acc = acc + self.entry(r, c) * *vc;
            }
            *slot = acc;
        }
        out
    }

    pub fn trace(&self) -> PadicInt {
        self.e[0] + self.e[4] + self.e[8]
    }

    pub fn det(&self) -> PadicInt {
        let m = |r: usize, c: usize| self.entry(r, c);
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    }

    /// Characteristic polynomial `t^3 - tr t^2 + m2 t - det` by direct
    /// cofactor expansion (`m2` = sum of principal 2x2 minors). This is the
    /// definitional route, kept as the oracle for the closed-form identity.
    pub fn char_poly(&self) -> MonicPoly {
        let m = |r: usize, c: usize| self.entry(r, c);
        let m2 = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0))
            + (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0))
            + (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
        MonicPoly::from_elements(self.context(), vec![-self.det(), m2, -self.trace()])
    }
}

/// The commutator operator `w -> [g, w]` on the trace-zero plane, as a 3x3
/// matrix in the `(x, h, y)` coordinates. For `g = [[a, b], [c, -a]]` it is
///
/// ```text
/// [ 2a  -2b   0 ]
/// [ -c   0    b ]
/// [  0   2c  -2a]
/// ```
pub fn adjoint_op(g: &TracelessMat) -> Mat3 {
    let ctx = g.context();
    let two = ctx.element(2);
    let (a, b, c) = (g.h(), g.x(), g.y());
    let z = ctx.zero();
    Mat3::from_elements([
        two * a,
        -(two * b),
        z,
        -c,
        z,
        b,
        z,
        two * c,
        -(two * a),
    ])
}

/// Characteristic polynomial of [`adjoint_op`]`(g)`, in closed form:
/// `t^3 + 4 det(g) t` (the operator's spectrum is `{0, +-2mu}` with
/// `mu^2 = -det(g)`).
pub fn char_poly_adjoint(g: &TracelessMat) -> MonicPoly {
    let ctx = g.context();
    let four_det = ctx.element(4) * g.det();
    MonicPoly::from_elements(ctx, vec![ctx.zero(), four_det, ctx.zero()])
}

/// `t^2 - tr(g) t + det(g)`.
pub fn char_poly_2x2(g: &Mat2) -> MonicPoly {
    MonicPoly::from_elements(g.context(), vec![g.det(), -g.trace()])
}

/// Outcome of [`approx_eigen_defect`]: the witness depth `b` (minimal
/// coordinate valuation of `w`) and the certified valuation of the
/// characteristic polynomial at `lambda`, which is guaranteed `>= n - b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenDefect {
    pub witness_val: u32,
    pub charpoly_val: u32,
}

fn eigen_defect_check(
    residual_vals: &[u32],
    witness_vals: &[u32],
    charpoly_at_lambda: PadicInt,
    n: u32,
) -> Result<EigenDefect, MatrixError> {
    let cap = charpoly_at_lambda.context().precision();
    if n > cap {
        return Err(MatrixError::HypothesisFails("congruence depth n exceeds the precision"));
    }
    if residual_vals.iter().any(|&v| v < n) {
        return Err(MatrixError::HypothesisFails("g.w = lambda.w fails mod l^n"));
    }
    let b = *witness_vals.iter().min().unwrap();
    if b >= n {
        return Err(MatrixError::HypothesisFails("witness vector vanishes mod l^n"));
    }
    let pv = charpoly_at_lambda.val();
    if pv < n - b {
        return Err(MatrixError::CertificateViolated {
            what: "approximate-eigenvalue defect bound",
            needed: n - b,
            got: pv,
        });
    }
    Ok(EigenDefect { witness_val: b, charpoly_val: pv })
}

/// Approximate-eigenvalue certificate for a 2x2 matrix: given
/// `g.w = lambda.w (mod l^n)` with witness depth `b < n`, certifies
/// `val(p_g(lambda)) >= n - b`. A violation (impossible per the theory)
/// is reported as [`MatrixError::CertificateViolated`].
pub fn approx_eigen_defect(
    g: &Mat2,
    lambda: PadicInt,
    w: [PadicInt; 2],
    n: u32,
) -> Result<EigenDefect, MatrixError> {
    let gw = g.mul_vec(w);
    let res = [gw[0] - lambda * w[0], gw[1] - lambda * w[1]];
    eigen_defect_check(
        &res.map(|x| x.val()),
        &w.map(|x| x.val()),
        char_poly_2x2(g).eval(lambda),
        n,
    )
}

/// The 3x3 variant of [`approx_eigen_defect`], used for the adjoint
/// operator.
pub fn approx_eigen_defect3(
    c: &Mat3,
    lambda: PadicInt,
    w: [PadicInt; 3],
    n: u32,
) -> Result<EigenDefect, MatrixError> {
    let cw = c.mul_vec(w);
    let res = [cw[0] - lambda * w[0], cw[1] - lambda * w[1], cw[2] - lambda * w[2]];
    eigen_defect_check(
        &res.map(|x| x.val()),
        &w.map(|x| x.val()),
        c.char_poly().eval(lambda),
        n,
    )
}

/// Result of the eigenvalue / coordinate-bound dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenOutcome {
    /// A root `nu` of `p_g` mod `l^N` with `val(nu - lambda) >=
    /// congruence_depth` (and the theory guarantees depth `val(lambda)+3`
    /// whenever this branch is taken).
    Eigenvalue { nu: PadicInt, congruence_depth: u32 },
    /// No certifiable nearby eigenvalue; instead every coordinate of the
    /// witness has valuation `beta >= floor = n - 2(2 + val(lambda))`.
    CoordinateBound { beta: u32, floor: i64 },
}

/// Dichotomy for an approximate eigenvector of a traceless 2x2 matrix:
/// either a genuine root of `p_g` close to `lambda` is certified (via
/// Newton lifting when its hypothesis holds, or directly when
/// `p_g(lambda) = 0` at full precision), or the witness vector is shown to
/// be divisible by `l^{n - 2(2 + val(lambda))}`.
pub fn hensel_failure_dichotomy(
    g: &TracelessMat,
    lambda: PadicInt,
    w: [PadicInt; 2],
    n: u32,
) -> Result<EigenOutcome, MatrixError> {
    let ctx = g.context();
    let cap = ctx.precision();
    if n > cap {
        return Err(MatrixError::HypothesisFails("congruence depth n exceeds the precision"));
    }
    let gw = g.as_mat().mul_vec(w);
    if (gw[0] - lambda * w[0]).val() < n || (gw[1] - lambda * w[1]).val() < n {
        return Err(MatrixError::HypothesisFails("g.w = lambda.w fails mod l^n"));
    }
    let p = char_poly_2x2(g.as_mat());
    let pv = p.eval(lambda).val();
    let vl = lambda.val();
    let v2 = ctx.val_of_two();
    if pv >= cap {
        // lambda itself is a root at full precision.
        return Ok(EigenOutcome::Eigenvalue { nu: lambda, congruence_depth: cap });
    }
    // val(p'(lambda)) = val(2 lambda) = v2 + vl for p = t^2 + det.
    if vl < cap && pv > 2 * (v2 + vl) && pv - (v2 + vl) >= vl + 3 {
        let nu = hensel_lift(&p, lambda)?;
        return Ok(EigenOutcome::Eigenvalue { nu, congruence_depth: pv - (v2 + vl) });
    }
    let beta = w[0].val().min(w[1].val());
    let floor = n as i64 - 2 * (2 + vl as i64);
    if (beta as i64) >= floor {
        return Ok(EigenOutcome::CoordinateBound { beta, floor });
    }
    // Unreachable if the dichotomy holds; kept as a falsification signal.
    Err(MatrixError::CertificateViolated {
        what: "eigenvalue/coordinate dichotomy",
        needed: floor.max(0) as u32,
        got: beta,
    })
}
