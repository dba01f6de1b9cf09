//! Transfer and monodromy matrices, spectral point classification,
//! quasi-momentum, and the Floquet solution phi with phi_0 = 1.

use num_complex::Complex64;

use crate::exact::{BigRat, Poly};
use crate::operator::PeriodicJacobi;
use crate::{Error, Result};

/// Tolerance band on ||Tr| - 2| inside which a real point is reported
/// parabolic. Float traces cannot hit +-2 exactly.
pub const TOL_PARABOLIC: f64 = 1e-9;

/// 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Mat2 {
    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    pub fn apply(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (
            self.m11 * v.0 + self.m12 * v.1,
            self.m21 * v.0 + self.m22 * v.1,
        )
    }

    /// Eigenvalues of a unimodular matrix: (tr +- sqrt(tr^2 - 4)) / 2.
    pub fn eigenvalues_unimodular(&self) -> (Complex64, Complex64) {
        let tr = self.trace();
        let disc = (tr * tr - 4.0).sqrt();
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }
}

/// 2x2 matrix with exact polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMat2 {
    pub m11: Poly,
    pub m12: Poly,
    pub m21: Poly,
    pub m22: Poly,
}

impl PolyMat2 {
    pub fn trace(&self) -> Poly {
        &self.m11 + &self.m22
    }

    pub fn det(&self) -> Poly {
        &(&self.m11 * &self.m22) - &(&self.m12 * &self.m21)
    }

    pub fn mul(&self, rhs: &PolyMat2) -> PolyMat2 {
        PolyMat2 {
            m11: &(&self.m11 * &rhs.m11) + &(&self.m12 * &rhs.m21),
            m12: &(&self.m11 * &rhs.m12) + &(&self.m12 * &rhs.m22),
            m21: &(&self.m21 * &rhs.m11) + &(&self.m22 * &rhs.m21),
            m22: &(&self.m21 * &rhs.m12) + &(&self.m22 * &rhs.m22),
        }
    }
}

/// Classification of a spectral parameter by the monodromy eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointTag {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

#[derive(Clone, Copy, Debug)]
pub struct PointClass {
    pub tag: PointTag,
    pub trace: Complex64,
    /// Branch rule: modulus <= 1 eigenvalue when hyperbolic, Im > 0
    /// eigenvalue when elliptic, tr/2 when parabolic.
    pub mu: Complex64,
}

/// Transfer matrix B_i = [[0, 1], [-a_{i-1}/a_i, (lambda - b_i)/a_i]],
/// i in 1..T with a_0 := a_T.
pub fn transfer_matrix(j: &PeriodicJacobi, i: usize, lambda: Complex64) -> Mat2 {
    assert!((1..=j.period()).contains(&i), "transfer index out of range");
    let ai = j.a_at(i);
    let aim1 = j.a_at(i - 1);
    let bi = j.b_at(i);
    Mat2 {
        m11: Complex64::new(0.0, 0.0),
        m12: Complex64::new(1.0, 0.0),
        m21: Complex64::new(-aim1 / ai, 0.0),
        m22: (lambda - bi) / ai,
    }
}

/// Monodromy matrix M = B_T B_{T-1} ... B_1.
pub fn monodromy_numeric(j: &PeriodicJacobi, lambda: Complex64) -> Mat2 {
    let mut m = transfer_matrix(j, 1, lambda);
    for i in 2..=j.period() {
        m = transfer_matrix(j, i, lambda).mul(&m);
    }
    m
}

fn exact_transfer(j: &PeriodicJacobi, i: usize) -> Result<PolyMat2> {
    let ai = j.exact_a_at(i)?;
    let aim1 = j.exact_a_at(i - 1)?;
    let bi = j.exact_b_at(i)?;
    Ok(PolyMat2 {
        m11: Poly::zero(),
        m12: Poly::one(),
        m21: Poly::constant(-(aim1 / &ai)),
        m22: (&Poly::x() - &Poly::constant(bi)).scale(&ai.recip()),
    })
}

/// Monodromy matrix with exact polynomial entries; verifies the entry
/// degree/leading-coefficient structure and det = 1 before returning.
pub fn monodromy_exact(j: &PeriodicJacobi) -> Result<PolyMat2> {
    let mut m = exact_transfer(j, 1)?;
    for i in 2..=j.period() {
        m = exact_transfer(j, i)?.mul(&m);
    }
    check_exact_structure(j, &m)?;
    Ok(m)
}

pub fn check_exact_structure(j: &PeriodicJacobi, m: &PolyMat2) -> Result<()> {
    use num_traits::One;
    let t = j.period();
    let a = j.exact_a()?;
    let prod_all: BigRat = a.iter().product();
    let prod_head: BigRat = a[..t - 1].iter().product();
    let fail = |what: &str| {
        Err(Error::InternalInconsistency(format!(
            "monodromy entry structure violated: {what}"
        )))
    };

    if m.m22.degree() != Some(t) || m.m22.coeff(t) != prod_all.recip() {
        return fail("m22 degree or leading coefficient");
    }
    if m.m12.degree().map_or(false, |d| d > t - 1) || m.m12.coeff(t - 1) != prod_head.recip() {
        return fail("m12 degree or lambda^(T-1) coefficient");
    }
    if m.m21.degree().map_or(false, |d| d > t - 1) || m.m21.coeff(t - 1) != -prod_head.recip() {
        return fail("m21 degree or lambda^(T-1) coefficient");
    }
    if t >= 2 {
        let want = -(a[t - 1].clone() / &prod_head);
        if m.m11.degree().map_or(false, |d| d > t - 2) || m.m11.coeff(t - 2) != want {
            return fail("m11 degree or lambda^(T-2) coefficient");
        }
    }
    if m.det() != Poly::constant(BigRat::one()) {
        return fail("det != 1");
    }
    Ok(())
}

/// Classify lambda as elliptic / hyperbolic / parabolic.
pub fn classify_point(j: &PeriodicJacobi, lambda: Complex64) -> PointClass {
    let m = monodromy_numeric(j, lambda);
    let tr = m.trace();
    let (e1, e2) = m.eigenvalues_unimodular();
    if lambda.im != 0.0 {
        let mu = if e1.norm() <= e2.norm() { e1 } else { e2 };
        return PointClass {
            tag: PointTag::Hyperbolic,
            trace: tr,
            mu,
        };
    }
    let t = tr.re;
    if (t.abs() - 2.0).abs() <= TOL_PARABOLIC {
        PointClass {
            tag: PointTag::Parabolic,
            trace: tr,
            mu: Complex64::new(t / 2.0, 0.0),
        }
    } else if t.abs() < 2.0 {
        let mu = if e1.im > 0.0 { e1 } else { e2 };
        PointClass {
            tag: PointTag::Elliptic,
            trace: tr,
            mu,
        }
    } else {
        let mu = if e1.norm() <= e2.norm() { e1 } else { e2 };
        PointClass {
            tag: PointTag::Hyperbolic,
            trace: tr,
            mu,
        }
    }
}

/// Quasi-momentum theta = arccos(Tr M / 2) in (0, pi) for elliptic lambda.
pub fn quasimomentum(j: &PeriodicJacobi, lambda: f64) -> Result<f64> {
    let class = classify_point(j, Complex64::new(lambda, 0.0));
    if class.tag != PointTag::Elliptic {
        return Err(Error::NotElliptic(lambda));
    }
    Ok((class.trace.re / 2.0).acos())
}

/// Per-residue oscillation parameters of (Im phi_n)^2 written as
/// eta sin(2(k-1)theta + phase) + gamma.
#[derive(Clone, Copy, Debug)]
pub struct OscRecord {
    /// Re phi_s (alpha-tilde in the two-exponential decomposition).
    pub alpha: f64,
    /// Im phi_s (beta-tilde).
    pub beta: f64,
    pub eta: f64,
    pub gamma: f64,
    pub phase: f64,
}

/// Floquet data at a fixed elliptic lambda: the quasi-momentum, the branch
/// mu = e^{i theta}, the period cell phi_0..phi_{T-1}, and per-residue
/// oscillation parameters.
#[derive(Clone, Debug)]
pub struct FloquetData {
    pub lambda: f64,
    pub theta: f64,
    pub mu: Complex64,
    pub phi: Vec<Complex64>,
    pub osc: Vec<OscRecord>,
}

impl FloquetData {
    /// phi_n = phi_s e^{i(k-1)theta} with n = T(k-1) + s.
    pub fn phi_at(&self, n: usize) -> Complex64 {
        let t = self.phi.len();
        let s = n % t;
        let k1 = (n / t) as f64;
        self.phi[s] * Complex64::from_polar(1.0, k1 * self.theta)
    }

    /// Im phi_n without forming the complex value.
    pub fn im_phi_at(&self, n: usize) -> f64 {
        let t = self.phi.len();
        let s = n % t;
        let x = (n / t) as f64 * self.theta;
        self.phi[s].re * x.sin() + self.phi[s].im * x.cos()
    }
}

/// Floquet solution phi_0..phi_{n_max} at an elliptic point, normalized
/// with phi_0 = 1 and branch Im mu > 0.
pub fn floquet_solution(
    j: &PeriodicJacobi,
    lambda: f64,
    n_max: usize,
) -> Result<(FloquetData, Vec<Complex64>)> {
    let t = j.period();
    let class = classify_point(j, Complex64::new(lambda, 0.0));
    if class.tag != PointTag::Elliptic {
        return Err(Error::NotElliptic(lambda));
    }
    let theta = (class.trace.re / 2.0).acos();
    let mu = Complex64::from_polar(1.0, theta);

    let m = monodromy_numeric(j, Complex64::new(lambda, 0.0));
    if m.m12.norm() < 1e-13 {
        return Err(Error::DegenerateNormalization);
    }

    // period cell from the eigenvector (1, phi_1) of M
    let mut phi = Vec::with_capacity(t);
    phi.push(Complex64::new(1.0, 0.0));
    if t > 1 {
        phi.push((mu - m.m11) / m.m12);
        for s in 1..t - 1 {
            // a_{s-1} phi_{s-1} + b_s phi_s + a_s phi_{s+1} = lambda phi_s
            let next =
                ((lambda - j.b_at(s)) * phi[s] - j.a_at(s - 1) * phi[s - 1]) / j.a_at(s);
            phi.push(next);
        }
    }

    let osc = phi
        .iter()
        .map(|p| {
            let (at, bt) = (p.re, p.im);
            let sin_coeff = at * bt;
            let cos_coeff = (bt * bt - at * at) / 2.0;
            OscRecord {
                alpha: at,
                beta: bt,
                eta: p.norm_sqr() / 2.0,
                gamma: p.norm_sqr() / 2.0,
                phase: cos_coeff.atan2(sin_coeff),
            }
        })
        .collect();

    let data = FloquetData {
        lambda,
        theta,
        mu,
        phi,
        osc,
    };
    let seq = (0..=n_max).map(|n| data.phi_at(n)).collect();
    Ok((data, seq))
}
