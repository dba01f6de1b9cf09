//! The function C(lambda; T) = Re(sum_{s=1}^{T} phi_s conj(phi_{s-1})):
//! numeric evaluation on the elliptic set, exact rational-function
//! construction, zero location inside the bands, and the order-1 check.
//!
//! The exact construction keeps all mu-dependence linear (phi_s = A_s + mu
//! B_s with A_s, B_s rational in lambda) and eliminates mu through
//! Re mu = Tr M / 2 and mu conj(mu) = 1, so no algebraic extension is
//! needed anywhere.

use crate::bands::{band_structure, ROOT_PRECISION};
use crate::exact::{poly_real_roots, rat, BigRat, Poly, RatFunc};
use crate::monodromy::floquet_solution;
use crate::operator::PeriodicJacobi;
use crate::{Error, Result};

/// C(lambda; T) as a reduced rational function, with its order and leading
/// coefficient (always 1 and (1/2) sum 1/a_s).
#[derive(Clone, Debug)]
pub struct CExact {
    pub f: RatFunc,
    pub leading_order: i64,
    pub leading_coeff: BigRat,
}

/// Numeric C(lambda; T) from the Floquet cell, with phi_T = mu phi_0 = mu.
pub fn c_numeric(j: &PeriodicJacobi, lambda: f64) -> Result<f64> {
    let (data, _) = floquet_solution(j, lambda, 0)?;
    let t = j.period();
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    for s in 1..=t {
        let phi_s = if s == t { data.mu } else { data.phi[s] };
        sum += phi_s * data.phi[s - 1].conj();
    }
    Ok(sum.re)
}

/// Exact rational continuation of C(lambda; T).
pub fn c_exact(j: &PeriodicJacobi) -> Result<CExact> {
    let t = j.period();
    let m = crate::monodromy::monodromy_exact(j)?;
    let tr_half = RatFunc::from_poly(m.trace().scale(&rat(1, 2)));

    // phi_s = A_s + mu B_s, seeded from phi_0 = 1, phi_1 = (mu - m11)/m12
    let m12 = RatFunc::from_poly(m.m12.clone());
    let m12_inv = m12.recip()?;
    let mut a_seq = vec![RatFunc::one()];
    let mut b_seq = vec![RatFunc::zero()];
    if t >= 1 {
        a_seq.push(&(-&RatFunc::from_poly(m.m11.clone())) * &m12_inv);
        b_seq.push(m12_inv);
    }
    let lam = RatFunc::from_poly(Poly::x());
    for s in 1..t {
        // phi_{s+1} = ((lambda - b_s) phi_s - a_{s-1} phi_{s-1}) / a_s
        let bs = RatFunc::constant(j.exact_b_at(s)?);
        let asm1 = RatFunc::constant(j.exact_a_at(s - 1)?);
        let as_inv = RatFunc::constant(j.exact_a_at(s)?.recip());
        let step = |prev: &RatFunc, cur: &RatFunc| {
            &(&(&(&lam - &bs) * cur) - &(&asm1 * prev)) * &as_inv
        };
        a_seq.push(step(&a_seq[s - 1], &a_seq[s]));
        b_seq.push(step(&b_seq[s - 1], &b_seq[s]));
    }

    // phi_T = mu phi_0 = mu, so (A_T, B_T) = (0, 1) must come out exactly
    if !(a_seq[t].is_zero() && b_seq[t] == RatFunc::one()) {
        return Err(Error::InternalInconsistency(
            "Floquet cell propagation did not close: (A_T, B_T) != (0, 1)".into(),
        ));
    }

    // Re(phi_s conj(phi_{s-1})) = A_s A_{s-1} + B_s B_{s-1}
    //                             + (Tr/2)(A_s B_{s-1} + A_{s-1} B_s)
    let mut c = RatFunc::zero();
    for s in 1..=t {
        let direct = &(&a_seq[s] * &a_seq[s - 1]) + &(&b_seq[s] * &b_seq[s - 1]);
        let cross = &(&a_seq[s] * &b_seq[s - 1]) + &(&a_seq[s - 1] * &b_seq[s]);
        c = &c + &(&direct + &(&tr_half * &cross));
    }

    if c.is_zero() {
        return Err(Error::InternalInconsistency(
            "C(lambda; T) reduced to the zero function".into(),
        ));
    }
    let order = c.order().unwrap();
    let expected: BigRat = j
        .exact_a()?
        .iter()
        .map(|ai| ai.recip())
        .sum::<BigRat>()
        * rat(1, 2);
    let lc = c.leading_coeff().unwrap();
    if order != 1 || lc != expected {
        return Err(Error::InternalInconsistency(format!(
            "C(lambda; T) order/leading coefficient mismatch: order {order}, lc {lc}"
        )));
    }
    Ok(CExact {
        f: c,
        leading_order: order,
        leading_coeff: lc,
    })
}

/// Real zeros of C lying strictly inside the open elliptic bands.
pub fn c_zeros_in_bands(j: &PeriodicJacobi) -> Result<Vec<f64>> {
    let c = c_exact(j)?;
    let bs = band_structure(j)?;
    let roots = poly_real_roots(c.f.num(), ROOT_PRECISION)?;
    Ok(roots
        .into_iter()
        .map(|(x, _)| x)
        .filter(|&x| {
            bs.bands
                .iter()
                .any(|&(l, r)| x > l + ROOT_PRECISION && x < r - ROOT_PRECISION)
        })
        .collect())
}

/// Closed form for T = 2: (a1 + a2)(lambda^2 - (a1 - a2)^2) / (2 lambda a1 a2).
pub fn c_closed_form_t2(a1: &BigRat, a2: &BigRat) -> Result<RatFunc> {
    let diff = a1 - a2;
    let num = (&Poly::from_i64(&[0, 0, 1]) - &Poly::constant(&diff * &diff))
        .scale(&(a1 + a2));
    let den = Poly::x().scale(&(rat(2, 1) * a1 * a2));
    RatFunc::new(num, den)
}

/// Closed form for T = 3:
/// lambda (1/a1 + 1/a2 + 1/a3) (lambda^2 - (a1^2 + a2^2 + a3^2)
///   + 2(a1 + a2 + a3)/(1/a1 + 1/a2 + 1/a3)) / (2 (lambda^2 - a1^2)).
pub fn c_closed_form_t3(a1: &BigRat, a2: &BigRat, a3: &BigRat) -> Result<RatFunc> {
    let inv_sum = a1.recip() + a2.recip() + a3.recip();
    let sum = a1 + a2 + a3;
    let sq = a1 * a1 + a2 * a2 + a3 * a3;
    let shift = -sq + rat(2, 1) * sum / &inv_sum;
    let quad = &Poly::from_i64(&[0, 0, 1]) + &Poly::constant(shift);
    let num = (&Poly::x() * &quad).scale(&inv_sum);
    let den = (&Poly::from_i64(&[0, 0, 1]) - &Poly::constant(a1 * a1)).scale(&rat(2, 1));
    RatFunc::new(num, den)
}

/// Closed form for T = 1: lambda / (2 a1).
pub fn c_closed_form_t1(a1: &BigRat) -> Result<RatFunc> {
    RatFunc::new(Poly::x(), Poly::constant(rat(2, 1) * a1))
}

/// One row of the conjecture scan: zero count of C inside the bands for a
/// randomly drawn operator.
#[derive(Clone, Debug)]
pub struct ConjectureScanRow {
    pub period: usize,
    pub seed: u64,
    pub zero_count: usize,
}

/// Sweep random rational operators (b = 0) and count zeros of C inside the
/// bands, grouped by the parity of T. Reported as evidence only.
pub fn scan_conjecture(trials: usize, seed: u64) -> Result<Vec<ConjectureScanRow>> {
    use rand::{Rng, SeedableRng};
    let mut out = Vec::with_capacity(trials);
    for i in 0..trials {
        let case_seed = seed.wrapping_add(i as u64);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(case_seed);
        let t = rng.gen_range(1..=6usize);
        let a: Vec<BigRat> = (0..t).map(|_| rat(rng.gen_range(1..=8), rng.gen_range(1..=4))).collect();
        let j = PeriodicJacobi::from_rationals(a, vec![BigRat::from_integer(0.into()); t])?;
        let zero_count = c_zeros_in_bands(&j)?.len();
        out.push(ConjectureScanRow {
            period: t,
            seed: case_seed,
            zero_count,
        });
    }
    Ok(out)
}
