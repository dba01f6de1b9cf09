//! Exact rational arithmetic: big rationals, univariate polynomials, reduced
//! rational functions, and real-root isolation via Sturm chains.
//!
//! Everything here is symbol-exact; floats appear only in the root output,
//! where each root has been bracketed by rational bisection to the requested
//! width first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational number; always reduced, denominator positive.
pub type BigRat = BigRational;

/// Exact rational from an integer.
pub fn rat_int(n: i64) -> BigRat {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational p/q.
pub fn rat(p: i64, q: i64) -> BigRat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact conversion of a finite `f64` (every finite double is rational).
pub fn rat_from_f64(x: f64) -> Option<BigRat> {
    BigRational::from_float(x)
}

/// Parse either a decimal literal or a "p/q" string.
pub fn parse_rat(s: &str) -> Result<BigRat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(BigRational::new(p, q))
    } else if let Ok(p) = s.parse::<BigInt>() {
        Ok(BigRational::from_integer(p))
    } else {
        let x: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational literal {s:?}")))?;
        rat_from_f64(x).ok_or_else(|| Error::Parse(format!("non-finite literal {s:?}")))
    }
}

pub fn rat_to_f64(x: &BigRat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Univariate polynomial over the rationals; coefficients lowest power first,
/// trailing zeros trimmed. The zero polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial lambda.
    pub fn x() -> Self {
        Poly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    /// Coefficient of lambda^k (zero if beyond the degree).
    pub fn coeff(&self, k: usize) -> BigRat {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_coeff(&self) -> Option<&BigRat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
            .collect();
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &BigRat) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading_coeff() {
            None => Poly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    pub fn div_rem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        let lc = div.leading_coeff().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lc;
            for i in 0..=dd {
                let t = &div.coeffs[i] * &factor;
                rem[k + i] -= t;
            }
            // the leading term cancels exactly
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
            while rem.last().map_or(false, |c| c.is_zero()) {
                rem.pop();
            }
            quot[k] = factor;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, div: &Poly) -> Poly {
        let (q, r) = self.div_rem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::new(coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - rhs.coeff(k));
        }
        Poly::new(coeffs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}L", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}L^{k}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Monic greatest common divisor via the Euclidean algorithm.
pub fn poly_gcd(p: &Poly, q: &Poly) -> Result<Poly> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::InvalidInput(
            "gcd of two zero polynomials is undefined".into(),
        ));
    }
    let mut a = p.clone();
    let mut b = q.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    Ok(a.monic())
}

/// Square-free decomposition (Yun's algorithm): returns pairs
/// (square-free factor, multiplicity) with the factors pairwise coprime.
pub fn squarefree_decomposition(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let g = poly_gcd(p, &dp)?;
    let mut out = Vec::new();
    let mut c = p.div_exact(&g);
    let mut d = &dp.div_exact(&g) - &c.derivative();
    let mut mult = 1usize;
    while !c.is_constant() {
        let a = poly_gcd(&c, &d)?;
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), mult));
        }
        c = c.div_exact(&a);
        d = &d.div_exact(&a) - &c.derivative();
        mult += 1;
    }
    Ok(out)
}

fn sign_of(x: &BigRat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm chain of a (square-free) polynomial.
struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    fn new(p: &Poly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            chain.push(-&r);
        }
        SturmChain { chain }
    }

    fn variations_at(&self, x: &BigRat) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.chain {
            let s = sign_of(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    fn count_roots(&self, a: &BigRat, b: &BigRat) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }
}

/// Cauchy bound: all real roots lie in (-B, B).
fn root_bound(p: &Poly) -> BigRat {
    let lc = p.leading_coeff().expect("nonzero polynomial").abs();
    let mut max = BigRational::zero();
    for c in &p.coeffs[..p.coeffs.len() - 1] {
        let r = c.abs() / &lc;
        if r > max {
            max = r;
        }
    }
    max + BigRational::one()
}

/// All real roots of `p`, bracketed to width <= `precision`, with exact
/// multiplicities from the square-free decomposition. Sorted ascending.
pub fn poly_real_roots(p: &Poly, precision: f64) -> Result<Vec<(f64, usize)>> {
    if p.is_zero() {
        return Err(Error::InvalidInput(
            "cannot isolate roots of the zero polynomial".into(),
        ));
    }
    if precision <= 0.0 {
        return Err(Error::InvalidInput("precision must be positive".into()));
    }
    let mut roots = Vec::new();
    for (factor, mult) in squarefree_decomposition(p)? {
        for r in squarefree_real_roots(&factor, precision) {
            roots.push((r, mult));
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(roots)
}

fn squarefree_real_roots(p: &Poly, precision: f64) -> Vec<f64> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let chain = SturmChain::new(p);
    let bound = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound.clone())];
    let half = rat(1, 2);
    while let Some((a, b)) = stack.pop() {
        let n = chain.count_roots(&a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(refine_root(p, &chain, a, b, precision, &half));
            continue;
        }
        // split near the middle at a non-root, so the half-open Sturm counts
        // stay exact
        let mut mid = (&a + &b) * &half;
        let mut nudge = (&b - &a) * rat(1, 16);
        while p.eval(&mid).is_zero() {
            mid += &nudge;
            nudge = nudge * &half;
        }
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn refine_root(
    p: &Poly,
    chain: &SturmChain,
    mut a: BigRat,
    mut b: BigRat,
    precision: f64,
    half: &BigRat,
) -> f64 {
    // Bisect on the Sturm count so repeated sign-agreement at endpoints
    // cannot lose the root.
    loop {
        let width = rat_to_f64(&(&b - &a));
        if width <= precision {
            break;
        }
        let mid = (&a + &b) * half;
        if p.eval(&mid).is_zero() {
            return rat_to_f64(&mid);
        }
        if chain.count_roots(&a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    rat_to_f64(&((&a + &b) * half))
}

/// Reduced rational function num/den with a monic denominator.
///
/// The canonical form (gcd(num, den) = 1, den monic) makes exact equality a
/// field-wise comparison.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput(
                "rational function with zero denominator".into(),
            ));
        }
        if num.is_zero() {
            return Ok(RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let g = poly_gcd(&num, &den)?;
        let num = num.div_exact(&g);
        let den = den.div_exact(&g);
        let lc = den.leading_coeff().unwrap().recip();
        Ok(RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// deg num - deg den; `None` for the zero function.
    pub fn order(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap() as i64)
    }

    /// Ratio of the leading coefficients.
    pub fn leading_coeff(&self) -> Option<BigRat> {
        Some(self.num.leading_coeff()? / self.den.leading_coeff().unwrap())
    }

    pub fn recip(&self) -> Result<Self> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominators")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominators")
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominators")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

/// Exact evaluation at a rational point.
pub fn rf_eval(f: &RatFunc, x: &BigRat) -> Result<BigRat> {
    let d = f.den.eval(x);
    if d.is_zero() {
        return Err(Error::PoleAtPoint);
    }
    Ok(f.num.eval(x) / d)
}

/// Floating evaluation (exact coefficients, float Horner).
pub fn rf_eval_f64(f: &RatFunc, x: f64) -> f64 {
    f.num.eval_f64(x) / f.den.eval_f64(x)
}

impl RatFunc {
    /// Integer-scaled display "num / den": clears all coefficient
    /// denominators jointly and strips the common integer content.
    pub fn integer_scaled_strings(&self) -> (String, String) {
        use num_integer::Integer as _;
        let mut l = BigInt::one();
        for c in self.num.coeffs().iter().chain(self.den.coeffs()) {
            l = l.lcm(c.denom());
        }
        let scale = BigRational::from_integer(l);
        let num = self.num.scale(&scale);
        let den = self.den.scale(&scale);
        let mut g = BigInt::zero();
        for c in num.coeffs().iter().chain(den.coeffs()) {
            g = g.gcd(c.numer());
        }
        if g.is_zero() {
            g = BigInt::one();
        }
        let inv = BigRational::new(BigInt::one(), g);
        (num.scale(&inv).to_string(), den.scale(&inv).to_string())
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_scaled_strings();
        write!(f, "({n}) / ({d})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_shared_linear_factor() {
        // gcd(L^2 - 1, L - 1) = L - 1
        let p = Poly::from_i64(&[-1, 0, 1]);
        let q = Poly::from_i64(&[-1, 1]);
        assert_eq!(poly_gcd(&p, &q).unwrap(), Poly::from_i64(&[-1, 1]));
    }

    #[test]
    fn gcd_coprime() {
        let p = Poly::from_i64(&[-2, 0, 1]);
        let q = Poly::from_i64(&[3, 1]);
        assert_eq!(poly_gcd(&p, &q).unwrap(), Poly::one());
    }

    #[test]
    fn gcd_with_multiplicity() {
        // gcd((L-2)^2 (L+1), (L-2)(L-5)) = L - 2
        // expanded by hand: (L-2)^2 (L+1) = L^3 - 3L^2 + 4,
        //                   (L-2)(L-5)    = L^2 - 7L + 10
        let p = Poly::from_i64(&[4, 0, -3, 1]);
        let q = Poly::from_i64(&[10, -7, 1]);
        assert_eq!(poly_gcd(&p, &q).unwrap(), Poly::from_i64(&[-2, 1]));
    }

    #[test]
    fn gcd_both_zero_rejected() {
        assert!(matches!(
            poly_gcd(&Poly::zero(), &Poly::zero()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn roots_simple_pair() {
        let p = Poly::from_i64(&[-1, 0, 1]);
        let roots = poly_real_roots(&p, 1e-12).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 + 1.0).abs() <= 1e-12);
        assert_eq!(roots[0].1, 1);
        assert!((roots[1].0 - 1.0).abs() <= 1e-12);
        assert_eq!(roots[1].1, 1);
    }

    #[test]
    fn roots_double_at_zero() {
        let p = Poly::from_i64(&[0, 0, 1]);
        let roots = poly_real_roots(&p, 1e-12).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].0, 0.0);
        assert_eq!(roots[0].1, 2);
    }

    #[test]
    fn roots_cubic() {
        // L^3 - L = L(L-1)(L+1)
        let p = Poly::from_i64(&[0, -1, 0, 1]);
        let roots = poly_real_roots(&p, 1e-12).unwrap();
        let vals: Vec<f64> = roots.iter().map(|r| r.0).collect();
        for (got, want) in vals.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
        }
        assert!(roots.iter().all(|r| r.1 == 1));
    }

    #[test]
    fn roots_zero_poly_rejected() {
        assert!(poly_real_roots(&Poly::zero(), 1e-6).is_err());
    }

    #[test]
    fn rf_eval_half() {
        // f = L / 2 at x = 1 -> 1/2
        let f = RatFunc::new(Poly::x(), Poly::from_i64(&[2])).unwrap();
        assert_eq!(rf_eval(&f, &rat_int(1)).unwrap(), rat(1, 2));
    }

    #[test]
    fn rf_eval_pole() {
        let f = RatFunc::new(Poly::from_i64(&[-1, 0, 1]), Poly::x()).unwrap();
        assert!(matches!(rf_eval(&f, &rat_int(0)), Err(Error::PoleAtPoint)));
    }

    #[test]
    fn rf_eval_scaled() {
        // (3/4)(L^2 - 1)/L at L = 2 -> (3/4)(3/2) = 9/8
        let f = RatFunc::new(
            Poly::from_i64(&[-1, 0, 1]).scale(&rat(3, 4)),
            Poly::x(),
        )
        .unwrap();
        assert_eq!(rf_eval(&f, &rat_int(2)).unwrap(), rat(9, 8));
    }

    #[test]
    fn ratfunc_reduces() {
        // (L^2 - 1) / (2L - 2) = (L + 1) / 2
        let f = RatFunc::new(Poly::from_i64(&[-1, 0, 1]), Poly::from_i64(&[-2, 2])).unwrap();
        assert_eq!(f.den(), &Poly::from_i64(&[1]));
        assert_eq!(f.num(), &Poly::from_i64(&[1, 1]).scale(&rat(1, 2)));
    }

    #[test]
    fn integer_scaled_display() {
        let f = RatFunc::new(
            Poly::from_i64(&[-1, 0, 1]).scale(&rat(3, 4)),
            Poly::x(),
        )
        .unwrap();
        let (n, d) = f.integer_scaled_strings();
        assert_eq!(n, "3*L^2 - 3");
        assert_eq!(d, "4*L");
    }
}
