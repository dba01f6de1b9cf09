//! Band structure of the periodic operator: parabolic points (roots of
//! Tr M -+ 2), the closed elliptic bands between them, degeneracy detection,
//! and the (epsilon, eta) splitting search.

use num_complex::Complex64;

use crate::exact::{poly_real_roots, rat_from_f64, Poly};
use crate::monodromy::{monodromy_exact, monodromy_numeric};
use crate::operator::PeriodicJacobi;
use crate::{Error, Result};

/// Bracket width for exact root isolation of the discriminant.
pub const ROOT_PRECISION: f64 = 1e-12;
const NUMERIC_TOL: f64 = 1e-9;

/// A root of Tr M - 2 (sign = +1) or Tr M + 2 (sign = -1).
#[derive(Clone, Copy, Debug)]
pub struct ParabolicPoint {
    pub lambda: f64,
    pub sign: i8,
    pub mult: usize,
}

/// Parabolic points with multiplicities and the closed elliptic bands
/// between them.
#[derive(Clone, Debug)]
pub struct BandStructure {
    pub parabolic_plus: Vec<(f64, usize)>,
    pub parabolic_minus: Vec<(f64, usize)>,
    pub bands: Vec<(f64, f64)>,
    pub degenerate: bool,
}

impl BandStructure {
    /// All parabolic points merged and sorted by lambda.
    pub fn parabolic(&self) -> Vec<ParabolicPoint> {
        let mut out: Vec<ParabolicPoint> = self
            .parabolic_plus
            .iter()
            .map(|&(lambda, mult)| ParabolicPoint {
                lambda,
                sign: 1,
                mult,
            })
            .chain(self.parabolic_minus.iter().map(|&(lambda, mult)| {
                ParabolicPoint {
                    lambda,
                    sign: -1,
                    mult,
                }
            }))
            .collect();
        out.sort_by(|x, y| x.lambda.partial_cmp(&y.lambda).unwrap());
        out
    }
}

/// Result of the degeneracy-splitting search: the perturbation (epsilon on
/// b_1, eta on a_1) and the now non-degenerate band structure.
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub epsilon: f64,
    pub eta: f64,
    pub structure_after: BandStructure,
}

/// The discriminant Tr M as an exact polynomial.
pub fn discriminant_poly(j: &PeriodicJacobi) -> Result<Poly> {
    Ok(monodromy_exact(j)?.trace())
}

fn trace_at(j: &PeriodicJacobi, lambda: f64) -> f64 {
    monodromy_numeric(j, Complex64::new(lambda, 0.0)).trace().re
}

/// Band structure from the exact discriminant when rational mirrors exist,
/// falling back to grid bracketing of Tr -+ 2 otherwise.
pub fn band_structure(j: &PeriodicJacobi) -> Result<BandStructure> {
    let (plus, minus) = if j.has_exact() {
        let tr = discriminant_poly(j)?;
        let two = Poly::from_i64(&[2]);
        (
            poly_real_roots(&(&tr - &two), ROOT_PRECISION)?,
            poly_real_roots(&(&tr + &two), ROOT_PRECISION)?,
        )
    } else {
        (
            numeric_roots(j, -2.0)?,
            numeric_roots(j, 2.0)?,
        )
    };
    Ok(assemble(j, plus, minus))
}

/// Grid bracketing of Tr M + offset = 0 followed by bisection; only
/// sign-change (odd multiplicity) roots are visible to this path.
fn numeric_roots(j: &PeriodicJacobi, offset: f64) -> Result<Vec<(f64, usize)>> {
    let (lo, hi) = j.spectrum_enclosure();
    let lo = lo - 0.5;
    let hi = hi + 0.5;
    let n = 64 * j.period();
    let f = |x: f64| trace_at(j, x) + offset;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = lo + (hi - lo) * i as f64 / n as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push((x0, 1));
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            while b - a > NUMERIC_TOL {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                } else if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push((0.5 * (a + b), 1));
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

fn assemble(
    j: &PeriodicJacobi,
    plus: Vec<(f64, usize)>,
    minus: Vec<(f64, usize)>,
) -> BandStructure {
    let mut points: Vec<f64> = plus.iter().chain(&minus).map(|&(x, _)| x).collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut bands = Vec::new();
    for w in points.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if trace_at(j, mid).abs() < 2.0 {
            bands.push((w[0], w[1]));
        }
    }

    let any_multiple = plus.iter().chain(&minus).any(|&(_, m)| m >= 2);
    let touching = bands.windows(2).any(|w| w[0].1 == w[1].0);
    BandStructure {
        parabolic_plus: plus,
        parabolic_minus: minus,
        bands,
        degenerate: any_multiple || touching,
    }
}

/// The operator with b_1 -> b_1 + epsilon and a_1 -> a_1 + eta.
pub fn perturbed(j: &PeriodicJacobi, epsilon: f64, eta: f64) -> Result<PeriodicJacobi> {
    if j.has_exact() {
        let mut a = j.exact_a()?.to_vec();
        let mut b = j.exact_b()?.to_vec();
        a[0] += rat_from_f64(eta)
            .ok_or_else(|| Error::InvalidInput("non-finite eta".into()))?;
        b[0] += rat_from_f64(epsilon)
            .ok_or_else(|| Error::InvalidInput("non-finite epsilon".into()))?;
        PeriodicJacobi::from_rationals(a, b)
    } else {
        let mut a = j.a().to_vec();
        let mut b = j.b().to_vec();
        a[0] += eta;
        b[0] += epsilon;
        PeriodicJacobi::new(a, b)
    }
}

const SPLIT_MAX_STEPS: u32 = 64;

/// Search for a perturbation (epsilon, eta) of magnitude at most `bound`
/// that makes all 2T parabolic points simple.
///
/// The route follows the degenerate-case dichotomy: at each degenerate point
/// test |p_3| + |p_3'| != 0 (p_3 = m_21 of the monodromy matrix); if it holds
/// somewhere a diagonal perturbation (epsilon, eta = 0) is tried, otherwise
/// an off-diagonal one (epsilon = 0, eta). Each trial is re-verified through
/// `band_structure`, shrinking geometrically from `bound`.
pub fn split_degeneracy(j: &PeriodicJacobi, bound: f64) -> Result<SplitResult> {
    if bound <= 0.0 {
        return Err(Error::InvalidInput("bound must be positive".into()));
    }
    let before = band_structure(j)?;
    if !before.degenerate {
        return Err(Error::NothingToSplit);
    }

    let degenerate_points: Vec<f64> = {
        let mut pts: Vec<f64> = before
            .parabolic()
            .iter()
            .filter(|p| p.mult >= 2)
            .map(|p| p.lambda)
            .collect();
        for w in before.bands.windows(2) {
            if w[0].1 == w[1].0 {
                pts.push(w[0].1);
            }
        }
        pts
    };

    // p_3 = m_21; evaluated numerically, the threshold only routes the search
    let p3_alive = degenerate_points.iter().any(|&x| {
        let m = monodromy_numeric(j, Complex64::new(x, 0.0));
        let h = 1e-6;
        let d = (monodromy_numeric(j, Complex64::new(x + h, 0.0)).m21
            - monodromy_numeric(j, Complex64::new(x - h, 0.0)).m21)
            / (2.0 * h);
        m.m21.norm() + d.norm() > 1e-9
    });

    let mut mag = bound;
    for _ in 0..SPLIT_MAX_STEPS {
        for signed in [mag, -mag] {
            let (eps, eta) = if p3_alive { (signed, 0.0) } else { (0.0, signed) };
            let candidate = match perturbed(j, eps, eta) {
                Ok(op) => op,
                Err(_) => continue, // a_1 + eta <= 0
            };
            if let Ok(after) = band_structure(&candidate) {
                if !after.degenerate {
                    return Ok(SplitResult {
                        epsilon: eps,
                        eta,
                        structure_after: after,
                    });
                }
            }
        }
        mag /= 2.0;
    }
    Err(Error::SplitSearchFailed(SPLIT_MAX_STEPS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::monodromy::{classify_point, PointTag};

    fn exact_op(a: &[i64], b: &[i64]) -> PeriodicJacobi {
        PeriodicJacobi::from_rationals(
            a.iter().map(|&x| rat_int(x)).collect(),
            b.iter().map(|&x| rat_int(x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn free_t1_single_band() {
        let bs = band_structure(&exact_op(&[1], &[0])).unwrap();
        assert_eq!(bs.bands.len(), 1);
        assert!((bs.bands[0].0 + 2.0).abs() < 1e-10);
        assert!((bs.bands[0].1 - 2.0).abs() < 1e-10);
        assert!(!bs.degenerate);
    }

    #[test]
    fn t2_two_bands() {
        // Tr = L^2/2 - 5/2; Tr = +-2 at +-3, +-1
        let bs = band_structure(&exact_op(&[1, 2], &[0, 0])).unwrap();
        assert_eq!(bs.bands.len(), 2);
        let flat: Vec<f64> = bs
            .bands
            .iter()
            .flat_map(|&(l, r)| [l, r])
            .collect();
        for (got, want) in flat.iter().zip([-3.0, -1.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert!(!bs.degenerate);
    }

    #[test]
    fn t2_equal_couplings_degenerate() {
        // Tr = L^2 - 2; Tr + 2 = L^2 has a double root at 0
        let bs = band_structure(&exact_op(&[1, 1], &[0, 0])).unwrap();
        assert_eq!(bs.parabolic_minus, vec![(0.0, 2)]);
        assert!(bs.degenerate);
        assert_eq!(bs.bands.len(), 2);
        assert_eq!(bs.bands[0].1, bs.bands[1].0);
    }

    #[test]
    fn symmetric_about_zero_for_zero_diagonal() {
        let bs = band_structure(&exact_op(&[1, 2, 3], &[0, 0, 0])).unwrap();
        let n = bs.bands.len();
        for i in 0..n {
            assert!((bs.bands[i].0 + bs.bands[n - 1 - i].1).abs() < 1e-9);
        }
    }

    #[test]
    fn band_interiors_elliptic_gaps_hyperbolic() {
        let j = exact_op(&[1, 2, 3], &[0, 0, 0]);
        let bs = band_structure(&j).unwrap();
        for &(l, r) in &bs.bands {
            for i in 1..100 {
                let x = l + (r - l) * i as f64 / 100.0;
                if x == l || x == r {
                    continue;
                }
                let tag = classify_point(&j, Complex64::new(x, 0.0)).tag;
                assert_ne!(tag, PointTag::Hyperbolic, "x = {x} in band [{l}, {r}]");
            }
        }
        for w in bs.bands.windows(2) {
            let (gl, gr) = (w[0].1, w[1].0);
            if gl == gr {
                continue;
            }
            for i in 1..100 {
                let x = gl + (gr - gl) * i as f64 / 100.0;
                let tag = classify_point(&j, Complex64::new(x, 0.0)).tag;
                assert_ne!(tag, PointTag::Elliptic, "x = {x} in gap [{gl}, {gr}]");
            }
        }
    }

    #[test]
    fn endpoints_within_spectrum_enclosure() {
        let j = exact_op(&[1, 3, 2], &[1, 0, -1]);
        let bs = band_structure(&j).unwrap();
        let (lo, hi) = j.spectrum_enclosure();
        for &(l, r) in &bs.bands {
            assert!(l >= lo - 1e-9 && r <= hi + 1e-9);
        }
    }

    #[test]
    fn split_t2_equal_couplings() {
        let j = exact_op(&[1, 1], &[0, 0]);
        let res = split_degeneracy(&j, 0.25).unwrap();
        assert!(res.epsilon.abs() <= 0.25 && res.eta.abs() <= 0.25);
        assert!(!res.structure_after.degenerate);
        let all = res.structure_after.parabolic();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|p| p.mult == 1));
    }

    #[test]
    fn split_hand_derived_eta_gap() {
        // a = (1.1, 1): Tr(0) = -(1.1 + 1/1.1) < -2, roots of Tr = -2 at +-0.1
        let j = perturbed(&exact_op(&[1, 1], &[0, 0]), 0.0, 0.1).unwrap();
        let bs = band_structure(&j).unwrap();
        assert!(!bs.degenerate);
        assert_eq!(bs.parabolic_minus.len(), 2);
        assert!((bs.parabolic_minus[0].0 + 0.1).abs() < 1e-9);
        assert!((bs.parabolic_minus[1].0 - 0.1).abs() < 1e-9);
        assert!((trace_at(&j, 0.0) + (1.1 + 1.0 / 1.1)).abs() < 1e-12);
    }

    #[test]
    fn split_non_degenerate_rejected() {
        let j = exact_op(&[1, 2], &[0, 0]);
        assert!(matches!(
            split_degeneracy(&j, 0.1),
            Err(Error::NothingToSplit)
        ));
    }

    #[test]
    fn nondegenerate_stable_under_small_perturbations() {
        let j = exact_op(&[1, 2, 3], &[0, 0, 0]);
        assert!(!band_structure(&j).unwrap().degenerate);
        let scale = 1e-6;
        for i in 0..20 {
            let eps = scale * ((i as f64 * 0.37).sin());
            let eta = scale * ((i as f64 * 0.71).cos());
            let jp = perturbed(&j, eps, eta).unwrap();
            assert!(!band_structure(&jp).unwrap().degenerate, "i = {i}");
        }
    }
}
