//! Numerical checks that the constructed (u, q) pair really is an
//! eigenpair: recurrence residuals, finite-section spectra via Sturm
//! bisection, inverse iteration, decay-rate fits, Wronskian drift.

use num_complex::Complex64;
use serde::Serialize;

use crate::monodromy::floquet_solution;
use crate::operator::PeriodicJacobi;
use crate::wvn::{wvn_construct, WvnParams, WvnResult};
use crate::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` of length N, `off` of length N-1.
#[derive(Clone, Debug)]
pub struct TridiagSection {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl TridiagSection {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "tridiagonal section needs |off| = |diag| - 1, got {} and {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(TridiagSection { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }
}

/// Number of eigenvalues strictly below x, by counting negative pivots of
/// the LDL^T factorization of A - xI.
pub fn sturm_count(sec: &TridiagSection, x: f64) -> usize {
    let mut count = 0usize;
    let mut d = 1.0f64;
    for i in 0..sec.dim() {
        let sub = if i > 0 { sec.off[i - 1] } else { 0.0 };
        d = sec.diag[i] - x - sub * sub / d;
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in [lo, hi], each bisected to absolute width `tol`.
pub fn finite_section_eigs(sec: &TridiagSection, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let (glo, ghi) = sec.bounds();
    let lo = lo.max(glo - 1.0);
    let hi = hi.min(ghi + 1.0);
    if lo >= hi {
        return Vec::new();
    }
    let k0 = sturm_count(sec, lo);
    let k1 = sturm_count(sec, hi);
    let mut out = Vec::with_capacity(k1.saturating_sub(k0));
    for k in k0..k1 {
        // invariant: count(a) <= k < count(b)
        let (mut a, mut b) = (lo, hi);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if sturm_count(sec, mid) <= k {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// One eigenvector by shifted inverse iteration; tridiagonal LU with
/// partial pivoting, unit 2-norm result.
pub fn inverse_iteration(sec: &TridiagSection, sigma: f64) -> Vec<f64> {
    let n = sec.dim();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..6 {
        let mut w = solve_shifted(sec, sigma, &v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return v;
        }
        for x in &mut w {
            *x /= norm;
        }
        v = w;
    }
    // fix overall sign: largest-magnitude entry positive
    let lead = v
        .iter()
        .cloned()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if lead < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    v
}

/// Solve (A - sigma I) x = b for tridiagonal A: LU with partial pivoting
/// and one super-superdiagonal of fill-in.
fn solve_shifted(sec: &TridiagSection, sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = sec.dim();
    let mut dd: Vec<f64> = sec.diag.iter().map(|x| x - sigma).collect();
    let mut du = sec.off.clone();
    let dl = sec.off.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut x: Vec<f64> = b.to_vec();
    let tiny = f64::MIN_POSITIVE;
    if n == 1 {
        if dd[0] == 0.0 {
            dd[0] = tiny;
        }
        return vec![x[0] / dd[0]];
    }
    for i in 0..n - 1 {
        if dd[i].abs() >= dl[i].abs() {
            if dd[i] == 0.0 {
                dd[i] = tiny;
            }
            let fact = dl[i] / dd[i];
            dd[i + 1] -= fact * du[i];
            x[i + 1] -= fact * x[i];
        } else {
            let fact = dd[i] / dl[i];
            dd[i] = dl[i];
            let tmp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = tmp - fact * du[i];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            x.swap(i, i + 1);
            x[i + 1] -= fact * x[i];
        }
    }
    if dd[n - 1] == 0.0 {
        dd[n - 1] = tiny;
    }
    x[n - 1] /= dd[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i];
    }
    x
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VerificationReport {
    pub lambda: f64,
    pub alpha: f64,
    pub horizon: usize,
    /// max over interior rows of |a_{n-1}u_{n-1} + (q_n - lambda)u_n + a_n u_{n+1}|
    pub max_interior_residual: f64,
    /// |(q_1 - lambda)u_1 + a_1 u_2|
    pub first_row_residual: f64,
    pub u_scale: f64,
    /// distance from lambda to the nearest finite-section eigenvalue
    pub spectral_distance: f64,
    /// a_N |u_{N+1}|: norm of the row dropped by the Dirichlet cut
    pub residual_bound: f64,
    /// |<u, v>| / (|u||v|) against the inverse-iteration eigenvector,
    /// restricted to n <= N/2 where the cut is not felt
    pub eigvec_correlation: f64,
    /// slope of log(per-period envelope of |u|) against log n
    pub decay_exponent_fit: f64,
    pub decay_exponent_expected: f64,
    pub wronskian_drift: f64,
}

/// Residuals of the three-term recurrence for real sequences; `u` and `q`
/// are 0-based (u[0] = u_1). Returns (max interior, first row, max |u|).
pub fn recurrence_residual(
    j: &PeriodicJacobi,
    lambda: f64,
    u: &[f64],
    q: &[f64],
) -> (f64, f64, f64) {
    let n = u.len();
    let scale = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let first = (q[0] + j.b_at(1) - lambda) * u[0] + j.a_at(1) * u[1];
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        let site = i + 1;
        let r = j.a_at(site - 1) * u[i - 1]
            + (q[i] + j.b_at(site) - lambda) * u[i]
            + j.a_at(site) * u[i + 1];
        worst = worst.max(r.abs());
    }
    (worst, first.abs(), scale)
}

/// Same residual for complex sequences (zero potential), used to check
/// generalized eigenfunctions.
pub fn recurrence_residual_complex(j: &PeriodicJacobi, lambda: f64, u: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..u.len() - 1 {
        let site = i + 1;
        let r = j.a_at(site - 1) * u[i - 1] + (j.b_at(site) - lambda) * u[i]
            + j.a_at(site) * u[i + 1];
        worst = worst.max(r.norm());
    }
    worst
}

/// Least-squares fit of samples (x, y) to y = A sin(freq x) + B cos(freq x) + D;
/// returns (amplitude, phase, offset) with the model amplitude sin(freq x + phase) + offset.
pub fn fit_oscillation(samples: &[(f64, f64)], freq: f64) -> (f64, f64, f64) {
    // 3x3 normal equations
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(x, y) in samples {
        let basis = [(freq * x).sin(), (freq * x).cos(), 1.0];
        for i in 0..3 {
            for k in 0..3 {
                m[i][k] += basis[i] * basis[k];
            }
            rhs[i] += basis[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&p, &r| m[p][col].abs().total_cmp(&m[r][col].abs()))
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..3 {
            let fac = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= fac * m[col][k];
            }
            rhs[row] -= fac * rhs[col];
        }
    }
    let mut sol = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut v = rhs[row];
        for k in row + 1..3 {
            v -= m[row][k] * sol[k];
        }
        sol[row] = v / m[row][row];
    }
    (sol[0].hypot(sol[1]), sol[1].atan2(sol[0]), sol[2])
}

/// Slope of log(envelope of |u|) vs log(n) over n in [n_lo, n_hi]. Each
/// envelope block spans a full oscillation cycle of the Floquet phase, so
/// the near-zeros of sin do not pollute the fit.
fn decay_fit(u: &[f64], block: usize, n_lo: usize, n_hi: usize) -> f64 {
    let mut pts = Vec::new();
    let mut n = n_lo;
    while n + block <= n_hi {
        let env = (n..n + block).fold(0.0f64, |m, i| m.max(u[i - 1].abs()));
        if env > 0.0 {
            pts.push(((n as f64 + 0.5 * block as f64).ln(), env.ln()));
        }
        n += block;
    }
    let len = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (len * sxy - sx * sy) / (len * sxx - sx * sx)
}

/// Drift of the discrete Wronskian of phi and conj(phi) along 60 sites.
fn wronskian_drift(j: &PeriodicJacobi, lambda: f64) -> Result<f64> {
    let span = 60usize;
    let (_, phi) = floquet_solution(j, lambda, span + 1)?;
    let w = |n: usize| {
        // a_0 resolves to a_T inside a_at
        j.a_at(n) * (phi[n + 1] * phi[n].conj() - phi[n] * phi[n + 1].conj())
    };
    let w0 = w(0);
    let mut drift = 0.0f64;
    for n in 1..span {
        drift = drift.max((w(n) - w0).norm() / w0.norm());
    }
    Ok(drift)
}

/// Verify externally supplied sequences (e.g. re-read from a CSV emitted by
/// the embedding run). `u` and `q` are 0-based.
pub fn verify_sequences(
    j: &PeriodicJacobi,
    lambda: f64,
    alpha: f64,
    u: &[f64],
    q: &[f64],
) -> Result<VerificationReport> {
    if u.len() < 8 || u.len() != q.len() {
        return Err(Error::InvalidInput(
            "need equal-length u and q with at least 8 entries".into(),
        ));
    }
    let n = u.len();
    let (max_interior, first_row, scale) = recurrence_residual(j, lambda, u, q);

    // recover the entry beyond the cut from the last interior row
    let u_beyond =
        ((lambda - q[n - 1] - j.b_at(n)) * u[n - 1] - j.a_at(n - 1) * u[n - 2]) / j.a_at(n);
    let residual_bound = j.a_at(n) * u_beyond.abs();

    let diag: Vec<f64> = (1..=n).map(|i| q[i - 1] + j.b_at(i)).collect();
    let off: Vec<f64> = (1..n).map(|i| j.a_at(i)).collect();
    let sec = TridiagSection::new(diag, off)?;
    let eigs = finite_section_eigs(&sec, lambda - 0.5, lambda + 0.5, 1e-12);
    let spectral_distance = eigs
        .iter()
        .map(|e| (e - lambda).abs())
        .fold(f64::MAX, f64::min);
    let nearest = eigs
        .iter()
        .cloned()
        .min_by(|p, r| (p - lambda).abs().total_cmp(&(r - lambda).abs()));

    let eigvec_correlation = match nearest {
        Some(e) => {
            let v = inverse_iteration(&sec, e);
            let half = n / 2;
            let dot: f64 = (0..half).map(|i| u[i] * v[i]).sum();
            let nu: f64 = (0..half).map(|i| u[i] * u[i]).sum::<f64>().sqrt();
            let nv: f64 = (0..half).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
            (dot / (nu * nv)).abs()
        }
        None => 0.0,
    };

    let theta = crate::monodromy::quasimomentum(j, lambda)?;
    let cycle = j.period() * ((2.0 * std::f64::consts::PI / theta).ceil() as usize).max(1);
    let decay_exponent_fit = decay_fit(u, cycle, (n / 10).max(8), n);

    Ok(VerificationReport {
        lambda,
        alpha,
        horizon: n,
        max_interior_residual: max_interior,
        first_row_residual: first_row,
        u_scale: scale,
        spectral_distance,
        residual_bound,
        eigvec_correlation,
        decay_exponent_fit,
        decay_exponent_expected: -(alpha - 1.0),
        wronskian_drift: wronskian_drift(j, lambda)?,
    })
}

/// Run the construction and verify it in one step.
pub fn embedded_eigen_check(
    j: &PeriodicJacobi,
    params: &WvnParams,
) -> Result<(WvnResult, VerificationReport)> {
    let res = wvn_construct(j, params)?;
    let mut report = verify_sequences(j, params.lambda, params.alpha, res.u_seq(), res.q_seq())?;
    // the construction knows the true entry beyond the cut
    report.residual_bound = j.a_at(res.horizon()) * res.u_beyond.abs();
    Ok((res, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_section(n: usize) -> TridiagSection {
        TridiagSection::new(vec![0.0; n], vec![1.0; n - 1]).unwrap()
    }

    #[test]
    fn eigs_2x2() {
        let eigs = finite_section_eigs(&free_section(2), -3.0, 3.0, 1e-12);
        assert_eq!(eigs.len(), 2);
        assert!((eigs[0] + 1.0).abs() < 1e-11);
        assert!((eigs[1] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn eigs_3x3() {
        let eigs = finite_section_eigs(&free_section(3), -3.0, 3.0, 1e-12);
        let expect = [-(2.0f64).sqrt(), 0.0, (2.0f64).sqrt()];
        assert_eq!(eigs.len(), 3);
        for (e, x) in eigs.iter().zip(expect) {
            assert!((e - x).abs() < 1e-11);
        }
    }

    #[test]
    fn eigs_dirichlet_laplacian_100() {
        // eigenvalues 2 cos(k pi / 101)
        let sec = free_section(100);
        let eigs = finite_section_eigs(&sec, -2.5, 2.5, 1e-12);
        assert_eq!(eigs.len(), 100);
        for (i, e) in eigs.iter().enumerate() {
            let k = 100 - i; // ascending order
            let expect = 2.0 * (k as f64 * std::f64::consts::PI / 101.0).cos();
            assert!((e - expect).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn sturm_counts_bracket() {
        let sec = free_section(10);
        assert_eq!(sturm_count(&sec, -3.0), 0);
        assert_eq!(sturm_count(&sec, 0.0), 5);
        assert_eq!(sturm_count(&sec, 3.0), 10);
    }

    #[test]
    fn inverse_iteration_3x3() {
        let sec = free_section(3);
        let v = inverse_iteration(&sec, (2.0f64).sqrt() + 1e-13);
        // eigenvector (1, sqrt2, 1)/2
        let expect = [0.5, 0.5 * (2.0f64).sqrt(), 0.5];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8, "{v:?}");
        }
    }

    #[test]
    fn oscillation_fit_recovers_amplitude() {
        let freq = 0.7;
        let samples: Vec<(f64, f64)> = (0..400)
            .map(|i| {
                let x = i as f64;
                (x, 1.3 * (freq * x + 0.4).sin() + 0.25)
            })
            .collect();
        let (amp, phase, offset) = fit_oscillation(&samples, freq);
        assert!((amp - 1.3).abs() < 1e-10);
        assert!((phase - 0.4).abs() < 1e-10);
        assert!((offset - 0.25).abs() < 1e-10);
    }

    #[test]
    fn wronskian_flat_for_floquet() {
        let j = PeriodicJacobi::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let d = wronskian_drift(&j, 2.0).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn full_check_on_free_schrodinger() {
        let j = PeriodicJacobi::from_rationals(
            vec![crate::exact::rat_int(1)],
            vec![crate::exact::rat_int(0)],
        )
        .unwrap();
        let params = WvnParams::new(1.0).with_horizon(1_500).with_tail_tol(1e-6);
        let (res, report) = embedded_eigen_check(&j, &params).unwrap();
        assert!(report.max_interior_residual <= 1e-12 * report.u_scale);
        assert!(report.first_row_residual <= 1e-12 * report.u_scale.max(1.0));
        assert!(report.spectral_distance <= report.residual_bound.max(1e-9) * 50.0);
        assert!(report.eigvec_correlation > 0.9);
        assert!((report.decay_exponent_fit - report.decay_exponent_expected).abs() < 0.3);
        assert!(report.wronskian_drift < 1e-12);
        assert_eq!(res.horizon(), 1_500);
    }
}
