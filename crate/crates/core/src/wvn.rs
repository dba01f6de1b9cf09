//! The Wigner-von Neumann construction: tail sums omega_n, the candidate
//! eigenvector u_n = omega_n Im(phi_n), the Coulomb-decaying potential q_n,
//! boundary completion of the first two rows, and the closed-form
//! asymptotic parameters of u and q.

use std::collections::BTreeMap;

use crate::cfunction::{c_numeric, c_zeros_in_bands};
use crate::exact::{rat, BigRat};
use crate::monodromy::{floquet_solution, FloquetData};
use crate::operator::PeriodicJacobi;
use crate::{Error, Result};

/// Largest admissible tail cutoff before `TailBudgetExceeded`.
pub const TAIL_BUDGET: u64 = 600_000_000;

/// Parameters of one embedding run.
#[derive(Clone, Debug)]
pub struct WvnParams {
    /// Target eigenvalue; must be elliptic with C(lambda; T) != 0.
    pub lambda: f64,
    /// Decay exponent; omega_n is square-summable for alpha > 3/2.
    pub alpha: f64,
    /// Horizon: sequences are produced for n = 1..N.
    pub n: usize,
    /// Requested bound on the anchored tail error.
    pub tail_tol: f64,
    /// Optional multipliers c_m inside the tail sum (the repair knob for
    /// vanishing omega_n); absent entries mean c_m = 1.
    pub c_overrides: BTreeMap<usize, f64>,
    /// Free boundary parameter q_1 (case u_2 != 0); defaults to lambda + 1.
    pub q1_override: Option<f64>,
    /// Free boundary parameter q_2 (case u_2 = 0); defaults to 0.
    pub q2_override: Option<f64>,
}

impl WvnParams {
    pub fn new(lambda: f64) -> Self {
        WvnParams {
            lambda,
            alpha: 2.0,
            n: 10_000,
            tail_tol: 1e-8,
            c_overrides: BTreeMap::new(),
            q1_override: None,
            q2_override: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_horizon(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.5) {
            return Err(Error::InvalidInput(format!(
                "alpha = {} but omega_n is only square-summable for alpha > 3/2",
                self.alpha
            )));
        }
        if self.n < 3 {
            return Err(Error::InvalidInput("horizon must be at least 3".into()));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidInput("tail_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Which branch of the boundary completion ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCase {
    U2Nonzero,
    U2Zero,
}

#[derive(Clone, Copy, Debug)]
pub struct Boundary {
    pub u1: f64,
    pub q1: f64,
    pub q2: f64,
    pub case_tag: BoundaryCase,
}

/// Output of the construction. Sequences are padded so that index n holds
/// the n-th element (index 0 is unused); `seq()`-style accessors return the
/// 1-based content as a plain slice.
#[derive(Clone, Debug)]
pub struct WvnResult {
    omega: Vec<f64>,
    u: Vec<f64>,
    q: Vec<f64>,
    pub tail_cutoff: u64,
    pub est_tail_error: f64,
    pub boundary: Boundary,
    pub lambda: f64,
    pub alpha: f64,
    /// u_{N+1}, kept for the finite-section residual bound a_N |u_{N+1}|.
    pub u_beyond: f64,
    /// c_m overrides in effect after any repair passes.
    pub c_applied: BTreeMap<usize, f64>,
}

impl WvnResult {
    pub fn horizon(&self) -> usize {
        self.u.len() - 1
    }

    pub fn omega_at(&self, n: usize) -> f64 {
        self.omega[n]
    }

    pub fn u_at(&self, n: usize) -> f64 {
        self.u[n]
    }

    pub fn q_at(&self, n: usize) -> f64 {
        self.q[n]
    }

    /// omega_1..omega_N.
    pub fn omega_seq(&self) -> &[f64] {
        &self.omega[1..]
    }

    pub fn u_seq(&self) -> &[f64] {
        &self.u[1..]
    }

    pub fn q_seq(&self) -> &[f64] {
        &self.q[1..]
    }
}

/// Per-residue asymptotic parameters: q_n ~ (rho_s sin(2n theta/T + zeta_s)
/// + delta_s)/n and u_n ~ eta_tilde_s sin(n theta/T + zeta_tilde_s)/n^{alpha-1}.
#[derive(Clone, Debug)]
pub struct QAsymptotics {
    pub rho: Vec<f64>,
    pub zeta: Vec<f64>,
    pub delta: Vec<f64>,
    pub eta_tilde: Vec<f64>,
    pub zeta_tilde: Vec<f64>,
}

/// Detect the embedding obstruction C(lambda; T) = 0, exactly when rational
/// mirrors exist, by magnitude otherwise.
fn check_obstruction(j: &PeriodicJacobi, lambda: f64) -> Result<f64> {
    let c = c_numeric(j, lambda)?;
    if j.has_exact() {
        let zeros = c_zeros_in_bands(j)?;
        if zeros.iter().any(|&z| (z - lambda).abs() <= 1e-9) {
            return Err(Error::EmbeddingObstruction(lambda));
        }
    } else if c.abs() < 1e-12 {
        return Err(Error::EmbeddingObstruction(lambda));
    }
    Ok(c)
}

/// Tail of the zeta-like sum: sum_{m = M+1}^inf m^{-alpha}, by Euler-Maclaurin
/// at x = M.
fn power_tail(alpha: f64, m: f64) -> f64 {
    let f = m.powf(-alpha);
    m.powf(1.0 - alpha) / (alpha - 1.0) - 0.5 * f + alpha * f / (12.0 * m)
        - alpha * (alpha + 1.0) * (alpha + 2.0) * f / (720.0 * m * m * m)
}

struct OmegaFill {
    omega: Vec<f64>,
    cutoff: u64,
    est_tail_error: f64,
}

/// Choose the cutoff, anchor omega at it with the analytic mean-term tail,
/// and fill downward by the defining difference rule.
///
/// `store_to` is the largest n whose omega is kept (n = 1..store_to).
fn omega_fill(
    j: &PeriodicJacobi,
    data: &FloquetData,
    alpha: f64,
    tail_tol: f64,
    store_to: usize,
    c: &BTreeMap<usize, f64>,
) -> Result<OmegaFill> {
    let t = j.period();
    let theta = data.theta;
    let phi = &data.phi;

    let cell_norm_sq: f64 = phi.iter().map(|p| p.norm_sqr()).sum();
    let k_const = cell_norm_sq / (2.0 * t as f64 * (alpha - 1.0));
    let mut cutoff = (4 * store_to as u64)
        .max((k_const / tail_tol).powf(1.0 / (alpha - 1.0)).ceil() as u64);

    // mean of Im(phi_m) Im(phi_{m-1}) over one period is C / (2T)
    let mut mean = 0.0;
    let mut osc_amp = 0.0;
    for s in 1..=t {
        let phi_s = if s == t { data.mu } else { phi[s] };
        mean += (phi_s * phi[s - 1].conj()).re;
        osc_amp += phi_s.norm() * phi[s - 1].norm();
    }
    mean /= 2.0 * t as f64;
    osc_amp /= 2.0 * t as f64;

    // oscillatory remainder beyond the cutoff, Abel-summation style
    let est = |m: u64| {
        let j_periods = (m as f64 / t as f64).max(1.0);
        osc_amp / theta.sin().abs() * j_periods.powf(-alpha)
    };
    while est(cutoff) > tail_tol {
        cutoff *= 2;
        if cutoff > TAIL_BUDGET {
            break;
        }
    }
    if cutoff > TAIL_BUDGET {
        return Err(Error::TailBudgetExceeded {
            tol: tail_tol,
            required: cutoff,
            budget: TAIL_BUDGET,
        });
    }
    let est_tail_error = est(cutoff);

    let im_phi = |n: u64| -> f64 {
        let s = (n % t as u64) as usize;
        let x = (n / t as u64) as f64 * theta;
        phi[s].re * x.sin() + phi[s].im * x.cos()
    };
    let c_at = |n: u64| -> f64 {
        if c.is_empty() {
            1.0
        } else {
            c.get(&(n as usize)).copied().unwrap_or(1.0)
        }
    };

    let mut omega = vec![0.0; store_to + 1];
    let mut w = mean * power_tail(alpha, cutoff as f64);
    if (cutoff as usize) <= store_to {
        omega[cutoff as usize] = w;
    }
    let mut im_hi = im_phi(cutoff);
    for n in (2..=cutoff).rev() {
        let im_lo = im_phi(n - 1);
        w += c_at(n) * (n as f64).powf(-alpha) * im_hi * im_lo;
        if (n - 1) as usize <= store_to {
            omega[(n - 1) as usize] = w;
        }
        im_hi = im_lo;
    }

    Ok(OmegaFill {
        omega,
        cutoff,
        est_tail_error,
    })
}

/// The tail sums omega_1..omega_N together with the cutoff and the reported
/// tail-error estimate.
pub fn omega_sequence(
    j: &PeriodicJacobi,
    params: &WvnParams,
) -> Result<(Vec<f64>, u64, f64)> {
    params.validate()?;
    if !j.diagonal_is_zero() {
        return Err(Error::UnsupportedDiagonal);
    }
    check_obstruction(j, params.lambda)?;
    let (data, _) = floquet_solution(j, params.lambda, 0)?;
    let fill = omega_fill(
        j,
        &data,
        params.alpha,
        params.tail_tol,
        params.n,
        &params.c_overrides,
    )?;
    Ok((fill.omega[1..].to_vec(), fill.cutoff, fill.est_tail_error))
}

/// Full construction: omega, u, q, and the boundary completion.
pub fn wvn_construct(j: &PeriodicJacobi, params: &WvnParams) -> Result<WvnResult> {
    params.validate()?;
    if !j.diagonal_is_zero() {
        return Err(Error::UnsupportedDiagonal);
    }
    check_obstruction(j, params.lambda)?;
    let (data, _) = floquet_solution(j, params.lambda, 0)?;
    let n_horizon = params.n;
    let alpha = params.alpha;
    let lambda = params.lambda;

    // repair loop: bump c_{n+1} at the smallest n with omega_n = 0
    let mut c = params.c_overrides.clone();
    let mut fill = omega_fill(j, &data, alpha, params.tail_tol, n_horizon + 1, &c)?;
    let mut passes = 0usize;
    while let Some(bad) = (1..=n_horizon).find(|&n| fill.omega[n] == 0.0) {
        passes += 1;
        if passes > n_horizon {
            return Err(Error::InternalInconsistency(
                "omega repair did not terminate".into(),
            ));
        }
        let slot = c.entry(bad + 1).or_insert(1.0);
        *slot *= 2.0;
        fill = omega_fill(j, &data, alpha, params.tail_tol, n_horizon + 1, &c)?;
    }

    let im_phi = |n: usize| data.im_phi_at(n);
    let c_at = |n: usize| c.get(&n).copied().unwrap_or(1.0);

    let mut u = vec![0.0; n_horizon + 1];
    for n in 2..=n_horizon {
        u[n] = fill.omega[n] * im_phi(n);
    }
    let u_beyond = fill.omega[n_horizon + 1] * im_phi(n_horizon + 1);

    let mut q = vec![0.0; n_horizon + 1];
    for n in 3..=n_horizon {
        let im_prev = im_phi(n - 1);
        let im_next = im_phi(n + 1);
        q[n] = (-j.a_at(n - 1) * im_prev * im_prev * c_at(n) * (n as f64).powf(-alpha)
            + j.a_at(n) * im_next * im_next * c_at(n + 1) * ((n + 1) as f64).powf(-alpha))
            / fill.omega[n];
    }

    // boundary completion of rows 1 and 2
    let (u2, u3) = (u[2], u[3]);
    if u2 == 0.0 && u3 == 0.0 {
        return Err(Error::DegenerateStart);
    }
    let boundary = if u2 != 0.0 {
        let q1 = params.q1_override.unwrap_or(lambda + 1.0);
        if q1 == lambda {
            return Err(Error::InvalidInput(
                "q1 must differ from lambda in the u_2 != 0 branch".into(),
            ));
        }
        let u1 = -j.a_at(1) * u2 / (q1 - lambda);
        let q2 = lambda - (j.a_at(1) * u1 + j.a_at(2) * u3) / u2;
        Boundary {
            u1,
            q1,
            q2,
            case_tag: BoundaryCase::U2Nonzero,
        }
    } else {
        let u1 = -j.a_at(2) * u3 / j.a_at(1);
        Boundary {
            u1,
            q1: lambda,
            q2: params.q2_override.unwrap_or(0.0),
            case_tag: BoundaryCase::U2Zero,
        }
    };
    u[1] = boundary.u1;
    q[1] = boundary.q1;
    q[2] = boundary.q2;

    fill.omega.truncate(n_horizon + 1);
    Ok(WvnResult {
        omega: fill.omega,
        u,
        q,
        tail_cutoff: fill.cutoff,
        est_tail_error: fill.est_tail_error,
        boundary,
        lambda,
        alpha,
        u_beyond,
        c_applied: c,
    })
}

/// Closed-form per-residue asymptotics of q and u.
pub fn q_asymptotic_params(j: &PeriodicJacobi, lambda: f64, alpha: f64) -> Result<QAsymptotics> {
    if !j.diagonal_is_zero() {
        return Err(Error::UnsupportedDiagonal);
    }
    let c_val = check_obstruction(j, lambda)?;
    let (data, _) = floquet_solution(j, lambda, 0)?;
    let t = j.period();
    let tf = t as f64;
    let theta = data.theta;
    let factor = 2.0 * tf * (alpha - 1.0) / c_val;

    let mut rho = Vec::with_capacity(t);
    let mut zeta = Vec::with_capacity(t);
    let mut delta = Vec::with_capacity(t);
    let mut eta_tilde = Vec::with_capacity(t);
    let mut zeta_tilde = Vec::with_capacity(t);
    for s in 0..t {
        let left = &data.osc[(s + t - 1) % t];
        let right = &data.osc[(s + 1) % t];
        // sites n == s (mod T): a_{n-1} and a_n depend only on the residue
        let a_left = j.a_at(s + t - 1);
        let a_right = j.a_at(s + t);
        // crossing a period boundary shifts the neighbour's phase by 2 theta
        let ph_left = left.phase + if s == 0 { -2.0 * theta } else { 0.0 };
        let ph_right = right.phase + if s == t - 1 { 2.0 * theta } else { 0.0 };

        let coef_sin =
            factor * (right.eta * a_right * ph_right.cos() - left.eta * a_left * ph_left.cos());
        let coef_cos =
            factor * (right.eta * a_right * ph_right.sin() - left.eta * a_left * ph_left.sin());
        rho.push(coef_sin.hypot(coef_cos));
        zeta.push(coef_cos.atan2(coef_sin) - 2.0 * s as f64 * theta / tf);
        delta.push(factor * (-left.gamma * a_left + right.gamma * a_right));

        let p = data.phi[s];
        eta_tilde.push(c_val * p.norm() / (2.0 * (alpha - 1.0) * tf));
        zeta_tilde.push(p.im.atan2(p.re) - s as f64 * theta / tf);
    }
    Ok(QAsymptotics {
        rho,
        zeta,
        delta,
        eta_tilde,
        zeta_tilde,
    })
}

/// The paper-level explicit embedded-eigenvalue pair for the free discrete
/// Schrodinger operator (T = 1, a = 1, lambda = 0):
/// u_n = (-1)^{floor(n/2)} / n and q_n = 2n(-1)^n/(n^2 - 1) for n >= 2,
/// q_1 = 1/2. Exact rationals, n = 1..n_max.
pub fn schrodinger_fixture(n_max: usize) -> (Vec<BigRat>, Vec<BigRat>) {
    let mut u = Vec::with_capacity(n_max);
    let mut q = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let sign_u = if (n / 2) % 2 == 0 { 1 } else { -1 };
        u.push(rat(sign_u, n as i64));
        if n == 1 {
            q.push(rat(1, 2));
        } else {
            let sign_q = if n % 2 == 0 { 1 } else { -1 };
            q.push(rat(2 * n as i64 * sign_q, (n * n - 1) as i64));
        }
    }
    (u, q)
}

/// Residual of the fixture identities in exact arithmetic: the first-row
/// value u_2 + q_1 u_1 and the worst interior row. Both must be zero.
pub fn schrodinger_fixture_residuals(n_max: usize) -> (BigRat, Vec<BigRat>) {
    let (u, q) = schrodinger_fixture(n_max);
    let first = &u[1] + &q[0] * &u[0];
    let mut interior = Vec::new();
    for n in 2..n_max {
        // u_{n+1} + u_{n-1} + q_n u_n (lambda = 0)
        interior.push(&u[n] + &u[n - 2] + &(&q[n - 1] * &u[n - 1]));
    }
    (first, interior)
}
