//! End-to-end acceptance suite. Each numbered check prints one pass/fail
//! line; the test fails if any check fails.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jacobi_embed::bands::{band_structure, perturbed, split_degeneracy};
use jacobi_embed::cfunction::{
    c_closed_form_t1, c_closed_form_t2, c_closed_form_t3, c_exact, c_numeric, c_zeros_in_bands,
};
use jacobi_embed::exact::{rat, rat_int, BigRat};
use jacobi_embed::monodromy::{
    check_exact_structure, classify_point, monodromy_exact, monodromy_numeric, PointTag,
};
use jacobi_embed::operator::PeriodicJacobi;
use jacobi_embed::verify::{embedded_eigen_check, fit_oscillation};
use jacobi_embed::wvn::{
    omega_sequence, q_asymptotic_params, schrodinger_fixture_residuals, wvn_construct, WvnParams,
};
use jacobi_embed::Error;

fn random_rat(rng: &mut ChaCha8Rng, positive: bool) -> BigRat {
    let p = rng.gen_range(1..=9i64);
    let q = rng.gen_range(1..=9i64);
    let sign = if positive || rng.gen_bool(0.5) { 1 } else { -1 };
    rat(sign * p, q)
}

fn random_operator(rng: &mut ChaCha8Rng, t: usize, zero_diag: bool) -> PeriodicJacobi {
    let a: Vec<BigRat> = (0..t).map(|_| random_rat(rng, true)).collect();
    let b: Vec<BigRat> = (0..t)
        .map(|_| {
            if zero_diag {
                rat_int(0)
            } else {
                random_rat(rng, false)
            }
        })
        .collect();
    PeriodicJacobi::from_rationals(a, b).unwrap()
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn check(&mut self, id: u32, label: &str, ok: Result<(), String>) {
        match ok {
            Ok(()) => println!("criterion {id:02} {label}: pass"),
            Err(msg) => {
                println!("criterion {id:02} {label}: FAIL ({msg})");
                self.failures.push(format!("{id:02} {label}: {msg}"));
            }
        }
    }
}

fn c01_exact_monodromy_structure() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..50 {
        let t = rng.gen_range(1..=6);
        let j = random_operator(&mut rng, t, false);
        let m = monodromy_exact(&j).map_err(|e| format!("trial {trial}: {e}"))?;
        check_exact_structure(&j, &m).map_err(|e| format!("trial {trial}: {e}"))?;
    }
    Ok(())
}

fn c02_c_closed_forms() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for trial in 0..10 {
        let a1 = random_rat(&mut rng, true);
        let j1 = PeriodicJacobi::from_rationals(vec![a1.clone()], vec![rat_int(0)]).unwrap();
        let lhs = c_exact(&j1).map_err(|e| e.to_string())?.f;
        let rhs = c_closed_form_t1(&a1).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("T=1 trial {trial}: {lhs} != {rhs}"));
        }

        let a2 = random_rat(&mut rng, true);
        let j2 = PeriodicJacobi::from_rationals(
            vec![a1.clone(), a2.clone()],
            vec![rat_int(0); 2],
        )
        .unwrap();
        let lhs = c_exact(&j2).map_err(|e| e.to_string())?.f;
        let rhs = c_closed_form_t2(&a1, &a2).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("T=2 trial {trial}: {lhs} != {rhs}"));
        }

        let a3 = random_rat(&mut rng, true);
        let j3 = PeriodicJacobi::from_rationals(
            vec![a1.clone(), a2.clone(), a3.clone()],
            vec![rat_int(0); 3],
        )
        .unwrap();
        let lhs = c_exact(&j3).map_err(|e| e.to_string())?.f;
        let rhs = c_closed_form_t3(&a1, &a2, &a3).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("T=3 trial {trial}: {lhs} != {rhs}"));
        }
    }
    Ok(())
}

fn c03_order_theorem() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for trial in 0..50 {
        let t = rng.gen_range(1..=6);
        let j = random_operator(&mut rng, t, true);
        let ce = c_exact(&j).map_err(|e| format!("trial {trial}: {e}"))?;
        if ce.leading_order != 1 {
            return Err(format!("trial {trial}: order {}", ce.leading_order));
        }
        let expect: BigRat = j
            .exact_a()
            .unwrap()
            .iter()
            .map(|a| BigRat::new(1.into(), 2.into()) / a)
            .sum();
        if ce.leading_coeff != expect {
            return Err(format!("trial {trial}: leading coefficient mismatch"));
        }
    }
    Ok(())
}

fn c04_omega_asymptotics() -> Result<(), String> {
    let t1 = PeriodicJacobi::from_rationals(vec![rat_int(1)], vec![rat_int(0)]).unwrap();
    let t2 = PeriodicJacobi::from_rationals(
        vec![rat_int(1), rat_int(2)],
        vec![rat_int(0); 2],
    )
    .unwrap();
    let t3 =
        PeriodicJacobi::from_rationals(vec![rat_int(1); 3], vec![rat_int(0); 3]).unwrap();
    let cases: [(&PeriodicJacobi, f64, f64, f64); 10] = [
        (&t1, 1.0, 2.0, 1e-6),
        (&t1, 1.0, 1.8, 1e-6),
        (&t1, -1.0, 2.0, 1e-6),
        (&t1, 1.0, 1.75, 1e-4),
        (&t2, 2.0, 2.0, 1e-6),
        (&t2, -2.0, 2.0, 1e-6),
        (&t2, 1.6, 1.9, 1e-5),
        (&t2, -1.6, 1.9, 1e-5),
        (&t3, 0.8, 2.0, 1e-6),
        (&t3, -0.8, 1.8, 1e-6),
    ];
    for (i, (j, lambda, alpha, tol)) in cases.iter().enumerate() {
        let c = c_numeric(j, *lambda).map_err(|e| format!("case {i}: {e}"))?;
        if c.abs() < 0.1 {
            return Err(format!("case {i}: |C| = {} < 0.1", c.abs()));
        }
        let params = WvnParams::new(*lambda)
            .with_alpha(*alpha)
            .with_horizon(10_000)
            .with_tail_tol(*tol);
        let (omega, _, _) = omega_sequence(j, &params).map_err(|e| format!("case {i}: {e}"))?;
        let limit = c / (2.0 * (alpha - 1.0) * j.period() as f64);
        let dev = |n: usize| ((n as f64).powf(alpha - 1.0) * omega[n - 1] - limit).abs();
        let d4 = dev(10_000);
        let d3 = dev(1_000);
        if d4 > 0.05 * limit.abs() {
            return Err(format!("case {i}: deviation {d4} > 5% of {limit}"));
        }
        if d4 > d3 / 5.0 {
            return Err(format!("case {i}: deviation {d4} not < ({d3})/5"));
        }
    }
    Ok(())
}

fn c05_construction_identity() -> Result<(), String> {
    let cases: [(Vec<i64>, f64); 3] = [
        (vec![1], 1.0),
        (vec![1, 2], 2.0),
        (vec![1, 1, 1], 0.8),
    ];
    for (a, lambda) in cases {
        let j = PeriodicJacobi::from_rationals(
            a.iter().map(|&x| rat_int(x)).collect(),
            vec![rat_int(0); a.len()],
        )
        .unwrap();
        let params = WvnParams::new(lambda).with_horizon(10_000).with_tail_tol(1e-6);
        let res = wvn_construct(&j, &params).map_err(|e| e.to_string())?;
        let scale = res.u_seq().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for n in 2..10_000usize {
            let r = j.a_at(n - 1) * res.u_at(n - 1)
                + (res.q_at(n) - lambda) * res.u_at(n)
                + j.a_at(n) * res.u_at(n + 1);
            if r.abs() > 1e-12 * scale {
                return Err(format!("a = {a:?}: interior residual {r} at n = {n}"));
            }
        }
        let first = (res.q_at(1) - lambda) * res.u_at(1) + j.a_at(1) * res.u_at(2);
        if first.abs() > 1e-12 * scale.max(1.0) {
            return Err(format!("a = {a:?}: first-row residual {first}"));
        }
    }
    Ok(())
}

fn c06_embedded_eigenvalue() -> Result<(), String> {
    let cases: [(Vec<i64>, f64); 3] = [
        (vec![1], 1.0),
        (vec![1, 2], 2.0),
        (vec![1, 1, 1], 0.8),
    ];
    for (a, lambda) in cases {
        let j = PeriodicJacobi::from_rationals(
            a.iter().map(|&x| rat_int(x)).collect(),
            vec![rat_int(0); a.len()],
        )
        .unwrap();
        let params = WvnParams::new(lambda).with_horizon(10_000).with_tail_tol(1e-6);
        let (_, rep) = embedded_eigen_check(&j, &params).map_err(|e| e.to_string())?;
        if rep.spectral_distance > 1e-3 {
            return Err(format!("a = {a:?}: spectral distance {}", rep.spectral_distance));
        }
        if rep.eigvec_correlation < 0.99 {
            return Err(format!("a = {a:?}: correlation {}", rep.eigvec_correlation));
        }
        if (rep.decay_exponent_fit + 1.0).abs() > 0.15 {
            return Err(format!("a = {a:?}: decay fit {}", rep.decay_exponent_fit));
        }
    }
    Ok(())
}

fn c07_coulomb_decay() -> Result<(), String> {
    let cases: [(Vec<i64>, f64); 3] = [
        (vec![1], 1.0),
        (vec![1, 2], 2.0),
        (vec![1, 1, 1], 0.8),
    ];
    for (a, lambda) in cases {
        let t = a.len();
        let j = PeriodicJacobi::from_rationals(
            a.iter().map(|&x| rat_int(x)).collect(),
            vec![rat_int(0); t],
        )
        .unwrap();
        let params = WvnParams::new(lambda).with_horizon(10_000).with_tail_tol(1e-6);
        let res = wvn_construct(&j, &params).map_err(|e| e.to_string())?;
        let qa = q_asymptotic_params(&j, lambda, 2.0).map_err(|e| e.to_string())?;
        let bound = 2.0
            * (0..t)
                .map(|s| qa.rho[s] + qa.delta[s].abs())
                .fold(0.0f64, f64::max);
        let worst = (10..=10_000usize)
            .map(|n| n as f64 * res.q_at(n).abs())
            .fold(0.0f64, f64::max);
        if worst > bound {
            return Err(format!("a = {a:?}: max n|q_n| = {worst} > {bound}"));
        }
        // fitted oscillation amplitude per residue, n in [2000, 10000]
        let theta = jacobi_embed::monodromy::quasimomentum(&j, lambda).unwrap();
        let freq = 2.0 * theta / t as f64;
        for s in 0..t {
            let samples: Vec<(f64, f64)> = (2_000..=10_000usize)
                .filter(|n| n % t == s)
                .map(|n| (n as f64, n as f64 * res.q_at(n)))
                .collect();
            let (amp, _, _) = fit_oscillation(&samples, freq);
            if (amp - qa.rho[s]).abs() > 0.2 * qa.rho[s].max(1e-9) {
                return Err(format!(
                    "a = {a:?}, residue {s}: fitted amplitude {amp} vs rho {}",
                    qa.rho[s]
                ));
            }
        }
    }
    Ok(())
}

fn c08_explicit_fixture() -> Result<(), String> {
    use num_traits::Zero;
    let (first, interior) = schrodinger_fixture_residuals(10_000);
    if !first.is_zero() {
        return Err("first-row residual nonzero".into());
    }
    if let Some(i) = interior.iter().position(|r| !r.is_zero()) {
        return Err(format!("interior residual nonzero at row {}", i + 2));
    }
    Ok(())
}

fn c09_hyperbolicity_off_axis() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for trial in 0..500 {
        let t = rng.gen_range(1..=5);
        let j = random_operator(&mut rng, t, false);
        let lambda = Complex64::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(1e-3..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
        );
        let class = classify_point(&j, lambda);
        if class.tag != PointTag::Hyperbolic {
            return Err(format!("trial {trial}: {lambda} not hyperbolic"));
        }
        let (e1, e2) = monodromy_numeric(&j, lambda).eigenvalues_unimodular();
        let (lo, hi) = (e1.norm().min(e2.norm()), e1.norm().max(e2.norm()));
        if !(lo < 1.0 && hi > 1.0) {
            return Err(format!("trial {trial}: moduli {lo}, {hi} do not straddle 1"));
        }
    }
    Ok(())
}

fn c10_degeneracy_splitting() -> Result<(), String> {
    let degenerate_cases: [Vec<i64>; 3] = [vec![1, 1], vec![2, 2], vec![1, 1, 1, 1]];
    for a in &degenerate_cases {
        let t = a.len();
        let j = PeriodicJacobi::from_rationals(
            a.iter().map(|&x| rat_int(x)).collect(),
            vec![rat_int(0); t],
        )
        .unwrap();
        let split = split_degeneracy(&j, 0.25).map_err(|e| format!("a = {a:?}: {e}"))?;
        let pts = split.structure_after.parabolic();
        if pts.len() != 2 * t || pts.iter().any(|p| p.mult != 1) {
            return Err(format!(
                "a = {a:?}: expected {} simple parabolic points, got {:?}",
                2 * t,
                pts.iter().map(|p| (p.lambda, p.mult)).collect::<Vec<_>>()
            ));
        }
    }
    // hand-derived gap: T=2, a=(1,1), eta=0.1 opens (-0.1, 0.1)
    let j = PeriodicJacobi::from_rationals(vec![rat_int(1); 2], vec![rat_int(0); 2]).unwrap();
    let jp = perturbed(&j, 0.0, 0.1).map_err(|e| e.to_string())?;
    let bs = band_structure(&jp).map_err(|e| e.to_string())?;
    let near = |x: f64| {
        bs.parabolic_minus
            .iter()
            .any(|&(r, m)| (r - x).abs() < 1e-9 && m == 1)
    };
    if !(near(0.1) && near(-0.1)) {
        return Err(format!("gap edges {:?} not at +/-0.1", bs.parabolic_minus));
    }
    Ok(())
}

fn c11_obstruction() -> Result<(), String> {
    for t in [1usize, 3] {
        let j =
            PeriodicJacobi::from_rationals(vec![rat_int(1); t], vec![rat_int(0); t]).unwrap();
        let zeros = c_zeros_in_bands(&j).map_err(|e| e.to_string())?;
        if !zeros.iter().any(|z| z.abs() < 1e-12) {
            return Err(format!("T = {t}: no zero at 0 in {zeros:?}"));
        }
        match wvn_construct(&j, &WvnParams::new(0.0).with_horizon(100).with_tail_tol(1e-4)) {
            Err(Error::EmbeddingObstruction(l)) if l == 0.0 => {}
            other => {
                return Err(format!(
                    "T = {t}: expected obstruction, got {other:?}"
                ))
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let mut gate = Gate { failures: vec![] };
    gate.check(1, "exact monodromy structure", c01_exact_monodromy_structure());
    gate.check(2, "C closed forms T=1,2,3", c02_c_closed_forms());
    gate.check(3, "C order and leading coefficient", c03_order_theorem());
    gate.check(4, "omega tail asymptotics", c04_omega_asymptotics());
    gate.check(5, "construction identity", c05_construction_identity());
    gate.check(6, "embedded eigenvalue at desk scale", c06_embedded_eigenvalue());
    gate.check(7, "Coulomb decay of q", c07_coulomb_decay());
    gate.check(8, "explicit fixture exact residuals", c08_explicit_fixture());
    gate.check(9, "hyperbolicity off the real axis", c09_hyperbolicity_off_axis());
    gate.check(10, "degeneracy splitting", c10_degeneracy_splitting());
    gate.check(11, "obstruction at interior zeros", c11_obstruction());
    assert!(
        gate.failures.is_empty(),
        "failed criteria:\n{}",
        gate.failures.join("\n")
    );
}
