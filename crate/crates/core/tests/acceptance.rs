//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! appear in `cargo test` output.

mod common;

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use lti_mbam::lti::{balance, gramians, hankel_singular_values, hinf_norm, hinf_norm_band, StateSpace};
use lti_mbam::manifold::{
    mmr_model, nearest_on_family, two_exp_model, FrequencyDataMap, Metric, ResponseMode, DEFAULT_FREQUENCIES,
    DEFAULT_TIMES,
};
use lti_mbam::mbam::{
    geodesic_acceleration, run_geodesic, ClassifyOptions, FnModel, GeodesicOptions, GeodesicTrace, LimitKind,
    ParamModel, Termination,
};
use lti_mbam::params::{check_lemma1, extract_params, param_census, realize, BalancedParams, CensusKind};
use lti_mbam::random::{random_balanced_params, random_minimal_system, random_transform, seeded};
use lti_mbam::reduction::{balanced_truncate, bspa, interpolated_reduce};

use common::{kronecker_lyapunov, ExpSum};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("{what} took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn random_shape(rng: &mut impl Rng, n_lo: usize, n_hi: usize) -> (usize, usize, usize) {
    (
        rng.random_range(n_lo..=n_hi),
        rng.random_range(1..=3),
        rng.random_range(1..=3),
    )
}

fn rel_frob(x: &DMatrix<f64>, oracle: &DMatrix<f64>) -> f64 {
    (x - oracle).norm() / oracle.norm()
}

fn max_rel_entry(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.abs().max().max(b.abs().max());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs().max() / scale
    }
}

/// Largest relative transfer-matrix mismatch over a log grid and a few
/// complex test points.
fn response_mismatch(a: &StateSpace, b: &StateSpace) -> Result<f64, String> {
    let mut pts: Vec<Complex64> = (0..41)
        .map(|i| Complex64::new(0.0, 10f64.powf(-3.0 + 6.0 * i as f64 / 40.0)))
        .collect();
    pts.extend([Complex64::new(0.0, 0.0), Complex64::new(0.3, 2.0), Complex64::new(5.0, -1.0)]);
    let mut worst = 0.0f64;
    for s in pts {
        let ga = a.eval_transfer(s).map_err(e2s)?;
        let gb = b.eval_transfer(s).map_err(e2s)?;
        let scale = ga.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let diff = (ga - gb).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

fn c1_lyapunov() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(101);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (n, m, p) = random_shape(&mut rng, 1, 10);
        let sys = random_minimal_system(&mut rng, n, m, p).map_err(e2s)?;
        let g = gramians(&sys).map_err(e2s)?;
        let p_oracle = kronecker_lyapunov(sys.a(), &(sys.b() * sys.b().transpose()));
        let q_oracle = kronecker_lyapunov(&sys.a().transpose(), &(sys.c().transpose() * sys.c()));
        worst = worst
            .max(rel_frob(&g.controllability, &p_oracle))
            .max(rel_frob(&g.observability, &q_oracle));
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, || format!("worst relative Frobenius error {worst:.2e} > 1e-9"))?;
    within(elapsed, 30.0, "200 systems")?;
    Ok(format!("worst rel. error {worst:.2e}, {:.2} s", elapsed.as_secs_f64()))
}

fn c2_balancing() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(202);
    let (mut resid, mut lemma, mut invariance) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let (n, m, p) = random_shape(&mut rng, 1, 10);
        let sys = random_minimal_system(&mut rng, n, m, p).map_err(e2s)?;
        let bal = balance(&sys).map_err(e2s)?;
        let scale = bal.sys().b().norm_squared().max(bal.sys().c().norm_squared()).max(1.0);
        let (obs, ctrb) = bal.lyapunov_residuals();
        resid = resid.max(obs.max(ctrb) / scale);
        lemma = lemma.max(check_lemma1(bal.sys()) / scale);
        let moved = sys.similarity(&random_transform(&mut rng, n)).map_err(e2s)?;
        let h = hankel_singular_values(&moved).map_err(e2s)?;
        invariance = invariance.max((&h - bal.hsv()).amax() / bal.hsv()[0]);
    }
    let elapsed = start.elapsed();
    ensure(resid <= 1e-8, || format!("Gramian residual {resid:.2e} > 1e-8"))?;
    ensure(lemma <= 1e-8, || format!("Lemma-1 deviation {lemma:.2e} > 1e-8"))?;
    ensure(invariance <= 1e-8, || format!("HSV similarity drift {invariance:.2e} > 1e-8"))?;
    within(elapsed, 60.0, "200 systems")?;
    Ok(format!(
        "residual {resid:.2e}, lemma-1 {lemma:.2e}, invariance {invariance:.2e}, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn c3_round_trip() -> Outcome {
    let mut rng = seeded(303);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (n, m, p) = random_shape(&mut rng, 1, 8);
        let params = random_balanced_params(&mut rng, n, m, p).map_err(e2s)?;
        let real = realize(&params).map_err(e2s)?;
        let back = realize(&extract_params(&real.balanced).map_err(e2s)?).map_err(e2s)?;
        worst = worst.max(response_mismatch(real.balanced.sys(), back.balanced.sys())?);
    }
    ensure(worst <= 1e-8, || format!("response mismatch {worst:.2e} > 1e-8"))?;
    Ok(format!("worst response mismatch {worst:.2e}"))
}

fn c4_bounds() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(404);
    let (mut worst_ratio, mut dc_worst, mut cases) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..200 {
        let (n, m, p) = random_shape(&mut rng, 2, 10);
        let sys = random_minimal_system(&mut rng, n, m, p).map_err(e2s)?;
        let bal = balance(&sys).map_err(e2s)?;
        let dc = sys.dc_gain().map_err(e2s)?;
        for k in 1..n {
            let bound = 2.0 * bal.hsv().as_slice()[n - k..].iter().sum::<f64>();
            let bt = balanced_truncate(&bal, k).map_err(e2s)?.reduced;
            let sp = bspa(&bal, k).map_err(e2s)?.reduced;
            ensure(bt.d() == sys.d(), || format!("BT changed D at n={n}, k={k}"))?;
            for red in [&bt, &sp] {
                let err = hinf_norm(&sys.difference(red).map_err(e2s)?).map_err(e2s)?.norm;
                ensure(err <= bound + 1e-3 * bound, || {
                    format!("n={n}, k={k}: error {err:.6e} exceeds bound {bound:.6e}")
                })?;
                worst_ratio = worst_ratio.max(err / bound);
            }
            let dc_err = (sp.dc_gain().map_err(e2s)? - &dc).abs().max() / dc.abs().max().max(1.0);
            dc_worst = dc_worst.max(dc_err);
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(dc_worst <= 1e-8, || format!("BSPA DC-gain error {dc_worst:.2e} > 1e-8"))?;
    within(elapsed, 300.0, "bound sweep")?;
    Ok(format!(
        "{cases} (system, k) pairs, max error/bound {worst_ratio:.4}, BSPA DC error {dc_worst:.2e}, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

fn two_state(theta2: f64, r2: f64) -> Result<lti_mbam::BalancedRealization, String> {
    let params = BalancedParams::siso(&[1.0, theta2], &[1.0, r2], 0.0).map_err(e2s)?;
    Ok(realize(&params).map_err(e2s)?.balanced)
}

fn band_distance(a: &StateSpace, b: &StateSpace) -> Result<f64, String> {
    Ok(hinf_norm_band(&a.difference(b).map_err(e2s)?, 1e-4, 1e2).map_err(e2s)?.norm)
}

fn strictly_decreasing(d: &[f64]) -> bool {
    d.windows(2).all(|w| w[1] < w[0])
}

fn c5_theorem_limits() -> Outcome {
    let base = two_state(0.7, 8.0)?;
    let g_norm = hinf_norm(base.sys()).map_err(e2s)?.norm;
    let bt = balanced_truncate(&base, 1).map_err(e2s)?.reduced;
    let sp = bspa(&base, 1).map_err(e2s)?.reduced;
    let eps = [1e-2, 1e-4, 1e-6];
    let mut via_theta = Vec::new();
    let mut via_r_small = Vec::new();
    for &e in &eps {
        via_theta.push(band_distance(two_state(e, 8.0)?.sys(), &bt)?);
        via_r_small.push(band_distance(two_state(0.7, e)?.sys(), &bt)?);
    }
    let mut via_r_large = Vec::new();
    for r2 in [1e1, 1e2, 1e3] {
        via_r_large.push(band_distance(two_state(0.7, r2)?.sys(), &sp)?);
    }
    for (name, d, limit) in [
        ("theta2 -> 0", &via_theta, 1e-4 * g_norm),
        ("r2 -> 0", &via_r_small, 1e-4 * g_norm),
        ("r2 -> inf", &via_r_large, 1e-3 * g_norm),
    ] {
        ensure(strictly_decreasing(d), || format!("{name}: not monotone {d:?}"))?;
        let last = *d.last().unwrap();
        ensure(last <= limit, || format!("{name}: final distance {last:.3e} > {limit:.3e}"))?;
    }
    Ok(format!(
        "final distances {:.2e} / {:.2e} (to BT), {:.2e} (to BSPA); |G| = {g_norm:.4}",
        via_theta[2], via_r_small[2], via_r_large[2]
    ))
}

fn c6_endpoints() -> Outcome {
    let mut rng = seeded(606);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (n, m, p) = random_shape(&mut rng, 2, 10);
        let sys = random_minimal_system(&mut rng, n, m, p).map_err(e2s)?;
        let bal = balance(&sys).map_err(e2s)?;
        let k = rng.random_range(1..n);
        let tail: Vec<f64> = bal.hsv().as_slice()[n - k..].to_vec();
        let at_zero = interpolated_reduce(&bal, k, &vec![0.0; k]).map_err(e2s)?.reduced;
        let at_theta = interpolated_reduce(&bal, k, &tail).map_err(e2s)?.reduced;
        let bt = balanced_truncate(&bal, k).map_err(e2s)?.reduced;
        let sp = bspa(&bal, k).map_err(e2s)?.reduced;
        for (x, y) in [(&at_zero, &bt), (&at_theta, &sp)] {
            for (u, v) in [(x.a(), y.a()), (x.b(), y.b()), (x.c(), y.c()), (x.d(), y.d())] {
                worst = worst.max(max_rel_entry(u, v));
            }
        }
    }
    ensure(worst <= 1e-13, || format!("endpoint mismatch {worst:.2e} > 1e-13"))?;
    Ok(format!("worst matrixwise mismatch {worst:.2e}"))
}

fn mmr_kinds(opts: &GeodesicOptions) -> Result<(Vec<LimitKind>, GeodesicTrace), String> {
    let model = mmr_model(1.0, &DEFAULT_TIMES).map_err(e2s)?;
    let trace = run_geodesic(&model, &[1.0, 1.0], opts).map_err(e2s)?;
    let kinds = trace
        .classification
        .as_ref()
        .ok_or("trace was not classified")?
        .kinds
        .clone();
    Ok((kinds, trace))
}

fn c7_mmr() -> Outcome {
    use LimitKind::{Finite, ToInfinity, ToZero};
    let forward = GeodesicOptions::default();
    let reverse = GeodesicOptions {
        reverse: true,
        ..GeodesicOptions::default()
    };
    let start = Instant::now();
    let (kf, tf) = mmr_kinds(&forward)?;
    within(start.elapsed(), 30.0, "forward run")?;
    let start = Instant::now();
    let (kr, _) = mmr_kinds(&reverse)?;
    within(start.elapsed(), 30.0, "reverse run")?;
    ensure(kf == [ToInfinity, ToInfinity], || format!("forward classified {kf:?}"))?;
    ensure(kr == [Finite, ToZero], || format!("reverse classified {kr:?}"))?;

    // ratio drift over the last decade of growth
    let end = tf.params.last().unwrap()[0];
    let ratios: Vec<f64> = tf.params.iter().filter(|p| p[0] >= end / 10.0).map(|p| p[0] / p[1]).collect();
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let drift = (hi - lo) / ratios.last().unwrap();
    ensure(drift < 0.05, || format!("rho1/rho2 drift {drift:.3} over the last decade"))?;

    let base_classify = ClassifyOptions::default();
    let mut variants: Vec<(String, GeodesicOptions)> = Vec::new();
    for s in [0.1f64, 10.0] {
        variants.push((
            format!("log10_bound x{s}"),
            GeodesicOptions {
                log10_bound: forward.log10_bound + s.log10(),
                ..forward.clone()
            },
        ));
        variants.push((
            format!("speed_blowup x{s}"),
            GeodesicOptions {
                speed_blowup: forward.speed_blowup * s,
                ..forward.clone()
            },
        ));
        variants.push((
            format!("fim_condition_max x{s}"),
            GeodesicOptions {
                fim_condition_max: forward.fim_condition_max * s,
                ..forward.clone()
            },
        ));
    }
    variants.push((
        "factor x0.1".into(),
        GeodesicOptions {
            classify: ClassifyOptions {
                factor: base_classify.factor / 10.0,
                ..base_classify
            },
            ..forward.clone()
        },
    ));
    // a larger limit factor only makes sense if the run may go further
    variants.push((
        "factor x10 with fim_condition_max x10".into(),
        GeodesicOptions {
            classify: ClassifyOptions {
                factor: base_classify.factor * 10.0,
                ..base_classify
            },
            fim_condition_max: forward.fim_condition_max * 10.0,
            ..forward.clone()
        },
    ));
    for (name, opts) in &variants {
        for (reverse, want) in [(false, vec![ToInfinity, ToInfinity]), (true, vec![Finite, ToZero])] {
            let opts = GeodesicOptions {
                reverse,
                ..opts.clone()
            };
            let (kinds, _) = mmr_kinds(&opts)?;
            ensure(kinds == want, || format!("{name}, reverse={reverse}: {kinds:?}"))?;
        }
    }
    Ok(format!(
        "forward {kf:?} ratio {:.5} (drift {:.1e}), reverse {kr:?}; stable under {} perturbations",
        ratios.last().unwrap(),
        drift,
        variants.len()
    ))
}

fn speed_spread(trace: &GeodesicTrace) -> f64 {
    trace.speeds.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
}

fn c8_geodesic_machinery() -> Outcome {
    // constant speed on curved models
    let mut worst_speed = 0.0f64;
    let mmr = mmr_model(1.0, &DEFAULT_TIMES).map_err(e2s)?;
    let two_exp = two_exp_model([1.0, 1.0], &DEFAULT_TIMES).map_err(e2s)?;
    let runs: Vec<(&str, &dyn ParamModel, Vec<f64>)> = vec![
        ("mmr", &mmr, vec![1.0, 1.0]),
        ("two-exp", &two_exp, vec![1.0, 2.0]),
    ];
    for (name, model, p0) in runs {
        for reverse in [false, true] {
            let opts = GeodesicOptions {
                reverse,
                ..GeodesicOptions::default()
            };
            let trace = run_geodesic(&model, &p0, &opts).map_err(e2s)?;
            ensure(trace.len() > 10, || format!("{name}: only {} points", trace.len()))?;
            let s = speed_spread(&trace);
            ensure(s <= 0.05, || format!("{name} reverse={reverse}: speed deviates by {s:.3}"))?;
            worst_speed = worst_speed.max(s);
        }
    }

    // contracted acceleration against the full Christoffel symbols
    let mut worst_gamma = 0.0f64;
    let cases = [
        (vec![1.0, 2.0, 3.0], vec![1.0], vec![0.8], vec![1.0]),
        (vec![0.5, 1.0, 2.0, 4.0], vec![1.0, 1.0], vec![0.3, 1.7], vec![0.6, -0.8]),
        (
            vec![0.25, 0.5, 1.0, 2.0, 4.0],
            vec![1.0, 0.5, 2.0],
            vec![0.2, 1.0, 3.0],
            vec![0.2, 0.9, -0.3],
        ),
    ];
    for (times, coeffs, p, v) in cases {
        let es = ExpSum { times, coeffs };
        let a = geodesic_acceleration(&es.model(), &p, &v).map_err(e2s)?;
        let oracle = es.christoffel_acceleration(&p, &v);
        let rel = (&a - &oracle).norm() / oracle.norm();
        ensure(rel <= 1e-6, || format!("N = {}: acceleration off by {rel:.2e}", p.len()))?;
        worst_gamma = worst_gamma.max(rel);
    }

    // flat models: y = M p + c
    let mut worst_line = 0.0f64;
    let m2 = DMatrix::from_row_slice(4, 2, &[1.0, 0.5, -0.3, 2.0, 0.7, 0.1, 0.0, 1.0]);
    let m3 = DMatrix::from_row_slice(5, 3, &[1.0, 0.0, 0.2, 0.5, 1.0, 0.0, 0.0, 0.3, 1.0, 1.0, 1.0, 1.0, -1.0, 0.5, 0.0]);
    for (mat, p0) in [(m2, vec![0.3, -1.0]), (m3, vec![1.0, 2.0, -0.5])] {
        let n = mat.ncols();
        let offset = DVector::from_fn(mat.nrows(), |i, _| i as f64 * 0.25);
        let model = FnModel::new(n, mat.nrows(), |p: &[f64]| Ok(&mat * DVector::from_column_slice(p) + &offset))
            .map_err(e2s)?;
        let trace = run_geodesic(
            &model,
            &p0,
            &GeodesicOptions {
                tau_max: 5.0,
                ..GeodesicOptions::default()
            },
        )
        .map_err(e2s)?;
        ensure(trace.termination == Termination::MaxTau, || {
            format!("flat model stopped with {:?}", trace.termination)
        })?;
        let start = DVector::from_column_slice(&p0);
        let v0 = &trace.velocities[0];
        for (tau, p) in trace.taus.iter().zip(&trace.params) {
            let expected = &start + v0 * *tau;
            worst_line = worst_line.max((p - expected).amax());
        }
    }
    ensure(worst_line <= 1e-8, || format!("flat geodesic deviates by {worst_line:.2e}"))?;
    Ok(format!(
        "speed deviation {worst_speed:.2e}, Christoffel mismatch {worst_gamma:.2e}, straight-line deviation {worst_line:.2e}"
    ))
}

fn c9_dominance() -> Outcome {
    let map = FrequencyDataMap::new(&DEFAULT_FREQUENCIES, ResponseMode::Magnitude).map_err(e2s)?;
    let mut detail = Vec::new();
    for (theta2, r2, bspa_wins) in [(0.7, 8.0, true), (0.01, 0.8, false)] {
        let bal = two_state(theta2, r2)?;
        let target = map.map(bal.sys()).map_err(e2s)?;
        let r = nearest_on_family(&target, &bal, 1, &map, Metric::Euclidean).map_err(e2s)?;
        let ok = if bspa_wins {
            r.bspa_distance < r.bt_distance
        } else {
            r.bt_distance < r.bspa_distance
        };
        ensure(ok, || {
            format!("({theta2}, {r2}): BT {:.6e}, BSPA {:.6e}", r.bt_distance, r.bspa_distance)
        })?;
        if !bspa_wins {
            let scale = target.norm();
            let best_end = r.bt_distance.min(r.bspa_distance);
            let eta = r.eta_star[0];
            ensure(eta > 0.0 && eta < theta2, || format!("eta* = {eta} is not interior"))?;
            ensure(r.distance <= best_end - 1e-6 * scale, || {
                format!("eta* distance {:.6e} vs endpoints {best_end:.6e}", r.distance)
            })?;
            detail.push(format!("eta* = {eta:.4e} at {:.4e}", r.distance));
        }
        detail.push(format!(
            "({theta2}, {r2}): BT {:.4e}, BSPA {:.4e}",
            r.bt_distance, r.bspa_distance
        ));
    }
    Ok(detail.join("; "))
}

fn c10_census() -> Outcome {
    let mut rng = seeded(1010);
    for _ in 0..20 {
        let big_n = rng.random_range(1..=30usize);
        let n = rng.random_range(1..=30usize);
        let m = rng.random_range(1..=8usize);
        let p = rng.random_range(1..=8usize);
        let tf = param_census(CensusKind::TransferFunction, big_n, m, p).map_err(e2s)?;
        let tf1 = param_census(CensusKind::TransferFunctionRank1, big_n, m, p).map_err(e2s)?;
        let ss = param_census(CensusKind::StateSpace, n, m, p).map_err(e2s)?;
        let bal = param_census(CensusKind::BalancedStateSpace, n, m, p).map_err(e2s)?;
        let checks = [
            (tf.total, big_n * p * m + big_n + p * m),
            (tf1.total, big_n * p + big_n * m + p * m),
            (ss.total, n * n + n * m + n * p + p * m),
            (bal.identifiable, n * m + n * p + p * m),
            (bal.structural, n * n),
        ];
        for (got, want) in checks {
            ensure(got == want, || format!("(N={big_n}, n={n}, m={m}, p={p}): {got} != {want}"))?;
        }
    }
    Ok("20 tuples".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 Lyapunov/Gramian vs Kronecker oracle", c1_lyapunov),
        ("2 balancing", c2_balancing),
        ("3 parameter round trip", c3_round_trip),
        ("4 a priori error bounds", c4_bounds),
        ("5 parameter limits", c5_theorem_limits),
        ("6 interpolation endpoints", c6_endpoints),
        ("7 MMR geodesics", c7_mmr),
        ("8 geodesic machinery", c8_geodesic_machinery),
        ("9 data-space dominance", c9_dominance),
        ("10 parameter census", c10_census),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
