//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use alt_cardinal::construct::{
    archimedean_count, check_density, check_ladder_equiv, dead_band, reconstruct, representation_check,
    verify_affine_uniqueness, ReconstructionOptions, AFFINE_RESIDUAL_THRESHOLD, DEFAULT_TOL_T,
};
use alt_cardinal::gossen::{check_ggfl, concavity_roundtrip, ConcavityLaw};
use alt_cardinal::smooth::{
    alep_classify, debreu_smoothness_proxy, line_smoothness_limit, numeric_gradient, numeric_hessian, solve_f,
    AlepLabel, DebreuOptions, DEFAULT_ALEP_THRESHOLD,
};
use alt_cardinal::system::{
    check_consistency, check_continuity_proxy, check_crossover, check_second_consistency, CheckOptions,
    DiagonalSampler, UniformSampler, DEFAULT_CONTINUITY_DELTA,
};
use alt_cardinal::zoo::{catalog, lookup, lookup_utility, UtilitySpec};
use alt_cardinal::{AltOracle, IntensityOrder, Point, Preference};

const SEED: u64 = 20240501;

const CONTINUOUS_MONOTONE: [&str; 8] =
    ["linear", "cobb_douglas", "ces", "exp1d", "log_sum", "kinked_composite", "min", "cubic"];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn oracle(name: &str) -> AltOracle<f64> {
    lookup::<f64>(name).unwrap().oracle().unwrap()
}

fn kinked_counterexample() -> Outcome {
    let o = oracle("kinked_composite");
    let mut worst: f64 = 0.0;
    for a in [1e-2, 1e-3, 1e-4] {
        let f = solve_f(&o, a, 1.0, 1e-10).unwrap();
        worst = worst.max((f - (1.0 - a / 4.0)).abs());
    }
    let r = line_smoothness_limit(&o, 1.0, None).unwrap();
    let ok = worst < 1e-6 && (r.estimate - 0.25).abs() <= 1e-3;
    outcome(ok, format!("max |f - (1 - a/4)| = {worst:.2e}, limit = {:.6} +/- {:.1e}", r.estimate, r.uncertainty))
}

fn min_independence() -> Outcome {
    let o = oracle("min");
    let mut worst: f64 = 0.0;
    for b in [1.0, 2.5, 5.0] {
        worst = worst.max(line_smoothness_limit(&o, b, None).unwrap().estimate.abs());
    }
    let d =
        debreu_smoothness_proxy(&o, &DiagonalSampler, &CheckOptions::new(64, SEED), DebreuOptions::default()).unwrap();
    let ok = worst < 1e-3 && !d.passed && d.evaluated > 0;
    outcome(ok, format!("max |limit| = {worst:.2e}, debreu proxy failures {}/{}", d.failures, d.evaluated))
}

fn reconstruction(name: &str) -> Outcome {
    let o = oracle(name);
    let depth = 10;
    let r = reconstruct(&o, ReconstructionOptions { depth, ..Default::default() }).unwrap();
    let rep = representation_check(&r, 1000, SEED, dead_band(depth)).unwrap();
    let diag = o.domain().main_diagonal();
    let fit =
        verify_affine_uniqueness(&o, (diag.at(0.0), diag.at(1.0)), (diag.at(0.1), diag.at(0.9)), depth, 1000, SEED)
            .unwrap();
    let ok = rep.mismatches_outside_band == 0 && fit.passed(AFFINE_RESIDUAL_THRESHOLD);
    outcome(
        ok,
        format!(
            "{name}: mismatches outside band {} (inside {}), alpha = {:.4}, residual = {:.2e}",
            rep.mismatches_outside_band,
            rep.mismatches - rep.mismatches_outside_band,
            fit.alpha,
            fit.max_residual
        ),
    )
}

fn reconstruction_all() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in CONTINUOUS_MONOTONE {
        let start = Instant::now();
        let r = reconstruction(name);
        let took = start.elapsed();
        ok &= r.ok && took < Duration::from_secs(60);
        parts.push(format!("{} [{:.2} s]", r.detail, took.as_secs_f64()));
    }
    outcome(ok, parts.join("; "))
}

fn gossen_roundtrip() -> Outcome {
    let opts = CheckOptions::new(10_000, SEED);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut laws = std::collections::BTreeMap::new();
    for name in ["linear", "cobb_douglas", "log_sum", "concave_quadratic"] {
        let v = check_ggfl(&oracle(name), &UniformSampler, &opts).unwrap();
        ok &= v.violation_count == 0;
        parts.push(format!("{name} {:?}/{}", v.law, v.violation_count));
        laws.insert(name, v.law);
    }
    let exp = check_ggfl(&oracle("exp1d"), &UniformSampler, &opts).unwrap();
    ok &= exp.law == ConcavityLaw::Fails && !exp.witnesses.is_empty();
    parts.push(format!("exp1d {:?}/{}", exp.law, exp.violation_count));
    ok &= laws["linear"] != ConcavityLaw::HoldsStrictly && laws["concave_quadratic"] == ConcavityLaw::HoldsStrictly;
    for name in ["linear", "cobb_douglas", "log_sum", "concave_quadratic", "exp1d"] {
        let spec = lookup_utility::<f64>(name).unwrap();
        let rt = concavity_roundtrip(&spec, None, &CheckOptions::new(2000, SEED), 10).unwrap();
        ok &= rt.agree;
        if !rt.agree {
            parts.push(format!("{name} round trip: {}", rt.diff.join("; ")));
        }
    }
    outcome(ok, parts.join(", "))
}

fn axiom_suite() -> Outcome {
    let opts = CheckOptions::new(10_000, SEED);
    let mut ok = true;
    let mut failing = Vec::new();
    for spec in catalog::<f64>() {
        let o = spec.oracle().unwrap();
        let mut pass = check_consistency(&o, &UniformSampler, &opts).unwrap().passed()
            && check_crossover(&o, &UniformSampler, &opts, DEFAULT_TOL_T).unwrap().passed()
            && check_second_consistency(&o, &UniformSampler, &opts).unwrap().passed();
        if spec.continuous {
            pass &= check_continuity_proxy(&o, &UniformSampler, &opts, DEFAULT_CONTINUITY_DELTA).unwrap().passed();
        }
        if !pass {
            failing.push(spec.name.clone());
        }
        ok &= pass;
    }
    let broken = oracle("broken_crossover");
    let r = check_crossover(&broken, &UniformSampler, &opts, DEFAULT_TOL_T).unwrap();
    let class_ok = r.violations.iter().all(|w| {
        let p = w.points::<f64>().unwrap();
        broken.compare(&p[0], &p[1], &p[2], &p[3]) == IntensityOrder::Equal
            && broken.compare(&p[0], &p[2], &p[1], &p[3]) != IntensityOrder::Equal
    });
    let lit: Vec<Point<f64>> = [4.0, 1.0, 2.0, 0.0].iter().map(|&v| Point::new(vec![v]).unwrap()).collect();
    let (lit_bad, _) = alt_cardinal::system::Axiom::Crossover.evaluate(&broken, &lit).unwrap();
    ok &= !r.passed() && class_ok && lit_bad && r.replay(&broken).unwrap();
    outcome(
        ok,
        format!(
            "difference oracles failing: {:?}; broken_crossover violations {} (witness class ok: {class_ok}, (4,1,2,0) violates: {lit_bad})",
            failing, r.violation_count
        ),
    )
}

/// Worst ratio err(h)/err(h/2) over points with a truncation error above rounding level.
fn convergence(spec: &UtilitySpec<f64>) -> (f64, usize) {
    let dom = spec.default_domain().unwrap();
    let n = spec.dim;
    let h = 0.02 * (0..n).map(|i| dom.extent(i)).fold(f64::INFINITY, f64::min);
    let f = |x: &Point<f64>| Ok(spec.eval(x.coords()));
    let grad = spec.gradient.as_ref().unwrap();
    let hess = spec.hessian.as_ref().unwrap();
    let (mut worst, mut exact) = (f64::INFINITY, 0);
    for u in [[0.3, 0.6], [0.5, 0.5], [0.7, 0.25]] {
        let x = Point::new((0..n).map(|i| dom.lower()[i] + u[i] * dom.extent(i)).collect()).unwrap();
        let g_err = |h: f64| {
            let g = numeric_gradient(f, &dom, &x, h).unwrap();
            g.iter().zip(grad(x.coords())).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let h_err = |h: f64| {
            let m = numeric_hessian(f, &dom, &x, h).unwrap();
            let t = hess(x.coords());
            m.iter().flatten().zip(t.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        for err in [&g_err as &dyn Fn(f64) -> f64, &h_err] {
            let (e1, e2) = (err(h), err(h / 2.0));
            if e1 < 1e-9 {
                exact += 1;
            } else {
                worst = worst.min(e1 / e2);
            }
        }
    }
    (worst, exact)
}

fn calculus() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for spec in catalog::<f64>().into_iter().filter(|s| s.gradient.is_some() && s.hessian.is_some()) {
        let (ratio, exact) = convergence(&spec);
        ok &= ratio >= 3.0;
        parts.push(if ratio.is_finite() {
            format!("{} ratio {ratio:.2}", spec.name)
        } else {
            format!("{} exact ({exact})", spec.name)
        });
    }
    let pts: Vec<Point<f64>> =
        [[1.0, 1.0], [2.0, 5.0], [7.5, 0.5], [4.0, 4.0]].iter().map(|c| Point::new(c.to_vec()).unwrap()).collect();
    for (name, want) in
        [("cobb_douglas", AlepLabel::Complement), ("linear", AlepLabel::Neutral), ("log_sum", AlepLabel::Neutral)]
    {
        let spec = lookup_utility::<f64>(name).unwrap();
        let dom = spec.default_domain().unwrap();
        let labels =
            alep_classify(|x| Ok(spec.eval(x.coords())), &dom, &pts, (0, 1), 1e-3, DEFAULT_ALEP_THRESHOLD).unwrap();
        let all = labels.iter().all(|c| c.label == want);
        ok &= all;
        parts.push(format!("{name} {want:?}: {all}"));
    }
    outcome(ok, parts.join(", "))
}

fn property_regression() -> Outcome {
    let mut ok = true;
    let mut equiv_bad = 0;
    for name in CONTINUOUS_MONOTONE {
        let o = oracle(name);
        let r = reconstruct(&o, ReconstructionOptions { depth: 10, ..Default::default() }).unwrap();
        equiv_bad += check_ladder_equiv(&o, r.ladder(), 1000, SEED);
    }
    ok &= equiv_bad == 0;

    let o = oracle("cobb_douglas");
    let r = reconstruct(&o, ReconstructionOptions { depth: 10, ..Default::default() }).unwrap();
    let density = check_density(&r, &UniformSampler, &CheckOptions::new(1000, SEED), 6).unwrap();
    ok &= density.passed() && density.evaluated > 0;

    let spec = lookup_utility::<f64>("log_sum").unwrap();
    let lo = oracle("log_sum");
    let u = |p: &Point<f64>| spec.eval(p.coords());
    let mut rng = alt_cardinal::system::trial_rng(SEED, 0);
    let (mut arch_checked, mut arch_bad) = (0, 0);
    while arch_checked < 200 {
        let mut p: Vec<Point<f64>> = (0..3).map(|_| lo.domain().sample(&mut rng)).collect();
        p.sort_by(|a, b| u(a).total_cmp(&u(b)));
        let d = u(&p[1]) - u(&p[0]);
        if d < (u(&p[2]) - u(&p[0])) / 200.0 || lo.prefers(&p[1], &p[0]) != Preference::Prefer {
            continue;
        }
        arch_checked += 1;
        let k = archimedean_count(&lo, &p[1], &p[0], &p[2], 1000, DEFAULT_TOL_T).unwrap().k as f64;
        let gap = u(&p[2]) - u(&p[1]);
        let slack = 1e-6 * (1.0 + k);
        if !((k - 1.0) * d <= gap + slack && gap < k * d + slack) {
            arch_bad += 1;
        }
    }
    ok &= arch_bad == 0;

    let b = oracle("broken_crossover");
    let opts = CheckOptions::new(1000, SEED);
    let first = check_crossover(&b, &UniformSampler, &opts, DEFAULT_TOL_T).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let second = pool.install(|| check_crossover(&b, &UniformSampler, &opts, DEFAULT_TOL_T).unwrap());
    let replay = first.to_json() == second.to_json() && first.replay(&b).unwrap();
    ok &= replay;
    outcome(
        ok,
        format!(
            "EQUIV failures {equiv_bad}, density violations {}/{}, archimedean {arch_bad}/{arch_checked}, replay identical: {replay}",
            density.violation_count, density.evaluated
        ),
    )
}

fn run(id: usize, title: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let took = start.elapsed();
    let ok = out.ok && took < limit;
    println!(
        "[{}] {id}. {title}: {} ({:.2} s, limit {} s)",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    all &= run(1, "kinked composite line limit", secs(5), kinked_counterexample);
    all &= run(2, "min: line smooth, not Debreu smooth", secs(10), min_independence);
    all &= run(3, "reconstruction at depth 10, 60 s per fixture", secs(60 * 8), reconstruction_all);
    all &= run(4, "concavity round trip", secs(30), gossen_roundtrip);
    all &= run(5, "axiom suite", secs(30), axiom_suite);
    all &= run(6, "numeric calculus and ALEP labels", secs(10), calculus);
    all &= run(7, "property regression", secs(60), property_regression);
    if !all {
        std::process::exit(1);
    }
}
