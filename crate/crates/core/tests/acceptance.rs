//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line before asserting.

use std::time::Instant;

use pmdsg::constructions::{
    bickle_graph, bickle_sequence, check_bickle_conditions, gap_first, gap_second, scan_inequalities, tight_family,
    tight_family_optimum, x3c_decide, Regime, TightParams, X3CInstance,
};
use pmdsg::density::{m_p, Density, PExponent};
use pmdsg::frank_wolfe::{frank_wolfe, lmo};
use pmdsg::generators::{gnp, path, SuiteSpec};
use pmdsg::graph::{Graph, VertexSet};
use pmdsg::iterative::{greedy_pp, one_mean_guided, Inner};
use pmdsg::oracle::{brute_force_lmo, brute_force_opt, int_flat_check, DEFAULT_LIMIT};
use pmdsg::peeling::{degeneracy_maxcore, greedy_p, lazy_greedy_p, simple_greedy_p};
use pmdsg::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative slack for comparisons against exact optima.
const RATIO_SLACK: f64 = 1e-9;
const LAZY_EPS: f64 = 0.5;
const HALF: f64 = 0.5;
const CONVERGENCE_RATIO: f64 = 0.99;
const CONVERGENCE_PASSES: usize = 100;
const FW_ITERATIONS: usize = 500;
const SIMPLE_PP_PASSES: usize = 100;
const TIGHT_MAX_RATIO: f64 = 0.80;
const TIGHT_NOISE: f64 = 0.02;
const GAP_FIRST_AT_HALF: f64 = 0.0303;
const GAP_SECOND_AT_HALF: f64 = -0.032;
const GAP_TOL: f64 = 0.0005;
const SCAN_POINTS: usize = 50;
const LMO_TOL: f64 = 1e-9;
const LMO_CASES: usize = 100;
const FLAT_CASES: usize = 50;
const REFRESH_GRAPH_N: usize = 5000;
const REFRESH_GRAPH_Q: f64 = 0.004;
const EQUIVALENCE_GRAPHS: usize = 100;

fn report(id: u32, name: &str, pass: bool, detail: &str, start: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{name}]: {verdict} ({detail}; {:.2}s)", start.elapsed().as_secs_f64());
}

fn pe(x: f64) -> PExponent {
    PExponent::new(x).unwrap()
}

fn suite() -> Vec<Graph> {
    SuiteSpec::default().build()
}

fn optimum(g: &Graph, p: f64) -> f64 {
    brute_force_opt(g, pe(p), DEFAULT_LIMIT, Exec::Parallel).unwrap().best_density.value().unwrap()
}

fn value(d: Density) -> f64 {
    d.value().unwrap_or(f64::NEG_INFINITY)
}

fn meets(found: f64, factor: f64, opt: f64) -> bool {
    found >= factor * opt - RATIO_SLACK * opt.abs().max(1.0)
}

#[test]
fn criterion_01_marginal_peeling_guarantee() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let graphs = suite();
    for (i, g) in graphs.iter().enumerate() {
        for p in [1.5, 2.0] {
            let opt = optimum(g, p);
            let greedy = value(greedy_p(g, p).unwrap().best_density);
            let lazy = value(lazy_greedy_p(g, p, LAZY_EPS).unwrap().best_density);
            let f_greedy = (1.0 / (p + 1.0)).powf(1.0 / p);
            let f_lazy = ((1.0 - LAZY_EPS) / (p + 1.0)).powf(1.0 / p);
            if !meets(greedy, f_greedy, opt) {
                violations.push(format!("greedy g{i} p={p}: {greedy} vs {opt}"));
            }
            if !meets(lazy, f_lazy, opt) {
                violations.push(format!("lazy g{i} p={p}: {lazy} vs {opt}"));
            }
        }
    }
    let pass = violations.is_empty();
    report(
        1,
        "p>=1 approximation bounds",
        pass,
        &format!("{} graphs, {} violations", graphs.len(), violations.len()),
        start,
    );
    assert!(pass, "{violations:?}");
}

#[test]
fn criterion_02_half_approximation_below_one() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let graphs = suite();
    for (i, g) in graphs.iter().enumerate() {
        for p in [-2.0, -1.0, 0.5, 0.9] {
            let opt = optimum(g, p);
            let simple = value(simple_greedy_p(g, pe(p)).unwrap().best_density);
            let guided = value(one_mean_guided(g, SIMPLE_PP_PASSES, pe(p)).unwrap().best_density);
            if !meets(simple, HALF, opt) {
                violations.push(format!("simple g{i} p={p}: {simple} vs {opt}"));
            }
            if !meets(guided, HALF, opt) {
                violations.push(format!("one-mean g{i} p={p}: {guided} vs {opt}"));
            }
        }
    }
    let pass = violations.is_empty();
    report(
        2,
        "1/2 approximation for p<1",
        pass,
        &format!("{} graphs, {} violations", graphs.len(), violations.len()),
        start,
    );
    assert!(pass, "{violations:?}");
}

#[test]
fn criterion_03_tightness_trend() {
    let start = Instant::now();
    let p = 0.5;
    let mut ratios = Vec::new();
    for r in [4, 16, 64] {
        for big_d in [20, 200] {
            let params = TightParams { d: 1, n_h: 8, r, big_d };
            let family = tight_family(params, p).unwrap();
            let found = value(simple_greedy_p(&family.graph, pe(p)).unwrap().best_density);
            let opt = tight_family_optimum(params, pe(p), DEFAULT_LIMIT).unwrap();
            ratios.push(((r, big_d), found / opt));
        }
    }
    let last = ratios.last().unwrap().1;
    let monotone = ratios.windows(2).all(|w| w[1].1 <= w[0].1 + TIGHT_NOISE);
    let decreasing = last < ratios[0].1;
    let pass = last <= TIGHT_MAX_RATIO && monotone && decreasing;
    let detail: Vec<String> = ratios.iter().map(|((r, d), x)| format!("r={r},D={d}:{x:.4}")).collect();
    report(3, "tight family trend", pass, &detail.join(" "), start);
    assert!(pass, "ratios {ratios:?}");
}

#[test]
fn criterion_04_convergence() {
    let start = Instant::now();
    let p = 1.5;
    let mut violations = Vec::new();
    let graphs = suite();
    for (i, g) in graphs.iter().enumerate() {
        let opt = optimum(g, p);
        let pp = value(greedy_pp(g, p, CONVERGENCE_PASSES, Inner::Exact).unwrap().best_density());
        let fw = value(frank_wolfe(g, p, FW_ITERATIONS).unwrap().rounded.best_density);
        if !meets(pp, CONVERGENCE_RATIO, opt) {
            violations.push(format!("greedy++ g{i}: {pp} vs {opt}"));
        }
        if !meets(fw, CONVERGENCE_RATIO, opt) {
            violations.push(format!("frank-wolfe g{i}: {fw} vs {opt}"));
        }
    }
    let pass = violations.is_empty();
    report(
        4,
        "iterative convergence",
        pass,
        &format!("{} graphs, {} violations", graphs.len(), violations.len()),
        start,
    );
    assert!(pass, "{violations:?}");
}

#[test]
fn criterion_05_zero_eps_matches_exact() {
    let start = Instant::now();
    let mut mismatches = 0;
    for g in suite().iter().take(EQUIVALENCE_GRAPHS) {
        for p in [1.0, 1.5, 2.0] {
            let a = greedy_p(g, p).unwrap();
            let b = lazy_greedy_p(g, p, 0.0).unwrap();
            if a.order != b.order || a.best_density != b.best_density {
                mismatches += 1;
            }
        }
    }
    let pass = mismatches == 0;
    report(5, "eps=0 reproduces exact order", pass, &format!("{mismatches} mismatches"), start);
    assert!(pass);
}

#[test]
fn criterion_06_refresh_accounting() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = gnp(REFRESH_GRAPH_N, REFRESH_GRAPH_Q, &mut rng);
    let r = lazy_greedy_p(&g, 2.0, LAZY_EPS).unwrap();
    let bound = ((g.n() as f64).ln() / (1.0 + LAZY_EPS / 2.0).ln()).ceil() as u32 + 1;
    let worst = r.stats.vertex_refreshes.iter().copied().max().unwrap_or(0);
    let pass = worst <= bound;
    report(6, "lazy refresh count", pass, &format!("m={}, max refreshes {worst} <= {bound}", g.m()), start);
    assert!(pass);
}

fn x3c_cases() -> Vec<(X3CInstance, bool)> {
    let yes = [
        vec![[0, 1, 2], [3, 4, 5]],
        vec![[0, 1, 2], [3, 4, 5], [0, 3, 4]],
        vec![[0, 1, 3], [2, 4, 5], [1, 2, 3], [0, 4, 5]],
    ];
    let no = [
        vec![[0, 1, 2], [2, 3, 4]],
        vec![[0, 1, 2], [1, 3, 4], [2, 4, 5]],
        vec![[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]],
    ];
    yes.into_iter()
        .map(|s| (s, true))
        .chain(no.into_iter().map(|s| (s, false)))
        .map(|(s, planted)| (X3CInstance::new(2, s).unwrap(), planted))
        .collect()
}

#[test]
fn criterion_07_gadget_decisions() {
    let start = Instant::now();
    let mut correct = 0;
    let mut total = 0;
    let mut wrong = Vec::new();
    for (inst, planted) in x3c_cases() {
        assert_eq!(inst.exact_cover().is_some(), planted);
        for (p, weighted) in [(0.5, true), (-1.0, true), (0.2, false)] {
            total += 1;
            let d = x3c_decide(&inst, p, weighted, 12).unwrap();
            if d.answer == planted {
                correct += 1;
            } else {
                wrong.push(format!("{:?} p={p} weighted={weighted}", inst.sets));
            }
        }
    }
    let pass = correct == total && total == 18;
    report(7, "reduction gadget decisions", pass, &format!("{correct}/{total} correct"), start);
    assert!(pass, "{wrong:?}");
}

#[test]
fn criterion_08_inequality_scan() {
    let start = Instant::now();
    let d = 1.23 * 0.5 + 4.77;
    let f1 = gap_first(0.5, d);
    let f2 = gap_second(0.5, d);
    let values_ok = (f1 - GAP_FIRST_AT_HALF).abs() <= GAP_TOL && (f2 - GAP_SECOND_AT_HALF).abs() <= GAP_TOL;
    let mut bad_rows = 0;
    for regime in Regime::ALL {
        let rows = scan_inequalities(regime, &regime.grid(SCAN_POINTS)).unwrap();
        assert_eq!(rows.len(), SCAN_POINTS);
        bad_rows += rows.iter().filter(|r| !r.ok).count();
    }
    let pass = values_ok && bad_rows == 0;
    report(8, "inequality scan", pass, &format!("F1={f1:.5} F2={f2:.5}, {bad_rows} sign failures"), start);
    assert!(pass);
}

#[test]
fn criterion_09_lmo_matches_enumeration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for i in 0..LMO_CASES {
        let n = rng.gen_range(2..=7);
        let g = gnp(n, rng.gen_range(0.2..0.8), &mut rng);
        let p = if i % 2 == 0 { 1.0 } else { 2.0 };
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let z = lmo(&g, p, &w).unwrap();
        let fast: f64 = z.iter().zip(&w).map(|(a, b)| a * b).sum();
        let slow = brute_force_lmo(&g, p, &w).unwrap().value;
        worst = worst.max((fast - slow).abs());
    }
    let pass = worst <= LMO_TOL;
    report(9, "linear oracle vs enumeration", pass, &format!("{LMO_CASES} cases, max gap {worst:.2e}"), start);
    assert!(pass);
}

#[test]
fn criterion_10_structural_checks() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut flat_failures = 0;
    for i in 0..FLAT_CASES {
        let n = rng.gen_range(1..=6);
        let c = rng.gen_range(0.0..8.0);
        let p = if i % 2 == 0 { rng.gen_range(0.01..0.99) } else { -rng.gen_range(0.01..1.99) };
        let s = rng.gen_range(0..=12);
        if !int_flat_check(n, c, p, s).unwrap().holds {
            flat_failures += 1;
        }
    }

    let mut mean_violations = 0;
    let mut core_violations = 0;
    let ladder = [f64::NEG_INFINITY, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, f64::INFINITY];
    for g in suite() {
        let n = g.n();
        for mask in 1u64..(1 << n) {
            let s = VertexSet::from_mask(n, mask);
            let vals: Vec<Option<f64>> = ladder.iter().map(|&p| m_p(&g, &s, pe(p)).unwrap().value()).collect();
            let defined: Vec<f64> = vals.iter().flatten().copied().collect();
            if defined.windows(2).any(|w| w[0] > w[1] + 1e-9 * w[1].abs().max(1.0)) {
                mean_violations += 1;
            }
        }
        let core = degeneracy_maxcore(&g).degeneracy;
        let one = optimum(&g, 1.0);
        for p in [f64::NEG_INFINITY, -2.0, -1.0, 0.5, 0.9, 1.0] {
            let mp = optimum(&g, p);
            let tol = 1e-9 * one.max(1.0);
            if !(core <= mp + tol && mp <= one + tol && one <= 2.0 * core + tol) {
                core_violations += 1;
            }
        }
    }
    let pass = flat_failures == 0 && mean_violations == 0 && core_violations == 0;
    report(
        10,
        "structural lemmas",
        pass,
        &format!("flatness {flat_failures}, mean order {mean_violations}, core bounds {core_violations} violations"),
        start,
    );
    assert!(pass);
}

#[test]
fn criterion_11_degree_sequence_graphs() {
    let start = Instant::now();
    let p6 = bickle_graph(6, 1).unwrap();
    let is_path = {
        let mut degs: Vec<usize> = (0..6).map(|v| p6.degree(v)).collect();
        degs.sort_unstable();
        degs == vec![1, 1, 2, 2, 2, 2] && p6.m() == path(6).unwrap().m() && p6.connected_components().len() == 1
    };
    let mut failures = Vec::new();
    for d in [2, 3] {
        for n in [20, 30] {
            match bickle_graph(n, d) {
                Ok(g) => {
                    let mut seq: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
                    seq.sort_unstable_by(|a, b| b.cmp(a));
                    if seq != bickle_sequence(n, d).unwrap() || check_bickle_conditions(&seq, d).is_err() {
                        failures.push(format!("n={n} d={d}: sequence"));
                    }
                    if degeneracy_maxcore(&g).degeneracy != d as f64 {
                        failures.push(format!("n={n} d={d}: degeneracy"));
                    }
                }
                Err(e) => failures.push(format!("n={n} d={d}: {e}")),
            }
        }
    }
    let pass = is_path && failures.is_empty();
    report(
        11,
        "degenerate degree-sequence graphs",
        pass,
        &format!("path ok: {is_path}, {} failures", failures.len()),
        start,
    );
    assert!(pass, "{failures:?}");
}
