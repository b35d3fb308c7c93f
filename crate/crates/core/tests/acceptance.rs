//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line on
//! stderr (outside the test harness capture) and the test fails if any does.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aqecc::ael::{
    basic_distance_bound, build_ael, build_expander_with, expperm_sweep, measure_pseudorandom, random_outer,
    reducing_distance_bound, AelMode, BipartiteGraph, Certificate, ExpanderOptions,
};
use aqecc::aqecc::{
    build_aqecc, build_direct_aqecc, build_ptc, check_privacy, corrupt_shares, exhaustive_private_sweep,
    plan_parameters, robust_singleton_bound, singleton_check, PrivateAqecc, PtcConstruction, RssScheme, ShareAttack,
    TieBreak,
};
use aqecc::classical::{
    even_weight, frs_required_agreement, grs_build, hamming, list_decode, GrsSpec, LinearCode, ListMode,
};
use aqecc::css::{build_css, exhaustive_qld, quantum_grs, CssCode, QldDecoder, QldMode};
use aqecc::gf::Field;
use aqecc::linalg::vector_at;
use aqecc::pauli::Syndrome;
use aqecc::sim::{
    run_aqecc_trials, run_direct_trials, run_private_trials, AdversaryModel, ErrorModel, Layers, SupportModel,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn report(id: usize, name: &str, v: &Verdict, took: Duration) {
    let line = format!(
        "criterion {id:>2} [{}] {name}: {} ({:.1}s)\n",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail,
        took.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn steane() -> CssCode {
    let h = hamming(3).unwrap();
    build_css(&h, &h).unwrap()
}

fn four_qubit() -> CssCode {
    let e = even_weight(4).unwrap();
    build_css(&e, &e).unwrap()
}

/// Minimum nonzero symbol weight by enumerating every message.
fn enumerate_distance(code: &LinearCode) -> usize {
    let q = code.field().q();
    let k = code.dim();
    let total = (q as u64).pow(k as u32);
    (1..total).map(|i| code.weight(&code.encode(&vector_at(q, k, i)))).min().unwrap()
}

fn c1_grs_distance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    let mut slowest = Duration::ZERO;
    let mut bad = Vec::new();
    for (p, m) in [(5u32, 1u32), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (17, 1)] {
        let f = Field::new(p, m).unwrap();
        let q = f.q() as usize;
        let n_max = (q - 1).min(12);
        for n in [n_max / 2 + 1, n_max] {
            for k in 1..n {
                let mut spec = GrsSpec::rs(&f, n, k);
                spec.multipliers = (0..n).map(|_| rng.gen_range(1..f.q())).collect();
                let code = grs_build(&spec).unwrap();
                let t = Instant::now();
                let d = if (q as f64).powi(k as i32) <= 2e5 {
                    enumerate_distance(&code)
                } else {
                    code.min_distance().unwrap().unwrap()
                };
                let took = t.elapsed();
                slowest = slowest.max(took);
                checked += 1;
                if d != n - k + 1 || took > Duration::from_secs(10) {
                    bad.push(format!("q={q} n={n} k={k} d={d}"));
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{checked} instances, d = n-k+1 on all, slowest {:.2}s {bad:?}", slowest.as_secs_f64()))
}

/// Ball decoding against exhaustive enumeration for every syndrome.
fn qld_agrees(c: &CssCode, radius: usize) -> (bool, usize, usize) {
    let f = c.field().clone();
    let r = c.stab().r();
    let map = exhaustive_qld(c.stab(), radius).unwrap();
    let dec = QldDecoder::new(c, radius, QldMode::Ball).unwrap();
    let total = (f.q() as u64).pow(r as u32);
    let mut worst_ratio_ok = true;
    let mut max_list = 0;
    for idx in 0..total {
        let s = Syndrome::from_fq(&f, &vector_at(f.q(), r, idx));
        let out = dec.decode(&s).unwrap();
        let got: BTreeSet<Vec<u32>> = out.covered().iter().map(|e| e.canonical.clone()).collect();
        let want = map.get(&s.to_fq(&f)).cloned().unwrap_or_default();
        if got != want {
            return (false, idx as usize, max_list);
        }
        max_list = max_list.max(got.len());
        worst_ratio_ok &= got.len() == out.covered().len();
    }
    (worst_ratio_ok, total as usize, max_list)
}

fn c2_qld_oracle() -> Verdict {
    let f7 = Field::prime(7).unwrap();
    let codes: Vec<(&str, CssCode)> = vec![
        ("steane", steane()),
        ("qgrs[[6,2]]_7", quantum_grs(&f7, 6, 4).unwrap()),
        ("[[4,2,2]]", four_qubit()),
    ];
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, c) in &codes {
        let d = c.distance().unwrap().unwrap();
        for radius in 0..=d {
            let (agree, syndromes, _) = qld_agrees(c, radius);
            ok &= agree;
            if !agree {
                parts.push(format!("{name} radius {radius} mismatch"));
            }
            if radius == d {
                parts.push(format!("{name} d={d} radii 0..={d} x {syndromes} syndromes"));
            }
        }
    }
    let took = start.elapsed();
    verdict(ok && took < Duration::from_secs(60), parts.join("; "))
}

fn c3_list_bound() -> Verdict {
    let f7 = Field::prime(7).unwrap();
    let f5 = Field::prime(5).unwrap();
    let codes: Vec<(CssCode, usize)> = vec![
        (steane(), 2),
        (steane(), 3),
        (four_qubit(), 2),
        (quantum_grs(&f7, 6, 4).unwrap(), 3),
        (quantum_grs(&f7, 6, 5).unwrap(), 2),
        (quantum_grs(&f5, 4, 3).unwrap(), 2),
    ];
    let mut syndromes = 0usize;
    let mut violations = 0usize;
    let mut worst = (0usize, 0usize);
    for (c, radius) in &codes {
        let f = c.field().clone();
        let r = c.stab().r();
        let dec = QldDecoder::new(c, *radius, QldMode::Ball).unwrap();
        for idx in 0..(f.q() as u64).pow(r as u32) {
            let out = dec.decode(&Syndrome::from_fq(&f, &vector_at(f.q(), r, idx))).unwrap();
            let distinct: BTreeSet<&Vec<u32>> = out.covered().iter().map(|e| &e.canonical).collect();
            let classical = out.x_list.max(out.z_list);
            syndromes += 1;
            if distinct.len() > classical * classical {
                violations += 1;
            }
            if distinct.len() > worst.0 {
                worst = (distinct.len(), classical);
            }
        }
    }
    verdict(
        violations == 0,
        format!("{syndromes} syndromes on {} instances, {violations} violations, largest list {} with coset list {}", codes.len(), worst.0, worst.1),
    )
}

fn c4_expander_mixing() -> Verdict {
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let opts = ExpanderOptions { certificate: Some(Certificate::Exhaustive), degree_guard: false, ..Default::default() };
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, r, eps, seed) in [(6usize, 3usize, 0.6, 1u64), (8, 4, 0.5, 2), (9, 3, 0.7, 3), (10, 5, 0.45, 4), (10, 6, 0.4, 5)] {
        let b = build_expander_with(n, r, eps, seed, opts).unwrap();
        let eps0 = measure_pseudorandom(&b.graph).unwrap().eps;
        let sweep = expperm_sweep(&b.graph, eps0, &grid, &grid).unwrap();
        ok &= sweep.violations.is_empty();
        parts.push(format!("n={n} r={r} eps0={eps0:.3}: {} checks, {} violations", sweep.checked, sweep.violations.len()));
    }
    let took = start.elapsed();
    verdict(ok && took < Duration::from_secs(300), parts.join("; "))
}

fn c5_ael_distance() -> Verdict {
    let f2 = Field::prime(2).unwrap();
    let inner = four_qubit();
    let d_in = inner.distance().unwrap().unwrap() as f64 / inner.n() as f64;
    let mut basic = Vec::new();
    let mut reducing = Vec::new();
    let mut ok = true;
    // (outer length, outer dimension in base coordinates, seed, graph seed)
    let settings: Vec<(usize, usize, u64, Option<u64>)> =
        vec![(4, 2, 8, None), (4, 2, 3, None), (4, 2, 5, Some(1)), (5, 2, 6, Some(2)), (6, 2, 7, Some(3)), (6, 4, 9, Some(4))];
    for &(n_out, k_out, seed, graph_seed) in &settings {
        let outer = random_outer(&f2, n_out, 2, k_out, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let Some(d_out) = outer.distance().unwrap() else { continue };
        let d_out = d_out as f64 / n_out as f64;
        // basic: graph on the outer length with degree n_in
        let g = match graph_seed {
            None if n_out == inner.n() => BipartiteGraph::complete(n_out),
            _ => BipartiteGraph::random(n_out, inner.n(), &mut ChaCha8Rng::seed_from_u64(graph_seed.unwrap_or(seed))),
        };
        let eps0 = measure_pseudorandom(&g).unwrap().eps;
        let ael = build_ael(&outer, &inner, &g, AelMode::Basic).unwrap();
        let d = ael.code.distance().unwrap().unwrap() as f64 / ael.n() as f64;
        let bound = basic_distance_bound(d_in, d_out, eps0);
        ok &= d + 1e-12 >= bound;
        basic.push(format!("{d:.3}>={bound:.3}"));
        // alphabet reduction to pairs of inner qudits
        let gr = BipartiteGraph::random(n_out * 2, 2, &mut ChaCha8Rng::seed_from_u64(seed + 100));
        let eps0 = measure_pseudorandom(&gr).unwrap().eps;
        let ael = build_ael(&outer, &inner, &gr, AelMode::Reducing { r: 2 }).unwrap();
        let d = ael.code.distance().unwrap().unwrap() as f64 / ael.n() as f64;
        let bound = reducing_distance_bound(d_in, d_out, eps0);
        ok &= d + 1e-12 >= bound;
        reducing.push(format!("{d:.3}>={bound:.3}"));
    }
    // complete graphs (eps0 = 0): [[8,6,2]] inner, outer of length 2, blocks of 4
    let inner8 = build_css(&even_weight(8).unwrap(), &even_weight(8).unwrap()).unwrap();
    let d_in8 = inner8.distance().unwrap().unwrap() as f64 / 8.0;
    for (k_out, seed) in [(2usize, 1u64), (4, 2), (6, 3)] {
        let outer = random_outer(&f2, 2, 6, k_out, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let d_out = outer.distance().unwrap().unwrap() as f64 / 2.0;
        let ael = build_ael(&outer, &inner8, &BipartiteGraph::complete(4), AelMode::Reducing { r: 4 }).unwrap();
        let d = ael.code.distance().unwrap().unwrap() as f64 / ael.n() as f64;
        let bound = reducing_distance_bound(d_in8, d_out, 0.0);
        ok &= d + 1e-12 >= bound;
        reducing.push(format!("{d:.3}>={bound:.3}"));
    }
    ok &= basic.len() >= 5 && reducing.len() >= 5;
    verdict(ok, format!("basic [{}]; reducing [{}]", basic.join(" "), reducing.join(" ")))
}

fn c6_ptc_eps() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    let start = Instant::now();
    let cases = [
        (2u32, 4usize, 8usize, PtcConstruction::Explicit),
        (2, 2, 4, PtcConstruction::Explicit),
        (2, 3, 6, PtcConstruction::Explicit),
        (3, 2, 4, PtcConstruction::Explicit),
        (3, 3, 6, PtcConstruction::Explicit),
        (5, 2, 4, PtcConstruction::Explicit),
        (7, 2, 4, PtcConstruction::Explicit),
        (2, 2, 4, PtcConstruction::VerifiedRandom { seed: 3, retries: 50 }),
    ];
    for (q, lambda, n, cons) in cases {
        let f = Field::prime(q).unwrap();
        let fam = build_ptc(&f, lambda, n, cons).unwrap();
        if !fam.accepted() {
            continue;
        }
        let m = fam.measured().expect("test sizes are measurable");
        ok &= m.eps() <= fam.target() + 1e-12;
        parts.push(format!("q={q} l={lambda} n={n}: {}/{} <= {:.4}", m.worst_count, m.keys, fam.target()));
    }
    let took = start.elapsed();
    verdict(ok && parts.len() >= 5 && took < Duration::from_secs(60), parts.join("; "))
}

fn keyed(q: u32, n: usize, k1: usize, lambda: usize) -> PrivateAqecc {
    let f = Field::prime(q).unwrap();
    let qld = quantum_grs(&f, n, k1).unwrap();
    let k = qld.k();
    PrivateAqecc::new(qld, build_ptc(&f, lambda, k, PtcConstruction::Explicit).unwrap(), 1).unwrap()
}

fn c7_private_sweep() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for pa in [keyed(7, 6, 5, 2), keyed(13, 8, 6, 2), keyed(11, 8, 7, 3)] {
        for tie in [TieBreak::LowestIndex, TieBreak::Strict] {
            let s = exhaustive_private_sweep(&pa, tie).unwrap();
            ok &= s.max_per_error <= s.per_error_bound && s.mean_failure <= s.overall_bound;
            if tie == TieBreak::LowestIndex {
                parts.push(format!(
                    "q={} n={}: {} errors x {} keys, max {:.4} <= L eps {:.4}, mean {:.4} <= 2 L eps {:.4}",
                    pa.qld().field().q(),
                    pa.n(),
                    s.errors,
                    s.keys,
                    s.max_per_error,
                    s.per_error_bound,
                    s.mean_failure,
                    s.overall_bound
                ));
            }
        }
    }
    verdict(ok, parts.join("; "))
}

fn c8_rss() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for (p, m, pairs) in [(2u32, 2u32, vec![(0u32, 1u32), (0, 2), (1, 3)]), (5, 1, vec![(0, 1), (2, 4)])] {
        let f = Field::new(p, m).unwrap();
        let scheme = RssScheme::new(&f, 3, 1, 1).unwrap();
        for (a, b) in pairs {
            let rep = check_privacy(&scheme, &[a], &[b]).unwrap();
            ok &= rep.identical;
            parts.push(format!("privacy GF({}) n=3 d=1 secrets {a},{b}: {} sets x {} assignments", f.q(), rep.sets_checked, rep.assignments));
        }
    }
    let f = Field::prime(7).unwrap();
    let scheme = RssScheme::new(&f, 6, 2, 1).unwrap();
    let trials = 10_000u64;
    let eps = scheme.eps();
    let sigma = (eps * (1.0 - eps) / trials as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for attack in [ShareAttack::RandomReplace, ShareAttack::ShiftValue, ShareAttack::ShiftAndGuess] {
        let mut fails = 0u64;
        for _ in 0..trials {
            let secret: Vec<u32> = (0..2).map(|_| rng.gen_range(0..7)).collect();
            let mut shares = scheme.share(&secret, &mut rng).unwrap();
            let pos = vec![rng.gen_range(0..6)];
            corrupt_shares(&scheme, &mut shares, &pos, attack, &mut rng);
            if scheme.reconstruct(&shares).unwrap().ok() != Some(secret) {
                fails += 1;
            }
        }
        let rate = fails as f64 / trials as f64;
        ok &= rate <= eps + 3.0 * sigma;
        parts.push(format!("{attack:?} {fails}/{trials} <= {:.5}", eps + 3.0 * sigma));
    }
    verdict(ok, parts.join("; "))
}

fn c9_composition() -> Verdict {
    let pa = keyed(7, 6, 5, 2);
    let f8 = Field::new(2, 3).unwrap();
    let aq = build_aqecc(pa.clone(), RssScheme::new(&f8, 6, 2, 1).unwrap()).unwrap();
    let adv = AdversaryModel { support: SupportModel::RandomSubset, error: ErrorModel::NonidentityOnSupport, weight_budget: 1 };
    let trials = 10_000;
    let private = run_private_trials(&pa, &adv, trials, 21, TieBreak::LowestIndex).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for attack in [ShareAttack::ShiftAndGuess, ShareAttack::RandomReplace] {
        let t = run_aqecc_trials(&aq, &adv, trials, 21, attack, Layers::Both, TieBreak::LowestIndex).unwrap();
        let allowed = private.summary.failure_rate + aq.rss().eps();
        ok &= t.summary.wilson_low <= allowed && t.summary.pass;
        parts.push(format!(
            "{attack:?}: {} wilson [{:.4}, {:.4}] vs private {} + eps_rss {:.5}",
            t.summary.failure_fraction,
            t.summary.wilson_low,
            t.summary.wilson_high,
            private.summary.failure_fraction,
            aq.rss().eps()
        ));
    }
    verdict(ok, parts.join("; "))
}

fn c10_direct_sweep() -> Verdict {
    let inner = keyed(11, 8, 7, 3);
    let big = Field::new(11, 3).unwrap();
    let mut rates = Vec::new();
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [24usize, 48, 96, 144] {
        let outer = quantum_grs(&big, n, 5 * n / 8).unwrap();
        let g = BipartiteGraph::random(n, 8, &mut ChaCha8Rng::seed_from_u64(n as u64));
        let dc = build_direct_aqecc(outer, inner.clone(), g).unwrap();
        let adv =
            AdversaryModel { support: SupportModel::RandomSubset, error: ErrorModel::NonidentityOnSupport, weight_budget: n / 12 };
        let t = run_direct_trials(&dc, &adv, 10_000, 1).unwrap();
        ok &= t.summary.pass;
        rates.push(t.summary.failure_rate);
        parts.push(format!("n={n} {} tail {:.4}", t.summary.failure_fraction, t.summary.bound));
    }
    let monotone = rates.windows(2).all(|w| w[1] <= w[0]);
    verdict(ok && monotone, format!("rate 1/4, radius 1/12: {}", parts.join("; ")))
}

fn c11_frs() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // (q, base length, k, fold m, s)
    for (q, n, k, m, s) in [(17u32, 16usize, 2usize, 4usize, 2usize), (17, 16, 2, 4, 3), (13, 12, 2, 6, 2), (13, 12, 3, 6, 3)] {
        let f = Field::prime(q).unwrap();
        let code = grs_build(&GrsSpec::rs(&f, n, k)).unwrap().fold(m).unwrap();
        let big_n = code.n();
        let d = code.min_distance().unwrap().unwrap();
        let radius = big_n - frs_required_agreement(&code, s, 1).unwrap();
        if 2 * radius < d {
            ok = false;
            parts.push(format!("m={m} s={s}: radius {radius} within half distance {d}"));
            continue;
        }
        let mut mismatches = 0;
        let mut nonempty = 0;
        for trial in 0..100 {
            let r: Vec<u32> = if trial % 4 == 0 {
                (0..code.len()).map(|_| rng.gen_range(0..q)).collect()
            } else {
                let msg: Vec<u32> = (0..k).map(|_| rng.gen_range(0..q)).collect();
                let mut w = code.encode(&msg);
                let hits = rng.gen_range(radius.saturating_sub(1)..=radius + 1).min(big_n);
                for b in rand::seq::index::sample(&mut rng, big_n, hits) {
                    for j in 0..m {
                        w[b * m + j] = rng.gen_range(0..q);
                    }
                }
                w
            };
            let alg = list_decode(&code, &r, radius, ListMode::FrsAlgebraic { s }).unwrap();
            let bf = list_decode(&code, &r, radius, ListMode::BruteForce).unwrap();
            mismatches += usize::from(alg != bf);
            nonempty += usize::from(!bf.is_empty());
        }
        ok &= mismatches == 0;
        parts.push(format!("q={q} m={m} s={s} d={d} radius={radius}: {mismatches} mismatches, {nonempty}/100 nonempty"));
    }
    verdict(ok, parts.join("; "))
}

fn c12_bounds() -> Verdict {
    let mut exact = 0;
    let mut ok = true;
    for n in 1..=60usize {
        for d in 1..=n {
            let b = robust_singleton_bound(n, d, 3.0, 0.0);
            let want = n as f64 - 2.0 * (d as f64 - 1.0);
            ok &= (b - want).abs() < 1e-9;
            exact += 1;
        }
    }
    let r = singleton_check(100, 80, 1.0, 0.1, 0.0);
    ok &= r.ok && r.slack.abs() < 1e-9 && !singleton_check(100, 81, 1.0, 0.1, 0.0).ok;
    let mut plans = 0;
    let mut min_slack = f64::INFINITY;
    for &rate in &[0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7] {
        for &gamma in &[0.05, 0.1, 0.2, 0.25, 0.3] {
            let plan = plan_parameters(rate, gamma, 1.0).unwrap();
            if !plan.feasible() {
                continue;
            }
            let s = plan.singleton.as_ref().unwrap();
            ok &= s.ok && s.slack > 0.0;
            min_slack = min_slack.min(s.slack);
            plans += 1;
        }
    }
    ok &= plans > 0;
    verdict(ok, format!("{exact} exact eps=0 cases; {plans} feasible plans, minimum slack {min_slack:.1}"))
}

#[test]
fn acceptance_suite() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("GRS brute-force distance", c1_grs_distance),
        ("QLD equals exhaustive oracle", c2_qld_oracle),
        ("quantum list within coset list squared", c3_list_bound),
        ("expander mixing sweep", c4_expander_mixing),
        ("AEL distance bounds", c5_ael_distance),
        ("PTC eps within target", c6_ptc_eps),
        ("private AQECC exhaustive sweep", c7_private_sweep),
        ("RSS privacy and robustness", c8_rss),
        ("AQECC composition", c9_composition),
        ("direct construction sweep", c10_direct_sweep),
        ("FRS algebraic decoder", c11_frs),
        ("bound calculators", c12_bounds),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        report(i + 1, name, &v, t.elapsed());
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

