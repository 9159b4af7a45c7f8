//! Acceptance checks. Prints one `PASS` or `FAIL` line per criterion and
//! exits nonzero if any criterion fails. All tolerances are exact.
//!
//! Runs without a test harness so the verdict lines are always visible.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdcode::catalog;
use sdcode::classify::{
    assemble_candidate, beta_profile, golay_so23_dataset, orbit_reps_on_subsets,
    order7_three_cycle_plan, order7_two_fixed_plan, parallel_map, run_plan, ClassificationReport,
    ClassifyInput, ClassifyOptions, Family, Plan, MAX_COSET_DEGREE,
};
use sdcode::cyclotomic::{factor_cyclotomic, module_decompose};
use sdcode::decomp::{self, structure_split, AutomorphismSpec};
use sdcode::equiv::{are_equivalent, brute_force_equiv, canonical_form, canonical_key};
use sdcode::{BinaryCode, BitVector, Permutation};

struct Verdicts {
    lines: Vec<(String, bool)>,
}

impl Verdicts {
    fn record(&mut self, id: &str, ok: bool, detail: impl AsRef<str>) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let line = format!("{tag} criterion {id}: {}", detail.as_ref());
        println!("{line}");
        self.lines.push((line, ok));
    }
}

fn threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn counts_text(counts: &BTreeMap<(Family, u32), usize>) -> String {
    counts
        .iter()
        .map(|((f, b), n)| format!("{f} {b}:{n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn report_counts(r: &ClassificationReport) -> BTreeMap<(Family, u32), usize> {
    r.counts()
        .into_iter()
        .map(|(p, n)| ((p.family, p.beta), n))
        .collect()
}

fn aut_multiset(orders: impl IntoIterator<Item = BigUint>) -> Vec<BigUint> {
    let mut v: Vec<BigUint> = orders.into_iter().collect();
    v.sort();
    v
}

fn big(values: &[u64]) -> Vec<BigUint> {
    aut_multiset(values.iter().map(|&x| BigUint::from(x)))
}

/// Published counts of extremal [44,22,8] codes with an automorphism of
/// order 7, by profile.
fn order7_reference() -> BTreeMap<(Family, u32), usize> {
    let w1 = [
        (10, 23),
        (17, 19),
        (24, 14),
        (31, 12),
        (38, 9),
        (52, 4),
        (59, 1),
        (122, 1),
    ];
    let w2 = [
        (0, 27),
        (7, 29),
        (14, 32),
        (21, 5),
        (28, 7),
        (35, 1),
        (42, 1),
        (56, 4),
        (104, 1),
        (154, 1),
    ];
    w1.iter()
        .map(|&(b, n)| ((Family::W1, b), n))
        .chain(w2.iter().map(|&(b, n)| ((Family::W2, b), n)))
        .collect()
}

fn diff_text(
    want: &BTreeMap<(Family, u32), usize>,
    got: &BTreeMap<(Family, u32), usize>,
) -> String {
    let keys: BTreeSet<_> = want.keys().chain(got.keys()).collect();
    keys.into_iter()
        .filter_map(|k| {
            let (w, g) = (
                want.get(k).copied().unwrap_or(0),
                got.get(k).copied().unwrap_or(0),
            );
            (w != g).then(|| format!("{} {} expected {w} found {g}", k.0, k.1))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

struct Runs {
    two_fixed_plan: Plan,
    two_fixed: ClassificationReport,
    three_cycle_plan: Plan,
    three_cycle: ClassificationReport,
    r24_plans: Vec<(String, Plan)>,
    r24: Vec<(String, ClassificationReport)>,
}

fn r24_input(phi_name: &str) -> ClassifyInput {
    let spec = AutomorphismSpec::new(3, 10, 14).unwrap();
    let e = catalog::binary(phi_name).unwrap();
    ClassifyInput::Pairs {
        pi: ("Gpi_R24".into(), catalog::binary("Gpi_R24").unwrap()),
        phis: vec![(phi_name.into(), decomp::map_phi(&e, &spec).unwrap())],
    }
}

fn runs() -> Runs {
    let opts = ClassifyOptions::default();
    let t = Instant::now();
    let two_fixed_plan = order7_two_fixed_plan(MAX_COSET_DEGREE).unwrap();
    let two_fixed = run_plan(&two_fixed_plan, &opts).unwrap();
    let so23 = golay_so23_dataset().unwrap();
    let three_cycle_plan = order7_three_cycle_plan(&so23).unwrap();
    let three_cycle = run_plan(&three_cycle_plan, &opts).unwrap();
    let spec = AutomorphismSpec::new(3, 10, 14).unwrap();
    let mut r24_plans = Vec::new();
    let mut r24 = Vec::new();
    for name in ["Esigma_10_14_B10", "Esigma_10_14_E10"] {
        let input = r24_input(name);
        let plan = sdcode::classify::plan(&spec, &input, &opts).unwrap();
        r24.push((name.to_string(), run_plan(&plan, &opts).unwrap()));
        r24_plans.push((name.to_string(), plan));
    }
    println!("# classification runs took {:.1?}", t.elapsed());
    Runs {
        two_fixed_plan,
        two_fixed,
        three_cycle_plan,
        three_cycle,
        r24_plans,
        r24,
    }
}

fn criterion_1(v: &mut Verdicts, runs: &Runs) {
    let got = report_counts(&runs.two_fixed);
    let want = order7_reference();
    let ok = got == want && runs.two_fixed.total() == 191;
    let mut union = runs.two_fixed.clone();
    union.merge(&runs.three_cycle);
    let union_ok = report_counts(&union) == want && union.total() == 191;
    let detail = if ok {
        format!(
            "7-(6,2) gives 191 codes matching the reference counts ({})",
            counts_text(&got)
        )
    } else {
        format!(
            "7-(6,2) alone gives {} codes, differs from the reference counts by [{}]; merged with 7-(3,23) it gives {} codes{}",
            runs.two_fixed.total(),
            diff_text(&want, &got),
            union.total(),
            if union_ok { " matching the reference counts exactly" } else { " still differing" }
        )
    };
    v.record("1", ok, detail);
}

fn criterion_2(v: &mut Verdicts, runs: &Runs) {
    let r = &runs.two_fixed;
    let sub = |label: &str| {
        r.subtotal(label)
            .unwrap_or_else(|| panic!("no subtotal {label}"))
    };
    let mut problems = Vec::new();
    let case1: Vec<_> = ["case I, C_pi=E8", "case I, C_pi=C2^4"]
        .iter()
        .flat_map(|l| {
            sub(l)
                .profiles
                .iter()
                .map(|(p, n)| ((p.family, p.beta), *n))
        })
        .collect();
    if case1 != vec![((Family::W1, 38), 1)] {
        problems.push(format!("case I profiles {case1:?}"));
    }
    let case1_aut: Vec<_> = r
        .representatives
        .iter()
        .filter(|x| x.provenance.starts_with("case I,"))
        .map(|x| x.aut_order.to_string())
        .collect();
    if case1_aut != ["8064"] {
        problems.push(format!("case I aut orders {case1_aut:?}"));
    }
    for (label, n) in [
        ("case II, C_pi=C2^4", 21),
        ("case II, C_pi=E8", 19),
        ("case III, C_pi=E8", 64),
        ("case III, C_pi=C2^4", 87),
    ] {
        if sub(label).count != n {
            problems.push(format!("{label}: {} codes, expected {n}", sub(label).count));
        }
    }
    let betas = |label: &str, fam: Family| -> Option<BTreeSet<u32>> {
        let s = sub(label);
        s.profiles
            .keys()
            .all(|p| p.family == fam)
            .then(|| s.profiles.keys().map(|p| p.beta).collect())
    };
    let e8: BTreeSet<u32> = [10, 17, 24, 31, 38, 52, 122].into();
    let c24: BTreeSet<u32> = [0, 7, 14, 21, 28, 35, 42, 56, 154].into();
    if betas("case III, C_pi=E8", Family::W1) != Some(e8) {
        problems.push("case III E8 profiles differ".into());
    }
    if betas("case III, C_pi=C2^4", Family::W2) != Some(c24) {
        problems.push("case III C2^4 profiles differ".into());
    }
    let ok = problems.is_empty();
    let detail = if ok {
        "case I: 1 code (W1 38, aut 8064); case II: 21 (C2^4) and 19 (E8); case III: 64 (E8, W1) and 87 (C2^4, W2)".to_string()
    } else {
        problems.join("; ")
    };
    v.record("2", ok, detail);
}

fn criterion_3(v: &mut Verdicts, runs: &Runs) {
    let r = &runs.three_cycle;
    let got: BTreeSet<(Family, u32, BigUint)> = r
        .representatives
        .iter()
        .map(|x| (x.profile.family, x.profile.beta, x.aut_order.clone()))
        .collect();
    let want: BTreeSet<(Family, u32, BigUint)> = [
        (Family::W1, 122, 3251404800u64),
        (Family::W2, 104, 116121600),
        (Family::W2, 154, 786839961600),
    ]
    .into_iter()
    .map(|(f, b, a)| (f, b, BigUint::from(a)))
    .collect();
    let ok = r.total() == 3 && got == want;
    let list: Vec<String> = got
        .iter()
        .map(|(f, b, a)| format!("{f} {b} aut {a}"))
        .collect();
    v.record(
        "3",
        ok,
        format!(
            "7-(3,23) with the Golay-derived so_23_10_8 dataset gives {} codes: {}",
            r.total(),
            list.join(", ")
        ),
    );
}

fn criterion_4(v: &mut Verdicts, runs: &Runs) {
    let expected: [(&str, usize, Vec<u32>, Vec<BigUint>); 2] = [
        (
            "Esigma_10_14_B10",
            4,
            vec![60, 33, 30, 21],
            big(&[10368, 432, 72, 48]),
        ),
        (
            "Esigma_10_14_E10",
            7,
            vec![42, 30, 36, 24, 42, 30, 21],
            big(&[3072, 24, 192, 36, 1152, 24, 720]),
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, n, betas, auts) in expected {
        let r = &runs.r24.iter().find(|(x, _)| x == name).unwrap().1;
        let mut got_b: Vec<u32> = r.representatives.iter().map(|x| x.profile.beta).collect();
        let mut want_b = betas.clone();
        got_b.sort();
        want_b.sort();
        let got_a = aut_multiset(r.representatives.iter().map(|x| x.aut_order.clone()));
        let this = r.total() == n && got_b == want_b && got_a == auts;
        ok &= this;
        let shown = |v: &[BigUint]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        if this {
            parts.push(format!(
                "{name}: {n} codes, beta {got_b:?}, aut {{{}}}",
                shown(&got_a)
            ));
        } else {
            parts.push(format!(
                "{name}: {} codes (expected {n}), beta {got_b:?} (expected {want_b:?}), aut {{{}}} (expected {{{}}})",
                r.total(),
                shown(&got_a),
                shown(&auts)
            ));
        }
    }
    v.record("4", ok, parts.join("; "));
}

/// Dimensions of the fixed and even subcodes after an independent split.
fn dims_hold(code: &BinaryCode, spec: &AutomorphismSpec) -> bool {
    let Ok(parts) = decomp::split(code, spec) else {
        return false;
    };
    code.is_self_dual()
        && parts.fixed.k() == (spec.c + spec.f) / 2
        && parts.even.k() == spec.c * (spec.p - 1) / 2
}

fn all_plans(runs: &Runs) -> Vec<(&str, &Plan)> {
    let mut v: Vec<(&str, &Plan)> = vec![
        ("7-(6,2)", &runs.two_fixed_plan),
        ("7-(3,23)", &runs.three_cycle_plan),
    ];
    for (name, p) in &runs.r24_plans {
        v.push((name.as_str(), p));
    }
    v
}

fn criterion_5a(v: &mut Verdicts, runs: &Runs) {
    let mut total = 0;
    let mut bad = Vec::new();
    for (name, plan) in all_plans(runs) {
        let results = parallel_map(&plan.candidates, threads(), |cand| {
            assemble_candidate(plan, cand)
                .map(|code| dims_hold(&code, &plan.spec))
                .unwrap_or(false)
        });
        total += results.len();
        let failed = results.iter().filter(|ok| !**ok).count();
        if failed > 0 {
            bad.push(format!("{name}: {failed} failures"));
        }
    }
    v.record(
        "5(a)",
        bad.is_empty() && total > 0,
        if bad.is_empty() {
            format!("{total} assembled candidates are self-dual with dim F = (c+f)/2 and dim E = c(p-1)/2")
        } else {
            bad.join("; ")
        },
    );
}

fn criterion_5b(v: &mut Verdicts, runs: &Runs) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (name, plan) in all_plans(runs) {
        let results = parallel_map(&plan.candidates, threads(), |cand| {
            let code = assemble_candidate(plan, cand).unwrap();
            let mw = code.min_weight(Some(8)).unwrap().map(|m| m.weight);
            if mw.is_some_and(|w| w < 8) {
                return None;
            }
            let wd = code.weight_distribution().unwrap();
            let a = wd.counts();
            let Ok(p) = beta_profile(&wd) else {
                return Some(Err(format!("candidate {}: no profile", cand.id)));
            };
            let b = p.beta as u64;
            let a10 = match p.family {
                Family::W1 => 976 - 8 * b,
                Family::W2 => 1232 - 8 * b,
            };
            if a[8] != 44 + 4 * b || a[10] != a10 {
                return Some(Err(format!(
                    "candidate {}: A8 {} A10 {}",
                    cand.id, a[8], a[10]
                )));
            }
            Some(Ok(()))
        });
        for r in results.into_iter().flatten() {
            checked += 1;
            if let Err(e) = r {
                bad.push(format!("{name} {e}"));
            }
        }
    }
    v.record(
        "5(b)",
        bad.is_empty() && checked > 0,
        if bad.is_empty() {
            format!("{checked} codes of minimum weight 8 resolve to a profile with A8 = 44+4b and the family's A10")
        } else {
            bad.join("; ")
        },
    );
}

fn random_code(n: usize, k: usize, rng: &mut ChaCha8Rng) -> BinaryCode {
    loop {
        let rows = (0..k)
            .map(|_| {
                let mut v = BitVector::zeros(n);
                for i in 0..n {
                    v.set(i, rng.gen::<bool>());
                }
                v
            })
            .collect();
        let c = BinaryCode::from_rows(n, rows).unwrap();
        if c.k() == k {
            return c;
        }
    }
}

fn shuffled(code: &BinaryCode, rng: &mut ChaCha8Rng) -> BinaryCode {
    let mut p: Vec<usize> = (0..code.n()).collect();
    p.shuffle(rng);
    code.permute(&p).unwrap()
}

fn criterion_5c(v: &mut Verdicts) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c);
    let mut pairs = Vec::new();
    for i in 0..240 {
        let n = rng.gen_range(4..=9);
        let k = rng.gen_range(1..n);
        let a = random_code(n, k, &mut rng);
        let b = match i % 3 {
            0 => shuffled(&a, &mut rng),
            1 => random_code(n, k, &mut rng),
            _ => {
                // One generator changed: often the same weight distribution.
                let mut rows = a.rows().to_vec();
                let j = rng.gen_range(0..rows.len());
                let i = rng.gen_range(0..n);
                let bit = rows[j].get(i);
                rows[j].set(i, !bit);
                let c = BinaryCode::from_rows(n, rows).unwrap();
                if c.k() != k {
                    continue;
                }
                shuffled(&c, &mut rng)
            }
        };
        pairs.push((a, b));
    }
    let verdicts = parallel_map(&pairs, threads(), |(a, b)| {
        (
            are_equivalent(a, b).unwrap(),
            brute_force_equiv(a, b).unwrap(),
        )
    });
    let disagree = verdicts.iter().filter(|(x, y)| x != y).count();
    let equivalent = verdicts.iter().filter(|(_, y)| *y).count();
    let ok = pairs.len() >= 200 && disagree == 0 && equivalent > 0 && equivalent < pairs.len();
    v.record(
        "5(c)",
        ok,
        format!(
            "{} random pairs of length 4..9 ({equivalent} equivalent): {disagree} disagreements with the brute-force oracle",
            pairs.len()
        ),
    );
}

fn criterion_5d(v: &mut Verdicts) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5d);
    let mut pool: Vec<BinaryCode> = ["E8", "C2_4", "G1_len16", "G2_len16", "G3_len16", "Gpi_R24"]
        .iter()
        .map(|n| catalog::binary(n).unwrap())
        .collect();
    while pool.len() < 30 {
        let n = 2 * rng.gen_range(4..=12);
        pool.push(BinaryCode::random_self_dual(n, &mut rng));
    }
    while pool.len() < 50 {
        let n = rng.gen_range(8..=20);
        let k = rng.gen_range(2..=n / 2);
        pool.push(random_code(n, k, &mut rng));
    }
    let seeds: Vec<(usize, u64)> = (0..pool.len()).map(|i| (i, rng.gen())).collect();
    let moved = parallel_map(&seeds, threads(), |&(i, seed)| {
        let code = &pool[i];
        let key = canonical_key(code).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..1000)
            .filter(|_| canonical_key(&shuffled(code, &mut rng)).unwrap() != key)
            .count()
    });
    let broken: usize = moved.iter().filter(|&&m| m > 0).count();
    v.record(
        "5(d)",
        broken == 0,
        format!(
            "{} codes x 1000 random relabelings: {broken} codes with a changed canonical key",
            pool.len()
        ),
    );
}

fn criterion_5e(v: &mut Verdicts) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e);
    let mut bad = Vec::new();
    for trial in 0..100 {
        let n = 2 * rng.gen_range(1..=16);
        let pi = BinaryCode::random_self_dual(n, &mut rng);
        let c = rng.gen_range(0..=n);
        let f = n - c;
        let s = match structure_split(&pi, c, f) {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        // Recheck each identity from the returned blocks.
        let rank =
            |rows: &[BitVector], len: usize| BinaryCode::from_rows(len, rows.to_vec()).unwrap().k();
        let span = |base: &BinaryCode, extra: &[BitVector], len: usize| {
            let mut rows = base.rows().to_vec();
            rows.extend_from_slice(extra);
            BinaryCode::from_rows(len, rows).unwrap()
        };
        let holds = s.k3 == rank(&s.e, c)
            && s.k3 == rank(&s.f, f)
            && s.k1 + s.k2 + s.k3 == n / 2
            && 2 * s.k2 == 2 * s.k1 + f - c
            && span(&s.b, &s.e, c).dual().same_space(&s.b)
            && span(&s.d, &s.f, f).dual().same_space(&s.d);
        if !holds {
            bad.push(format!("trial {trial}: n={n} c={c}"));
        }
    }
    v.record(
        "5(e)",
        bad.is_empty(),
        if bad.is_empty() {
            "100 random self-dual codes of length <= 32: rank E = rank F = k3, k2 = k1 + (f-c)/2, B_E dual = B*, D_F dual = D*".to_string()
        } else {
            bad.join("; ")
        },
    );
}

fn criterion_5f(v: &mut Verdicts, runs: &Runs) {
    let sys = factor_cyclotomic(7).unwrap();
    let mut checked = 0;
    let mut bad = Vec::new();
    for plan in [&runs.two_fixed_plan, &runs.three_cycle_plan] {
        for (i, phi) in plan.phis.iter().enumerate() {
            let (_, dims) = module_decompose(phi, &sys).unwrap();
            checked += 1;
            let sum: usize = dims.iter().sum();
            if sum * 2 != plan.spec.c * sys.s() {
                bad.push(format!("{} C_phi #{i}: dims {dims:?}", plan.spec));
            }
        }
    }
    v.record(
        "5(f)",
        bad.is_empty() && checked > 0,
        if bad.is_empty() {
            format!("{checked} C_phi codes for p=7 have component dimensions summing to cs/2")
        } else {
            bad.join("; ")
        },
    );
}

/// The length-16 check: orbits of Aut(G_i) on pairs of fixed coordinates
/// give seven cases in total, one for each listed relabeling.
fn criterion_6(v: &mut Verdicts) {
    let mut total = 0;
    let mut distinct = true;
    let mut per_code = Vec::new();
    // Fixed pairs after the listed column transpositions, 0-based:
    // identity -> {14,15}, (1,16) -> {0,14}, (3,16) -> {2,14}.
    let listed: [(&str, &[(usize, usize)]); 3] = [
        ("G1_len16", &[(14, 15), (0, 14), (2, 14)]),
        ("G2_len16", &[(14, 15), (0, 14)]),
        ("G3_len16", &[(14, 15), (0, 14)]),
    ];
    for (name, pairs) in listed {
        let g = catalog::binary(name).unwrap();
        let aut = canonical_form(&g).unwrap().aut;
        let reps = orbit_reps_on_subsets(&aut.generators, 16, 2).unwrap();
        total += reps.len();
        per_code.push(format!("{name} {}", reps.len()));
        let orbit_of = |a: usize, b: usize| pair_orbit_min(&aut.generators, a, b);
        let orbits: BTreeSet<_> = pairs.iter().map(|&(a, b)| orbit_of(a, b)).collect();
        distinct &= orbits.len() == pairs.len() && orbits.len() == reps.len();
    }
    let ok = total == 7 && distinct;
    v.record(
        "6",
        ok,
        format!(
            "order-3 totals need external datasets and are not reproduced; length-16 C_pi cases: {} = {total}, listed relabelings hit distinct orbits: {distinct}",
            per_code.join(" + ")
        ),
    );
}

fn pair_orbit_min(gens: &[Permutation], a: usize, b: usize) -> (usize, usize) {
    let norm = |x: usize, y: usize| (x.min(y), x.max(y));
    let mut seen = BTreeSet::from([norm(a, b)]);
    let mut stack = vec![norm(a, b)];
    while let Some((x, y)) = stack.pop() {
        for g in gens {
            let q = norm(g.apply(x), g.apply(y));
            if seen.insert(q) {
                stack.push(q);
            }
        }
    }
    *seen.iter().next().unwrap()
}

fn main() -> ExitCode {
    let mut v = Verdicts { lines: Vec::new() };
    let runs = runs();
    criterion_1(&mut v, &runs);
    criterion_2(&mut v, &runs);
    criterion_3(&mut v, &runs);
    criterion_4(&mut v, &runs);
    criterion_5a(&mut v, &runs);
    criterion_5b(&mut v, &runs);
    criterion_5c(&mut v);
    criterion_5d(&mut v);
    criterion_5e(&mut v);
    criterion_5f(&mut v, &runs);
    criterion_6(&mut v);
    let failed = v.lines.iter().filter(|(_, ok)| !ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        v.lines.len() - failed
    );
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
