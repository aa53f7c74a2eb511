//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p dl-harmonics --test acceptance`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dl_harmonics::dirichlet::{build_truncation, decompose, kernel_convergence, verify_product_formula};
use dl_harmonics::kernels::{
    combine, defect_kernel, f_minus, f_plus, martin_kernel_tree, reversing_kernel, rho_squared, KernelSpec, Term,
    TermKind, TreeHittingBound,
};
use dl_harmonics::rational::{int, ratio};
use dl_harmonics::walks::{
    conjugate, estimate_hitting, first_non_harmonic, project, Alpha, EstimateConfig, PAlpha, QAlpha, TreeSide,
    TreeWalk, Walk,
};
use dl_harmonics::{
    DLParams, DLVertex, GeneratorModel, GraphVariant, GroupElement, Lamplighter, Parallelism, Rational, Side, TreeEnd,
    TreeParams, TreeVertex,
};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn alpha(n: i64, d: i64) -> Alpha {
    Alpha::ratio(n, d).expect("valid alpha")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_end(t: TreeParams, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> TreeEnd {
    t.end((lo..=hi).map(|j| (j, rng.random_range(0..t.q())))).expect("valid end")
}

fn random_vertex(p: DLParams, rng: &mut ChaCha8Rng, steps: usize) -> DLVertex {
    let mut v = DLVertex::root();
    for _ in 0..steps {
        let n = p.dl_neighbours(&v).expect("valid vertex");
        v = n[rng.random_range(0..n.len())].clone();
    }
    v
}

fn random_element(g: Lamplighter, rng: &mut ChaCha8Rng, span: i64) -> GroupElement {
    let eta: Vec<(i64, u32)> = (-span..=span).map(|n| (n, rng.random_range(0..g.q()))).collect();
    g.element(eta, rng.random_range(-span..=span))
}

fn random_coefficient(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.random_range(0..10), rng.random_range(1..7))
}

/// Closed-form hitting probabilities solve their quadratics and follow the
/// case split.
fn closed_forms() -> Check {
    let one = Rational::one();
    let mut cases = 0;
    for q in [2u32, 3, 4] {
        let qq = int(q.into());
        for (n, d) in [(1, 5), (1, 3), (1, 2), (2, 3), (4, 5)] {
            let a = alpha(n, d);
            let al = a.value().clone();
            let fm = f_minus(&a);
            let fp = f_plus(&a, q);
            // F⁻ = (1-α) + α(F⁻)², smaller of the roots 1 and (1-α)/α
            ensure(fm == (&one - &al) + &al * &fm * &fm, || format!("F⁻ quadratic fails at α={a}"))?;
            let minus_roots = [one.clone(), (&one - &al) / &al];
            ensure(fm == *minus_roots.iter().min().unwrap(), || format!("F⁻ not the smaller root at α={a}"))?;
            // F⁺ = α/q + (q-1)(α/q)F⁻F⁺ + (1-α)(F⁺)²; the other root via Vieta
            let (qa, qb, qc) = (&one - &al, (&qq - &one) * (&al / &qq) * &fm - &one, &al / &qq);
            ensure(&qa * &fp * &fp + &qb * &fp + &qc == Rational::zero(), || {
                format!("F⁺ quadratic fails at α={a}, q={q}")
            })?;
            let other = -&qb / &qa - &fp;
            ensure(fp <= other, || format!("F⁺ not the smaller root at α={a}, q={q}"))?;
            let half = ratio(1, 2);
            let (split_m, split_p) = if al >= half {
                ((&one - &al) / &al, one.clone() / &qq)
            } else {
                (one.clone(), &al / ((&one - &al) * &qq))
            };
            ensure(fm == split_m && fp == split_p, || format!("case split differs at α={a}, q={q}"))?;
            let rho = rho_squared(&a, q);
            let direct = std::cmp::min((&one - &al) / (&al * &qq), &al / ((&one - &al) * &qq));
            ensure(rho == direct, || format!("ρ² differs at α={a}, q={q}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (α, q) cases exact"))
}

/// Lifted kernels and their nonnegative combinations are exactly
/// `P_α`-harmonic on the radius-6 ball.
fn harmonicity_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0usize;
    for (q, r) in [(2, 2), (2, 3), (3, 3)] {
        let p = DLParams::new(q, r).map_err(err)?;
        let ball = p.ball(GraphVariant::Dl, &DLVertex::root(), 6).map_err(err)?;
        for (n, d) in [(1, 3), (1, 2), (2, 3)] {
            let a = alpha(n, d);
            let op = PAlpha::new(p, a.clone());
            let mut terms = Vec::new();
            for side in [TreeSide::First, TreeSide::Second] {
                let tree = if side == TreeSide::First { p.first() } else { p.second() };
                for end in [TreeEnd::Omega, random_end(tree, &mut rng, -6, 6), random_end(tree, &mut rng, -6, 6)] {
                    terms.push(TermKind::Kernel { side, end });
                }
            }
            terms.push(TermKind::Constant);
            let mut functions: Vec<_> = terms
                .iter()
                .map(|kind| combine(p, a.clone(), vec![Term { coefficient: Rational::one(), kind: kind.clone() }]))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            for _ in 0..3 {
                let mix = terms
                    .iter()
                    .map(|kind| Term { coefficient: random_coefficient(&mut rng), kind: kind.clone() })
                    .collect();
                functions.push(combine(p, a.clone(), mix).map_err(err)?);
            }
            for h in &functions {
                let witness = first_non_harmonic(&op, |v| h.evaluate(v), &ball, Parallelism::Parallel).map_err(err)?;
                if let Some(v) = witness {
                    return Err(format!("not harmonic at {v}: q={q} r={r} α={a} h={}", h.to_json()));
                }
                checked += ball.len();
            }
        }
    }
    Ok(format!("{checked} exact vertex checks"))
}

/// `F^{∂S}(x1x2, y1a2) = F1(x1, y1)` and the mirror identity.
fn product_formula() -> Check {
    let mut total = 0;
    for n in [1u32, 2] {
        for (q, r) in [(2, 2), (2, 3)] {
            for a in [alpha(1, 3), alpha(1, 2)] {
                let p = DLParams::new(q, r).map_err(err)?;
                let t = build_truncation(n, p, a.clone()).map_err(err)?;
                let mode = Parallelism::Parallel;
                let report = verify_product_formula(
                    &t,
                    &t.hitting_table(mode).map_err(err)?,
                    &t.first().hitting_table(mode).map_err(err)?,
                    &t.second().hitting_table(mode).map_err(err)?,
                )
                .map_err(err)?;
                ensure(report.holds(), || {
                    format!("n={n} q={q} r={r} α={a}: {} discrepancies", report.discrepancies.len())
                })?;
                total += report.checked;
            }
        }
    }
    Ok(format!("{total} identities exact"))
}

/// `h = c1 K1 + c2 K2 + c3` splits exactly into nonnegative parts on `S^(2)`.
fn decomposition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let setups = [(2, 2, alpha(1, 2)), (2, 3, alpha(1, 3)), (2, 2, alpha(2, 3)), (2, 3, alpha(1, 2))];
    let truncations: Vec<_> = setups
        .iter()
        .map(|(q, r, a)| build_truncation(2, DLParams::new(*q, *r).unwrap(), a.clone()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    for instance in 0..20 {
        let t = &truncations[instance % truncations.len()];
        let p = t.params();
        let terms = vec![
            Term {
                coefficient: random_coefficient(&mut rng),
                kind: TermKind::Kernel { side: TreeSide::First, end: random_end(p.first(), &mut rng, -4, 4) },
            },
            Term {
                coefficient: random_coefficient(&mut rng),
                kind: TermKind::Kernel { side: TreeSide::Second, end: random_end(p.second(), &mut rng, -4, 4) },
            },
            Term { coefficient: random_coefficient(&mut rng), kind: TermKind::Constant },
        ];
        let h = combine(p, t.op().alpha().clone(), terms).map_err(err)?;
        let d = decompose(|v| h.evaluate(v), t, Parallelism::Parallel).map_err(err)?;
        ensure(d.is_exact(), || format!("instance {instance}: reconstruction fails at {}", d.mismatches[0]))?;
        ensure(d.is_nonnegative(), || format!("instance {instance}: negative part"))?;
    }
    Ok("20 instances exact and nonnegative".into())
}

/// The h-transform by the drift kernel reverses the drift.
fn conjugation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut literal_mismatch = false;
    for q in [2u32, 3] {
        let p = DLParams::new(q, q).map_err(err)?;
        for a in [alpha(1, 3), alpha(2, 3)] {
            let g = reversing_kernel(p, a.clone());
            let conj = conjugate(PAlpha::new(p, a.clone()), |v: &DLVertex| g.evaluate(v));
            let first = KernelSpec::new(TreeSide::First, TreeEnd::Omega, a.clone(), p).map_err(err)?;
            let literal = conjugate(PAlpha::new(p, a.clone()), |v: &DLVertex| first.evaluate(v));
            let reversed = PAlpha::new(p, a.complement());
            for _ in 0..500 {
                let v = random_vertex(p, &mut rng, 14);
                let got = conj.transitions(&v).map_err(err)?;
                ensure(got == reversed.transitions(&v).map_err(err)?, || format!("q={q} α={a} at {v}"))?;
                literal_mismatch |= literal.transitions(&v).map_err(err)? != got;
            }
        }
    }
    Ok(format!(
        "2000 vertices exact (K1(·,ω) for α ≥ 1/2, K2(·,ω) below; K1(·,ω) alone at α = 1/3 {})",
        if literal_mismatch { "is constant and does not reverse" } else { "also reverses" }
    ))
}

/// Encode/decode is a bijection on the box and generators match adjacency.
fn cayley_equivalence() -> Check {
    let g = Lamplighter::new(2).map_err(err)?;
    let p = g.dl_params();
    let mut elements = Vec::new();
    for mask in 0u32..32 {
        for k in -2..=2 {
            let eta = (0..5).filter(|b| mask >> b & 1 == 1).map(|b| (b as i64 - 2, 1u32));
            elements.push(g.element(eta, k));
        }
    }
    let mut images = HashSet::new();
    for a in &elements {
        let v = g.encode(a);
        ensure(p.check(&v).is_ok(), || format!("encode({a}) is not a vertex"))?;
        ensure(&g.decode(&v, p).map_err(err)? == a, || format!("decode(encode({a})) differs"))?;
        ensure(g.encode(&g.decode(&v, p).map_err(err)?) == v, || format!("encode(decode({v})) differs"))?;
        images.insert(v.clone());
        for (model, variant) in
            [(GeneratorModel::WalkSwitch, GraphVariant::Dl), (GeneratorModel::SwitchWalkSwitch, GraphVariant::Dls)]
        {
            let from_group: BTreeSet<DLVertex> = g.cayley_neighbours(a, model).iter().map(|b| g.encode(b)).collect();
            let from_graph: BTreeSet<DLVertex> = p.neighbours(variant, &v).map_err(err)?.into_iter().collect();
            ensure(from_group == from_graph, || format!("{model:?} neighbours differ at {a}"))?;
        }
    }
    ensure(images.len() == elements.len(), || "encode is not injective".into())?;
    Ok(format!("{} elements, both generator models", elements.len()))
}

/// `q^{df}` equals the simple-random-walk tree kernel.
fn defect_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let half = alpha(1, 2);
    for q in [2u32, 3] {
        let g = Lamplighter::new(q).map_err(err)?;
        let p = g.dl_params();
        for i in 0..500 {
            let a = random_element(g, &mut rng, 5);
            let labels: Vec<(i64, u32)> = (-5..=5).map(|n| (n, rng.random_range(0..q))).collect();
            let plus = g.boundary(Side::Plus, labels.clone()).map_err(err)?;
            let minus = g.boundary(Side::Minus, labels).map_err(err)?;
            let x = g.encode(&a);
            let pairs = [
                (
                    defect_kernel(GeneratorModel::WalkSwitch, g, &a, &plus),
                    martin_kernel_tree(TreeSide::First, &x.x1, &plus.to_tree_end(), &half, p),
                ),
                (
                    defect_kernel(GeneratorModel::WalkSwitch, g, &a, &minus),
                    martin_kernel_tree(TreeSide::Second, &x.x2, &minus.to_tree_end(), &half, p),
                ),
                (
                    defect_kernel(GeneratorModel::SwitchWalkSwitch, g, &a, &plus),
                    martin_kernel_tree(TreeSide::First, &x.factor_map().x1, &plus.shifted(1).to_tree_end(), &half, p),
                ),
            ];
            for (j, (lhs, rhs)) in pairs.into_iter().enumerate() {
                let (lhs, rhs) = (lhs.map_err(err)?, rhs.map_err(err)?);
                ensure(lhs == rhs, || format!("q={q} sample {i} identity {j}: {lhs} vs {rhs}"))?;
            }
        }
    }
    Ok("1000 samples × {df⁺, df⁻, df⊕} exact".into())
}

/// Projected `Q_α` is `P_α` on the factor graph.
fn factor_graph() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut classes = 0;
    for (q, r) in [(2, 2), (2, 3)] {
        let p = DLParams::new(q, r).map_err(err)?;
        for a in [alpha(1, 3), alpha(1, 2), alpha(3, 4)] {
            let proj = project(QAlpha::new(p, a.clone()));
            let direct = PAlpha::new(p, a.clone());
            for _ in 0..200 {
                let v = random_vertex(p, &mut rng, 14);
                ensure(proj.is_compatible_at(&v).map_err(err)?, || {
                    format!("class sums depend on representative at {v}")
                })?;
                let projected: BTreeMap<DLVertex, Rational> =
                    proj.transitions(&v).map_err(err)?.into_iter().map(|(w, x)| (w.factor_map(), x)).collect();
                let expected: BTreeMap<DLVertex, Rational> =
                    direct.transitions(&v.factor_map()).map_err(err)?.into_iter().collect();
                ensure(projected == expected, || format!("q={q} r={r} α={a} at {v}"))?;
                classes += 1;
            }
        }
    }
    Ok(format!("{classes} sibling classes exact"))
}

/// Monte-Carlo estimates of `F⁻` and `F⁺` on `T_2`.
fn monte_carlo() -> Check {
    let t = TreeParams::new(2).map_err(err)?;
    let x = TreeVertex::root();
    let xm = x.predecessor();
    let mut config = EstimateConfig::new(10_000, 1_000, 9);
    config.escape_tolerance = 1e-6;
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, a, from, to) in [("F⁻ α=2/3", alpha(2, 3), &x, &xm), ("F⁺ α=1/2", alpha(1, 2), &xm, &x)] {
        let walk = TreeWalk::new(t, a.clone());
        let bound = TreeHittingBound::new(2, &a, to.clone());
        let r = estimate_hitting(&walk, from, to, config, Some(&bound)).map_err(err)?;
        let sigma = (0.25f64 / r.trials as f64).sqrt();
        let within = (r.point_estimate - 0.5).abs() <= 3.0 * sigma;
        let truncation = r.truncated_fraction();
        ok &= within && truncation < 0.01;
        lines.push(format!(
            "{label}: {:.4} (|Δ| {:.4} vs 3σ {:.4}{}), truncated {:.2}%{}, escaped {}",
            r.point_estimate,
            (r.point_estimate - 0.5).abs(),
            3.0 * sigma,
            if within { "" } else { " FAIL" },
            100.0 * truncation,
            if truncation < 0.01 { "" } else { " FAIL (≥ 1%)" },
            r.escaped_runs
        ));
    }
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `K1^(n)(x, ξ)` up to `n = 8`: monotone hitting probabilities and
/// monotonically shrinking error.
fn kernel_approximation() -> Check {
    let t = TreeParams::new(2).map_err(err)?;
    let walk = TreeWalk::new(t, alpha(1, 2));
    let p = DLParams::new(2, 2).map_err(err)?;
    let ball: BTreeSet<TreeVertex> =
        p.ball(GraphVariant::Dl, &DLVertex::root(), 3).map_err(err)?.into_iter().map(|v| v.x1).collect();
    let ball: Vec<TreeVertex> = ball.into_iter().filter(|v| v.distance(&TreeVertex::root()) <= 3).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ends = vec![TreeEnd::Omega];
    ends.extend((0..6).map(|_| random_end(t, &mut rng, -3, 3)));
    let mut sequences = 0;
    let mut hitting_failures = Vec::new();
    let mut error_failures = Vec::new();
    let mut worst = 0.0f64;
    for x in &ball {
        for end in &ends {
            let report = kernel_convergence(&walk, x, end, 8).map_err(err)?;
            ensure(!report.steps.is_empty(), || format!("no approximations for {x}"))?;
            if !report.hitting_monotone() {
                hitting_failures.push(format!("{x}"));
            }
            if !report.error_monotone() {
                error_failures.push(format!("{x}"));
            }
            worst = worst.max(report.steps.last().unwrap().error);
            sequences += 1;
        }
    }
    let detail = format!(
        "{sequences} sequences ({} vertices), F-values non-monotone in {}, error non-monotone in {}{}, largest error at n=8: {worst:.4}",
        ball.len(),
        hitting_failures.len(),
        error_failures.len(),
        error_failures.first().map(|x| format!(" (first at x={x})")).unwrap_or_default(),
    );
    if hitting_failures.is_empty() && error_failures.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form hitting probabilities", Duration::from_secs(1), closed_forms),
        ("harmonicity suite", Duration::from_secs(30), harmonicity_suite),
        ("product formula", Duration::from_secs(120), product_formula),
        ("decomposition", Duration::from_secs(120), decomposition),
        ("conjugation identity", Duration::from_secs(5), conjugation),
        ("Cayley equivalence", Duration::from_secs(5), cayley_equivalence),
        ("defect-kernel identity", Duration::from_secs(10), defect_identity),
        ("factor-graph projection", Duration::from_secs(5), factor_graph),
        ("Monte-Carlo consistency", Duration::from_secs(30), monte_carlo),
        ("kernel-approximation convergence", Duration::from_secs(300), kernel_approximation),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.2}s / {}s{}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
