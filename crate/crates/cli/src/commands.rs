use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dl_harmonics::dirichlet::{build_truncation, decompose as split, verify_product_formula};
use dl_harmonics::dl_graph::BallExport;
use dl_harmonics::kernels::{defect_kernel, DlHittingBound, HarmonicFunction, KernelSpec, TreeHittingBound};
use dl_harmonics::lamplighter::{BoundaryConfig, GeneratorModel, GroupElement, Lamplighter, Side as LampSide};
use dl_harmonics::rational::format;
use dl_harmonics::walks::{
    apply, estimate_hitting, first_non_harmonic, simulate as run_walk, EstimateConfig, PAlpha, QAlpha, TreeSide,
    TreeWalk, Walk,
};
use dl_harmonics::{DLParams, DLVertex, GraphVariant, Parallelism, TreeEnd, TreeVertex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Format, GraphArgs, Model, Side, Variant, WalkArgs, WalkKind};

pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn params(g: &GraphArgs) -> Result<DLParams> {
    Ok(DLParams::new(g.q, g.r)?)
}

fn tree_side(side: Side) -> TreeSide {
    match side {
        Side::First => TreeSide::First,
        Side::Second => TreeSide::Second,
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).with_context(|| format!("invalid {what} JSON: {text}"))
}

fn vertex(p: DLParams, text: &str) -> Result<DLVertex> {
    let v: DLVertex = parse_json("vertex", text)?;
    p.check(&v)?;
    Ok(v)
}

/// Inline JSON if it looks like an object, a file path otherwise.
fn load_function(spec: &str) -> Result<HarmonicFunction> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_owned()
    } else {
        std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?
    };
    Ok(HarmonicFunction::from_json(&text)?)
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON serializes"));
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn kernel_eval(walk: &WalkArgs, side: Side, end: &str, at: &str) -> Result<Outcome> {
    let p = params(&walk.graph)?;
    let end: TreeEnd = parse_json("end", end)?;
    let x = vertex(p, at)?;
    let spec = KernelSpec::new(tree_side(side), end, walk.alpha.clone(), p)?;
    println!("{}", format(&spec.evaluate(&x)?));
    Ok(Outcome::Pass)
}

pub fn harmonic_check(spec: &str, samples: usize, radius: u32, seed: u64) -> Result<Outcome> {
    let h = load_function(spec)?;
    let p = h.params();
    let op = h.walk();
    let ball = p.ball(GraphVariant::Dl, &DLVertex::root(), radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, ball.len(), samples.min(ball.len())).into_vec();
    picked.sort_unstable();
    let sample: Vec<DLVertex> = picked.into_iter().map(|i| ball[i].clone()).collect();
    let eval = |v: &DLVertex| h.evaluate(v);
    let witness = first_non_harmonic(&op, eval, &sample, Parallelism::Parallel)?;
    let mut report = json!({
        "pass": witness.is_none(),
        "checked": sample.len(),
        "radius": radius,
        "seed": seed,
    });
    if let Some(v) = &witness {
        report["counterexample"] = json!({
            "vertex": v,
            "h": format(&h.evaluate(v)?),
            "Ph": format(&apply(&op, eval, v)?),
        });
    }
    print_json(&report);
    Ok(Outcome::from_pass(witness.is_none()))
}

pub fn dirichlet_solve(walk: &WalkArgs, n: u32, check_product: bool, out: Option<&Path>) -> Result<Outcome> {
    let t = build_truncation(n, params(&walk.graph)?, walk.alpha.clone())?;
    let mode = Parallelism::Parallel;
    let table = t.hitting_table(mode)?;
    if let Some(path) = out {
        write_out(path, &serde_json::to_string(&table.to_json())?)?;
    }
    let mut report = json!({
        "q": walk.graph.q,
        "r": walk.graph.r,
        "alpha": walk.alpha.to_string(),
        "n": n,
        "vertices": table.vertices().len(),
        "boundary": table.boundary().len(),
        "pass": true,
    });
    let mut pass = true;
    if check_product {
        let product =
            verify_product_formula(&t, &table, &t.first().hitting_table(mode)?, &t.second().hitting_table(mode)?)?;
        pass = product.holds();
        report["pass"] = json!(pass);
        report["product"] = json!({
            "checked": product.checked,
            "holds": pass,
            "discrepancies": product.discrepancies,
        });
    }
    print_json(&report);
    Ok(Outcome::from_pass(pass))
}

pub fn decompose(spec: &str, n: u32) -> Result<Outcome> {
    let h = load_function(spec)?;
    let t = build_truncation(n, h.params(), h.alpha().clone())?;
    let d = split(|v| h.evaluate(v), &t, Parallelism::Parallel)?;
    let pass = d.is_exact() && d.is_nonnegative();
    let mut report = d.to_json();
    report["pass"] = json!(pass);
    print_json(&report);
    Ok(Outcome::from_pass(pass))
}

fn print_trajectory<W>(op: &W, start: &W::State, steps: usize, seed: u64) -> Result<()>
where
    W: Walk,
    W::State: serde::Serialize,
{
    let trajectory = run_walk(op, start, steps, seed)?;
    let mut out = String::new();
    for v in trajectory.states() {
        writeln!(out, "{}", serde_json::to_string(v)?)?;
    }
    print!("{out}");
    Ok(())
}

pub fn simulate(
    walk: &WalkArgs,
    kind: WalkKind,
    tree: Option<Side>,
    steps: usize,
    seed: u64,
    start: Option<&str>,
) -> Result<Outcome> {
    let p = params(&walk.graph)?;
    match tree {
        Some(side) => {
            let w = TreeWalk::projection(tree_side(side), p, &walk.alpha);
            let start = match start {
                Some(text) => {
                    let v: TreeVertex = parse_json("vertex", text)?;
                    w.tree().check_vertex(&v)?;
                    v
                }
                None => TreeVertex::root(),
            };
            print_trajectory(&w, &start, steps, seed)?;
        }
        None => {
            let start = start.map(|s| vertex(p, s)).transpose()?.unwrap_or_else(DLVertex::root);
            match kind {
                WalkKind::P => print_trajectory(&PAlpha::new(p, walk.alpha.clone()), &start, steps, seed)?,
                WalkKind::Q => print_trajectory(&QAlpha::new(p, walk.alpha.clone()), &start, steps, seed)?,
            }
        }
    }
    Ok(Outcome::Pass)
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_f(
    walk: &WalkArgs,
    tree: Option<Side>,
    from: &str,
    to: &str,
    trials: u64,
    horizon: u64,
    seed: u64,
    escape_tolerance: f64,
) -> Result<Outcome> {
    let p = params(&walk.graph)?;
    let mut config = EstimateConfig::new(trials, horizon, seed);
    config.escape_tolerance = escape_tolerance;
    let result = match tree {
        Some(side) => {
            let w = TreeWalk::projection(tree_side(side), p, &walk.alpha);
            let x: TreeVertex = parse_json("vertex", from)?;
            let y: TreeVertex = parse_json("vertex", to)?;
            w.tree().check_vertex(&x)?;
            w.tree().check_vertex(&y)?;
            let bound = TreeHittingBound::new(w.tree().q(), w.forward(), y.clone());
            estimate_hitting(&w, &x, &y, config, Some(&bound))?
        }
        None => {
            let op = PAlpha::new(p, walk.alpha.clone());
            let (x, y) = (vertex(p, from)?, vertex(p, to)?);
            let bound = DlHittingBound::new(p, &walk.alpha, &y);
            estimate_hitting(&op, &x, &y, config, Some(&bound))?
        }
    };
    print_json(&serde_json::to_value(&result)?);
    Ok(Outcome::Pass)
}

fn elements(g: Lamplighter, span: i64) -> Vec<GroupElement> {
    let positions: Vec<i64> = (-span..=span).collect();
    let mut configs: Vec<Vec<(i64, u32)>> = vec![Vec::new()];
    for &n in &positions {
        configs = configs
            .into_iter()
            .flat_map(|c| {
                (0..g.q()).map(move |v| {
                    let mut c = c.clone();
                    c.push((n, v));
                    c
                })
            })
            .collect();
    }
    configs.into_iter().flat_map(|c| (-span..=span).map(move |k| g.element(c.clone(), k))).collect()
}

pub fn cayley_check(q: u32, span: i64) -> Result<Outcome> {
    if span < 0 {
        bail!("span must be nonnegative");
    }
    let g = Lamplighter::new(q)?;
    let p = g.dl_params();
    let all = elements(g, span);
    let mut failures = Vec::new();
    let mut images = BTreeSet::new();
    for a in &all {
        let v = g.encode(a);
        if g.decode(&v, p)? != *a {
            failures.push(json!({ "element": a, "check": "decode(encode(a)) = a" }));
        }
        images.insert(v.clone());
        for (model, variant, name) in [
            (GeneratorModel::WalkSwitch, GraphVariant::Dl, "walk-switch"),
            (GeneratorModel::SwitchWalkSwitch, GraphVariant::Dls, "switch-walk-switch"),
        ] {
            let group: BTreeSet<DLVertex> = g.cayley_neighbours(a, model).iter().map(|b| g.encode(b)).collect();
            let graph: BTreeSet<DLVertex> = p.neighbours(variant, &v)?.into_iter().collect();
            if group != graph {
                failures.push(json!({ "element": a, "check": format!("{name} neighbours") }));
            }
        }
    }
    let injective = images.len() == all.len();
    let pass = injective && failures.is_empty();
    print_json(&json!({
        "q": q,
        "span": span,
        "elements": all.len(),
        "injective": injective,
        "pass": pass,
        "failures": failures,
    }));
    Ok(Outcome::from_pass(pass))
}

pub fn defect(q: u32, model: Model, element: &str, xi: &str) -> Result<Outcome> {
    let g = Lamplighter::new(q)?;
    let a: GroupElement = parse_json("group element", element)?;
    g.dl_params().check(&g.encode(&a))?;
    let xi: BoundaryConfig = parse_json("boundary configuration", xi)?;
    g.dl_params().first().check_end(&xi.to_tree_end())?;
    let model = match model {
        Model::WalkSwitch => GeneratorModel::WalkSwitch,
        Model::SwitchWalkSwitch => GeneratorModel::SwitchWalkSwitch,
    };
    let (name, df) = match (xi.side(), model) {
        (LampSide::Minus, _) => ("minus", g.defect_minus(&a, &xi)?),
        (LampSide::Plus, GeneratorModel::SwitchWalkSwitch) => ("oplus", g.defect_oplus(&a, &xi)?),
        (LampSide::Plus, _) => ("plus", g.defect_plus(&a, &xi)?),
    };
    print_json(&json!({
        "defect": name,
        "value": df,
        "kernel": format(&defect_kernel(model, g, &a, &xi)?),
    }));
    Ok(Outcome::Pass)
}

pub fn graph_export(
    graph: &GraphArgs,
    radius: u32,
    variant: Variant,
    fmt: Format,
    out: Option<&Path>,
) -> Result<Outcome> {
    let variant = match variant {
        Variant::Dl => GraphVariant::Dl,
        Variant::Dls => GraphVariant::Dls,
    };
    let export = BallExport::build(params(graph)?, variant, radius)?;
    let text = match fmt {
        Format::Dot => export.to_dot(),
        Format::Json => serde_json::to_string_pretty(&export.to_json())? + "\n",
    };
    match out {
        Some(path) => write_out(path, &text)?,
        None => print!("{text}"),
    }
    Ok(Outcome::Pass)
}
