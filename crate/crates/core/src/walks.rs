//! Nearest neighbour transition kernels with exact rational weights.
//!
//! * [`PAlpha`]: on `DL(q, r)`, each of the `q` upward neighbours with
//!   probability `α/q` and each of the `r` downward ones with `(1-α)/r`.
//! * [`TreeWalk`]: the projections `P1 = P_{1,α}` on `T_q` and
//!   `P2 = P_{2,1-α}` on `T_r`.
//! * [`QAlpha`]: on `DL^s(q, r)`, `α/q²` upward and `(1-α)/(qr)` downward.
//! * [`Conjugated`] (h-transform) and [`Projected`] (sibling quotient).
//!
//! Simulation draws each step by comparing a uniform integer against the
//! exact cumulative weights over a common denominator. Trial `i` of a
//! Monte-Carlo run uses ChaCha8 seeded with `seed` on stream `i`, so results
//! do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dl_graph::{DLParams, DLVertex};
use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::rational::{self, common_denominator, int, Rational};
use crate::tree::{TreeParams, TreeVertex};

/// The drift parameter, a rational strictly between 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alpha(Rational);

impl TryFrom<String> for Alpha {
    type Error = Error;

    fn try_from(text: String) -> Result<Self> {
        Alpha::parse(&text)
    }
}

impl From<Alpha> for String {
    fn from(alpha: Alpha) -> String {
        rational::format(&alpha.0)
    }
}

impl Alpha {
    pub fn new(value: Rational) -> Result<Self> {
        if value <= Rational::zero() || value >= Rational::one() {
            return Err(Error::AlphaOutOfRange(rational::format(&value)));
        }
        Ok(Self(value))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(rational::parse(text)?)
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(rational::ratio(num, den))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// `1 - α`.
    pub fn complement(&self) -> Alpha {
        Alpha(Rational::one() - &self.0)
    }

    pub fn is_half(&self) -> bool {
        self.0 == rational::ratio(1, 2)
    }
}

impl Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Transition<S> = (S, Rational);

/// A Markov kernel with finitely many exact transitions out of each state.
pub trait Walk: Sync {
    type State: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync;

    fn transitions(&self, from: &Self::State) -> Result<Vec<Transition<Self::State>>>;
}

impl<W: Walk + ?Sized> Walk for &W {
    type State = W::State;

    fn transitions(&self, from: &Self::State) -> Result<Vec<Transition<Self::State>>> {
        (**self).transitions(from)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAlpha {
    params: DLParams,
    alpha: Alpha,
}

impl PAlpha {
    pub fn new(params: DLParams, alpha: Alpha) -> Self {
        Self { params, alpha }
    }

    pub fn params(&self) -> DLParams {
        self.params
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }
}

impl Walk for PAlpha {
    type State = DLVertex;

    fn transitions(&self, from: &DLVertex) -> Result<Vec<Transition<DLVertex>>> {
        self.params.check(from)?;
        let up = self.alpha.value() / int(self.params.q().into());
        let down = self.alpha.complement().value() / int(self.params.r().into());
        Ok(self
            .params
            .up(from)
            .map(|v| (v, up.clone()))
            .chain(self.params.down(from).map(|v| (v, down.clone())))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QAlpha {
    params: DLParams,
    alpha: Alpha,
}

impl QAlpha {
    pub fn new(params: DLParams, alpha: Alpha) -> Self {
        Self { params, alpha }
    }

    pub fn params(&self) -> DLParams {
        self.params
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }
}

impl Walk for QAlpha {
    type State = DLVertex;

    fn transitions(&self, from: &DLVertex) -> Result<Vec<Transition<DLVertex>>> {
        self.params.check(from)?;
        let (q, r) = (i64::from(self.params.q()), i64::from(self.params.r()));
        let up = self.alpha.value() / int(q * q);
        let down = self.alpha.complement().value() / int(q * r);
        Ok(self
            .params
            .dls_up(from)
            .map(|v| (v, up.clone()))
            .chain(self.params.dls_down(from).map(|v| (v, down.clone())))
            .collect())
    }
}

/// Which tree of the product a tree-level object lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeSide {
    First,
    Second,
}

/// Nearest neighbour walk on a homogeneous tree: total probability
/// `forward` split evenly over the successors, the rest to the predecessor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeWalk {
    tree: TreeParams,
    forward: Alpha,
}

impl TreeWalk {
    pub fn new(tree: TreeParams, forward: Alpha) -> Self {
        Self { tree, forward }
    }

    /// The projection of `P_α` on the given tree of `DL(q, r)`.
    pub fn projection(side: TreeSide, params: DLParams, alpha: &Alpha) -> Self {
        match side {
            TreeSide::First => Self::new(params.first(), alpha.clone()),
            TreeSide::Second => Self::new(params.second(), alpha.complement()),
        }
    }

    pub fn tree(&self) -> TreeParams {
        self.tree
    }

    /// Total probability of stepping to a successor.
    pub fn forward(&self) -> &Alpha {
        &self.forward
    }
}

impl Walk for TreeWalk {
    type State = TreeVertex;

    fn transitions(&self, from: &TreeVertex) -> Result<Vec<Transition<TreeVertex>>> {
        self.tree.check_vertex(from)?;
        let succ = self.forward.value() / int(self.tree.q().into());
        let mut out = Vec::with_capacity(self.tree.q() as usize + 1);
        out.push((from.predecessor(), self.forward.complement().value().clone()));
        out.extend(self.tree.successors(from).map(|v| (v, succ.clone())));
        Ok(out)
    }
}

/// `Ph(v) = Σ p(v, w) h(w)`.
pub fn apply<W, H>(op: &W, h: H, v: &W::State) -> Result<Rational>
where
    W: Walk + ?Sized,
    H: Fn(&W::State) -> Result<Rational>,
{
    op.transitions(v)?.iter().try_fold(Rational::zero(), |acc, (w, p)| Ok(acc + p * h(w)?))
}

pub fn is_harmonic_at<W, H>(op: &W, h: H, v: &W::State) -> Result<bool>
where
    W: Walk + ?Sized,
    H: Fn(&W::State) -> Result<Rational>,
{
    let value = h(v)?;
    Ok(apply(op, h, v)? == value)
}

/// First vertex (in input order) where `h` fails to be harmonic.
pub fn first_non_harmonic<W, H>(op: &W, h: H, vertices: &[W::State], mode: Parallelism) -> Result<Option<W::State>>
where
    W: Walk,
    H: Fn(&W::State) -> Result<Rational> + Sync + Send,
{
    let verdicts = par::map_slice(mode, vertices, |v| is_harmonic_at(op, &h, v));
    for (v, ok) in vertices.iter().zip(verdicts) {
        if !ok? {
            return Ok(Some(v.clone()));
        }
    }
    Ok(None)
}

pub fn row_sum<W: Walk + ?Sized>(op: &W, v: &W::State) -> Result<Rational> {
    Ok(op.transitions(v)?.iter().map(|(_, p)| p).sum())
}

/// The h-transform `p̌(x, y) = p(x, y) g(y) / g(x)`. Stochastic exactly where
/// `g` is harmonic; elsewhere the rows are represented as they are and
/// [`Conjugated::is_stochastic_at`] reports the defect.
pub struct Conjugated<W, G> {
    base: W,
    scaling: G,
}

pub fn conjugate<W, G>(base: W, scaling: G) -> Conjugated<W, G>
where
    W: Walk,
    G: Fn(&W::State) -> Result<Rational> + Sync,
{
    Conjugated { base, scaling }
}

impl<W, G> Conjugated<W, G>
where
    W: Walk,
    G: Fn(&W::State) -> Result<Rational> + Sync,
{
    pub fn base(&self) -> &W {
        &self.base
    }

    fn positive(&self, v: &W::State) -> Result<Rational> {
        let g = (self.scaling)(v)?;
        if !g.is_positive() {
            return Err(Error::NonPositiveScaling { value: rational::format(&g), at: v.to_string() });
        }
        Ok(g)
    }

    pub fn is_stochastic_at(&self, v: &W::State) -> Result<bool> {
        Ok(row_sum(self, v)? == Rational::one())
    }
}

impl<W, G> Walk for Conjugated<W, G>
where
    W: Walk,
    G: Fn(&W::State) -> Result<Rational> + Sync,
{
    type State = W::State;

    fn transitions(&self, from: &W::State) -> Result<Vec<Transition<W::State>>> {
        let gx = self.positive(from)?;
        self.base
            .transitions(from)?
            .into_iter()
            .map(|(y, p)| {
                let gy = self.positive(&y)?;
                Ok((y, p * gy / &gx))
            })
            .collect()
    }
}

/// `Q_α` pushed to the sibling quotient. States are sibling-class
/// representatives; transitions lead to canonical representatives with the
/// class-summed weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projected {
    base: QAlpha,
}

pub fn project(base: QAlpha) -> Projected {
    Projected { base }
}

impl Projected {
    pub fn base(&self) -> &QAlpha {
        &self.base
    }

    /// Class-summed weights keyed by target class.
    pub fn class_weights(&self, from: &DLVertex) -> Result<BTreeMap<DLVertex, Rational>> {
        let mut sums: BTreeMap<DLVertex, Rational> = BTreeMap::new();
        for (w, p) in self.base.transitions(from)? {
            *sums.entry(w.sibling_class().canonical().clone()).or_insert_with(Rational::zero) += p;
        }
        Ok(sums)
    }

    /// The summed weights agree for every representative of `from`'s class.
    pub fn is_compatible_at(&self, from: &DLVertex) -> Result<bool> {
        let reference = self.class_weights(from)?;
        for member in from.sibling_class().members(self.base.params.q()) {
            if self.class_weights(&member)? != reference {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Walk for Projected {
    type State = DLVertex;

    fn transitions(&self, from: &DLVertex) -> Result<Vec<Transition<DLVertex>>> {
        Ok(self.class_weights(from)?.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory<S> {
    pub start: S,
    pub steps: Vec<S>,
    pub seed: u64,
}

impl<S> Trajectory<S> {
    /// Start followed by every visited state.
    pub fn states(&self) -> impl Iterator<Item = &S> {
        std::iter::once(&self.start).chain(&self.steps)
    }
}

/// Draws one step from the exact transition weights.
pub fn sample_step<W: Walk + ?Sized>(op: &W, from: &W::State, rng: &mut ChaCha8Rng) -> Result<W::State> {
    let transitions = op.transitions(from)?;
    let denom = common_denominator(transitions.iter().map(|(_, p)| p));
    let total: BigInt = transitions.iter().map(|(_, p)| p.numer() * (&denom / p.denom())).sum();
    let total =
        total.to_u64().ok_or_else(|| Error::Unsupported(format!("transition weights need denominator {denom}")))?;
    if total == 0 {
        return Err(Error::Invariant(format!("no mass leaves {from}")));
    }
    let mut draw = rng.random_range(0..total);
    for (w, p) in &transitions {
        let weight = (p.numer() * (&denom / p.denom())).to_u64().expect("bounded by total");
        if draw < weight {
            return Ok(w.clone());
        }
        draw -= weight;
    }
    unreachable!("draw is below the total weight")
}

pub fn simulate<W: Walk + ?Sized>(op: &W, start: &W::State, n_steps: usize, seed: u64) -> Result<Trajectory<W::State>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(n_steps);
    let mut current = start.clone();
    for _ in 0..n_steps {
        current = sample_step(op, &current, &mut rng)?;
        steps.push(current.clone());
    }
    Ok(Trajectory { start: start.clone(), steps, seed })
}

/// Upper bound on the probability of ever reaching the target from a state.
pub trait EscapeBound<S>: Sync {
    fn hitting_bound(&self, from: &S) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
    /// A run counts as escaped once the escape bound drops below this.
    pub escape_tolerance: f64,
    pub mode: Parallelism,
}

impl EstimateConfig {
    pub fn new(trials: u64, horizon: u64, seed: u64) -> Self {
        Self { trials, horizon, seed, escape_tolerance: 1e-9, mode: Parallelism::Parallel }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub point_estimate: f64,
    pub half_width_95: f64,
    pub trials: u64,
    pub horizon: u64,
    /// Runs that neither reached the target nor were certified to escape.
    pub truncated_runs: u64,
    /// Runs stopped because the escape bound fell below the tolerance.
    pub escaped_runs: u64,
    pub escape_tolerance: f64,
}

impl EstimateResult {
    pub fn truncated_fraction(&self) -> f64 {
        self.truncated_runs as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Hit,
    Escaped,
    Truncated,
}

/// Fraction of runs from `x` that reach `y` within `horizon` steps. The
/// estimate is a lower bound for `F(x, y)`; censoring is reported through
/// `truncated_runs` and `escaped_runs`.
pub fn estimate_hitting<W: Walk>(
    op: &W,
    x: &W::State,
    y: &W::State,
    config: EstimateConfig,
    escape: Option<&dyn EscapeBound<W::State>>,
) -> Result<EstimateResult> {
    if config.trials == 0 || config.horizon == 0 {
        return Err(Error::Unsupported("trials and horizon must be positive".into()));
    }
    let run = |trial: u64| -> Result<Outcome> {
        if x == y {
            return Ok(Outcome::Hit);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial);
        let mut current = x.clone();
        for _ in 0..config.horizon {
            current = sample_step(op, &current, &mut rng)?;
            if &current == y {
                return Ok(Outcome::Hit);
            }
            if let Some(bound) = escape {
                if bound.hitting_bound(&current) < config.escape_tolerance {
                    return Ok(Outcome::Escaped);
                }
            }
        }
        Ok(Outcome::Truncated)
    };
    let outcomes = par::map_range(config.mode, config.trials, run);
    let (mut hits, mut escaped, mut truncated) = (0u64, 0u64, 0u64);
    for outcome in outcomes {
        match outcome? {
            Outcome::Hit => hits += 1,
            Outcome::Escaped => escaped += 1,
            Outcome::Truncated => truncated += 1,
        }
    }
    let n = config.trials as f64;
    let p = hits as f64 / n;
    Ok(EstimateResult {
        point_estimate: p,
        half_width_95: 1.96 * (p * (1.0 - p) / n).sqrt(),
        trials: config.trials,
        horizon: config.horizon,
        truncated_runs: truncated,
        escaped_runs: escaped,
        escape_tolerance: config.escape_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::testutil::random_vertex;
    use std::collections::HashSet;

    fn alpha(n: i64, d: i64) -> Alpha {
        Alpha::ratio(n, d).unwrap()
    }

    #[test]
    fn alpha_range() {
        assert!(Alpha::parse("0").is_err());
        assert!(Alpha::parse("1").is_err());
        assert!(Alpha::parse("3/2").is_err());
        assert_eq!(alpha(1, 3).complement(), alpha(2, 3));
        assert!(alpha(2, 4).is_half());
    }

    #[test]
    fn transition_examples() {
        let p = DLParams::new(2, 2).unwrap();
        let t = PAlpha::new(p, alpha(1, 2)).transitions(&DLVertex::root()).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.iter().all(|(_, w)| *w == ratio(1, 4)));

        let tree = TreeWalk::projection(TreeSide::First, p, &alpha(1, 3));
        let t = tree.transitions(&TreeVertex::root()).unwrap();
        assert_eq!(t[0], (TreeVertex::on_root_ray(-1), ratio(2, 3)));
        assert!(t[1..].iter().all(|(v, w)| *w == ratio(1, 6) && v.level() == 1));

        let second = TreeWalk::projection(TreeSide::Second, DLParams::new(2, 3).unwrap(), &alpha(1, 3));
        let t = second.transitions(&TreeVertex::root()).unwrap();
        assert_eq!(t[0].1, ratio(1, 3));
        assert!(t[1..].iter().all(|(_, w)| *w == ratio(2, 9)));

        let t = QAlpha::new(p, alpha(1, 2)).transitions(&DLVertex::root()).unwrap();
        assert_eq!(t.len(), 8);
        assert!(t.iter().all(|(_, w)| *w == ratio(1, 8)));
    }

    #[test]
    fn stochastic_with_graph_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for (q, r) in [(2, 2), (2, 3), (3, 3)] {
            let p = DLParams::new(q, r).unwrap();
            for a in [alpha(1, 4), alpha(1, 2), alpha(3, 5)] {
                let pa = PAlpha::new(p, a.clone());
                let qa = QAlpha::new(p, a.clone());
                let t1 = TreeWalk::projection(TreeSide::First, p, &a);
                for _ in 0..60 {
                    let v = random_vertex(p, &mut rng, 10);
                    for (op_rows, nbrs) in [
                        (pa.transitions(&v).unwrap(), p.dl_neighbours(&v).unwrap()),
                        (qa.transitions(&v).unwrap(), p.dls_neighbours(&v).unwrap()),
                    ] {
                        assert!(op_rows.iter().all(|(_, w)| w.is_positive()));
                        assert_eq!(op_rows.iter().map(|(_, w)| w).sum::<Rational>(), Rational::one());
                        let support: HashSet<_> = op_rows.into_iter().map(|(w, _)| w).collect();
                        assert_eq!(support, nbrs.into_iter().collect());
                    }
                    assert_eq!(row_sum(&t1, &v.x1).unwrap(), Rational::one());
                }
            }
        }
    }

    #[test]
    fn apply_is_linear() {
        let p = DLParams::new(2, 3).unwrap();
        let op = PAlpha::new(p, alpha(2, 5));
        let h = |v: &DLVertex| Ok(int(v.x1.level() * v.x1.level() + v.x2.top_label() as i64));
        let v = DLVertex::root();
        assert_eq!(apply(&op, |_| Ok(Rational::one()), &v).unwrap(), Rational::one());
        let scaled = apply(&op, |w| Ok(ratio(7, 3) * h(w)?), &v).unwrap();
        assert_eq!(scaled, ratio(7, 3) * apply(&op, h, &v).unwrap());
        assert!(is_harmonic_at(&op, |_| Ok(int(5)), &v).unwrap());
    }

    #[test]
    fn conjugation_by_constant_is_identity() {
        let p = DLParams::new(2, 2).unwrap();
        let op = PAlpha::new(p, alpha(1, 3));
        let c = conjugate(&op, |_: &DLVertex| Ok(int(3)));
        let v = DLVertex::root();
        assert_eq!(c.transitions(&v).unwrap(), op.transitions(&v).unwrap());
        assert!(c.is_stochastic_at(&v).unwrap());
        let bad = conjugate(&op, |w: &DLVertex| Ok(int(w.x1.level())));
        assert!(matches!(bad.transitions(&v), Err(Error::NonPositiveScaling { .. })));
        // non-harmonic scaling: represented, flagged non-stochastic
        let skew = conjugate(&op, |w: &DLVertex| Ok(rational::pow(&int(3), w.x1.level())));
        assert!(!skew.is_stochastic_at(&v).unwrap());
    }

    #[test]
    fn projected_q_is_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (q, r) in [(2, 2), (2, 3)] {
            let p = DLParams::new(q, r).unwrap();
            let a = alpha(1, 2);
            let proj = project(QAlpha::new(p, a.clone()));
            let pa = PAlpha::new(p, a);
            for _ in 0..100 {
                let v = random_vertex(p, &mut rng, 9);
                assert!(proj.is_compatible_at(&v).unwrap());
                let projected: BTreeMap<_, _> =
                    proj.transitions(&v).unwrap().into_iter().map(|(w, p)| (w.factor_map(), p)).collect();
                let direct: BTreeMap<_, _> = pa.transitions(&v.factor_map()).unwrap().into_iter().collect();
                assert_eq!(projected, direct);
                assert_eq!(row_sum(&proj, &v).unwrap(), Rational::one());
            }
        }
    }

    #[test]
    fn simulation_is_reproducible() {
        let p = DLParams::new(2, 3).unwrap();
        let op = PAlpha::new(p, alpha(1, 3));
        let v = DLVertex::root();
        let t0 = simulate(&op, &v, 0, 1).unwrap();
        assert_eq!(t0.states().collect::<Vec<_>>(), vec![&v]);
        let a = simulate(&op, &v, 50, 42).unwrap();
        let b = simulate(&op, &v, 50, 42).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.states().zip(a.states().skip(1)) {
            assert!(p.dl_neighbours(x).unwrap().contains(y));
        }
    }

    /// One-step frequencies against the exact weights, 4σ multinomial bound.
    #[test]
    fn one_step_frequencies() {
        let p = DLParams::new(2, 3).unwrap();
        let op = PAlpha::new(p, alpha(1, 3));
        let v = DLVertex::root();
        let exact = op.transitions(&v).unwrap();
        let n = 100_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts: BTreeMap<DLVertex, u64> = BTreeMap::new();
        for _ in 0..n {
            *counts.entry(sample_step(&op, &v, &mut rng).unwrap()).or_default() += 1;
        }
        for (w, prob) in exact {
            let prob = rational::to_f64(&prob);
            let freq = counts.get(&w).copied().unwrap_or(0) as f64 / n as f64;
            let sigma = (prob * (1.0 - prob) / n as f64).sqrt();
            assert!((freq - prob).abs() < 4.0 * sigma, "{w}: {freq} vs {prob}");
        }
    }

    #[test]
    fn estimate_at_target_is_one() {
        let tree = TreeWalk::new(TreeParams::new(2).unwrap(), alpha(2, 3));
        let x = TreeVertex::root();
        let r = estimate_hitting(&tree, &x, &x, EstimateConfig::new(10, 5, 0), None).unwrap();
        assert_eq!(r.point_estimate, 1.0);
        assert_eq!(r.truncated_runs, 0);
        assert!(estimate_hitting(&tree, &x, &x, EstimateConfig::new(0, 5, 0), None).is_err());
    }

    #[test]
    fn estimate_is_mode_independent() {
        let tree = TreeWalk::new(TreeParams::new(2).unwrap(), alpha(1, 2));
        let x = TreeVertex::root();
        let y = x.predecessor();
        let mut cfg = EstimateConfig::new(500, 50, 9);
        let a = estimate_hitting(&tree, &x, &y, cfg, None).unwrap();
        cfg.mode = Parallelism::Sequential;
        let b = estimate_hitting(&tree, &x, &y, cfg, None).unwrap();
        assert_eq!(a, b);
        assert!(a.truncated_runs > 0);
    }
}
