//! Hitting probabilities and Martin kernels on the trees, their lifts to
//! `DL(q, r)`, nonnegative combinations, and the lamplighter defect kernels.
//!
//! On `T_q` with forward probability `α` (each successor `α/q`, predecessor
//! `1 - α`), the walk reaches the predecessor with probability `F⁻` and a
//! given successor with probability `F⁺`:
//!
//! ```text
//! F⁻ = (1-α)/α  if α ≥ 1/2,  else 1
//! F⁺ = 1/q      if α ≥ 1/2,  else α/((1-α)q)
//! ```
//!
//! With `ρ² = F⁻F⁺` the Martin kernels are `K(x, ω) = (F⁻)^{hor(x)}` and
//! `K(x, ξ) = K(x, ω) · (ρ²)^{(hor(x, ξ) - hor(x))/2}`; the exponent is always
//! even, so every value is rational. The second tree uses `(r, 1-α)`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dl_graph::{DLParams, DLVertex};
use crate::error::{Error, Result};
use crate::lamplighter::{BoundaryConfig, GeneratorModel, GroupElement, Lamplighter, Side};
use crate::rational::{self, int, pow, ratio, Rational};
use crate::tree::{TreeEnd, TreeParams, TreeVertex};
use crate::walks::{Alpha, EscapeBound, PAlpha, TreeSide};

pub fn f_minus(alpha: &Alpha) -> Rational {
    let a = alpha.value();
    if *a >= ratio(1, 2) {
        (Rational::one() - a) / a
    } else {
        Rational::one()
    }
}

pub fn f_plus(alpha: &Alpha, q: u32) -> Rational {
    let a = alpha.value();
    let q = int(q.into());
    if *a >= ratio(1, 2) {
        q.recip()
    } else {
        a / ((Rational::one() - a) * q)
    }
}

/// `ρ² = F⁻ F⁺ = min{(1-α)/(αq), α/((1-α)q)}`.
pub fn rho_squared(alpha: &Alpha, q: u32) -> Rational {
    f_minus(alpha) * f_plus(alpha, q)
}

/// Branching number and forward probability of the tree walk on `side`.
pub fn side_walk(side: TreeSide, params: DLParams, alpha: &Alpha) -> (TreeParams, Alpha) {
    match side {
        TreeSide::First => (params.first(), alpha.clone()),
        TreeSide::Second => (params.second(), alpha.complement()),
    }
}

/// The tree coordinate of `v` on `side`.
pub fn coordinate(side: TreeSide, v: &DLVertex) -> &TreeVertex {
    match side {
        TreeSide::First => &v.x1,
        TreeSide::Second => &v.x2,
    }
}

/// Martin kernel of the tree walk with forward probability `forward` on a
/// tree of branching `q`.
pub fn tree_martin_kernel(q: u32, forward: &Alpha, x: &TreeVertex, end: &TreeEnd) -> Result<Rational> {
    let hor = x.level();
    let at_omega = pow(&f_minus(forward), hor);
    if matches!(end, TreeEnd::Omega) {
        return Ok(at_omega);
    }
    let exponent = x.busemann(end) - hor;
    if exponent % 2 != 0 {
        return Err(Error::Invariant(format!("odd Busemann defect {exponent} at {x}")));
    }
    Ok(at_omega * pow(&rho_squared(forward, q), exponent / 2))
}

/// `K_i(x, ξ)` for the projection of `P_α` on `side`.
pub fn martin_kernel_tree(
    side: TreeSide,
    x: &TreeVertex,
    end: &TreeEnd,
    alpha: &Alpha,
    params: DLParams,
) -> Result<Rational> {
    let (tree, forward) = side_walk(side, params, alpha);
    tree.check_vertex(x)?;
    tree.check_end(end)?;
    tree_martin_kernel(tree.q(), &forward, x, end)
}

/// `F(x, y) = (F⁻)^a (F⁺)^b` where the geodesic from `x` to `y` climbs `a`
/// edges towards ω and then descends `b` edges.
pub fn tree_hitting(q: u32, forward: &Alpha, x: &TreeVertex, y: &TreeVertex) -> Rational {
    let c = x.confluent_omega(y);
    pow(&f_minus(forward), x.level() - c.level()) * pow(&f_plus(forward, q), y.level() - c.level())
}

/// `h(x1 x2) = h_i(x_i)`.
pub fn lift<F>(side: TreeSide, h: F) -> impl Fn(&DLVertex) -> Result<Rational> + Sync + Send
where
    F: Fn(&TreeVertex) -> Result<Rational> + Sync + Send,
{
    move |v| h(coordinate(side, v))
}

/// Closed-form tree hitting probability as an escape certificate for
/// Monte-Carlo runs aimed at a fixed tree vertex.
#[derive(Debug, Clone)]
pub struct TreeHittingBound {
    minus: f64,
    plus: f64,
    target: TreeVertex,
}

impl TreeHittingBound {
    pub fn new(q: u32, forward: &Alpha, target: TreeVertex) -> Self {
        Self { minus: rational::to_f64(&f_minus(forward)), plus: rational::to_f64(&f_plus(forward, q)), target }
    }

    fn bound(&self, from: &TreeVertex) -> f64 {
        let c = from.confluent_omega(&self.target);
        let up = (from.level() - c.level()) as i32;
        let down = (self.target.level() - c.level()) as i32;
        self.minus.powi(up) * self.plus.powi(down)
    }
}

impl EscapeBound<TreeVertex> for TreeHittingBound {
    fn hitting_bound(&self, from: &TreeVertex) -> f64 {
        self.bound(from)
    }
}

/// Reaching `y1 y2` under `P_α` requires both projections to reach their
/// coordinates, so the smaller tree probability bounds the DL one.
#[derive(Debug, Clone)]
pub struct DlHittingBound {
    first: TreeHittingBound,
    second: TreeHittingBound,
}

impl DlHittingBound {
    pub fn new(params: DLParams, alpha: &Alpha, target: &DLVertex) -> Self {
        Self {
            first: TreeHittingBound::new(params.q(), alpha, target.x1.clone()),
            second: TreeHittingBound::new(params.r(), &alpha.complement(), target.x2.clone()),
        }
    }
}

impl EscapeBound<DLVertex> for DlHittingBound {
    fn hitting_bound(&self, from: &DLVertex) -> f64 {
        self.first.bound(&from.x1).min(self.second.bound(&from.x2))
    }
}

/// A lifted Martin kernel `x1 x2 ↦ K_i(x_i, ξ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSpec {
    pub side: TreeSide,
    pub end: TreeEnd,
    pub alpha: Alpha,
    pub params: DLParams,
}

impl KernelSpec {
    pub fn new(side: TreeSide, end: TreeEnd, alpha: Alpha, params: DLParams) -> Result<Self> {
        let (tree, _) = side_walk(side, params, &alpha);
        tree.check_end(&end)?;
        Ok(Self { side, end, alpha, params })
    }

    pub fn evaluate_tree(&self, x: &TreeVertex) -> Result<Rational> {
        martin_kernel_tree(self.side, x, &self.end, &self.alpha, self.params)
    }

    pub fn evaluate(&self, v: &DLVertex) -> Result<Rational> {
        self.evaluate_tree(coordinate(self.side, v))
    }

    /// Kernels at ω are minimal only for the simple random walk, where both
    /// reduce to the constant 1.
    pub fn is_minimal(&self) -> bool {
        !matches!(self.end, TreeEnd::Omega) || self.alpha.is_half()
    }
}

/// The kernel whose h-transform turns `P_α` into `P_{1-α}`: `K1(·, ω)` when
/// `α ≥ 1/2` and `K2(·, ω)` otherwise. The one on the other side is the
/// constant 1.
pub fn reversing_kernel(params: DLParams, alpha: Alpha) -> KernelSpec {
    let side = if *alpha.value() >= ratio(1, 2) { TreeSide::First } else { TreeSide::Second };
    KernelSpec { side, end: TreeEnd::Omega, alpha, params }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TermKind {
    Kernel { side: TreeSide, end: TreeEnd },
    Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "rational::serde_string")]
    pub coefficient: Rational,
    #[serde(flatten)]
    pub kind: TermKind,
}

/// A nonnegative combination of lifted Martin kernels and constants; as
/// JSON, `{"q", "r", "alpha", "terms": [{"coefficient", "kind", ...}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HarmonicRepr", into = "HarmonicRepr")]
pub struct HarmonicFunction {
    params: DLParams,
    alpha: Alpha,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct HarmonicRepr {
    q: u32,
    r: u32,
    alpha: Alpha,
    #[serde(default)]
    terms: Vec<Term>,
}

impl TryFrom<HarmonicRepr> for HarmonicFunction {
    type Error = Error;

    fn try_from(repr: HarmonicRepr) -> Result<Self> {
        combine(DLParams::new(repr.q, repr.r)?, repr.alpha, repr.terms)
    }
}

impl From<HarmonicFunction> for HarmonicRepr {
    fn from(h: HarmonicFunction) -> Self {
        Self { q: h.params.q(), r: h.params.r(), alpha: h.alpha, terms: h.terms }
    }
}

/// Checks coefficients and ends, then bundles the terms.
pub fn combine(params: DLParams, alpha: Alpha, terms: Vec<Term>) -> Result<HarmonicFunction> {
    for term in &terms {
        if term.coefficient.is_negative() {
            return Err(Error::NegativeCoefficient(rational::format(&term.coefficient)));
        }
        if let TermKind::Kernel { side, end } = &term.kind {
            side_walk(*side, params, &alpha).0.check_end(end)?;
        }
    }
    Ok(HarmonicFunction { params, alpha, terms })
}

/// A single lifted kernel with its minimality flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelFunction {
    pub function: HarmonicFunction,
    pub minimal: bool,
}

pub fn minimal_kernel(spec: &KernelSpec) -> KernelFunction {
    KernelFunction {
        function: HarmonicFunction {
            params: spec.params,
            alpha: spec.alpha.clone(),
            terms: vec![Term {
                coefficient: Rational::one(),
                kind: TermKind::Kernel { side: spec.side, end: spec.end.clone() },
            }],
        },
        minimal: spec.is_minimal(),
    }
}

impl HarmonicFunction {
    pub fn zero(params: DLParams, alpha: Alpha) -> Self {
        Self { params, alpha, terms: Vec::new() }
    }

    pub fn params(&self) -> DLParams {
        self.params
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The walk this function is harmonic for.
    pub fn walk(&self) -> PAlpha {
        PAlpha::new(self.params, self.alpha.clone())
    }

    pub fn evaluate(&self, v: &DLVertex) -> Result<Rational> {
        self.params.check(v)?;
        let mut total = Rational::zero();
        for term in &self.terms {
            if term.coefficient.is_zero() {
                continue;
            }
            let value = match &term.kind {
                TermKind::Constant => Rational::one(),
                TermKind::Kernel { side, end } => {
                    martin_kernel_tree(*side, coordinate(*side, v), end, &self.alpha, self.params)?
                }
            };
            total += &term.coefficient * value;
        }
        Ok(total)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// `q^{df}` for the simple random walk on the lamplighter Cayley graph. The
/// plus side uses `df⁺` for walk-switch and `df⊕` for switch-walk-switch; the
/// minus side uses `df⁻` for both, since the factor map leaves the second
/// coordinate alone.
pub fn defect_kernel(
    model: GeneratorModel,
    group: Lamplighter,
    a: &GroupElement,
    xi: &BoundaryConfig,
) -> Result<Rational> {
    let defect = match (model, xi.side()) {
        (GeneratorModel::WalkSwitch, Side::Plus) => group.defect_plus(a, xi)?,
        (GeneratorModel::SwitchWalkSwitch, Side::Plus) => group.defect_oplus(a, xi)?,
        (GeneratorModel::WalkSwitch | GeneratorModel::SwitchWalkSwitch, Side::Minus) => group.defect_minus(a, xi)?,
        (GeneratorModel::WalkOrSwitch, _) => {
            return Err(Error::Unsupported("defect kernels need walk-switch or switch-walk-switch".into()))
        }
    };
    Ok(pow(&int(group.q().into()), defect))
}
