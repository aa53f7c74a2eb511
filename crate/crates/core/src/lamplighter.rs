//! The lamplighter group `Z_q ≀ Z` and its identification with `DL(q, q)`.
//!
//! An element `(η, k)` is a finitely supported lamp configuration together
//! with the lamplighter position. Multiplication translates the right
//! factor's configuration by the left factor's position:
//! `(η, k)(η', k') = (η + η'(· - k), k + k')`.
//!
//! The encoding splits `η` at `k`: the first tree vertex has level `k` and
//! carries `η(j)` on the edge entering level `j ≤ k`; the second has level
//! `-k` and carries `η(1 - j)` on the edge entering level `j ≤ -k`. With this
//! convention right multiplication by the walk-switch generators is exactly
//! `DL(q, q)` adjacency.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dl_graph::{DLParams, DLVertex};
use crate::error::{Error, Result};
use crate::tree::{LabelWord, TreeEnd, TreeVertex};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    eta: LabelWord,
    k: i64,
}

impl GroupElement {
    pub fn identity() -> Self {
        Self { eta: LabelWord::new(), k: 0 }
    }

    pub fn eta(&self) -> &LabelWord {
        &self.eta
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn lamp(&self, n: i64) -> u32 {
        self.eta.get(&n).copied().unwrap_or(0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {})", self.eta, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// A point of `∂⁺` or `∂⁻`, restricted to finitely supported configurations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundaryConfig {
    side: Side,
    labels: LabelWord,
}

impl BoundaryConfig {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn value(&self, n: i64) -> u32 {
        self.labels.get(&n).copied().unwrap_or(0)
    }

    /// `ξ(· - m)`.
    pub fn shifted(&self, m: i64) -> Self {
        Self { side: self.side, labels: self.labels.iter().map(|(&n, &v)| (n + m, v)).collect() }
    }

    /// The end of the first tree (`Plus`) or second tree (`Minus`) that the
    /// configuration describes. On the plus side `ξ(n)` labels the edge
    /// entering level `n`; on the minus side it labels the edge entering
    /// level `1 - n`.
    pub fn to_tree_end(&self) -> TreeEnd {
        match self.side {
            Side::Plus => TreeEnd::Word(self.labels.clone()),
            Side::Minus => TreeEnd::Word(self.labels.iter().map(|(&n, &v)| (1 - n, v)).collect()),
        }
    }

    fn expect_side(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(Error::SideMismatch { expected: side.symbol(), found: self.side.symbol() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorModel {
    WalkSwitch,
    WalkOrSwitch,
    SwitchWalkSwitch,
}

/// `Z_q ≀ Z` for a fixed lamp group `Z_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lamplighter {
    q: u32,
}

impl Lamplighter {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBranching(q));
        }
        Ok(Self { q })
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn dl_params(self) -> DLParams {
        DLParams::new(self.q, self.q).expect("q >= 2")
    }

    /// Builds `(η, k)`, reducing lamp states modulo `q`.
    pub fn element(self, eta: impl IntoIterator<Item = (i64, u32)>, k: i64) -> GroupElement {
        let mut word = LabelWord::new();
        for (n, v) in eta {
            let v = v % self.q;
            if v != 0 {
                word.insert(n, v);
            }
        }
        GroupElement { eta: word, k }
    }

    /// The configuration `δ_n^ℓ` placed at position `k`.
    pub fn delta(self, n: i64, label: u32, k: i64) -> GroupElement {
        self.element([(n, label)], k)
    }

    pub fn boundary(self, side: Side, labels: impl IntoIterator<Item = (i64, u32)>) -> Result<BoundaryConfig> {
        let mut word = LabelWord::new();
        for (n, v) in labels {
            if v >= self.q {
                return Err(Error::InvalidLabel { label: v, q: self.q });
            }
            if v != 0 {
                word.insert(n, v);
            }
        }
        Ok(BoundaryConfig { side, labels: word })
    }

    pub fn multiply(self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut eta = a.eta.clone();
        for (&n, &v) in &b.eta {
            let key = n + a.k;
            let sum = (eta.get(&key).copied().unwrap_or(0) + v) % self.q;
            if sum == 0 {
                eta.remove(&key);
            } else {
                eta.insert(key, sum);
            }
        }
        GroupElement { eta, k: a.k + b.k }
    }

    pub fn inverse(self, a: &GroupElement) -> GroupElement {
        GroupElement { eta: a.eta.iter().map(|(&n, &v)| (n - a.k, self.q - v)).collect(), k: -a.k }
    }

    pub fn encode(self, a: &GroupElement) -> DLVertex {
        let x1 = TreeVertex::on_root_ray(a.k);
        let x2 = TreeVertex::on_root_ray(-a.k);
        let first: LabelWord = a.eta.range(..=a.k).map(|(&n, &v)| (n, v)).collect();
        let second: LabelWord = a.eta.range(a.k + 1..).map(|(&n, &v)| (1 - n, v)).collect();
        let p = self.dl_params();
        DLVertex::new(p.first().translate(&x1, &first), p.second().translate(&x2, &second))
    }

    pub fn decode(self, v: &DLVertex, params: DLParams) -> Result<GroupElement> {
        if params.q() != params.r() || params.q() != self.q {
            return Err(Error::Unsupported(format!(
                "lamplighter Z_{} needs DL({0},{0}), got DL({},{})",
                self.q,
                params.q(),
                params.r()
            )));
        }
        params.check(v)?;
        let k = v.x1.level();
        let eta =
            v.x1.labels()
                .iter()
                .map(|(&j, &l)| (j, l))
                .chain(v.x2.labels().iter().map(|(&j, &l)| (1 - j, l)))
                .collect();
        Ok(GroupElement { eta, k })
    }

    pub fn generators(self, model: GeneratorModel) -> Vec<GroupElement> {
        let q = self.q;
        match model {
            GeneratorModel::WalkSwitch => {
                (0..q).map(|l| self.delta(1, l, 1)).chain((0..q).map(|l| self.delta(0, l, -1))).collect()
            }
            GeneratorModel::WalkOrSwitch => [self.element([], 1), self.element([], -1)]
                .into_iter()
                .chain((1..q).map(|l| self.delta(0, l, 0)))
                .collect(),
            GeneratorModel::SwitchWalkSwitch => [1i64, -1]
                .into_iter()
                .flat_map(|step| (0..q).flat_map(move |l| (0..q).map(move |m| self.element([(0, l), (step, m)], step))))
                .collect(),
        }
    }

    /// Right Cayley graph neighbours.
    pub fn cayley_neighbours(self, a: &GroupElement, model: GeneratorModel) -> Vec<GroupElement> {
        self.generators(model).iter().map(|s| self.multiply(a, s)).collect()
    }

    /// `df⁺((η, k), ξ) = hor(x1 ⋏ ξ) - hor(o1 ⋏ ξ)`, from the configuration
    /// directly.
    pub fn defect_plus(self, a: &GroupElement, xi: &BoundaryConfig) -> Result<i64> {
        xi.expect_side(Side::Plus)?;
        let first = min_mismatch(a.k, |n| xi.value(n + 1) != a.lamp(n + 1), &a.eta, &xi.labels, 1).unwrap_or(a.k);
        let second = min_mismatch(0, |m| xi.value(m + 1) != 0, &LabelWord::new(), &xi.labels, 1).unwrap_or(0);
        Ok(first - second)
    }

    /// `df⁻((η, k), ξ) = hor(x2 ⋏ ξ) - hor(o2 ⋏ ξ)`.
    pub fn defect_minus(self, a: &GroupElement, xi: &BoundaryConfig) -> Result<i64> {
        xi.expect_side(Side::Minus)?;
        let neg_first = xi
            .labels
            .keys()
            .chain(a.eta.keys())
            .copied()
            .filter(|&n| n > a.k && xi.value(n) != a.lamp(n))
            .max()
            .unwrap_or(a.k);
        let neg_second = xi.labels.keys().copied().filter(|&m| m > 0).max().unwrap_or(0);
        Ok(neg_second - neg_first)
    }

    /// Sibling-class defect `df⊕`, where the lamp at the lamplighter's
    /// position no longer matters.
    pub fn defect_oplus(self, a: &GroupElement, xi: &BoundaryConfig) -> Result<i64> {
        xi.expect_side(Side::Plus)?;
        let first = min_mismatch(a.k, |n| xi.value(n) != a.lamp(n), &a.eta, &xi.labels, 0).unwrap_or(a.k);
        let second = min_mismatch(0, |m| xi.value(m) != 0, &LabelWord::new(), &xi.labels, 0).unwrap_or(0);
        Ok(first - second)
    }

    /// `(η_{¬k}, k)`: drops `η(k)` and moves the lamps below it up by one.
    pub fn factor_config(self, a: &GroupElement) -> GroupElement {
        let eta = a
            .eta
            .iter()
            .filter_map(|(&n, &v)| match n {
                n if n < a.k => Some((n + 1, v)),
                n if n == a.k => None,
                n => Some((n, v)),
            })
            .collect();
        GroupElement { eta, k: a.k }
    }
}

/// Smallest `n ≤ top` with `differs(n)`. Only positions `n` where one of the
/// words is nonzero at `n + offset` can differ, so those are the candidates.
fn min_mismatch(top: i64, differs: impl Fn(i64) -> bool, a: &LabelWord, b: &LabelWord, offset: i64) -> Option<i64> {
    a.keys().chain(b.keys()).map(|&j| j - offset).filter(|&n| n <= top && differs(n)).min()
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    k: i64,
    #[serde(default)]
    eta: Vec<(i64, u32)>,
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr { k: self.k, eta: self.eta.iter().map(|(&n, &v)| (n, v)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        Ok(GroupElement { eta: repr.eta.into_iter().filter(|&(_, v)| v != 0).collect(), k: repr.k })
    }
}

#[derive(Serialize, Deserialize)]
struct BoundaryRepr {
    side: Side,
    #[serde(default)]
    labels: Vec<(i64, u32)>,
}

impl Serialize for BoundaryConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoundaryRepr { side: self.side, labels: self.labels.iter().map(|(&n, &v)| (n, v)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BoundaryRepr::deserialize(d)?;
        Ok(BoundaryConfig { side: repr.side, labels: repr.labels.into_iter().filter(|&(_, v)| v != 0).collect() })
    }
}
