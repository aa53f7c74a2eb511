//! Diestel-Leader graphs `DL(q, r)` and the sibling-augmented `DL^s(q, r)`.
//!
//! A vertex is a pair `x1 x2` of vertices of `T_q` and `T_r` whose levels add
//! up to the ambient `level_sum` (0 for the graphs proper). Moving "up" means
//! `x1` steps to a successor while `x2` steps to its predecessor; moving
//! "down" is the reverse.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{TreeParams, TreeVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DLParams {
    first: TreeParams,
    second: TreeParams,
    level_sum: i64,
}

impl DLParams {
    pub fn new(q: u32, r: u32) -> Result<Self> {
        Self::with_level_sum(q, r, 0)
    }

    pub fn with_level_sum(q: u32, r: u32, level_sum: i64) -> Result<Self> {
        Ok(Self { first: TreeParams::new(q)?, second: TreeParams::new(r)?, level_sum })
    }

    pub fn q(self) -> u32 {
        self.first.q()
    }

    pub fn r(self) -> u32 {
        self.second.q()
    }

    pub fn level_sum(self) -> i64 {
        self.level_sum
    }

    pub fn first(self) -> TreeParams {
        self.first
    }

    pub fn second(self) -> TreeParams {
        self.second
    }

    pub fn check(self, v: &DLVertex) -> Result<()> {
        let sum = v.x1.level() + v.x2.level();
        if sum != self.level_sum {
            return Err(Error::InvalidVertex(format!("{v}: level sum {sum}, expected {}", self.level_sum)));
        }
        self.first.check_vertex(&v.x1)?;
        self.second.check_vertex(&v.x2)
    }

    /// Neighbours in `DL(q, r)`: the `q` upward vertices first, then the `r`
    /// downward ones.
    pub fn dl_neighbours(self, v: &DLVertex) -> Result<Vec<DLVertex>> {
        self.check(v)?;
        Ok(self.up(v).chain(self.down(v)).collect())
    }

    pub(crate) fn up<'a>(self, v: &'a DLVertex) -> impl Iterator<Item = DLVertex> + 'a {
        let x2 = v.x2.predecessor();
        self.first.successors(&v.x1).map(move |y1| DLVertex::new(y1, x2.clone()))
    }

    pub(crate) fn down<'a>(self, v: &'a DLVertex) -> impl Iterator<Item = DLVertex> + 'a {
        let x1 = v.x1.predecessor();
        self.second.successors(&v.x2).map(move |y2| DLVertex::new(x1.clone(), y2))
    }

    /// Neighbours in `DL^s(q, r)`: the `q²` upward vertices (successors of
    /// any sibling of `x1`) first, then the `qr` downward ones (any sibling of
    /// `x1⁻` paired with a successor of `x2`). Each neighbour appears once.
    pub fn dls_neighbours(self, v: &DLVertex) -> Result<Vec<DLVertex>> {
        self.check(v)?;
        Ok(self.dls_up(v).chain(self.dls_down(v)).collect())
    }

    pub(crate) fn dls_up<'a>(self, v: &'a DLVertex) -> impl Iterator<Item = DLVertex> + 'a {
        let x2 = v.x2.predecessor();
        self.siblings(&v.x1).flat_map(move |u1| {
            let x2 = x2.clone();
            (0..self.q()).map(move |l| DLVertex::new(u1.child(l), x2.clone()))
        })
    }

    pub(crate) fn dls_down<'a>(self, v: &'a DLVertex) -> impl Iterator<Item = DLVertex> + 'a {
        let parent = v.x1.predecessor();
        self.siblings(&parent).flat_map(move |u1| {
            self.second.successors(&v.x2).map(move |y2| DLVertex::new(u1.clone(), y2)).collect::<Vec<_>>()
        })
    }

    fn siblings(self, x: &TreeVertex) -> impl Iterator<Item = TreeVertex> {
        let parent = x.predecessor();
        (0..self.q()).map(move |l| parent.child(l))
    }

    pub fn neighbours(self, variant: GraphVariant, v: &DLVertex) -> Result<Vec<DLVertex>> {
        match variant {
            GraphVariant::Dl => self.dl_neighbours(v),
            GraphVariant::Dls => self.dls_neighbours(v),
        }
    }

    /// Breadth-first ball around `center`, in discovery order.
    pub fn ball(self, variant: GraphVariant, center: &DLVertex, radius: u32) -> Result<Vec<DLVertex>> {
        let mut seen = HashSet::from([center.clone()]);
        let mut queue = VecDeque::from([(center.clone(), 0)]);
        let mut out = Vec::new();
        while let Some((v, d)) = queue.pop_front() {
            if d < radius {
                for w in self.neighbours(variant, &v)? {
                    if seen.insert(w.clone()) {
                        queue.push_back((w, d + 1));
                    }
                }
            }
            out.push(v);
        }
        Ok(out)
    }

    /// The map `y ↦ (shift(y1, k) + w1, shift(y2, -k) + w2)` sending the
    /// root `o1 o2` to `v`; it preserves both adjacency relations.
    pub fn transport_from_root(self, v: &DLVertex, y: &DLVertex) -> DLVertex {
        let k = v.x1.level();
        DLVertex::new(
            self.first.translate(&y.x1.shift(k), v.x1.labels()),
            self.second.translate(&y.x2.shift(-k), v.x2.labels()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphVariant {
    Dl,
    Dls,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DLVertex {
    pub x1: TreeVertex,
    pub x2: TreeVertex,
}

impl DLVertex {
    pub fn new(x1: TreeVertex, x2: TreeVertex) -> Self {
        Self { x1, x2 }
    }

    pub fn root() -> Self {
        Self::new(TreeVertex::root(), TreeVertex::root())
    }

    pub fn sibling_class(&self) -> SiblingClass {
        SiblingClass { canonical: DLVertex::new(self.x1.with_top_label(0), self.x2.clone()) }
    }

    /// Factor map `DL^s(q, r) → DL(q, r)` onto the sibling quotient,
    /// renormalized to level sum 0: `(shift(x1⁻, 1), x2)`.
    pub fn factor_map(&self) -> DLVertex {
        DLVertex::new(self.x1.predecessor().shift(1), self.x2.clone())
    }
}

impl fmt::Display for DLVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.x1, self.x2)
    }
}

/// A class of the sibling relation `x1 x2 ∼ u1 x2 ⟺ x1⁻ = u1⁻`, keyed by
/// the member whose top label in the first tree is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiblingClass {
    canonical: DLVertex,
}

impl SiblingClass {
    pub fn canonical(&self) -> &DLVertex {
        &self.canonical
    }

    pub fn members(&self, q: u32) -> Vec<DLVertex> {
        (0..q).map(|l| DLVertex::new(self.canonical.x1.with_top_label(l), self.canonical.x2.clone())).collect()
    }
}

/// Adjacency of a finite ball, ready for export.
#[derive(Debug, Clone, Serialize)]
pub struct BallExport {
    pub q: u32,
    pub r: u32,
    pub variant: GraphVariant,
    pub radius: u32,
    pub vertices: Vec<DLVertex>,
    /// Index pairs `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

impl BallExport {
    pub fn build(params: DLParams, variant: GraphVariant, radius: u32) -> Result<Self> {
        let vertices = params.ball(variant, &DLVertex::root(), radius)?;
        let index: HashMap<&DLVertex, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            for w in params.neighbours(variant, v)? {
                if let Some(&j) = index.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        Ok(Self { q: params.q(), r: params.r(), variant, radius, vertices, edges })
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!(
            "graph \"{}({},{})\" {{\n",
            match self.variant {
                GraphVariant::Dl => "DL",
                GraphVariant::Dls => "DLs",
            },
            self.q,
            self.r
        );
        for (i, v) in self.vertices.iter().enumerate() {
            let label = serde_json::to_string(v).expect("vertex serializes");
            out.push_str(&format!("  {i} [label=\"{}\"];\n", label.replace('"', "\\\"")));
        }
        for (i, j) in &self.edges {
            out.push_str(&format!("  {i} -- {j};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// JSON adjacency list: `{"vertices": [...], "adjacency": [[j, ...], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut adjacency = vec![Vec::new(); self.vertices.len()];
        for &(i, j) in &self.edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        serde_json::json!({
            "q": self.q,
            "r": self.r,
            "variant": self.variant,
            "radius": self.radius,
            "vertices": self.vertices,
            "adjacency": adjacency,
        })
    }
}
