//! Finite truncations of `DL(q, r)` and the exact Dirichlet problem on them.
//!
//! `S^(n)` is the horocyclic product of the subtrees `S1 ⊂ T_q` and
//! `S2 ⊂ T_r` hanging from the apexes `a_i` (the vertex at level `-n` on the
//! ray from `o_i` to ω) down to level `n`. Its boundary, the vertices with a
//! one-step exit, is `(leaves(S1) × {a2}) ∪ ({a1} × leaves(S2))`.
//!
//! Hitting probabilities `F^{∂S}(x, y)` are the solutions of the boundary
//! value problem "harmonic inside, `δ_y` on `∂S`", solved by exact LU over the
//! rationals. On a single subtree they also follow from a two-term level
//! recursion, which gives the closed-form route used for kernel
//! approximation at large `n`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Display;
use std::hash::Hash;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dl_graph::{DLParams, DLVertex};
use crate::error::{Error, Result};
use crate::kernels::tree_martin_kernel;
use crate::linalg::Matrix;
use crate::par::{self, Parallelism};
use crate::rational::{self, int, Rational};
use crate::tree::{TreeEnd, TreeVertex};
use crate::walks::{first_non_harmonic, Alpha, PAlpha, TreeSide, TreeWalk, Walk};

/// Default bound on `|S^(n)|`.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// A finite vertex set with its boundary under a given walk: the vertices
/// from which one step can leave the set.
#[derive(Debug, Clone)]
pub struct FiniteChain<S> {
    vertices: Vec<S>,
    index: HashMap<S, usize>,
    on_boundary: Vec<bool>,
    boundary: Vec<usize>,
    interior: Vec<usize>,
}

impl<S: Clone + Eq + Hash + Display + Send + Sync> FiniteChain<S> {
    pub fn new<W: Walk<State = S>>(op: &W, vertices: Vec<S>) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Invariant(format!("duplicate vertex {v}")));
            }
        }
        let mut on_boundary = Vec::with_capacity(vertices.len());
        for v in &vertices {
            let exits = op.transitions(v)?.iter().any(|(w, p)| !p.is_zero() && !index.contains_key(w));
            on_boundary.push(exits);
        }
        let boundary = (0..vertices.len()).filter(|&i| on_boundary[i]).collect();
        let interior = (0..vertices.len()).filter(|&i| !on_boundary[i]).collect();
        Ok(Self { vertices, index, on_boundary, boundary, interior })
    }

    pub fn vertices(&self) -> &[S] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &S) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &S) -> bool {
        self.index.contains_key(v)
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.on_boundary[i]
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_vertices(&self) -> Vec<S> {
        self.boundary.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn interior_vertices(&self) -> Vec<S> {
        self.interior.iter().map(|&i| self.vertices[i].clone()).collect()
    }
}

/// `F^{∂S}(x, y)` for every `x ∈ S` and `y ∈ ∂S`.
#[derive(Debug, Clone)]
pub struct HittingTable<S> {
    vertices: Vec<S>,
    boundary: Vec<S>,
    row: HashMap<S, usize>,
    column: HashMap<S, usize>,
    values: Vec<Vec<Rational>>,
}

impl<S: Clone + Eq + Hash> HittingTable<S> {
    pub fn vertices(&self) -> &[S] {
        &self.vertices
    }

    pub fn boundary(&self) -> &[S] {
        &self.boundary
    }

    pub fn get(&self, x: &S, y: &S) -> Option<&Rational> {
        Some(&self.values[*self.row.get(x)?][*self.column.get(y)?])
    }

    pub fn row(&self, x: &S) -> Option<&[Rational]> {
        self.row.get(x).map(|&i| self.values[i].as_slice())
    }

    pub fn column(&self, y: &S) -> Option<Vec<Rational>> {
        let j = *self.column.get(y)?;
        Some(self.values.iter().map(|r| r[j].clone()).collect())
    }

    /// Rows in vertex order, columns in boundary order.
    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    /// Rank of the `|S| × |∂S|` matrix.
    pub fn rank(&self) -> usize {
        Matrix::from_rows(self.values.clone()).rank()
    }
}

impl<S: PartialEq> PartialEq for HittingTable<S> {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.boundary == other.boundary && self.values == other.values
    }
}

impl<S: Serialize> HittingTable<S> {
    /// `{"vertices": [...], "boundary": [...], "F": [["NUM/DEN", ...], ...]}`.
    pub fn to_json(&self) -> Value {
        let f: Vec<Vec<String>> = self.values.iter().map(|r| r.iter().map(rational::format).collect()).collect();
        json!({ "vertices": self.vertices, "boundary": self.boundary, "F": f })
    }
}

/// Solves `(I - P_II) F_I = P_I∂` column by column and checks the residual
/// exactly.
pub fn hitting_table<W: Walk>(
    chain: &FiniteChain<W::State>,
    op: &W,
    mode: Parallelism,
) -> Result<HittingTable<W::State>> {
    let interior = chain.interior();
    let boundary = chain.boundary();
    let mut interior_pos = vec![usize::MAX; chain.len()];
    for (k, &i) in interior.iter().enumerate() {
        interior_pos[i] = k;
    }
    let mut boundary_pos = vec![usize::MAX; chain.len()];
    for (k, &i) in boundary.iter().enumerate() {
        boundary_pos[i] = k;
    }
    let m = interior.len();
    let rows = par::map_slice(mode, interior, |&i| op.transitions(&chain.vertices()[i]));
    let mut a = Matrix::identity(m);
    let mut rhs = vec![vec![Rational::zero(); m]; boundary.len()];
    for (k, transitions) in rows.into_iter().enumerate() {
        for (w, p) in transitions? {
            let j = chain.index_of(&w).ok_or_else(|| Error::Invariant(format!("interior vertex exits to {w}")))?;
            if chain.is_boundary(j) {
                rhs[boundary_pos[j]][k] += p;
            } else {
                a[(k, interior_pos[j])] -= p;
            }
        }
    }
    let solutions = if m == 0 {
        vec![Vec::new(); boundary.len()]
    } else {
        let lu = a.lu().map_err(|_| Error::Invariant("interior system is singular".into()))?;
        lu.solve_many(&rhs, mode)
    };
    let residual_ok =
        par::map_slice(mode, &(0..boundary.len()).collect::<Vec<_>>(), |&b| a.mul_vec(&solutions[b]) == rhs[b]);
    if residual_ok.iter().any(|ok| !ok) {
        return Err(Error::Invariant("nonzero residual in exact solve".into()));
    }
    let values = (0..chain.len())
        .map(|i| {
            if chain.is_boundary(i) {
                (0..boundary.len()).map(|b| if boundary[b] == i { Rational::one() } else { Rational::zero() }).collect()
            } else {
                solutions.iter().map(|col| col[interior_pos[i]].clone()).collect()
            }
        })
        .collect();
    let vertices = chain.vertices().to_vec();
    let boundary_vertices = chain.boundary_vertices();
    Ok(HittingTable {
        row: vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
        column: boundary_vertices.iter().cloned().enumerate().map(|(j, v)| (v, j)).collect(),
        vertices,
        boundary: boundary_vertices,
        values,
    })
}

/// The rooted subtree of height `2n` hanging from the apex at level `-n`.
#[derive(Debug, Clone)]
pub struct TreeTruncation {
    walk: TreeWalk,
    n: u32,
    apex: TreeVertex,
    chain: FiniteChain<TreeVertex>,
}

impl TreeTruncation {
    pub fn new(walk: TreeWalk, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Unsupported("truncation depth must be at least 1".into()));
        }
        let depth = i64::from(n);
        let apex = TreeVertex::on_root_ray(-depth);
        let mut vertices = vec![apex.clone()];
        let mut layer = vec![apex.clone()];
        for _ in 0..2 * n {
            layer = layer.iter().flat_map(|v| walk.tree().successors(v).collect::<Vec<_>>()).collect();
            vertices.extend(layer.iter().cloned());
        }
        let chain = FiniteChain::new(&walk, vertices)?;
        let expected = chain.vertices().iter().filter(|v| v.level() == depth || **v == apex).count();
        let matches = chain.boundary_vertices().iter().all(|v| v.level() == depth || *v == apex);
        if !matches || expected != chain.boundary().len() {
            return Err(Error::Invariant("subtree boundary is not apex plus leaves".into()));
        }
        Ok(Self { walk, n, apex, chain })
    }

    pub fn walk(&self) -> &TreeWalk {
        &self.walk
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn apex(&self) -> &TreeVertex {
        &self.apex
    }

    pub fn chain(&self) -> &FiniteChain<TreeVertex> {
        &self.chain
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeVertex> {
        let depth = i64::from(self.n);
        self.chain.vertices().iter().filter(move |v| v.level() == depth)
    }

    /// Hitting table by matrix solve.
    pub fn hitting_table(&self, mode: Parallelism) -> Result<HittingTable<TreeVertex>> {
        hitting_table(&self.chain, &self.walk, mode)
    }

    pub fn recursion(&self) -> LevelRecursion {
        LevelRecursion::new(&self.walk, self.n)
    }
}

/// `F^{∂S}` on a subtree by levels. With `D_j = F(u, u⁻)` and
/// `U_j = F(u⁻, u)` for `u` at level `j`:
///
/// ```text
/// D_n = 0,       D_j = (1-α) / (1 - α D_{j+1})
/// U_{1-n} = 0,   U_j = (α/q) / (1 - α(q-1)/q · D_j - (1-α) U_{j-1})
/// ```
///
/// and `F(x, y)` is the product of `D` along the climb from `x` to the
/// confluent and `U` along the descent to `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecursion {
    n: i64,
    apex: TreeVertex,
    down: Vec<Rational>,
    up: Vec<Rational>,
}

impl LevelRecursion {
    pub fn new(walk: &TreeWalk, n: u32) -> Self {
        let n = i64::from(n);
        let q = int(walk.tree().q().into());
        let a = walk.forward().value().clone();
        let b = walk.forward().complement().value().clone();
        let one = Rational::one();
        let len = (2 * n + 1) as usize;
        // index j + n
        let mut down = vec![Rational::zero(); len];
        for j in (1 - n..n).rev() {
            let next = &down[(j + 1 + n) as usize];
            down[(j + n) as usize] = &b / (&one - &a * next);
        }
        let mut up = vec![Rational::zero(); len];
        let sibling = &a * (&q - &one) / &q;
        for j in 2 - n..=n {
            let denom = &one - &sibling * &down[(j + n) as usize] - &b * &up[(j - 1 + n) as usize];
            up[(j + n) as usize] = &a / &q / denom;
        }
        Self { n, apex: TreeVertex::on_root_ray(-n), down, up }
    }

    pub fn contains(&self, v: &TreeVertex) -> bool {
        v.level() >= -self.n && v.level() <= self.n && v.ancestor_at(-self.n) == self.apex
    }

    fn is_boundary(&self, v: &TreeVertex) -> bool {
        v.level() == self.n || v.level() == -self.n
    }

    /// `D_j`, the probability of stepping back to the parent before exiting.
    pub fn down(&self, level: i64) -> &Rational {
        &self.down[(level + self.n) as usize]
    }

    pub fn up(&self, level: i64) -> &Rational {
        &self.up[(level + self.n) as usize]
    }

    pub fn hitting(&self, x: &TreeVertex, y: &TreeVertex) -> Result<Rational> {
        for v in [x, y] {
            if !self.contains(v) {
                return Err(Error::OutsideTruncation(v.to_string()));
            }
        }
        if self.is_boundary(x) || x == y {
            return Ok(if x == y { Rational::one() } else { Rational::zero() });
        }
        let c = x.confluent_omega(y);
        let climb = (c.level() + 1..=x.level()).map(|j| self.down(j));
        let descent = (c.level() + 1..=y.level()).map(|j| self.up(j));
        Ok(climb.chain(descent).product())
    }
}

/// `S^(n)` for `P_α` on `DL(q, r)` together with its two subtrees.
#[derive(Debug, Clone)]
pub struct Truncation {
    op: PAlpha,
    n: u32,
    first: TreeTruncation,
    second: TreeTruncation,
    chain: FiniteChain<DLVertex>,
}

/// `Σ_{k=-n}^{n} q^{n+k} r^{n-k}`.
pub fn truncation_size(params: DLParams, n: u32) -> u128 {
    let (q, r) = (u128::from(params.q()), u128::from(params.r()));
    (0..=2 * n).map(|i| q.pow(i) * r.pow(2 * n - i)).sum()
}

pub fn build_truncation(n: u32, params: DLParams, alpha: Alpha) -> Result<Truncation> {
    build_truncation_capped(n, params, alpha, DEFAULT_SIZE_CAP)
}

pub fn build_truncation_capped(n: u32, params: DLParams, alpha: Alpha, cap: usize) -> Result<Truncation> {
    if params.level_sum() != 0 {
        return Err(Error::Unsupported("truncations are built around o1 o2".into()));
    }
    let size = truncation_size(params, n);
    if size > cap as u128 {
        return Err(Error::TruncationTooLarge { size, cap });
    }
    let first = TreeTruncation::new(TreeWalk::projection(TreeSide::First, params, &alpha), n)?;
    let second = TreeTruncation::new(TreeWalk::projection(TreeSide::Second, params, &alpha), n)?;
    let mut vertices = Vec::with_capacity(size as usize);
    let depth = i64::from(n);
    for k in -depth..=depth {
        let xs1 = first.chain.vertices().iter().filter(|v| v.level() == k);
        for x1 in xs1 {
            for x2 in second.chain.vertices().iter().filter(|v| v.level() == -k) {
                vertices.push(DLVertex::new(x1.clone(), x2.clone()));
            }
        }
    }
    let op = PAlpha::new(params, alpha);
    let chain = FiniteChain::new(&op, vertices)?;
    let truncation = Truncation { op, n, first, second, chain };
    truncation.check_boundary()?;
    Ok(truncation)
}

impl Truncation {
    pub fn op(&self) -> &PAlpha {
        &self.op
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> DLParams {
        self.op.params()
    }

    pub fn first(&self) -> &TreeTruncation {
        &self.first
    }

    pub fn second(&self) -> &TreeTruncation {
        &self.second
    }

    pub fn chain(&self) -> &FiniteChain<DLVertex> {
        &self.chain
    }

    pub fn a1(&self) -> &TreeVertex {
        self.first.apex()
    }

    pub fn a2(&self) -> &TreeVertex {
        self.second.apex()
    }

    /// The one-step exit boundary must be the two leaf sets paired with the
    /// opposite apex.
    fn check_boundary(&self) -> Result<()> {
        let mut expected: Vec<DLVertex> = self
            .first
            .leaves()
            .map(|y1| DLVertex::new(y1.clone(), self.a2().clone()))
            .chain(self.second.leaves().map(|y2| DLVertex::new(self.a1().clone(), y2.clone())))
            .collect();
        let mut found = self.chain.boundary_vertices();
        expected.sort();
        found.sort();
        if expected != found {
            return Err(Error::Invariant("one-step exit boundary differs from the leaf description".into()));
        }
        Ok(())
    }

    pub fn hitting_table(&self, mode: Parallelism) -> Result<HittingTable<DLVertex>> {
        hitting_table(&self.chain, &self.op, mode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub x: DLVertex,
    pub y: DLVertex,
    #[serde(with = "rational::serde_string")]
    pub graph: Rational,
    #[serde(with = "rational::serde_string")]
    pub tree: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductReport {
    pub checked: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl ProductReport {
    pub fn holds(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Checks `F^{∂S}(x1 x2, y1 a2) = F1(x1, y1)` and
/// `F^{∂S}(x1 x2, a1 y2) = F2(x2, y2)` for every `x1 x2 ∈ S`.
pub fn verify_product_formula(
    truncation: &Truncation,
    table: &HittingTable<DLVertex>,
    first: &HittingTable<TreeVertex>,
    second: &HittingTable<TreeVertex>,
) -> Result<ProductReport> {
    let mut checked = 0;
    let mut discrepancies = Vec::new();
    for x in table.vertices() {
        for y in table.boundary() {
            let tree = if &y.x2 == truncation.a2() { first.get(&x.x1, &y.x1) } else { second.get(&x.x2, &y.x2) }
                .ok_or_else(|| Error::Invariant(format!("no tree entry for {x} -> {y}")))?;
            let graph = table.get(x, y).expect("table entry");
            checked += 1;
            if graph != tree {
                discrepancies.push(Discrepancy {
                    x: x.clone(),
                    y: y.clone(),
                    graph: graph.clone(),
                    tree: tree.clone(),
                });
            }
        }
    }
    Ok(ProductReport { checked, discrepancies })
}

/// `h = Σ_{y ∈ ∂S} F^{∂S}(·, y) h(y)`, with `data` in boundary order. The
/// result is checked to be harmonic on the interior.
pub fn represent<W: Walk>(
    chain: &FiniteChain<W::State>,
    op: &W,
    table: &HittingTable<W::State>,
    data: &[Rational],
) -> Result<Vec<Rational>> {
    if data.len() != table.boundary().len() {
        return Err(Error::Unsupported(format!(
            "expected {} boundary values, got {}",
            table.boundary().len(),
            data.len()
        )));
    }
    let values: Vec<Rational> =
        table.values().iter().map(|row| row.iter().zip(data).map(|(f, h)| f * h).sum()).collect();
    for &i in chain.interior() {
        let v = &chain.vertices()[i];
        let h = |w: &W::State| {
            chain.index_of(w).map(|j| values[j].clone()).ok_or_else(|| Error::OutsideTruncation(w.to_string()))
        };
        if crate::walks::apply(op, h, v)? != values[i] {
            return Err(Error::NotHarmonic { witness: v.to_string() });
        }
    }
    Ok(values)
}

/// The finite-stage split `h(x1 x2) = h1(x1) + h2(x2)` with
/// `h1(x1) = Σ_{y1} F1(x1, y1) h(y1 a2)` and boundary weights
/// `λ1(y1) = h(y1 a2) / F1(o1, y1)`, `λ1(a1) = 0`; symmetrically for the
/// second tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub n: u32,
    pub h1: BTreeMap<TreeVertex, Rational>,
    pub h2: BTreeMap<TreeVertex, Rational>,
    /// Undefined (`None`) at leaves that `o_i` reaches only through the
    /// apex, where `F_i(o_i, y_i) = 0`.
    pub lambda1: BTreeMap<TreeVertex, Option<Rational>>,
    pub lambda2: BTreeMap<TreeVertex, Option<Rational>>,
    /// Vertices of `S` where `h1 + h2` differs from `h`.
    pub mismatches: Vec<DLVertex>,
}

impl Decomposition {
    pub fn is_exact(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        let zero = Rational::zero();
        [&self.h1, &self.h2].iter().all(|m| m.values().all(|v| *v >= zero))
            && [&self.lambda1, &self.lambda2].iter().all(|m| m.values().flatten().all(|v| *v >= zero))
    }

    pub fn to_json(&self) -> Value {
        let entries = |m: &BTreeMap<TreeVertex, Rational>| -> Vec<Value> {
            m.iter().map(|(v, x)| json!({ "vertex": v, "value": rational::format(x) })).collect()
        };
        let weights = |m: &BTreeMap<TreeVertex, Option<Rational>>| -> Vec<Value> {
            m.iter().map(|(v, x)| json!({ "vertex": v, "value": x.as_ref().map(rational::format) })).collect()
        };
        json!({
            "n": self.n,
            "exact": self.is_exact(),
            "nonnegative": self.is_nonnegative(),
            "h1": entries(&self.h1),
            "h2": entries(&self.h2),
            "lambda1": weights(&self.lambda1),
            "lambda2": weights(&self.lambda2),
            "mismatches": self.mismatches,
        })
    }
}

pub fn decompose<H>(h: H, truncation: &Truncation, mode: Parallelism) -> Result<Decomposition>
where
    H: Fn(&DLVertex) -> Result<Rational> + Sync + Send,
{
    let interior = truncation.chain.interior_vertices();
    if let Some(witness) = first_non_harmonic(&truncation.op, &h, &interior, mode)? {
        return Err(Error::NotHarmonic { witness: witness.to_string() });
    }
    let (a1, a2) = (truncation.a1().clone(), truncation.a2().clone());
    let side = |tree: &TreeTruncation, boundary_value: &dyn Fn(&TreeVertex) -> Result<Rational>| {
        let table = tree.hitting_table(mode)?;
        let leaves: Vec<(TreeVertex, Rational)> =
            tree.leaves().map(|y| Ok((y.clone(), boundary_value(y)?))).collect::<Result<_>>()?;
        let mut values = BTreeMap::new();
        for x in tree.chain.vertices() {
            let v: Rational = leaves.iter().map(|(y, hy)| table.get(x, y).expect("leaf column") * hy).sum();
            values.insert(x.clone(), v);
        }
        let root = TreeVertex::root();
        let mut lambda = BTreeMap::new();
        lambda.insert(tree.apex.clone(), Some(Rational::zero()));
        for (y, hy) in &leaves {
            let f = table.get(&root, y).expect("root row");
            lambda.insert(y.clone(), (!f.is_zero()).then(|| hy / f));
        }
        Ok::<_, Error>((values, lambda))
    };
    let (h1, lambda1) = side(&truncation.first, &|y1| h(&DLVertex::new(y1.clone(), a2.clone())))?;
    let (h2, lambda2) = side(&truncation.second, &|y2| h(&DLVertex::new(a1.clone(), y2.clone())))?;
    let checks =
        par::map_slice(mode, truncation.chain.vertices(), |v| Ok::<_, Error>(h(v)? == &h1[&v.x1] + &h2[&v.x2]));
    let mut mismatches = Vec::new();
    for (v, ok) in truncation.chain.vertices().iter().zip(checks) {
        if !ok? {
            mismatches.push(v.clone());
        }
    }
    Ok(Decomposition { n: truncation.n, h1, h2, lambda1, lambda2, mismatches })
}

/// The boundary point of the subtree that `end` is routed to: the leaf on
/// the ray to `end` when that ray enters the subtree below the apex, and
/// the apex otherwise.
pub fn route_end(recursion: &LevelRecursion, end: &TreeEnd) -> Result<TreeVertex> {
    if let TreeEnd::Word(_) = end {
        let meet = TreeVertex::root().confluent_omega_end(end)?;
        if meet.level() > -recursion.n {
            return end.vertex_at(recursion.n);
        }
    }
    Ok(recursion.apex.clone())
}

/// `K^(n)(x, ξ) = F^{∂S}(x, y) / F^{∂S}(o, y)` with `y` the routed boundary
/// point of `ξ`.
pub fn kernel_approx(walk: &TreeWalk, n: u32, x: &TreeVertex, end: &TreeEnd) -> Result<Rational> {
    walk.tree().check_vertex(x)?;
    walk.tree().check_end(end)?;
    let rec = LevelRecursion::new(walk, n);
    let y = route_end(&rec, end)?;
    let num = rec.hitting(x, &y)?;
    let den = rec.hitting(&TreeVertex::root(), &y)?;
    if den.is_zero() {
        return Err(Error::OutsideTruncation(format!("root does not reach {y} at depth {n}")));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStep {
    pub n: u32,
    #[serde(with = "rational::serde_string")]
    pub approx: Rational,
    /// `F^{∂S^(n)}(x, c)` with `c` the root confluent of `x` and `ξ`.
    #[serde(with = "rational::serde_string")]
    pub f_x: Rational,
    /// `F^{∂S^(n)}(o, c)`.
    #[serde(with = "rational::serde_string")]
    pub f_o: Rational,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    #[serde(with = "rational::serde_string")]
    pub limit: Rational,
    pub steps: Vec<ConvergenceStep>,
}

impl ConvergenceReport {
    pub fn hitting_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].f_x <= w[1].f_x && w[0].f_o <= w[1].f_o)
    }

    pub fn error_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| {
            let err = |s: &ConvergenceStep| (&s.approx - &self.limit).abs();
            err(&w[1]) <= err(&w[0])
        })
    }
}

/// Smallest depth whose interior holds `x`, `o` and `x ∧ ξ`.
pub fn minimal_depth(x: &TreeVertex, end: &TreeEnd) -> u32 {
    let c = x.confluent_root(end);
    let reach = [x.level(), 0, c.level()].iter().map(|l| l.abs()).max().unwrap_or(0);
    (reach + 1) as u32
}

/// `K^(n)(x, ξ)` for every `n` from [`minimal_depth`] to `n_max`, with the
/// hitting probabilities it is built from.
pub fn kernel_convergence(walk: &TreeWalk, x: &TreeVertex, end: &TreeEnd, n_max: u32) -> Result<ConvergenceReport> {
    let limit = tree_martin_kernel(walk.tree().q(), walk.forward(), x, end)?;
    let c = x.confluent_root(end);
    let mut steps = Vec::new();
    for n in minimal_depth(x, end)..=n_max {
        let rec = LevelRecursion::new(walk, n);
        let approx = kernel_approx(walk, n, x, end)?;
        let f_x = rec.hitting(x, &c)?;
        let f_o = rec.hitting(&TreeVertex::root(), &c)?;
        let error = rational::to_f64(&(&approx - &limit).abs());
        steps.push(ConvergenceStep { n, approx, f_x, f_o, error });
    }
    Ok(ConvergenceReport { limit, steps })
}
