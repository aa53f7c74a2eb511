//! The homogeneous tree `T_q` drawn in horocyclic layers.
//!
//! A vertex is stored as its horocycle index (`level`) together with the
//! labels of the edges on the geodesic from the reference end ω down to the
//! vertex. `labels[j]` is the label of the edge entering level `j` from
//! level `j - 1`, and only nonzero labels are stored. The root `o` sits at
//! level 0 with every edge on its ω-ray labelled 0.
//!
//! Ends other than ω are represented by a finitely supported label word
//! (zero tail in both directions). Such ends are dense in ∂*T and every
//! operation here depends on an end only through finitely many labels.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type LabelWord = BTreeMap<i64, u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeParams {
    q: u32,
}

impl TreeParams {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBranching(q));
        }
        Ok(Self { q })
    }

    pub fn q(self) -> u32 {
        self.q
    }

    /// Builds a vertex, dropping zero labels and validating the rest.
    pub fn vertex(self, level: i64, labels: impl IntoIterator<Item = (i64, u32)>) -> Result<TreeVertex> {
        let mut word = LabelWord::new();
        for (key, label) in labels {
            self.check_label(label)?;
            if key > level {
                return Err(Error::LabelAboveLevel { key, level });
            }
            if label != 0 {
                word.insert(key, label);
            }
        }
        Ok(TreeVertex { level, labels: word })
    }

    pub fn end(self, labels: impl IntoIterator<Item = (i64, u32)>) -> Result<TreeEnd> {
        let mut word = LabelWord::new();
        for (key, label) in labels {
            self.check_label(label)?;
            if label != 0 {
                word.insert(key, label);
            }
        }
        Ok(TreeEnd::Word(word))
    }

    pub fn check_label(self, label: u32) -> Result<()> {
        if label >= self.q {
            return Err(Error::InvalidLabel { label, q: self.q });
        }
        Ok(())
    }

    /// Checks that every stored label is below `q`.
    pub fn check_vertex(self, v: &TreeVertex) -> Result<()> {
        v.labels.values().try_for_each(|&l| self.check_label(l))
    }

    pub fn check_end(self, end: &TreeEnd) -> Result<()> {
        match end {
            TreeEnd::Omega => Ok(()),
            TreeEnd::Word(w) => w.values().try_for_each(|&l| self.check_label(l)),
        }
    }

    /// The predecessor followed by the `q` successors.
    pub fn neighbours(self, v: &TreeVertex) -> Vec<TreeVertex> {
        let mut out = Vec::with_capacity(self.q as usize + 1);
        out.push(v.predecessor());
        out.extend((0..self.q).map(|l| v.child(l)));
        out
    }

    pub fn successors(self, v: &TreeVertex) -> impl Iterator<Item = TreeVertex> + '_ {
        (0..self.q).map(move |l| v.child(l))
    }

    /// Adds `word` to the labels of `v` pointwise modulo `q` (keys above the
    /// level are ignored). Together with [`TreeVertex::shift`] these maps act
    /// transitively on the tree and fix ω.
    pub fn translate(self, v: &TreeVertex, word: &LabelWord) -> TreeVertex {
        let mut labels = v.labels.clone();
        for (&key, &add) in word.range(..=v.level) {
            let sum = (labels.get(&key).copied().unwrap_or(0) + add) % self.q;
            if sum == 0 {
                labels.remove(&key);
            } else {
                labels.insert(key, sum);
            }
        }
        TreeVertex { level: v.level, labels }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    level: i64,
    labels: LabelWord,
}

impl TreeVertex {
    pub fn root() -> Self {
        Self { level: 0, labels: LabelWord::new() }
    }

    /// The vertex at `level` on the ω-ray of the root.
    pub fn on_root_ray(level: i64) -> Self {
        Self { level, labels: LabelWord::new() }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn labels(&self) -> &LabelWord {
        &self.labels
    }

    pub fn label_at(&self, key: i64) -> u32 {
        self.labels.get(&key).copied().unwrap_or(0)
    }

    /// Label of the edge from the predecessor to this vertex.
    pub fn top_label(&self) -> u32 {
        self.label_at(self.level)
    }

    pub fn predecessor(&self) -> Self {
        let mut labels = self.labels.clone();
        labels.remove(&self.level);
        Self { level: self.level - 1, labels }
    }

    /// The ancestor at `level` (which must not exceed the vertex level).
    pub fn ancestor_at(&self, level: i64) -> Self {
        debug_assert!(level <= self.level);
        let labels = self.labels.range(..=level).map(|(&k, &v)| (k, v)).collect();
        Self { level, labels }
    }

    pub fn successor(&self, label: u32, params: TreeParams) -> Result<Self> {
        params.check_label(label)?;
        Ok(self.child(label))
    }

    pub(crate) fn child(&self, label: u32) -> Self {
        let mut labels = self.labels.clone();
        if label != 0 {
            labels.insert(self.level + 1, label);
        }
        Self { level: self.level + 1, labels }
    }

    /// Same vertex with the label at its own level reset to 0.
    pub fn with_top_label(&self, label: u32) -> Self {
        self.predecessor().child(label)
    }

    /// Level translation by `m`; an automorphism fixing ω.
    pub fn shift(&self, m: i64) -> Self {
        Self { level: self.level + m, labels: self.labels.iter().map(|(&k, &v)| (k + m, v)).collect() }
    }

    /// Confluent with respect to ω: the deepest common vertex of the two
    /// ω-rays.
    pub fn confluent_omega(&self, other: &TreeVertex) -> TreeVertex {
        let top = self.level.min(other.level);
        let level = match first_mismatch(&self.labels, &other.labels, top) {
            Some(j) => j - 1,
            None => top,
        };
        self.ancestor_at(level)
    }

    /// Confluent of this vertex and an end of ∂*T with respect to ω.
    pub fn confluent_omega_end(&self, end: &TreeEnd) -> Result<TreeVertex> {
        let word = end.word().ok_or(Error::UndefinedConfluent)?;
        let level = match first_mismatch(&self.labels, word, self.level) {
            Some(j) => j - 1,
            None => self.level,
        };
        Ok(self.ancestor_at(level))
    }

    pub fn distance(&self, other: &TreeVertex) -> u64 {
        let c = self.confluent_omega(other);
        ((self.level - c.level) + (other.level - c.level)) as u64
    }

    /// Vertices of the geodesic from `self` to `other`, both included.
    pub fn geodesic(&self, other: &TreeVertex) -> Vec<TreeVertex> {
        let c = self.confluent_omega(other);
        let mut path: Vec<TreeVertex> = (c.level..=self.level).rev().map(|l| self.ancestor_at(l)).collect();
        path.extend((c.level + 1..=other.level).map(|l| other.ancestor_at(l)));
        path
    }

    /// Confluent with respect to the root: the last common vertex of the
    /// geodesic from `o` to `self` and the ray from `o` to `end`.
    pub fn confluent_root(&self, end: &TreeEnd) -> TreeVertex {
        let root = TreeVertex::root();
        let to_self = self.confluent_omega(&root);
        let Some(word) = end.word() else {
            return to_self;
        };
        let to_end_level = match first_mismatch(&root.labels, word, 0) {
            Some(j) => j - 1,
            None => 0,
        };
        match to_end_level.cmp(&to_self.level) {
            std::cmp::Ordering::Less => to_self,
            std::cmp::Ordering::Greater => TreeVertex::on_root_ray(to_end_level),
            std::cmp::Ordering::Equal => self.confluent_omega_end(end).expect("word end has a confluent"),
        }
    }

    /// Horocycle index with respect to `end`: `d(x, c) - d(o, c)` with
    /// `c = x ∧ end`. Equals [`TreeVertex::level`] for ω.
    pub fn busemann(&self, end: &TreeEnd) -> i64 {
        let c = self.confluent_root(end);
        self.distance(&c) as i64 - TreeVertex::root().distance(&c) as i64
    }
}

/// Smallest key `j <= top` where the two words disagree.
fn first_mismatch(a: &LabelWord, b: &LabelWord, top: i64) -> Option<i64> {
    let mut ia = a.range(..=top).peekable();
    let mut ib = b.range(..=top).peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (None, None) => return None,
            (Some(&(&k, _)), None) | (None, Some(&(&k, _))) => return Some(k),
            (Some(&(&ka, &va)), Some(&(&kb, &vb))) => {
                if ka < kb {
                    return Some(ka);
                } else if kb < ka {
                    return Some(kb);
                } else if va != vb {
                    return Some(ka);
                }
                ia.next();
                ib.next();
            }
        }
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {{", self.level)?;
        for (i, (k, v)) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}:{v}")?;
        }
        write!(f, "}})")
    }
}

/// An end of the tree: the reference end ω or a zero-tail word in ∂*T.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeEnd {
    Omega,
    Word(LabelWord),
}

impl TreeEnd {
    pub fn word(&self) -> Option<&LabelWord> {
        match self {
            TreeEnd::Omega => None,
            TreeEnd::Word(w) => Some(w),
        }
    }

    /// Vertex at `level` on the geodesic from ω to this end.
    pub fn vertex_at(&self, level: i64) -> Result<TreeVertex> {
        let word = self.word().ok_or(Error::UndefinedConfluent)?;
        Ok(TreeVertex { level, labels: word.range(..=level).map(|(&k, &v)| (k, v)).collect() })
    }
}

// JSON forms: {"level": j, "labels": [[k, v], ...]} and {"omega": true} / {"labels": [...]}.

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    level: i64,
    #[serde(default)]
    labels: Vec<(i64, u32)>,
}

impl Serialize for TreeVertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VertexRepr { level: self.level, labels: self.labels.iter().map(|(&k, &v)| (k, v)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeVertex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = VertexRepr::deserialize(d)?;
        let mut labels = LabelWord::new();
        for (k, v) in repr.labels {
            if k > repr.level {
                return Err(serde::de::Error::custom(Error::LabelAboveLevel { key: k, level: repr.level }));
            }
            if v != 0 {
                labels.insert(k, v);
            }
        }
        Ok(TreeVertex { level: repr.level, labels })
    }
}

#[derive(Serialize, Deserialize)]
struct EndRepr {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    omega: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<(i64, u32)>>,
}

impl Serialize for TreeEnd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            TreeEnd::Omega => EndRepr { omega: true, labels: None },
            TreeEnd::Word(w) => EndRepr { omega: false, labels: Some(w.iter().map(|(&k, &v)| (k, v)).collect()) },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeEnd {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = EndRepr::deserialize(d)?;
        match (repr.omega, repr.labels) {
            (true, None) => Ok(TreeEnd::Omega),
            (false, Some(labels)) => Ok(TreeEnd::Word(labels.into_iter().filter(|&(_, v)| v != 0).collect())),
            (false, None) => Err(serde::de::Error::custom("end needs \"omega\": true or \"labels\"")),
            (true, Some(_)) => Err(serde::de::Error::custom("end cannot be both omega and a word")),
        }
    }
}
