//! Positive harmonic functions on Diestel-Leader graphs.
//!
//! The crate realizes `DL(q, r)` as the horocyclic product of two homogeneous
//! trees, the lamplighter group `Z_q ≀ Z` on `DL(q, q)`, the nearest
//! neighbour walks `P_α` and `Q_α` together with their tree projections, and
//! the machinery that describes their nonnegative harmonic functions:
//!
//! * [`kernels`]: closed-form hitting probabilities and Martin kernels on the
//!   trees, their lifts to `DL(q, r)`, and the defect kernels on the
//!   lamplighter group;
//! * [`dirichlet`]: finite truncations `S^(n)`, an exact rational Dirichlet
//!   solver and the finite-stage split `h = h1 + h2`;
//! * [`walks`]: exact transition kernels, harmonicity checks, conjugation,
//!   projection through the sibling quotient and Monte-Carlo estimation.
//!
//! All probabilities are exact rationals; only the Monte-Carlo estimator
//! produces floating point numbers.

pub mod dirichlet;
pub mod dl_graph;
pub mod error;
pub mod kernels;
pub mod lamplighter;
pub mod linalg;
pub mod par;
pub mod rational;
pub mod tree;
pub mod walks;

pub use dl_graph::{DLParams, DLVertex, GraphVariant, SiblingClass};
pub use error::{Error, Result};
pub use lamplighter::{BoundaryConfig, GeneratorModel, GroupElement, Lamplighter, Side};
pub use par::Parallelism;
pub use rational::Rational;
pub use tree::{TreeEnd, TreeParams, TreeVertex};

#[cfg(test)]
pub(crate) mod testutil {
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    use crate::dl_graph::{DLParams, DLVertex};
    use crate::lamplighter::{GroupElement, Lamplighter};
    use crate::tree::{TreeEnd, TreeParams};

    /// Endpoint of a uniform random walk of `steps` steps from the root.
    pub fn random_vertex(p: DLParams, rng: &mut ChaCha8Rng, steps: usize) -> DLVertex {
        let mut v = DLVertex::root();
        for _ in 0..steps {
            let n = p.dl_neighbours(&v).unwrap();
            v = n[rng.random_range(0..n.len())].clone();
        }
        v
    }

    /// Zero-tail end with random labels on keys in `lo..=hi`.
    pub fn random_end(t: TreeParams, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> TreeEnd {
        t.end((lo..=hi).map(|j| (j, rng.random_range(0..t.q())))).unwrap()
    }

    /// Random lamps on `-span..=span`, position in `-span..=span`.
    pub fn random_element(g: Lamplighter, rng: &mut ChaCha8Rng, span: i64) -> GroupElement {
        let eta: Vec<(i64, u32)> = (-span..=span).map(|n| (n, rng.random_range(0..g.q()))).collect();
        g.element(eta, rng.random_range(-span..=span))
    }
}
