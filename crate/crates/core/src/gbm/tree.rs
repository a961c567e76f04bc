use super::GbmError;
use crate::dataset::{Feature, NUM_FEATURES};
use crate::scalar::Scalar;

/// A node of a binary-feature decision tree. Children are indices into the
/// owning [`Tree`]'s node list; `left` takes feature = 0, `right` feature = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node<T> {
    Split {
        feature: Feature,
        left: usize,
        right: usize,
        /// Training hessian mass reaching this node.
        cover: T,
    },
    Leaf {
        /// Log-odds increment.
        value: T,
        cover: T,
    },
}

impl<T: Scalar> Node<T> {
    pub fn cover(&self) -> T {
        match *self {
            Node::Split { cover, .. } | Node::Leaf { cover, .. } => cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Validated decision tree, root at index 0.
///
/// Invariants: every node is reachable exactly once, no root-to-leaf path
/// tests a feature twice, covers are finite and nonnegative and an internal
/// cover equals the sum of its children's covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Tree<T> {
    pub fn new(nodes: Vec<Node<T>>) -> Result<Self, GbmError> {
        let bad = |m: String| Err(GbmError::InvalidTree(m));
        if nodes.is_empty() {
            return bad("tree has no nodes".into());
        }
        let mut visited = vec![false; nodes.len()];
        // (node, features used above it)
        let mut stack = vec![(0usize, 0u8)];
        while let Some((i, used)) = stack.pop() {
            if i >= nodes.len() {
                return bad(format!("child index {i} out of range"));
            }
            if std::mem::replace(&mut visited[i], true) {
                return bad(format!("node {i} is reachable twice"));
            }
            let cover = nodes[i].cover();
            if !(cover.is_finite() && cover >= T::zero()) {
                return bad(format!("node {i} has cover {cover}"));
            }
            match nodes[i] {
                Node::Leaf { value, .. } => {
                    if !value.is_finite() {
                        return bad(format!("leaf {i} has value {value}"));
                    }
                }
                Node::Split {
                    feature, left, right, ..
                } => {
                    let bit = 1u8 << feature.index();
                    if used & bit != 0 {
                        return bad(format!("feature {feature} tested twice on one path"));
                    }
                    if left >= nodes.len() || right >= nodes.len() {
                        return bad(format!("node {i} has a child out of range"));
                    }
                    let sum = nodes[left].cover() + nodes[right].cover();
                    let tol = T::of(1e-9) * cover.max(T::one());
                    if (cover - sum).abs() > tol {
                        return bad(format!("node {i} cover {cover} != children sum {sum}"));
                    }
                    stack.push((right, used | bit));
                    stack.push((left, used | bit));
                }
            }
        }
        if let Some(i) = visited.iter().position(|v| !v) {
            return bad(format!("node {i} is unreachable"));
        }
        Ok(Self { nodes })
    }

    /// A single leaf.
    pub fn leaf(value: T, cover: T) -> Result<Self, GbmError> {
        Self::new(vec![Node::Leaf { value, cover }])
    }

    /// One split on `feature` with the given `(value, cover)` leaves.
    pub fn stump(feature: Feature, left: (T, T), right: (T, T)) -> Result<Self, GbmError> {
        Self::new(vec![
            Node::Split {
                feature,
                left: 1,
                right: 2,
                cover: left.1 + right.1,
            },
            Node::Leaf {
                value: left.0,
                cover: left.1,
            },
            Node::Leaf {
                value: right.0,
                cover: right.1,
            },
        ])
    }

    pub(crate) fn from_trusted(nodes: Vec<Node<T>>) -> Self {
        debug_assert!(Self::new(nodes.clone()).is_ok());
        Self { nodes }
    }

    /// Renumbers nodes in depth-first order, left child before right. This is
    /// the layout a saved model loads back into.
    pub fn preorder(&self) -> Self {
        fn visit<T: Scalar>(src: &[Node<T>], i: usize, out: &mut Vec<Node<T>>) -> usize {
            let at = out.len();
            out.push(src[i]);
            if let Node::Split { left, right, .. } = src[i] {
                let l = visit(src, left, out);
                let r = visit(src, right, out);
                if let Node::Split { left, right, .. } = &mut out[at] {
                    (*left, *right) = (l, r);
                }
            }
            at
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        visit(&self.nodes, 0, &mut nodes);
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn root(&self) -> &Node<T> {
        &self.nodes[0]
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Index of the leaf a feature vector routes to.
    #[inline]
    pub fn leaf_index(&self, features: &[bool; NUM_FEATURES]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature, left, right, ..
                } => {
                    i = if features[feature.index()] { right } else { left };
                }
            }
        }
    }

    #[inline]
    pub fn predict(&self, features: &[bool; NUM_FEATURES]) -> T {
        match self.nodes[self.leaf_index(features)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }

    /// Bitmask of the features tested anywhere in the tree.
    pub fn features_used(&self) -> u8 {
        self.nodes.iter().fold(0, |acc, n| match n {
            Node::Split { feature, .. } => acc | (1 << feature.index()),
            Node::Leaf { .. } => acc,
        })
    }

    /// Cover-weighted mean leaf value.
    pub fn expected_value(&self) -> T {
        let root = self.root().cover();
        if root <= T::zero() {
            return T::zero();
        }
        self.nodes
            .iter()
            .filter_map(|n| match *n {
                Node::Leaf { value, cover } => Some(value * cover),
                Node::Split { .. } => None,
            })
            .fold(T::zero(), |a, b| a + b)
            / root
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Tree<U> {
        Tree {
            nodes: self
                .nodes
                .iter()
                .map(|n| match *n {
                    Node::Split {
                        feature,
                        left,
                        right,
                        cover,
                    } => Node::Split {
                        feature,
                        left,
                        right,
                        cover: f(cover),
                    },
                    Node::Leaf { value, cover } => Node::Leaf {
                        value: f(value),
                        cover: f(cover),
                    },
                })
                .collect(),
        }
    }
}
