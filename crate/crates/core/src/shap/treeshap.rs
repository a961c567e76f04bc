//! Polynomial-time exact SHAP for one tree (path-dependent TreeSHAP).
//!
//! The recursion keeps, for the current root-to-node path, the unique
//! features seen so far with the fraction of cover that flows down the path
//! when the feature is absent (`zero`) and whether the explained record
//! follows the path when it is present (`one`). `weight` holds the
//! permutation weight of each subset size.

use crate::dataset::NUM_FEATURES;
use crate::gbm::{Node, Tree};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
struct PathElem<T> {
    feature: Option<usize>,
    zero: T,
    one: T,
    weight: T,
}

fn extend<T: Scalar>(path: &mut Vec<PathElem<T>>, zero: T, one: T, feature: Option<usize>) {
    let depth = path.len();
    path.push(PathElem {
        feature,
        zero,
        one,
        weight: if depth == 0 { T::one() } else { T::zero() },
    });
    let d1 = T::from_count(depth + 1);
    for i in (0..depth).rev() {
        let w = path[i].weight;
        path[i + 1].weight = path[i + 1].weight + one * w * T::from_count(i + 1) / d1;
        path[i].weight = zero * w * T::from_count(depth - i) / d1;
    }
}

fn unwind<T: Scalar>(path: &mut Vec<PathElem<T>>, index: usize) {
    let depth = path.len() - 1;
    let PathElem { zero, one, .. } = path[index];
    let d1 = T::from_count(depth + 1);
    let mut next = path[depth].weight;
    for i in (0..depth).rev() {
        if one != T::zero() {
            let tmp = path[i].weight;
            path[i].weight = next * d1 / (T::from_count(i + 1) * one);
            next = tmp - path[i].weight * zero * T::from_count(depth - i) / d1;
        } else {
            path[i].weight = path[i].weight * d1 / (zero * T::from_count(depth - i));
        }
    }
    for i in index..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero = path[i + 1].zero;
        path[i].one = path[i + 1].one;
    }
    path.pop();
}

/// Total weight the path would carry after unwinding element `index`.
fn unwound_sum<T: Scalar>(path: &[PathElem<T>], index: usize) -> T {
    let depth = path.len() - 1;
    let PathElem { zero, one, .. } = path[index];
    let d1 = T::from_count(depth + 1);
    let mut total = T::zero();
    if one != T::zero() {
        let mut next = path[depth].weight;
        for i in (0..depth).rev() {
            let tmp = next * d1 / (T::from_count(i + 1) * one);
            total = total + tmp;
            next = path[i].weight - tmp * zero * T::from_count(depth - i) / d1;
        }
    } else {
        for i in (0..depth).rev() {
            total = total + path[i].weight * d1 / (zero * T::from_count(depth - i));
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Scalar>(
    tree: &Tree<T>,
    x: &[bool; NUM_FEATURES],
    phi: &mut [T; NUM_FEATURES],
    node: usize,
    mut path: Vec<PathElem<T>>,
    zero: T,
    one: T,
    feature: Option<usize>,
) {
    extend(&mut path, zero, one, feature);
    match tree.nodes()[node] {
        Node::Leaf { value, .. } => {
            for i in 1..path.len() {
                let el = path[i];
                if el.one == el.zero {
                    continue;
                }
                let w = unwound_sum(&path, i);
                let f = el.feature.expect("only the root element lacks a feature");
                phi[f] = phi[f] + w * (el.one - el.zero) * value;
            }
        }
        Node::Split {
            feature: split,
            left,
            right,
            cover,
        } => {
            let f = split.index();
            let (hot, cold) = if x[f] { (right, left) } else { (left, right) };
            let nodes = tree.nodes();
            let hot_frac = nodes[hot].cover() / cover;
            let cold_frac = nodes[cold].cover() / cover;
            let (mut in_zero, mut in_one) = (T::one(), T::one());
            if let Some(k) = path.iter().position(|e| e.feature == Some(f)) {
                in_zero = path[k].zero;
                in_one = path[k].one;
                unwind(&mut path, k);
            }
            recurse(tree, x, phi, hot, path.clone(), hot_frac * in_zero, in_one, Some(f));
            recurse(tree, x, phi, cold, path, cold_frac * in_zero, T::zero(), Some(f));
        }
    }
}

/// Adds one tree's attributions for record `x` into `phi`. Internal covers
/// must be positive.
pub(super) fn accumulate<T: Scalar>(tree: &Tree<T>, x: &[bool; NUM_FEATURES], phi: &mut [T; NUM_FEATURES]) {
    recurse(
        tree,
        x,
        phi,
        0,
        Vec::with_capacity(NUM_FEATURES + 2),
        T::one(),
        T::one(),
        None,
    );
}
