//! Rooted ordered trees and their per-tree indices.
//!
//! Trees are written in balanced-parentheses form: the root is the outer
//! pair and encloses the encodings of its children from left to right, so
//! `()` is a single vertex and `(()())` is a root with two leaves.
//!
//! All traversals use explicit stacks; deep paths never recurse.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Tree {
    children: Vec<Tree>,
}

impl Tree {
    pub fn leaf() -> Self {
        Tree::default()
    }

    pub fn new(children: Vec<Tree>) -> Self {
        Tree { children }
    }

    /// Path on `n` vertices hanging from the root.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1, "a tree has at least one vertex");
        let mut t = Tree::leaf();
        for _ in 1..n {
            t = Tree::new(vec![t]);
        }
        t
    }

    /// Root with `n - 1` leaf children.
    pub fn star(n: usize) -> Self {
        assert!(n >= 1, "a tree has at least one vertex");
        Tree::new(vec![Tree::leaf(); n - 1])
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn children_mut(&mut self) -> &mut Vec<Tree> {
        &mut self.children
    }

    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            count += 1;
            stack.extend(t.children.iter());
        }
        count
    }

    /// Balanced-parentheses encoding.
    pub fn encode(&self) -> String {
        self.to_bits()
            .into_iter()
            .map(|open| if open { '(' } else { ')' })
            .collect()
    }

    /// The encoding as bits, `true` for `(`.
    pub fn to_bits(&self) -> Vec<bool> {
        enum Step<'a> {
            Enter(&'a Tree),
            Leave,
        }
        let mut bits = Vec::new();
        let mut stack = vec![Step::Enter(self)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Enter(t) => {
                    bits.push(true);
                    stack.push(Step::Leave);
                    stack.extend(t.children.iter().rev().map(Step::Enter));
                }
                Step::Leave => bits.push(false),
            }
        }
        bits
    }

    /// Decode a bit string that is already known to be a valid encoding.
    pub(crate) fn from_valid_bits(bits: &[bool]) -> Tree {
        let mut stack: Vec<Vec<Tree>> = Vec::new();
        let mut root = None;
        for &open in bits {
            if open {
                stack.push(Vec::new());
            } else {
                let node = Tree::new(stack.pop().expect("valid encoding"));
                match stack.last_mut() {
                    Some(parent) => parent.push(node),
                    None => root = Some(node),
                }
            }
        }
        root.expect("valid encoding")
    }

    /// Parent of each vertex in pre-order; the root (vertex 0) has `None`.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parents = Vec::new();
        let mut stack: Vec<(&Tree, Option<usize>)> = vec![(self, None)];
        while let Some((t, parent)) = stack.pop() {
            let id = parents.len();
            parents.push(parent);
            stack.extend(t.children.iter().rev().map(|c| (c, Some(id))));
        }
        parents
    }
}

impl Drop for Tree {
    fn drop(&mut self) {
        let mut pending = std::mem::take(&mut self.children);
        while let Some(mut t) = pending.pop() {
            pending.append(&mut t.children);
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({})", self.encode())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    InvalidCharacter(char),
    UnexpectedClose,
    TrailingInput,
    Unclosed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid tree encoding at position {position}: {kind}")]
pub struct ParseError {
    /// Character offset of the first offending position.
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => f.write_str("empty input"),
            ParseErrorKind::InvalidCharacter(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedClose => f.write_str("unmatched ')'"),
            ParseErrorKind::TrailingInput => f.write_str("input continues after the root closes"),
            ParseErrorKind::Unclosed => f.write_str("unclosed '('"),
        }
    }
}

/// Validate a balanced-parentheses string and return its bits.
pub fn parse_bits(text: &str) -> Result<Vec<bool>, ParseError> {
    let err = |position, kind| ParseError { position, kind };
    if text.is_empty() {
        return Err(err(0, ParseErrorKind::Empty));
    }
    let mut bits = Vec::with_capacity(text.len());
    let mut depth = 0usize;
    for (i, c) in text.chars().enumerate() {
        if depth == 0 && i > 0 {
            return Err(err(i, ParseErrorKind::TrailingInput));
        }
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => return Err(err(i, ParseErrorKind::UnexpectedClose)),
            ')' => depth -= 1,
            other => return Err(err(i, ParseErrorKind::InvalidCharacter(other))),
        }
        bits.push(c == '(');
    }
    if depth != 0 {
        return Err(err(text.chars().count(), ParseErrorKind::Unclosed));
    }
    Ok(bits)
}

pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    parse_bits(text).map(|bits| Tree::from_valid_bits(&bits))
}

impl FromStr for Tree {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}

/// The eight per-tree quantities. Index `1` counts objects containing the
/// root, index `2` those avoiding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBundle {
    pub n: usize,
    pub sigma1: BigUint,
    pub sigma2: BigUint,
    pub z1: BigUint,
    pub z2: BigUint,
    pub rho1: BigUint,
    pub rho2: BigUint,
    pub d: BigUint,
    pub w: BigUint,
}

impl IndexBundle {
    /// Merrifield–Simmons index.
    pub fn sigma(&self) -> BigUint {
        &self.sigma1 + &self.sigma2
    }

    /// Hosoya index.
    pub fn z(&self) -> BigUint {
        &self.z1 + &self.z2
    }

    /// Number of subtrees.
    pub fn rho(&self) -> BigUint {
        &self.rho1 + &self.rho2
    }
}

/// Bottom-up accumulation over the children of one node.
pub(crate) trait NodeFold: Default {
    type Value;
    fn add_child(&mut self, child: Self::Value);
    fn finish(self) -> Self::Value;
}

pub(crate) fn fold_bits<F: NodeFold>(bits: &[bool]) -> F::Value {
    let mut stack: Vec<F> = Vec::new();
    for &open in bits {
        if open {
            stack.push(F::default());
        } else {
            let value = stack.pop().expect("valid encoding").finish();
            match stack.last_mut() {
                Some(parent) => parent.add_child(value),
                None => return value,
            }
        }
    }
    unreachable!("valid encoding closes its root")
}

pub(crate) fn fold_tree<'a, F: NodeFold>(tree: &'a Tree) -> F::Value {
    let mut stack: Vec<(&'a Tree, usize, F)> = vec![(tree, 0, F::default())];
    loop {
        let top = stack.last_mut().expect("nonempty");
        let node: &'a Tree = top.0;
        if let Some(child) = node.children.get(top.1) {
            top.1 += 1;
            stack.push((child, 0, F::default()));
            continue;
        }
        let (_, _, acc) = stack.pop().expect("nonempty");
        let value = acc.finish();
        match stack.last_mut() {
            Some((_, _, parent)) => parent.add_child(value),
            None => return value,
        }
    }
}

struct BundleFold {
    size: usize,
    sigma1: BigUint,
    sigma2: BigUint,
    // product of Z over children, and sum_j Z2_j prod_{i != j} Z_i
    z_all: BigUint,
    z_one_matched: BigUint,
    rho1: BigUint,
    rho2: BigUint,
    d_sum: BigUint,
    w_sum: BigUint,
    // sums over children of (D_i + |T_i|), of |T_i|, and of (D_i + |T_i|) |T_i|
    reach_sum: BigUint,
    size_sum: BigUint,
    reach_size_diag: BigUint,
}

impl Default for BundleFold {
    fn default() -> Self {
        BundleFold {
            size: 1,
            sigma1: BigUint::one(),
            sigma2: BigUint::one(),
            z_all: BigUint::one(),
            z_one_matched: BigUint::zero(),
            rho1: BigUint::one(),
            rho2: BigUint::zero(),
            d_sum: BigUint::zero(),
            w_sum: BigUint::zero(),
            reach_sum: BigUint::zero(),
            size_sum: BigUint::zero(),
            reach_size_diag: BigUint::zero(),
        }
    }
}

impl NodeFold for BundleFold {
    type Value = IndexBundle;

    fn add_child(&mut self, c: IndexBundle) {
        let (c_sigma, c_z, c_rho) = (c.sigma(), c.z(), c.rho());
        self.size += c.n;
        self.sigma1 *= &c.sigma2;
        self.sigma2 *= &c_sigma;
        self.z_one_matched = &self.z_one_matched * &c_z + &self.z_all * &c.z2;
        self.z_all *= &c_z;
        self.rho1 *= c.rho1 + 1u32;
        self.rho2 += c_rho;
        let size = BigUint::from(c.n);
        let reach = &c.d + &size;
        self.reach_size_diag += &reach * &size;
        self.reach_sum += reach;
        self.size_sum += size;
        self.d_sum += c.d;
        self.w_sum += c.w;
    }

    fn finish(self) -> IndexBundle {
        let d = self.d_sum + BigUint::from(self.size - 1);
        let cross = &self.reach_sum * &self.size_sum - &self.reach_size_diag;
        let w = &d + self.w_sum + cross;
        IndexBundle {
            n: self.size,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            z1: self.z_one_matched,
            z2: self.z_all,
            rho1: self.rho1,
            rho2: self.rho2,
            d,
            w,
        }
    }
}

/// Evaluate every index through the root-split recursions, post-order.
pub fn compute_indices(t: &Tree) -> IndexBundle {
    fold_tree::<BundleFold>(t)
}

pub(crate) fn indices_from_bits(bits: &[bool]) -> IndexBundle {
    fold_bits::<BundleFold>(bits)
}

/// Size, internal path length and Wiener index in machine integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct DistanceStats {
    pub n: u64,
    pub d: u128,
    pub w: u128,
}

#[derive(Default)]
pub(crate) struct DistanceFold {
    n: u64,
    d_sum: u128,
    w_sum: u128,
    reach_sum: u128,
    size_sum: u128,
    diag: u128,
}

impl NodeFold for DistanceFold {
    type Value = DistanceStats;

    fn add_child(&mut self, c: DistanceStats) {
        let size = u128::from(c.n);
        let reach = c.d + size;
        self.n += c.n;
        self.d_sum += c.d;
        self.w_sum += c.w;
        self.reach_sum += reach;
        self.size_sum += size;
        self.diag += reach * size;
    }

    fn finish(self) -> DistanceStats {
        let n = self.n + 1;
        let d = self.d_sum + u128::from(n - 1);
        let w = d + self.w_sum + self.reach_sum * self.size_sum - self.diag;
        DistanceStats { n, d, w }
    }
}

/// Wiener index by breadth-first search from every vertex, summed over
/// unordered pairs. Quadratic; does not use the branch recursion.
pub fn wiener_direct(t: &Tree) -> BigUint {
    let parents = t.parents();
    let n = parents.len();
    let mut adj = vec![Vec::new(); n];
    for (v, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            adj[v].push(p);
            adj[p].push(v);
        }
    }
    let mut total: u128 = 0;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for src in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        total += dist[src + 1..].iter().map(|&d| d as u128).sum::<u128>();
    }
    BigUint::from(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(b: &IndexBundle) -> [u64; 5] {
        let f = |x: BigUint| u64::try_from(x).unwrap();
        [
            f(b.sigma()),
            f(b.z()),
            f(b.rho()),
            f(b.d.clone()),
            f(b.w.clone()),
        ]
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_tree("()").unwrap().size(), 1);
        let edge = parse_tree("(())").unwrap();
        assert_eq!(edge.size(), 2);
        assert_eq!(edge.children().len(), 1);
        let cherry = parse_tree("(()())").unwrap();
        assert_eq!(cherry.size(), 3);
        assert_eq!(cherry.children().len(), 2);
        assert!(cherry.children().iter().all(|c| c.children().is_empty()));
    }

    #[test]
    fn parse_errors_name_position() {
        let e = |s: &str| parse_tree(s).unwrap_err();
        assert_eq!(e("").kind, ParseErrorKind::Empty);
        assert_eq!(e(")(").position, 0);
        assert_eq!(e(")(").kind, ParseErrorKind::UnexpectedClose);
        assert_eq!(e("()()").position, 2);
        assert_eq!(e("()()").kind, ParseErrorKind::TrailingInput);
        assert_eq!(e("(()").position, 3);
        assert_eq!(e("(()").kind, ParseErrorKind::Unclosed);
        assert_eq!(e("(x)").kind, ParseErrorKind::InvalidCharacter('x'));
        assert_eq!(e("(x)").position, 1);
    }

    #[test]
    fn encode_roundtrips() {
        for s in ["()", "(())", "(()())", "((())(()()))"] {
            assert_eq!(parse_tree(s).unwrap().encode(), s);
        }
    }

    #[test]
    fn leaf_bundle() {
        let b = compute_indices(&Tree::leaf());
        assert_eq!(small(&b), [2, 1, 1, 0, 0]);
        assert!(b.z1.is_zero() && b.rho2.is_zero());
    }

    #[test]
    fn edge_bundle() {
        let b = compute_indices(&parse_tree("(())").unwrap());
        assert_eq!(b.sigma1, BigUint::from(1u32));
        assert_eq!(b.sigma2, BigUint::from(2u32));
        assert_eq!(b.rho1, BigUint::from(2u32));
        assert_eq!(b.rho2, BigUint::from(1u32));
        assert_eq!(small(&b), [3, 2, 3, 1, 1]);
    }

    #[test]
    fn three_vertex_bundles() {
        let path = compute_indices(&parse_tree("((()))").unwrap());
        assert_eq!(small(&path), [5, 3, 6, 3, 4]);
        let cherry = compute_indices(&parse_tree("(()())").unwrap());
        assert_eq!(small(&cherry), [5, 3, 6, 2, 4]);
    }

    #[test]
    fn wiener_direct_examples() {
        assert!(wiener_direct(&Tree::leaf()).is_zero());
        assert_eq!(wiener_direct(&Tree::path(4)), BigUint::from(10u32));
        assert_eq!(
            wiener_direct(&parse_tree("(()())").unwrap()),
            BigUint::from(4u32)
        );
    }

    #[test]
    fn bit_and_tree_folds_agree() {
        let t = parse_tree("((()())(())())").unwrap();
        assert_eq!(compute_indices(&t), indices_from_bits(&t.to_bits()));
        let fast = fold_bits::<DistanceFold>(&t.to_bits());
        let slow = compute_indices(&t);
        assert_eq!(BigUint::from(fast.w), slow.w);
        assert_eq!(BigUint::from(fast.d), slow.d);
        assert_eq!(fast.n as usize, slow.n);
    }

    #[test]
    fn deep_path_does_not_overflow_the_stack() {
        let n = 200_000;
        let text = "(".repeat(n) + &")".repeat(n);
        let t = parse_tree(&text).unwrap();
        assert_eq!(t.size(), n);
        let b = fold_tree::<DistanceFold>(&t);
        assert_eq!(b.d, (n as u128) * (n as u128 - 1) / 2);
    }
}
