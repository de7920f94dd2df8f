//! Decision procedures for the composite embedding relations, and the
//! exhaustive oracles they are checked against.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::qo::{check_shape, leq, Element, QoSpec, Tree};

/// Result of an embedding query. `witness` maps source positions (sequence
/// indices, or preorder node indices for trees) to target positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub witness: Option<Vec<(usize, usize)>>,
}

impl Embedding {
    fn found(pairs: Vec<(usize, usize)>) -> Self {
        Embedding { witness: Some(pairs) }
    }

    fn none() -> Self {
        Embedding { witness: None }
    }

    pub fn holds(&self) -> bool {
        self.witness.is_some()
    }
}

/// Greedy leftmost match of `s` into `t`. Each `s[i]` takes the first
/// unused position of `t` that dominates it, which is complete because
/// prefix embeddability is monotone in the target.
pub fn le_higman(of: &QoSpec, s: &[Element], t: &[Element]) -> Result<Embedding> {
    for y in t {
        check_shape(of, y)?;
    }
    let mut pairs = Vec::with_capacity(s.len());
    let mut next = 0;
    for (i, x) in s.iter().enumerate() {
        check_shape(of, x)?;
        let mut hit = None;
        while next < t.len() {
            let j = next;
            next += 1;
            if leq(of, x, &t[j])? {
                hit = Some(j);
                break;
            }
        }
        match hit {
            Some(j) => pairs.push((i, j)),
            None => return Ok(Embedding::none()),
        }
    }
    Ok(Embedding::found(pairs))
}

/// Least `n` such that `s` embeds into `t[..n]`, or `None` if `s` does not
/// embed into `t` at all. This is the end of the greedy witness.
pub fn higman_end(of: &QoSpec, s: &[Element], t: &[Element]) -> Result<Option<usize>> {
    let e = le_higman(of, s, t)?;
    Ok(e.witness
        .map(|w| w.last().map_or(0, |&(_, j)| j + 1)))
}

/// Preorder flattening of a tree: node `i`'s subtree is `i..end[i]`.
#[derive(Debug)]
pub(crate) struct FlatTree<'a> {
    pub labels: Vec<&'a Element>,
    pub parent: Vec<Option<usize>>,
    pub end: Vec<usize>,
}

impl<'a> FlatTree<'a> {
    pub fn new(t: &'a Tree) -> Self {
        let mut f = FlatTree {
            labels: Vec::new(),
            parent: Vec::new(),
            end: Vec::new(),
        };
        f.push(t, None);
        f
    }

    fn push(&mut self, t: &'a Tree, parent: Option<usize>) {
        let i = self.labels.len();
        self.labels.push(&t.label);
        self.parent.push(parent);
        self.end.push(0);
        for c in &t.children {
            self.push(c, Some(i));
        }
        self.end[i] = self.labels.len();
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// `x` is an ancestor of `y` or equal to it.
    pub fn le(&self, x: usize, y: usize) -> bool {
        x <= y && y < self.end[x]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x < y && y < self.end[x]
    }

    pub fn children(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (x + 1..self.end[x]).filter(move |&y| self.parent[y] == Some(x))
    }
}

fn label_table(of: &QoSpec, s: &FlatTree, t: &FlatTree) -> Result<Vec<Vec<bool>>> {
    s.labels
        .iter()
        .map(|a| t.labels.iter().map(|b| leq(of, a, b)).collect())
        .collect()
}

fn check_tree(of: &QoSpec, t: &Tree) -> Result<()> {
    check_shape(of, &t.label)?;
    t.children.iter().try_for_each(|c| check_tree(of, c))
}

/// `s <=_1 t`: an injective map sending strict ancestors to strict
/// ancestors and dominating labels. Backtracking over source nodes in
/// preorder, with failed states memoized on (node, used targets, images of
/// the node's ancestors).
pub fn le_tree_inj(of: &QoSpec, s: &Tree, t: &Tree) -> Result<Embedding> {
    check_tree(of, s)?;
    check_tree(of, t)?;
    let fs = FlatTree::new(s);
    let ft = FlatTree::new(t);
    if fs.len() > ft.len() {
        return Ok(Embedding::none());
    }
    let lab = label_table(of, &fs, &ft)?;
    let mut search = InjSearch {
        fs: &fs,
        ft: &ft,
        lab: &lab,
        image: vec![usize::MAX; fs.len()],
        used: vec![false; ft.len()],
        failed: HashSet::new(),
    };
    if search.place(0) {
        Ok(Embedding::found(search.image.iter().copied().enumerate().collect()))
    } else {
        Ok(Embedding::none())
    }
}

struct InjSearch<'a, 'b> {
    fs: &'a FlatTree<'b>,
    ft: &'a FlatTree<'b>,
    lab: &'a [Vec<bool>],
    image: Vec<usize>,
    used: Vec<bool>,
    failed: HashSet<(usize, Vec<bool>, Vec<usize>)>,
}

impl InjSearch<'_, '_> {
    fn key(&self, i: usize) -> (usize, Vec<bool>, Vec<usize>) {
        let mut anc = Vec::new();
        let mut p = self.fs.parent[i];
        while let Some(q) = p {
            anc.push(self.image[q]);
            p = self.fs.parent[q];
        }
        (i, self.used.clone(), anc)
    }

    fn place(&mut self, i: usize) -> bool {
        if i == self.fs.len() {
            return true;
        }
        let key = self.key(i);
        if self.failed.contains(&key) {
            return false;
        }
        let range = match self.fs.parent[i] {
            None => 0..self.ft.len(),
            Some(p) => {
                let v = self.image[p];
                v + 1..self.ft.end[v]
            }
        };
        for v in range {
            if self.used[v] || !self.lab[i][v] {
                continue;
            }
            self.used[v] = true;
            self.image[i] = v;
            if self.place(i + 1) {
                return true;
            }
            self.used[v] = false;
        }
        self.image[i] = usize::MAX;
        self.failed.insert(key);
        false
    }
}

/// `s <=_m t`: a (not necessarily injective) map preserving the
/// ancestor-or-self relation and dominating labels, by dynamic programming
/// over (source node, target node).
pub fn le_tree_mono(of: &QoSpec, s: &Tree, t: &Tree) -> Result<Embedding> {
    check_tree(of, s)?;
    check_tree(of, t)?;
    let fs = FlatTree::new(s);
    let ft = FlatTree::new(t);
    let lab = label_table(of, &fs, &ft)?;
    let (n, m) = (fs.len(), ft.len());
    let mut emb = vec![vec![false; m]; n];
    // below[u][v]: some w in the subtree of v has emb[u][w]
    let mut below = vec![vec![false; m]; n];
    for u in (0..n).rev() {
        for v in (0..m).rev() {
            emb[u][v] = lab[u][v] && fs.children(u).all(|c| below[c][v]);
        }
        for v in (0..m).rev() {
            below[u][v] = emb[u][v] || ft.children(v).any(|w| below[u][w]);
        }
    }
    let Some(root) = (0..m).find(|&v| emb[0][v]) else {
        return Ok(Embedding::none());
    };
    let mut image = vec![usize::MAX; n];
    image[0] = root;
    for u in 1..n {
        let v = image[fs.parent[u].expect("non-root has a parent")];
        image[u] = (v..ft.end[v])
            .find(|&w| emb[u][w])
            .expect("dp guarantees a child image");
    }
    Ok(Embedding::found(image.into_iter().enumerate().collect()))
}

/// Domination order on finite sets: an injection `f: s -> t` with
/// `x <= f(x)`, found by augmenting-path bipartite matching.
pub fn le_finset(of: &QoSpec, s: &[Element], t: &[Element]) -> Result<bool> {
    if s.len() > t.len() {
        for x in s.iter().chain(t) {
            check_shape(of, x)?;
        }
        return Ok(false);
    }
    let adj: Vec<Vec<usize>> = s
        .iter()
        .map(|x| {
            t.iter()
                .enumerate()
                .filter_map(|(j, y)| match leq(of, x, y) {
                    Ok(true) => Some(Ok(j)),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut owner: Vec<Option<usize>> = vec![None; t.len()];
    for i in 0..s.len() {
        let mut seen = vec![false; t.len()];
        if !augment(i, &adj, &mut owner, &mut seen) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn augment(i: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].is_none_or(|k| augment(k, adj, owner, seen)) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

/// Largest number of positions or nodes the oracle will enumerate maps over.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// The same relation as [`leq`], decided by enumerating every candidate map
/// at each composite layer. Exponential; guarded by [`BRUTE_FORCE_LIMIT`].
pub fn brute_force_leq(spec: &QoSpec, x: &Element, y: &Element) -> Result<bool> {
    match (spec, x, y) {
        (QoSpec::Finite(_), Element::Atom(_), Element::Atom(_)) => leq(spec, x, y),
        (QoSpec::Union(l, _), Element::Left(a), Element::Left(b)) => brute_force_leq(l, a, b),
        (QoSpec::Union(_, r), Element::Right(a), Element::Right(b)) => brute_force_leq(r, a, b),
        (QoSpec::Union(..), Element::Left(_), Element::Right(_))
        | (QoSpec::Union(..), Element::Right(_), Element::Left(_)) => {
            check_shape(spec, x)?;
            check_shape(spec, y)?;
            Ok(false)
        }
        (QoSpec::Product(l, r), Element::Pair(a1, a2), Element::Pair(b1, b2)) => {
            Ok(brute_force_leq(l, a1, b1)? && brute_force_leq(r, a2, b2)?)
        }
        (QoSpec::Seq(of) | QoSpec::LinOrd(of), Element::Seq(s), Element::Seq(t)) => {
            guard(s.len().max(t.len()))?;
            Ok(!brute_force_higman_witnesses(of, s, t)?.is_empty())
        }
        (QoSpec::FinSet(of), Element::Set(s), Element::Set(t)) => {
            guard(s.len().max(t.len()))?;
            let lab = pair_table(of, s, t)?;
            let mut found = false;
            for_each_map(s.len(), t.len(), &mut |f| {
                found = distinct(f) && f.iter().enumerate().all(|(i, &j)| lab[i][j]);
                found
            });
            Ok(found)
        }
        (QoSpec::Tree1(of) | QoSpec::TreeM(of), Element::Tree(s), Element::Tree(t)) => {
            let injective = matches!(spec, QoSpec::Tree1(_));
            let fs = FlatTree::new(s);
            let ft = FlatTree::new(t);
            guard(fs.len().max(ft.len()))?;
            let lab: Vec<Vec<bool>> = fs
                .labels
                .iter()
                .map(|a| ft.labels.iter().map(|b| brute_force_leq(of, a, b)).collect())
                .collect::<Result<_>>()?;
            let mut found = false;
            for_each_map(fs.len(), ft.len(), &mut |f| {
                found = f.iter().enumerate().all(|(i, &j)| lab[i][j])
                    && if injective {
                        distinct(f)
                            && all_pairs(f.len(), |a, b| !fs.lt(a, b) || ft.lt(f[a], f[b]))
                    } else {
                        all_pairs(f.len(), |a, b| !fs.le(a, b) || ft.le(f[a], f[b]))
                    };
                found
            });
            Ok(found)
        }
        _ => Err(Error::Shape(format!(
            "cannot compare {:?} and {:?} in {}",
            x,
            y,
            spec.describe()
        ))),
    }
}

/// Every strictly increasing `h` with `s[i] <= t[h(i)]`, found by
/// enumerating all index subsets of `t`. Label comparisons use the oracle.
pub fn brute_force_higman_witnesses(
    of: &QoSpec,
    s: &[Element],
    t: &[Element],
) -> Result<Vec<Vec<usize>>> {
    guard(s.len().max(t.len()))?;
    let lab = pair_table(of, s, t)?;
    let mut out = Vec::new();
    for_each_map(s.len(), t.len(), &mut |f| {
        if f.windows(2).all(|w| w[0] < w[1]) && f.iter().enumerate().all(|(i, &j)| lab[i][j]) {
            out.push(f.to_vec());
        }
        false
    });
    Ok(out)
}

fn pair_table(of: &QoSpec, s: &[Element], t: &[Element]) -> Result<Vec<Vec<bool>>> {
    s.iter()
        .map(|a| t.iter().map(|b| brute_force_leq(of, a, b)).collect())
        .collect()
}

fn guard(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_LIMIT {
        Err(Error::SizeGuard(format!(
            "{n} positions exceeds the oracle limit of {BRUTE_FORCE_LIMIT}"
        )))
    } else {
        Ok(())
    }
}

fn distinct(f: &[usize]) -> bool {
    all_pairs(f.len(), |a, b| a == b || f[a] != f[b])
}

fn all_pairs(n: usize, mut ok: impl FnMut(usize, usize) -> bool) -> bool {
    (0..n).all(|a| (0..n).all(|b| ok(a, b)))
}

/// Calls `visit` on every function `0..n -> 0..m` until it returns true.
fn for_each_map(n: usize, m: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    let mut f = vec![0usize; n];
    if n > 0 && m == 0 {
        return;
    }
    loop {
        if visit(&f) {
            return;
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            f[i] += 1;
            if f[i] < m {
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}
