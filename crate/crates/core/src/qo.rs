//! Quasi-order specifications and their carriers.
//!
//! A [`QoSpec`] is a finite constructor tree. Leaves are finite tables; inner
//! nodes build disjoint unions, products, finite sequences under the Higman
//! order, finite labeled trees (under `<=_1` or `<=_m`), finite sets under the
//! domination order and finite labeled linear orders.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::embed;
use crate::error::{Error, Result};

/// A finite quasi-order given by its `leq` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteOrder {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl FiniteOrder {
    pub fn new(names: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Invalid(format!("duplicate atom name {name:?}")));
            }
        }
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!(
                "leq table must be {n}x{n} for {n} atoms"
            )));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::NotReflexive(names[i].clone()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !leq[i][j] {
                    continue;
                }
                for k in 0..n {
                    if leq[j][k] && !leq[i][k] {
                        return Err(Error::NotTransitive(
                            names[i].clone(),
                            names[j].clone(),
                            names[k].clone(),
                        ));
                    }
                }
            }
        }
        Ok(Self { names, leq })
    }

    pub fn antichain(names: &[&str]) -> Self {
        let n = names.len();
        let leq = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        Self::new(names.iter().map(|s| s.to_string()).collect(), leq)
            .expect("antichain is a quasi-order")
    }

    /// The chain `names[0] < names[1] < ...`.
    pub fn chain(names: &[&str]) -> Self {
        let n = names.len();
        let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        Self::new(names.iter().map(|s| s.to_string()).collect(), leq)
            .expect("chain is a quasi-order")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Constructor tree describing a quasi-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QoSpec {
    Finite(FiniteOrder),
    Union(Box<QoSpec>, Box<QoSpec>),
    Product(Box<QoSpec>, Box<QoSpec>),
    Seq(Box<QoSpec>),
    Tree1(Box<QoSpec>),
    TreeM(Box<QoSpec>),
    FinSet(Box<QoSpec>),
    LinOrd(Box<QoSpec>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SpecDoc {
    Finite {
        names: Vec<String>,
        leq: Vec<Vec<bool>>,
    },
    Union {
        left: Box<SpecDoc>,
        right: Box<SpecDoc>,
    },
    Product {
        left: Box<SpecDoc>,
        right: Box<SpecDoc>,
    },
    Seq {
        of: Box<SpecDoc>,
    },
    Tree1 {
        of: Box<SpecDoc>,
    },
    Treem {
        of: Box<SpecDoc>,
    },
    Finset {
        of: Box<SpecDoc>,
    },
    Linord {
        of: Box<SpecDoc>,
    },
}

impl SpecDoc {
    fn into_spec(self) -> Result<QoSpec> {
        let b = |d: Box<SpecDoc>| d.into_spec().map(Box::new);
        Ok(match self {
            SpecDoc::Finite { names, leq } => QoSpec::Finite(FiniteOrder::new(names, leq)?),
            SpecDoc::Union { left, right } => QoSpec::Union(b(left)?, b(right)?),
            SpecDoc::Product { left, right } => QoSpec::Product(b(left)?, b(right)?),
            SpecDoc::Seq { of } => QoSpec::Seq(b(of)?),
            SpecDoc::Tree1 { of } => QoSpec::Tree1(b(of)?),
            SpecDoc::Treem { of } => QoSpec::TreeM(b(of)?),
            SpecDoc::Finset { of } => QoSpec::FinSet(b(of)?),
            SpecDoc::Linord { of } => QoSpec::LinOrd(b(of)?),
        })
    }

    fn from_spec(spec: &QoSpec) -> Self {
        let b = |s: &QoSpec| Box::new(SpecDoc::from_spec(s));
        match spec {
            QoSpec::Finite(f) => SpecDoc::Finite {
                names: f.names.clone(),
                leq: f.leq.clone(),
            },
            QoSpec::Union(l, r) => SpecDoc::Union {
                left: b(l),
                right: b(r),
            },
            QoSpec::Product(l, r) => SpecDoc::Product {
                left: b(l),
                right: b(r),
            },
            QoSpec::Seq(of) => SpecDoc::Seq { of: b(of) },
            QoSpec::Tree1(of) => SpecDoc::Tree1 { of: b(of) },
            QoSpec::TreeM(of) => SpecDoc::Treem { of: b(of) },
            QoSpec::FinSet(of) => SpecDoc::Finset { of: b(of) },
            QoSpec::LinOrd(of) => SpecDoc::Linord { of: b(of) },
        }
    }
}

/// Parse and validate a JSON spec document.
pub fn parse_spec(text: &str) -> Result<QoSpec> {
    let doc: SpecDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_spec()
}

impl QoSpec {
    pub fn finite(order: FiniteOrder) -> Self {
        QoSpec::Finite(order)
    }

    pub fn union(left: QoSpec, right: QoSpec) -> Self {
        QoSpec::Union(Box::new(left), Box::new(right))
    }

    pub fn product(left: QoSpec, right: QoSpec) -> Self {
        QoSpec::Product(Box::new(left), Box::new(right))
    }

    pub fn seq(of: QoSpec) -> Self {
        QoSpec::Seq(Box::new(of))
    }

    pub fn tree1(of: QoSpec) -> Self {
        QoSpec::Tree1(Box::new(of))
    }

    pub fn treem(of: QoSpec) -> Self {
        QoSpec::TreeM(Box::new(of))
    }

    pub fn finset(of: QoSpec) -> Self {
        QoSpec::FinSet(Box::new(of))
    }

    pub fn linord(of: QoSpec) -> Self {
        QoSpec::LinOrd(Box::new(of))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            QoSpec::Finite(_) => "finite",
            QoSpec::Union(..) => "union",
            QoSpec::Product(..) => "product",
            QoSpec::Seq(_) => "seq",
            QoSpec::Tree1(_) => "tree1",
            QoSpec::TreeM(_) => "treem",
            QoSpec::FinSet(_) => "finset",
            QoSpec::LinOrd(_) => "linord",
        }
    }

    /// Label spec of a unary constructor.
    pub fn inner(&self) -> Option<&QoSpec> {
        match self {
            QoSpec::Seq(of)
            | QoSpec::Tree1(of)
            | QoSpec::TreeM(of)
            | QoSpec::FinSet(of)
            | QoSpec::LinOrd(of) => Some(of),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(SpecDoc::from_spec(self)).expect("spec serializes")
    }

    /// Short human-readable description, e.g. `seq(finite{a,b})`.
    pub fn describe(&self) -> String {
        match self {
            QoSpec::Finite(f) => format!("finite{{{}}}", f.names.join(",")),
            QoSpec::Union(l, r) => format!("union({},{})", l.describe(), r.describe()),
            QoSpec::Product(l, r) => format!("product({},{})", l.describe(), r.describe()),
            other => format!(
                "{}({})",
                other.kind(),
                other.inner().expect("unary constructor").describe()
            ),
        }
    }
}

/// A finite labeled tree. Children are unordered; [`normalize`] sorts them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    pub label: Box<Element>,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: Element) -> Self {
        Tree {
            label: Box::new(label),
            children: Vec::new(),
        }
    }

    pub fn node(label: Element, children: Vec<Tree>) -> Self {
        Tree {
            label: Box::new(label),
            children,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Tree::node_count).sum::<usize>()
    }
}

/// A value of some spec's carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Atom(usize),
    Left(Box<Element>),
    Right(Box<Element>),
    Pair(Box<Element>, Box<Element>),
    Seq(Vec<Element>),
    Tree(Tree),
    Set(Vec<Element>),
}

impl Element {
    pub fn left(x: Element) -> Self {
        Element::Left(Box::new(x))
    }

    pub fn right(x: Element) -> Self {
        Element::Right(Box::new(x))
    }

    pub fn pair(a: Element, b: Element) -> Self {
        Element::Pair(Box::new(a), Box::new(b))
    }

    pub fn atoms(ix: &[usize]) -> Self {
        Element::Seq(ix.iter().map(|&i| Element::Atom(i)).collect())
    }

    pub fn as_seq(&self) -> Option<&[Element]> {
        match self {
            Element::Seq(v) => Some(v),
            _ => None,
        }
    }

    /// Sequence length; `0` for non-sequences.
    pub fn seq_len(&self) -> usize {
        self.as_seq().map_or(0, <[Element]>::len)
    }

    /// Recursive size. Atoms weigh 1; containers weigh the sum of their
    /// parts but at least 1, so every carrier has finitely many elements of
    /// each size.
    pub fn size(&self) -> usize {
        match self {
            Element::Atom(_) => 1,
            Element::Left(x) | Element::Right(x) => x.size(),
            Element::Pair(a, b) => a.size() + b.size(),
            Element::Seq(v) | Element::Set(v) => v.iter().map(Element::size).sum::<usize>().max(1),
            Element::Tree(t) => tree_size(t),
        }
    }

    /// Prefix-free byte encoding; see [`canonical_encode`].
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_into(&mut out);
        out
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            Element::Atom(i) => {
                out.push(0);
                out.extend_from_slice(&(*i as u32).to_be_bytes());
            }
            Element::Left(x) => {
                out.push(1);
                x.encode_into(out);
            }
            Element::Right(x) => {
                out.push(2);
                x.encode_into(out);
            }
            Element::Pair(a, b) => {
                out.push(3);
                a.encode_into(out);
                b.encode_into(out);
            }
            Element::Seq(v) => {
                out.push(4);
                encode_list(v, out);
            }
            Element::Tree(t) => {
                out.push(5);
                encode_tree(t, out);
            }
            Element::Set(v) => {
                out.push(6);
                encode_list(v, out);
            }
        }
    }
}

fn tree_size(t: &Tree) -> usize {
    t.label.size() + t.children.iter().map(tree_size).sum::<usize>()
}

fn encode_list(v: &[Element], out: &mut Vec<u8>) {
    out.extend_from_slice(&(v.len() as u32).to_be_bytes());
    for x in v {
        x.encode_into(out);
    }
}

fn encode_tree(t: &Tree, out: &mut Vec<u8>) {
    t.label.encode_into(out);
    out.extend_from_slice(&(t.children.len() as u32).to_be_bytes());
    for c in &t.children {
        encode_tree(c, out);
    }
}

/// Length-lexicographic comparison of canonical encodings.
pub fn encoding_cmp(a: &[u8], b: &[u8]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// The fixed well-order on every carrier: length-lex on [`canonical_encode`].
impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        encoding_cmp(&self.encode(), &other.encode())
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        encode_tree(self, &mut a);
        encode_tree(other, &mut b);
        encoding_cmp(&a, &b)
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Injective, deterministic encoding of `x`. Elements are normalized first
/// so that equal sets and isomorphic unordered trees share one encoding.
pub fn canonical_encode(spec: &QoSpec, x: &Element) -> Result<Vec<u8>> {
    check_shape(spec, x)?;
    Ok(normalize(x).encode())
}

/// Sort set members and tree children into canonical order (dropping
/// duplicate set members).
pub fn normalize(x: &Element) -> Element {
    match x {
        Element::Atom(_) => x.clone(),
        Element::Left(y) => Element::left(normalize(y)),
        Element::Right(y) => Element::right(normalize(y)),
        Element::Pair(a, b) => Element::pair(normalize(a), normalize(b)),
        Element::Seq(v) => Element::Seq(v.iter().map(normalize).collect()),
        Element::Tree(t) => Element::Tree(normalize_tree(t)),
        Element::Set(v) => {
            let mut v: Vec<Element> = v.iter().map(normalize).collect();
            v.sort();
            v.dedup();
            Element::Set(v)
        }
    }
}

fn normalize_tree(t: &Tree) -> Tree {
    let mut children: Vec<Tree> = t.children.iter().map(normalize_tree).collect();
    children.sort();
    Tree::node(normalize(&t.label), children)
}

/// Verify that `x` has the shape required by `spec`.
pub fn check_shape(spec: &QoSpec, x: &Element) -> Result<()> {
    let bad = || Err(Error::Shape(format!("{:?} is not an element of {}", x, spec.describe())));
    match (spec, x) {
        (QoSpec::Finite(f), Element::Atom(i)) if *i < f.len() => Ok(()),
        (QoSpec::Union(l, _), Element::Left(y)) => check_shape(l, y),
        (QoSpec::Union(_, r), Element::Right(y)) => check_shape(r, y),
        (QoSpec::Product(l, r), Element::Pair(a, b)) => {
            check_shape(l, a)?;
            check_shape(r, b)
        }
        (QoSpec::Seq(of) | QoSpec::LinOrd(of), Element::Seq(v)) => {
            v.iter().try_for_each(|y| check_shape(of, y))
        }
        (QoSpec::Tree1(of) | QoSpec::TreeM(of), Element::Tree(t)) => check_tree_shape(of, t),
        (QoSpec::FinSet(of), Element::Set(v)) => {
            v.iter().try_for_each(|y| check_shape(of, y))?;
            let distinct: BTreeSet<Vec<u8>> = v.iter().map(|y| normalize(y).encode()).collect();
            if distinct.len() != v.len() {
                return Err(Error::Shape("finite set has repeated members".into()));
            }
            Ok(())
        }
        _ => bad(),
    }
}

fn check_tree_shape(of: &QoSpec, t: &Tree) -> Result<()> {
    check_shape(of, &t.label)?;
    t.children.iter().try_for_each(|c| check_tree_shape(of, c))
}

/// Whether `x <= y` in the order described by `spec`.
pub fn leq(spec: &QoSpec, x: &Element, y: &Element) -> Result<bool> {
    match (spec, x, y) {
        (QoSpec::Finite(f), Element::Atom(a), Element::Atom(b)) if *a < f.len() && *b < f.len() => {
            Ok(f.leq(*a, *b))
        }
        (QoSpec::Union(l, _), Element::Left(a), Element::Left(b)) => leq(l, a, b),
        (QoSpec::Union(_, r), Element::Right(a), Element::Right(b)) => leq(r, a, b),
        (QoSpec::Union(l, r), Element::Left(a), Element::Right(b))
        | (QoSpec::Union(l, r), Element::Right(b), Element::Left(a)) => {
            check_shape(l, a)?;
            check_shape(r, b)?;
            Ok(false)
        }
        (QoSpec::Product(l, r), Element::Pair(a1, a2), Element::Pair(b1, b2)) => {
            Ok(leq(l, a1, b1)? && leq(r, a2, b2)?)
        }
        (QoSpec::Seq(of) | QoSpec::LinOrd(of), Element::Seq(s), Element::Seq(t)) => {
            Ok(embed::le_higman(of, s, t)?.holds())
        }
        (QoSpec::Tree1(of), Element::Tree(s), Element::Tree(t)) => {
            Ok(embed::le_tree_inj(of, s, t)?.holds())
        }
        (QoSpec::TreeM(of), Element::Tree(s), Element::Tree(t)) => {
            Ok(embed::le_tree_mono(of, s, t)?.holds())
        }
        (QoSpec::FinSet(of), Element::Set(s), Element::Set(t)) => embed::le_finset(of, s, t),
        _ => Err(Error::Shape(format!(
            "cannot compare {:?} and {:?} in {}",
            x,
            y,
            spec.describe()
        ))),
    }
}

/// All elements of size at most `size_bound`, sorted by canonical encoding.
pub fn enumerate_elements(spec: &QoSpec, size_bound: usize) -> Vec<Element> {
    let mut out: Vec<Element> = (1..=size_bound)
        .flat_map(|n| elements_of_size(spec, n))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Elements of size exactly `n`, normalized, possibly with duplicates.
fn elements_of_size(spec: &QoSpec, n: usize) -> Vec<Element> {
    if n == 0 {
        return Vec::new();
    }
    match spec {
        QoSpec::Finite(f) => {
            if n == 1 {
                (0..f.len()).map(Element::Atom).collect()
            } else {
                Vec::new()
            }
        }
        QoSpec::Union(l, r) => elements_of_size(l, n)
            .into_iter()
            .map(Element::left)
            .chain(elements_of_size(r, n).into_iter().map(Element::right))
            .collect(),
        QoSpec::Product(l, r) => {
            let mut out = Vec::new();
            for k in 1..n {
                let rights = elements_of_size(r, n - k);
                for a in elements_of_size(l, k) {
                    for b in &rights {
                        out.push(Element::pair(a.clone(), b.clone()));
                    }
                }
            }
            out
        }
        QoSpec::Seq(of) | QoSpec::LinOrd(of) => {
            let mut out: Vec<Element> = compositions(of, n).into_iter().map(Element::Seq).collect();
            if n == 1 {
                out.push(Element::Seq(Vec::new()));
            }
            out
        }
        QoSpec::FinSet(of) => {
            let mut out: Vec<Element> = compositions(of, n)
                .into_iter()
                .filter_map(|v| {
                    let mut sorted = v.clone();
                    sorted.sort();
                    // keep strictly increasing lists only: one per set
                    (sorted == v && v.windows(2).all(|w| w[0] != w[1])).then_some(Element::Set(v))
                })
                .collect();
            if n == 1 {
                out.push(Element::Set(Vec::new()));
            }
            out
        }
        QoSpec::Tree1(of) | QoSpec::TreeM(of) => {
            trees_of_size(of, n).into_iter().map(Element::Tree).collect()
        }
    }
}

/// Lists of elements of `of` whose sizes sum to exactly `n`.
fn compositions(of: &QoSpec, n: usize) -> Vec<Vec<Element>> {
    let mut table: Vec<Vec<Vec<Element>>> = vec![vec![Vec::new()]];
    for total in 1..=n {
        let mut here = Vec::new();
        for first in 1..=total {
            let heads = elements_of_size(of, first);
            if heads.is_empty() {
                continue;
            }
            for tail in &table[total - first] {
                for h in &heads {
                    let mut v = Vec::with_capacity(tail.len() + 1);
                    v.push(h.clone());
                    v.extend(tail.iter().cloned());
                    here.push(v);
                }
            }
        }
        table.push(here);
    }
    table.pop().unwrap_or_default()
}

/// Normalized trees whose label sizes sum to exactly `n`.
fn trees_of_size(of: &QoSpec, n: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    for label_size in 1..=n {
        let labels = elements_of_size(of, label_size);
        if labels.is_empty() {
            continue;
        }
        for children in forests_of_size(of, n - label_size) {
            for l in &labels {
                out.push(Tree::node(l.clone(), children.clone()));
            }
        }
    }
    out
}

/// Multisets of normalized trees (sorted lists) with total size `n`.
fn forests_of_size(of: &QoSpec, n: usize) -> Vec<Vec<Tree>> {
    fn go(of: &QoSpec, n: usize, min: Option<&Tree>, out: &mut Vec<Vec<Tree>>, acc: &mut Vec<Tree>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for first in 1..=n {
            for t in trees_of_size(of, first) {
                if min.is_some_and(|m| t < *m) {
                    continue;
                }
                acc.push(t.clone());
                go(of, n - first, Some(&t), out, acc);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(of, n, None, &mut out, &mut Vec::new());
    out
}

/// Parse an element literal against `spec`. Atom names are strings; composite
/// values use `{"L":..}`, `{"R":..}`, `{"pair":[..,..]}`, `{"seq":[..]}`,
/// `{"tree":{"label":..,"children":[..]}}` and `{"set":[..]}`.
pub fn element_from_json(spec: &QoSpec, v: &Value) -> Result<Element> {
    let x = raw_element(spec, v)?;
    check_shape(spec, &x)?;
    Ok(normalize(&x))
}

fn single_key<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    match v {
        Value::Object(m) if m.len() == 1 => m.get(key),
        _ => None,
    }
}

fn raw_element(spec: &QoSpec, v: &Value) -> Result<Element> {
    let err = |what: &str| Error::Parse(format!("expected {what} for {}, got {v}", spec.describe()));
    match spec {
        QoSpec::Finite(f) => {
            let name = v.as_str().ok_or_else(|| err("an atom name"))?;
            f.index_of(name)
                .map(Element::Atom)
                .ok_or_else(|| Error::Parse(format!("unknown atom {name:?}")))
        }
        QoSpec::Union(l, r) => {
            if let Some(inner) = single_key(v, "L") {
                Ok(Element::left(raw_element(l, inner)?))
            } else if let Some(inner) = single_key(v, "R") {
                Ok(Element::right(raw_element(r, inner)?))
            } else {
                Err(err("{\"L\":..} or {\"R\":..}"))
            }
        }
        QoSpec::Product(l, r) => {
            let items = single_key(v, "pair")
                .and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .ok_or_else(|| err("{\"pair\":[x,y]}"))?;
            Ok(Element::pair(raw_element(l, &items[0])?, raw_element(r, &items[1])?))
        }
        QoSpec::Seq(of) | QoSpec::LinOrd(of) => {
            let items = single_key(v, "seq")
                .and_then(Value::as_array)
                .ok_or_else(|| err("{\"seq\":[..]}"))?;
            Ok(Element::Seq(
                items.iter().map(|i| raw_element(of, i)).collect::<Result<_>>()?,
            ))
        }
        QoSpec::FinSet(of) => {
            let items = single_key(v, "set")
                .and_then(Value::as_array)
                .ok_or_else(|| err("{\"set\":[..]}"))?;
            Ok(Element::Set(
                items.iter().map(|i| raw_element(of, i)).collect::<Result<_>>()?,
            ))
        }
        QoSpec::Tree1(of) | QoSpec::TreeM(of) => {
            let body = single_key(v, "tree").ok_or_else(|| err("{\"tree\":{..}}"))?;
            Ok(Element::Tree(raw_tree(of, body)?))
        }
    }
}

fn raw_tree(of: &QoSpec, v: &Value) -> Result<Tree> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("tree node must be an object, got {v}")))?;
    let label = obj
        .get("label")
        .ok_or_else(|| Error::Parse("tree node without label".into()))?;
    let children = match obj.get("children") {
        None => Vec::new(),
        Some(Value::Array(cs)) => cs
            .iter()
            .map(|c| raw_tree(of, single_key(c, "tree").unwrap_or(c)))
            .collect::<Result<_>>()?,
        Some(other) => return Err(Error::Parse(format!("children must be a list, got {other}"))),
    };
    Ok(Tree::node(raw_element(of, label)?, children))
}

/// Render an element as a literal accepted by [`element_from_json`].
pub fn element_to_json(spec: &QoSpec, x: &Element) -> Value {
    match (spec, x) {
        (QoSpec::Finite(f), Element::Atom(i)) => json!(f.names()[*i]),
        (QoSpec::Union(l, _), Element::Left(y)) => json!({ "L": element_to_json(l, y) }),
        (QoSpec::Union(_, r), Element::Right(y)) => json!({ "R": element_to_json(r, y) }),
        (QoSpec::Product(l, r), Element::Pair(a, b)) => {
            json!({ "pair": [element_to_json(l, a), element_to_json(r, b)] })
        }
        (QoSpec::Seq(of) | QoSpec::LinOrd(of), Element::Seq(v)) => {
            json!({ "seq": v.iter().map(|y| element_to_json(of, y)).collect::<Vec<_>>() })
        }
        (QoSpec::FinSet(of), Element::Set(v)) => {
            json!({ "set": v.iter().map(|y| element_to_json(of, y)).collect::<Vec<_>>() })
        }
        (QoSpec::Tree1(of) | QoSpec::TreeM(of), Element::Tree(t)) => {
            json!({ "tree": tree_to_json(of, t) })
        }
        // shape mismatches are rejected before rendering; keep a debug form
        _ => Value::String(format!("{x:?}")),
    }
}

fn tree_to_json(of: &QoSpec, t: &Tree) -> Value {
    let mut m = Map::new();
    m.insert("label".into(), element_to_json(of, &t.label));
    m.insert(
        "children".into(),
        Value::Array(t.children.iter().map(|c| json!({ "tree": tree_to_json(of, c) })).collect()),
    );
    Value::Object(m)
}
