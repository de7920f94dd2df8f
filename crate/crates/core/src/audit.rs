//! Seeded generators of bad UP sequences, audit suites and their reports.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::colorer::{self, linearize, ColorTrace};
use crate::derive::{
    d_infty, d_infty_with_depths, d_once, deriv_profile, derivation_chain, in_b, is_derivable,
    is_stable, witness_extract,
};
use crate::embed::{brute_force_leq, le_finset, le_higman, le_tree_inj, le_tree_mono};
use crate::error::{Error, Result};
use crate::qo::{enumerate_elements, leq, Element, QoSpec, Tree};
use crate::upseq::{entry_time, is_bad, up_nat_json, up_to_json, UpSeq};

/// Size limits for generated sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_pre: usize,
    pub max_per: usize,
    /// Largest [`Element::size`] of any coordinate.
    pub max_size: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_pre: 2,
            max_per: 4,
            max_size: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub input: Value,
    pub property: String,
    pub observed: String,
}

/// Result of one audit suite. The JSON form leaves out the elapsed time so
/// that reports for a fixed seed are byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub suite: String,
    pub spec: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub attempted: usize,
    pub valid: usize,
    pub passed: bool,
    pub violations_total: usize,
    pub violations: Vec<Violation>,
    pub branch_counts: BTreeMap<String, usize>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

/// Reports keep at most this many violations; `violations_total` counts all.
pub const MAX_LISTED_VIOLATIONS: usize = 64;

impl AuditReport {
    fn new(suite: &str, spec: &QoSpec, seed: Option<u64>) -> Self {
        AuditReport {
            suite: suite.to_string(),
            spec: spec.describe(),
            seed,
            attempted: 0,
            valid: 0,
            passed: true,
            violations_total: 0,
            violations: Vec::new(),
            branch_counts: BTreeMap::new(),
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    fn violate(&mut self, input: Value, property: &str, observed: impl Into<String>) {
        self.passed = false;
        self.violations_total += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(Violation {
                input,
                property: property.to_string(),
                observed: observed.into(),
            });
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        self.elapsed_ms = started.elapsed().as_millis();
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn count(&self, property: &str) -> usize {
        self.violations.iter().filter(|v| v.property == property).count()
    }
}

/// Bad-successor graph over all elements of bounded size.
struct Pool {
    elems: Vec<Element>,
    /// `not_leq[i][j]` iff `elems[i] ≰ elems[j]`
    not_leq: Vec<Vec<bool>>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Pool {
    fn new(spec: &QoSpec, max_size: usize) -> Result<Self> {
        let elems = enumerate_elements(spec, max_size);
        let n = elems.len();
        let mut not_leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                not_leq[i][j] = !leq(spec, &elems[i], &elems[j])?;
            }
        }
        let succ = (0..n).map(|i| (0..n).filter(|&j| not_leq[i][j]).collect()).collect();
        let pred = (0..n).map(|j| (0..n).filter(|&i| not_leq[i][j]).collect()).collect();
        Ok(Pool {
            elems,
            not_leq,
            succ,
            pred,
        })
    }

    /// One random candidate: a closed walk of the period, then a backward
    /// walk for the preperiod.
    fn draw(&self, rng: &mut ChaCha8Rng, b: &Bounds) -> Option<UpSeq<Element>> {
        if b.max_per < 2 {
            return None;
        }
        let starts: Vec<usize> = (0..self.elems.len()).filter(|&i| !self.succ[i].is_empty()).collect();
        let len = rng.gen_range(2..=b.max_per);
        let mut per = vec![*starts.choose(rng)?];
        while per.len() < len {
            let last = *per.last().expect("nonempty");
            per.push(*self.succ[last].choose(rng)?);
        }
        if !self.not_leq[*per.last().expect("nonempty")][per[0]] {
            return None;
        }
        let pre_len = rng.gen_range(0..=b.max_pre);
        let mut pre: Vec<usize> = Vec::with_capacity(pre_len);
        let mut head = per[0];
        for _ in 0..pre_len {
            let p = *self.pred[head].choose(rng)?;
            pre.push(p);
            head = p;
        }
        pre.reverse();
        let e = |ix: Vec<usize>| ix.into_iter().map(|i| self.elems[i].clone()).collect();
        UpSeq::new(e(pre), e(per)).ok()
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Up to `count` distinct canonical bad sequences, accepted by `keep`.
/// Attempt `i` draws from its own stream of `seed`, so results depend only
/// on `(seed, count, bounds)`. Returns fewer when draws keep failing.
pub fn gen_bad_where(
    spec: &QoSpec,
    seed: u64,
    count: usize,
    bounds: &Bounds,
    mut keep: impl FnMut(&UpSeq<Element>) -> Result<bool>,
) -> Result<Vec<UpSeq<Element>>> {
    let pool = Pool::new(spec, bounds.max_size)?;
    let budget = 50 * count as u64 + 1_000;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for attempt in 0..budget {
        if out.len() == count {
            break;
        }
        let mut rng = sample_rng(seed, attempt);
        let Some(x) = pool.draw(&mut rng, bounds) else {
            continue;
        };
        if x.pre().len() <= bounds.max_pre
            && is_bad(spec, &x)?
            && !seen.contains(&x)
            && keep(&x)?
        {
            seen.insert(x.clone());
            out.push(x);
        }
    }
    Ok(out)
}

pub fn gen_bad(spec: &QoSpec, seed: u64, count: usize, bounds: &Bounds) -> Result<Vec<UpSeq<Element>>> {
    gen_bad_where(spec, seed, count, bounds, |_| Ok(true))
}

/// Every canonical bad sequence within `bounds`, by exhaustive enumeration
/// of preperiods and periods.
pub fn enumerate_bad(spec: &QoSpec, bounds: &Bounds) -> Result<Vec<UpSeq<Element>>> {
    let elems = enumerate_elements(spec, bounds.max_size);
    let words = |max_len: usize, min_len: usize| -> Vec<Vec<Element>> {
        let mut all: Vec<Vec<Element>> = vec![Vec::new()];
        let mut layer: Vec<Vec<Element>> = vec![Vec::new()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| {
                    elems.iter().map(move |e| {
                        let mut v = w.clone();
                        v.push(e.clone());
                        v
                    })
                })
                .collect();
            all.extend(layer.iter().cloned());
        }
        all.retain(|w| w.len() >= min_len);
        all
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for per in words(bounds.max_per, 1) {
        for pre in words(bounds.max_pre, 0) {
            let x = UpSeq::new(pre, per.clone())?;
            if !seen.contains(&x) && is_bad(spec, &x)? {
                seen.insert(x.clone());
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// A colorer under audit.
pub type ColorFn<'a> = &'a dyn Fn(&QoSpec, &UpSeq<Element>) -> Result<ColorTrace>;

pub fn audit_properness(spec: &QoSpec, seed: u64, count: usize, bounds: &Bounds) -> Result<AuditReport> {
    let samples = gen_bad(spec, seed, count, bounds)?;
    Ok(audit_properness_with(spec, Some(seed), count, &samples, &colorer::color))
}

/// Check color range, properness against the shift, trace replay and
/// independence from the input representation on each sample.
pub fn audit_properness_with(
    spec: &QoSpec,
    seed: Option<u64>,
    attempted: usize,
    samples: &[UpSeq<Element>],
    color: ColorFn,
) -> AuditReport {
    let started = Instant::now();
    let mut r = AuditReport::new("properness", spec, seed);
    r.attempted = attempted;
    r.valid = samples.len();
    for x in samples {
        let lit = up_to_json(spec, x);
        let (cx, cs) = match (color(spec, x), color(spec, &x.shift())) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                let property = match e {
                    Error::WellFoundedness(_) | Error::EmptyPiece(_) | Error::FinsetBadness(_) => {
                        "error-branch-unreachable"
                    }
                    _ => "colorable",
                };
                r.violate(lit, property, e.to_string());
                continue;
            }
        };
        for b in cx.branches() {
            *r.branch_counts.entry(b.to_string()).or_default() += 1;
        }
        if cx.color == cs.color {
            r.violate(lit.clone(), "proper", format!("color(X) = color(shift X) = {}", cx.color));
        }
        if cx.replay() != Some(cx.color) {
            r.violate(lit.clone(), "replay", format!("{:?} vs {}", cx.replay(), cx.color));
        }
        // the same word written with its period unrolled once more
        let mut pre = x.pre().to_vec();
        pre.extend(x.per().iter().cloned());
        let again = UpSeq::new(pre, [x.per(), x.per()].concat()).and_then(|y| color(spec, &y));
        if again.as_ref().map(|t| t.color).ok() != Some(cx.color) {
            r.violate(lit, "deterministic", format!("{again:?}"));
        }
    }
    if samples.is_empty() {
        r.notes.push(
            "no bad sequences within the bounds; expected for well-ordered carriers".to_string(),
        );
    }
    r.finish(started)
}

/// Compare every decider with the brute-force oracle on all pairs of
/// elements up to `bound`.
pub fn audit_oracle_equiv(spec: &QoSpec, bound: usize) -> Result<AuditReport> {
    let started = Instant::now();
    let mut r = AuditReport::new("oracle", spec, None);
    let elems = enumerate_elements(spec, bound);
    r.notes.push(format!("{} elements of size <= {bound}", elems.len()));
    for x in &elems {
        for y in &elems {
            r.attempted += 1;
            let fast = leq(spec, x, y)?;
            let slow = brute_force_leq(spec, x, y)?;
            r.valid += 1;
            if fast != slow {
                r.violate(
                    json!([crate::qo::element_to_json(spec, x), crate::qo::element_to_json(spec, y)]),
                    "decider = oracle",
                    format!("decider {fast}, oracle {slow}"),
                );
            }
        }
    }
    Ok(r.finish(started))
}

/// Shift identities and output properties of the derivative machinery on
/// generated bad sequences with nondecreasing lengths.
pub fn audit_identities(spec: &QoSpec, seed: u64, count: usize, bounds: &Bounds) -> Result<AuditReport> {
    let of = match spec {
        QoSpec::Seq(of) | QoSpec::LinOrd(of) => of.as_ref(),
        _ => return Err(Error::Unsupported(format!("identity suite needs a sequence order, got {}", spec.describe()))),
    };
    let started = Instant::now();
    let samples = gen_bad_where(spec, seed, count, bounds, in_b)?;
    let mut r = AuditReport::new("identities", spec, Some(seed));
    r.attempted = count;
    r.valid = samples.len();
    for x in &samples {
        let lit = up_to_json(spec, x);
        for (property, outcome) in identity_checks(spec, of, x) {
            match outcome {
                Ok(true) => *r.branch_counts.entry(property.to_string()).or_default() += 1,
                Ok(false) => r.violate(lit.clone(), property, "does not hold"),
                Err(e) => r.violate(lit.clone(), property, e.to_string()),
            }
        }
    }
    Ok(r.finish(started))
}

/// Named checks on one sample; each entry is `(property, holds)`. Checks
/// whose hypothesis fails for this sample are omitted.
pub fn identity_checks(seq: &QoSpec, of: &QoSpec, x: &UpSeq<Element>) -> Vec<(&'static str, Result<bool>)> {
    let mut out: Vec<(&'static str, Result<bool>)> = Vec::new();
    let sx = x.shift();
    out.push(("profile-shift", (|| {
        let (p, q) = (deriv_profile(of, x)?, deriv_profile(of, &sx)?);
        Ok(q.m == p.m.shift() && q.n == p.n.shift())
    })()));
    out.push(("m-below-length", (|| {
        let p = deriv_profile(of, x)?;
        Ok((0..x.window()).all(|k| p.m.at(k) <= p.n.at(k) && *p.m.at(k) < x.at(k).seq_len()))
    })()));
    if matches!(is_derivable(of, x), Ok(true)) {
        out.push(("d-once-shift", (|| Ok(d_once(of, &sx)? == d_once(of, x)?.shift()))()));
        out.push(("d-once-bad-in-b", (|| {
            let d = d_once(of, x)?;
            Ok(is_bad(seq, &d)? && in_b(&d)?)
        })()));
    }
    out.push(("derivation-lengths-decrease", (|| {
        let chain = derivation_chain(of, x)?;
        Ok(chain.windows(2).all(|w| w[1].at(0).seq_len() < w[0].at(0).seq_len()))
    })()));
    out.push(("derivability-shift-monotone", (|| {
        Ok(derivation_chain(of, &sx)?.len() >= derivation_chain(of, x)?.len())
    })()));
    let z = d_infty(of, x);
    out.push(("d-infty-shift", (|| Ok(d_infty(of, &sx)? == z.clone()?.shift()))()));
    out.push(("d-infty-stable", (|| is_stable(of, &z.clone()?))()));
    out.push(("d-infty-eventually-stable", (|| {
        let z = z.clone()?;
        Ok(entry_time(&z, |y| is_stable(of, y))?.is_some())
    })()));
    out.push(("d-infty-idempotent", (|| {
        let z = z.clone()?;
        Ok(d_infty(of, &z)? == z)
    })()));
    if let Ok(z) = &z {
        if let Ok(y) = witness_extract(of, z) {
            out.push(("witness-bad", is_bad(of, &y)));
            out.push(("witness-shift", (|| Ok(witness_extract(of, &z.shift())? == y.shift()))()));
        }
    }
    out
}

/// Which way a tree pair breaks linearization monotonicity.
pub const FORWARD: &str = "s <=1 t implies lin(s) <=H lin(t)";
pub const REVERSE: &str = "s !<=1 t implies lin(s) !<=H lin(t)";

/// Check both directions of linearization monotonicity on all pairs of
/// `of`-labeled trees with at most `node_bound` nodes. Each violation is
/// confirmed with the brute-force oracle before it is reported.
pub fn audit_linearization(of: &QoSpec, node_bound: usize) -> Result<AuditReport> {
    let started = Instant::now();
    let tree_spec = QoSpec::tree1(of.clone());
    let seq_spec = QoSpec::seq(of.clone());
    let mut r = AuditReport::new("linearization", &tree_spec, None);
    let trees: Vec<Element> = enumerate_elements(&tree_spec, node_bound)
        .into_iter()
        .filter(|t| matches!(t, Element::Tree(t) if t.node_count() <= node_bound))
        .collect();
    let lins: Vec<Vec<Element>> = trees.iter().map(|t| linearize(as_tree(t))).collect();
    r.notes.push(format!("{} trees with <= {node_bound} nodes", trees.len()));
    let mut forward = 0usize;
    let mut reverse = 0usize;
    for (i, s) in trees.iter().enumerate() {
        for (j, t) in trees.iter().enumerate() {
            r.attempted += 1;
            let tree_le = le_tree_inj(of, as_tree(s), as_tree(t))?.holds();
            let lin_le = le_higman(of, &lins[i], &lins[j])?.holds();
            if tree_le == lin_le {
                continue;
            }
            let confirmed = brute_force_leq(&tree_spec, s, t)? == tree_le
                && brute_force_leq(&seq_spec, &Element::Seq(lins[i].clone()), &Element::Seq(lins[j].clone()))? == lin_le;
            if !confirmed {
                return Err(Error::Invalid("decider disagrees with oracle during linearization audit".into()));
            }
            let input = json!({
                "s": crate::qo::element_to_json(&tree_spec, s),
                "t": crate::qo::element_to_json(&tree_spec, t),
                "lin_s": crate::qo::element_to_json(&seq_spec, &Element::Seq(lins[i].clone())),
                "lin_t": crate::qo::element_to_json(&seq_spec, &Element::Seq(lins[j].clone())),
            });
            if tree_le {
                forward += 1;
                r.violate(input, FORWARD, "s <=1 t but lin(s) !<=H lin(t)");
            } else {
                reverse += 1;
                r.violate(input, REVERSE, "s !<=1 t but lin(s) <=H lin(t)");
            }
        }
    }
    r.valid = r.attempted;
    r.branch_counts.insert("forward-violations".into(), forward);
    r.branch_counts.insert("reverse-violations".into(), reverse);
    Ok(r.finish(started))
}

fn as_tree(e: &Element) -> &Tree {
    match e {
        Element::Tree(t) => t,
        _ => unreachable!("tree spec enumerates trees"),
    }
}

/// Check the composite deciders used by the oracle audit on one pair, with
/// witnesses where the relation has them. Used by the CLI `check` command.
pub fn check_pair(spec: &QoSpec, x: &Element, y: &Element) -> Result<Value> {
    let witness = match (spec, x, y) {
        (QoSpec::Seq(of) | QoSpec::LinOrd(of), Element::Seq(s), Element::Seq(t)) => le_higman(of, s, t)?.witness,
        (QoSpec::Tree1(of), Element::Tree(s), Element::Tree(t)) => le_tree_inj(of, s, t)?.witness,
        (QoSpec::TreeM(of), Element::Tree(s), Element::Tree(t)) => le_tree_mono(of, s, t)?.witness,
        (QoSpec::FinSet(of), Element::Set(s), Element::Set(t)) => {
            return Ok(json!({ "leq": le_finset(of, s, t)?, "witness": null }));
        }
        _ => return Ok(json!({ "leq": leq(spec, x, y)?, "witness": null })),
    };
    Ok(json!({ "leq": witness.is_some(), "witness": witness }))
}

/// Full derivative chain of a bad sequence with nondecreasing lengths over
/// `Seq(of)`, as printed by the CLI `derive` command.
pub fn derive_report(spec: &QoSpec, x: &UpSeq<Element>) -> Result<Value> {
    let of = match spec {
        QoSpec::Seq(of) | QoSpec::LinOrd(of) => of.as_ref(),
        _ => return Err(Error::Unsupported(format!("derive needs a sequence order, got {}", spec.describe()))),
    };
    if !is_bad(spec, x)? {
        return Err(Error::NotBad(format!("{x:?}")));
    }
    let profile = deriv_profile(of, x)?;
    let chain = derivation_chain(of, x)?;
    let (z, depths) = d_infty_with_depths(of, x)?;
    let witness = witness_extract(of, &z).ok();
    let cx = colorer::color(spec, x)?;
    let cs = colorer::color(spec, &x.shift())?;
    Ok(json!({
        "input": up_to_json(spec, x),
        "profile": profile.to_json(),
        "chain": chain.iter().map(|c| up_to_json(spec, c)).collect::<Vec<_>>(),
        "max_derivability": chain.len() - 1,
        "depths": up_nat_json(&depths),
        "d_infty": up_to_json(spec, &z),
        "witness": witness.map(|w| up_to_json(of, &w)),
        "color": cx.color,
        "shift_color": cs.color,
        "trace": cx.trace,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qo::FiniteOrder;

    fn a2() -> QoSpec {
        QoSpec::finite(FiniteOrder::antichain(&["a", "b"]))
    }

    #[test]
    fn antichain_two_cycles_are_found() {
        let b = Bounds { max_pre: 0, max_per: 2, max_size: 1 };
        let mut got = gen_bad(&a2(), 7, 10, &b).unwrap();
        got.sort_by_key(|x| x.per().to_vec());
        let want: Vec<UpSeq<Element>> = [[0, 1], [1, 0]]
            .iter()
            .map(|p| UpSeq::new(vec![], p.iter().map(|&i| Element::Atom(i)).collect()).unwrap())
            .collect();
        assert_eq!(got, want);
        assert_eq!(enumerate_bad(&a2(), &b).unwrap().len(), 2);
    }

    #[test]
    fn chains_have_no_bad_cycles() {
        let c2 = QoSpec::finite(FiniteOrder::chain(&["a", "b"]));
        assert!(gen_bad(&c2, 1, 20, &Bounds::default()).unwrap().is_empty());
        let r = audit_properness(&c2, 1, 20, &Bounds::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.valid, 0);
        assert_eq!(r.notes.len(), 1);
    }

    #[test]
    fn generation_is_deterministic() {
        let s = QoSpec::seq(a2());
        let b = Bounds::default();
        assert_eq!(gen_bad(&s, 3, 50, &b).unwrap(), gen_bad(&s, 3, 50, &b).unwrap());
        for x in gen_bad(&s, 3, 50, &b).unwrap() {
            assert!(is_bad(&s, &x).unwrap());
            assert_eq!(UpSeq::new(x.pre().to_vec(), x.per().to_vec()).unwrap(), x);
        }
    }

    #[test]
    fn broken_colorer_is_caught() {
        let samples = gen_bad(&a2(), 1, 10, &Bounds::default()).unwrap();
        let broken = |spec: &QoSpec, x: &UpSeq<Element>| {
            let mut t = colorer::color(spec, x)?;
            if x.pre().is_empty() {
                t.color = crate::shiftgraph::Color::new(0)?;
            }
            Ok(t)
        };
        let r = audit_properness_with(&a2(), None, 10, &samples, &broken);
        assert!(!r.passed);
        assert!(r.count("proper") >= 1);
    }

    #[test]
    fn check_pair_reports_witness() {
        let s = QoSpec::seq(a2());
        let v = check_pair(&s, &Element::atoms(&[0]), &Element::atoms(&[1, 0])).unwrap();
        assert_eq!(v, json!({"leq": true, "witness": [[0, 1]]}));
    }
}
