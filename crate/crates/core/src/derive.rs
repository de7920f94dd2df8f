//! Derivatives of bad sequences over a Higman order.
//!
//! For `X` with nondecreasing lengths (the set `B`), `m_k` is the longest
//! prefix of `X(k)` that embeds into `X(k+1)` and `n_k` the least end of
//! `X(k+1)` that still receives that prefix. When the profile satisfies
//! `m_k <= m_(k+1) < n_k <= n_(k+1)` everywhere, `X` is derivable and `∂X`
//! truncates each coordinate to `m_k`. Iterating to a fixed depth per shift
//! gives `∂^∞`, whose image has no derivable shift.
//!
//! All functions take the label spec `of` of the sequence order, and treat
//! `X↾m` as coordinates `0..m`.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qo::{leq, Element, QoSpec};
use crate::upseq::{is_bad, up_nat_json, UpSeq};

/// Per-index `(m_k, n_k)`, both ultimately periodic in `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivProfile {
    pub m: UpSeq<usize>,
    pub n: UpSeq<usize>,
}

impl DerivProfile {
    pub fn to_json(&self) -> Value {
        json!({ "m": up_nat_json(&self.m), "n": up_nat_json(&self.n) })
    }
}

fn items(x: &Element) -> Result<&[Element]> {
    x.as_seq()
        .ok_or_else(|| Error::Shape(format!("{x:?} is not a finite sequence")))
}

/// `(m, n)` for the pair `s`, `t`: the longest embeddable prefix of `s` and
/// the least end of `t` receiving it. One greedy pass gives both.
pub fn pair_mn(of: &QoSpec, s: &[Element], t: &[Element]) -> Result<(usize, usize)> {
    let (mut m, mut n) = (0, 0);
    for x in s {
        let mut hit = None;
        for (j, y) in t.iter().enumerate().skip(n) {
            if leq(of, x, y)? {
                hit = Some(j);
                break;
            }
        }
        match hit {
            Some(j) => {
                m += 1;
                n = j + 1;
            }
            None => break,
        }
    }
    Ok((m, n))
}

/// Whether `X` has nondecreasing lengths.
pub fn in_b(x: &UpSeq<Element>) -> Result<bool> {
    for k in 0..x.window() {
        if items(x.at(k))?.len() > items(x.at(k + 1))?.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn require_b(x: &UpSeq<Element>) -> Result<()> {
    if in_b(x)? {
        Ok(())
    } else {
        Err(Error::NotInB)
    }
}

fn require_bad(of: &QoSpec, x: &UpSeq<Element>) -> Result<()> {
    let seq = QoSpec::seq(of.clone());
    if is_bad(&seq, x)? {
        Ok(())
    } else {
        Err(Error::NotBad(format!("{x:?}")))
    }
}

pub fn mk_nk(of: &QoSpec, x: &UpSeq<Element>, k: usize) -> Result<(usize, usize)> {
    require_b(x)?;
    pair_mn(of, items(x.at(k))?, items(x.at(k + 1))?)
}

pub fn deriv_profile(of: &QoSpec, x: &UpSeq<Element>) -> Result<DerivProfile> {
    require_b(x)?;
    let mut ms = Vec::with_capacity(x.window());
    let mut ns = Vec::with_capacity(x.window());
    for k in 0..x.window() {
        let (m, n) = pair_mn(of, items(x.at(k))?, items(x.at(k + 1))?)?;
        ms.push(m);
        ns.push(n);
    }
    let p = x.pre().len();
    Ok(DerivProfile {
        m: UpSeq::new(ms[..p].to_vec(), ms[p..].to_vec())?,
        n: UpSeq::new(ns[..p].to_vec(), ns[p..].to_vec())?,
    })
}

fn profile_derivable(pr: &DerivProfile, window: usize) -> bool {
    (0..window).all(|k| {
        let (m0, m1) = (*pr.m.at(k), *pr.m.at(k + 1));
        let (n0, n1) = (*pr.n.at(k), *pr.n.at(k + 1));
        m0 <= m1 && m1 < n0 && n0 <= n1
    })
}

/// `m_k <= m_(k+1) < n_k <= n_(k+1)` for every `k`.
pub fn is_derivable(of: &QoSpec, x: &UpSeq<Element>) -> Result<bool> {
    let pr = deriv_profile(of, x)?;
    Ok(profile_derivable(&pr, x.window()))
}

/// `∂X(k) = X(k)↾m_k`.
pub fn d_once(of: &QoSpec, x: &UpSeq<Element>) -> Result<UpSeq<Element>> {
    let pr = deriv_profile(of, x)?;
    if !profile_derivable(&pr, x.window()) {
        return Err(Error::NotDerivable);
    }
    UpSeq::from_fn(x.pre().len(), x.per().len(), |k| {
        Ok(Element::Seq(items(x.at(k))?[..*pr.m.at(k)].to_vec()))
    })
}

/// `X, ∂X, ..., ∂^M X` where `M` is the maximal derivability of `X`.
pub fn derivation_chain(of: &QoSpec, x: &UpSeq<Element>) -> Result<Vec<UpSeq<Element>>> {
    require_b(x)?;
    require_bad(of, x)?;
    let mut chain = vec![x.clone()];
    loop {
        let last = chain.last().expect("nonempty");
        if !is_derivable(of, last)? {
            return Ok(chain);
        }
        let next = d_once(of, last)?;
        // bad input makes len(∂X(0)) = m_0 < len(X(0)), so this terminates
        debug_assert!(next.at(0).seq_len() < last.at(0).seq_len());
        chain.push(next);
    }
}

pub fn max_derivability(of: &QoSpec, x: &UpSeq<Element>) -> Result<usize> {
    Ok(derivation_chain(of, x)?.len() - 1)
}

/// `∂^∞X` together with the depths `M_k`.
pub fn d_infty_with_depths(
    of: &QoSpec,
    x: &UpSeq<Element>,
) -> Result<(UpSeq<Element>, UpSeq<usize>)> {
    require_b(x)?;
    require_bad(of, x)?;
    let mut depths = Vec::with_capacity(x.window());
    let mut heads = Vec::with_capacity(x.window());
    for k in 0..x.window() {
        let chain = derivation_chain(of, &x.shift_by(k))?;
        depths.push(chain.len() - 1);
        heads.push(chain.last().expect("nonempty").at(0).clone());
    }
    let p = x.pre().len();
    Ok((
        UpSeq::new(heads[..p].to_vec(), heads[p..].to_vec())?,
        UpSeq::new(depths[..p].to_vec(), depths[p..].to_vec())?,
    ))
}

/// `∂^∞X(k) = (∂^(M_k) S^k X)(0)`, computed exactly.
pub fn d_infty(of: &QoSpec, x: &UpSeq<Element>) -> Result<UpSeq<Element>> {
    Ok(d_infty_with_depths(of, x)?.0)
}

/// Membership in the stable set: `X` is bad, in `B`, and no shift of `X`
/// is derivable.
pub fn is_stable(of: &QoSpec, x: &UpSeq<Element>) -> Result<bool> {
    if !in_b(x)? || !is_bad(&QoSpec::seq(of.clone()), x)? {
        return Ok(false);
    }
    let pr = deriv_profile(of, x)?;
    // the profile of S^j X is the j-fold shift of the profile of X
    for j in 0..x.window() {
        let shifted = DerivProfile {
            m: pr.m.shift_by(j),
            n: pr.n.shift_by(j),
        };
        if profile_derivable(&shifted, x.window()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Y(k) = Z(k)` at position `m_k`, for `Z` in `B` with `m_(k+1) >= n_k`.
pub fn witness_extract(of: &QoSpec, z: &UpSeq<Element>) -> Result<UpSeq<Element>> {
    let pr = deriv_profile(of, z)?;
    if let Some(k) = (0..z.window()).find(|&k| pr.m.at(k + 1) < pr.n.at(k)) {
        return Err(Error::WitnessCondition(k));
    }
    UpSeq::from_fn(z.pre().len(), z.per().len(), |k| {
        items(z.at(k))?
            .get(*pr.m.at(k))
            .cloned()
            .ok_or_else(|| Error::NotBad(format!("coordinate {k} of {z:?} embeds entirely")))
    })
}

/// Least superset of `r` closed under `(s, t) ↦ s↾m(s,t)` and
/// `(s, t) ↦ t↾n(s,t)`.
pub fn fill_closure(of: &QoSpec, r: &[Element]) -> Result<BTreeSet<Element>> {
    let mut closed: BTreeSet<Element> = BTreeSet::new();
    let mut frontier: Vec<Element> = Vec::new();
    for x in r {
        items(x)?;
        if closed.insert(x.clone()) {
            frontier.push(x.clone());
        }
    }
    while let Some(x) = frontier.pop() {
        let snapshot: Vec<Element> = closed.iter().cloned().collect();
        let mut fresh = Vec::new();
        for y in &snapshot {
            for (s, t) in [(&x, y), (y, &x)] {
                let (s, t) = (items(s)?, items(t)?);
                let (m, n) = pair_mn(of, s, t)?;
                fresh.push(Element::Seq(s[..m].to_vec()));
                fresh.push(Element::Seq(t[..n].to_vec()));
            }
        }
        for f in fresh {
            if closed.insert(f.clone()) {
                frontier.push(f);
            }
        }
    }
    Ok(closed)
}
