//! Ultimately periodic infinite sequences `pre · per^ω`.
//!
//! These are the vertices of the shift graph on which every construction in
//! this crate is evaluated. Values are kept in canonical form (primitive
//! period, minimal preperiod), so structural equality is equality of the
//! represented infinite words.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qo::{self, leq, Element, QoSpec};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UpSeq<T> {
    pre: Vec<T>,
    per: Vec<T>,
}

impl<T: Clone + Eq> UpSeq<T> {
    /// Canonical representation of `pre · per^ω`.
    pub fn new(mut pre: Vec<T>, per: Vec<T>) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let p = per.len();
        let root = (1..=p)
            .find(|&d| p.is_multiple_of(d) && (d..p).all(|i| per[i] == per[i - d]))
            .expect("d = p always qualifies");
        let mut per: Vec<T> = per[..root].to_vec();
        while let Some(last) = pre.last() {
            if *last != per[per.len() - 1] {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(UpSeq { pre, per })
    }

    /// `k ↦ f(k)`, assuming the values from `pre_len` on repeat with period `per_len`.
    pub fn from_fn(pre_len: usize, per_len: usize, mut f: impl FnMut(usize) -> Result<T>) -> Result<Self> {
        let pre = (0..pre_len).map(&mut f).collect::<Result<Vec<_>>>()?;
        let per = (pre_len..pre_len + per_len).map(&mut f).collect::<Result<Vec<_>>>()?;
        Self::new(pre, per)
    }

    pub fn constant(x: T) -> Self {
        UpSeq { pre: Vec::new(), per: vec![x] }
    }

    pub fn pre(&self) -> &[T] {
        &self.pre
    }

    pub fn per(&self) -> &[T] {
        &self.per
    }

    pub fn at(&self, k: usize) -> &T {
        if k < self.pre.len() {
            &self.pre[k]
        } else {
            &self.per[(k - self.pre.len()) % self.per.len()]
        }
    }

    /// `|pre| + |per|`: every shift of `self` equals one of the first
    /// `window()` shifts, and every consecutive window of coordinates
    /// starting at `k >= window()` repeats one starting earlier.
    pub fn window(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    pub fn shift(&self) -> Self {
        if self.pre.is_empty() {
            let mut per = self.per.clone();
            per.rotate_left(1);
            UpSeq { pre: Vec::new(), per }
        } else {
            UpSeq {
                pre: self.pre[1..].to_vec(),
                per: self.per.clone(),
            }
        }
    }

    pub fn shift_by(&self, n: usize) -> Self {
        let mut x = self.clone();
        let n = if n > self.pre.len() {
            self.pre.len() + (n - self.pre.len()) % self.per.len()
        } else {
            n
        };
        for _ in 0..n {
            x = x.shift();
        }
        x
    }

    pub fn is_shift_fixed(&self) -> bool {
        self.pre.is_empty() && self.per.len() == 1
    }

    /// `Some((c, m))` when the word is `c` from position `m` on, with `m` least.
    pub fn eventually_constant(&self) -> Option<(&T, usize)> {
        (self.per.len() == 1).then(|| (&self.per[0], self.pre.len()))
    }

    pub fn map<U: Clone + Eq>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<UpSeq<U>> {
        UpSeq::new(
            self.pre.iter().map(&mut f).collect::<Result<_>>()?,
            self.per.iter().map(&mut f).collect::<Result<_>>()?,
        )
    }

    /// Coordinates `0..n`.
    pub fn prefix(&self, n: usize) -> Vec<T> {
        (0..n).map(|k| self.at(k).clone()).collect()
    }
}

/// `X(k) ≰ X(k+1)` for every `k`.
pub fn is_bad(spec: &QoSpec, x: &UpSeq<Element>) -> Result<bool> {
    for k in 0..x.window() {
        if leq(spec, x.at(k), x.at(k + 1))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The binary word `k ↦ [phi(X(k), ..., X(k + arity - 1))]`. It is a factor
/// of `x`: the pattern of `x.shift()` is the shift of the pattern of `x`.
pub fn phi_pattern<T: Clone + Eq>(
    x: &UpSeq<T>,
    arity: usize,
    mut phi: impl FnMut(&[T]) -> Result<bool>,
) -> Result<UpSeq<u8>> {
    UpSeq::from_fn(x.pre().len(), x.per().len(), |k| {
        let args: Vec<T> = (k..k + arity).map(|i| x.at(i).clone()).collect();
        Ok(u8::from(phi(&args)?))
    })
}

/// Least `k` with `member(shift^k x)`, for a shift-closed `member`.
pub fn entry_time<T: Clone + Eq>(
    x: &UpSeq<T>,
    mut member: impl FnMut(&UpSeq<T>) -> Result<bool>,
) -> Result<Option<usize>> {
    let mut y = x.clone();
    for k in 0..=x.window() {
        if member(&y)? {
            return Ok(Some(k));
        }
        y = y.shift();
    }
    Ok(None)
}

/// `{"pre":[..],"per":[..]}` with element literals for `spec`.
pub fn up_to_json(spec: &QoSpec, x: &UpSeq<Element>) -> Value {
    json!({
        "pre": x.pre().iter().map(|e| qo::element_to_json(spec, e)).collect::<Vec<_>>(),
        "per": x.per().iter().map(|e| qo::element_to_json(spec, e)).collect::<Vec<_>>(),
    })
}

pub fn up_from_json(spec: &QoSpec, v: &Value) -> Result<UpSeq<Element>> {
    let list = |key: &str| -> Result<Vec<Element>> {
        match v.get(key) {
            None if key == "pre" => Ok(Vec::new()),
            Some(Value::Array(items)) => items.iter().map(|i| qo::element_from_json(spec, i)).collect(),
            _ => Err(Error::Parse(format!("UP literal needs a {key:?} list: {v}"))),
        }
    };
    if let Value::Object(m) = v {
        if let Some(k) = m.keys().find(|k| *k != "pre" && *k != "per") {
            return Err(Error::Parse(format!("unexpected key {k:?} in UP literal")));
        }
    }
    UpSeq::new(list("pre")?, list("per")?)
}

/// Plain numeric rendering for profiles and patterns.
pub fn up_nat_json<T: Clone + Eq + serde::Serialize>(x: &UpSeq<T>) -> Value {
    json!({ "pre": x.pre(), "per": x.per() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qo::FiniteOrder;

    fn a2() -> QoSpec {
        QoSpec::finite(FiniteOrder::antichain(&["a", "b"]))
    }

    fn c2() -> QoSpec {
        QoSpec::finite(FiniteOrder::chain(&["a", "b"]))
    }

    fn up(pre: &[usize], per: &[usize]) -> UpSeq<Element> {
        UpSeq::new(
            pre.iter().map(|&i| Element::Atom(i)).collect(),
            per.iter().map(|&i| Element::Atom(i)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let x = UpSeq::new(vec!['a'], vec!['b', 'a']).unwrap();
        assert_eq!((x.pre(), x.per()), (&[][..], &['a', 'b'][..]));
        for k in 0..7 {
            assert_eq!(x.at(k), if k % 2 == 0 { &'a' } else { &'b' });
        }
        let y = UpSeq::new(vec![], vec!['a', 'b', 'a', 'b']).unwrap();
        assert_eq!(y.per(), &['a', 'b']);
        let z = UpSeq::new(vec![], vec!['a']).unwrap();
        assert_eq!(z.per(), &['a']);
        assert_eq!(UpSeq::<char>::new(vec!['a'], vec![]), Err(Error::EmptyPeriod));
    }

    #[test]
    fn preperiod_absorbs_through_rotation() {
        let x = UpSeq::new(vec!['c', 'a', 'b'], vec!['a', 'b']).unwrap();
        assert_eq!((x.pre(), x.per()), (&['c'][..], &['a', 'b'][..]));
        let y = UpSeq::new(vec!['b', 'a', 'b'], vec!['a', 'b']).unwrap();
        assert!(y.pre().is_empty());
        assert_eq!(y.per(), &['b', 'a']);
    }

    #[test]
    fn shift_by_wraps() {
        let x = UpSeq::new(vec!['x', 'y'], vec!['a', 'b', 'c']).unwrap();
        for n in 0..20 {
            let mut y = x.clone();
            for _ in 0..n {
                y = y.shift();
            }
            assert_eq!(x.shift_by(n), y);
        }
    }

    #[test]
    fn badness_examples() {
        assert!(is_bad(&a2(), &up(&[], &[0, 1])).unwrap());
        assert!(!is_bad(&a2(), &up(&[], &[0])).unwrap());
        for per in [&[0][..], &[1], &[0, 1]] {
            assert!(!is_bad(&c2(), &up(&[], per)).unwrap());
        }
        // a bad tail behind a bad-breaking prefix
        assert!(!is_bad(&a2(), &up(&[0, 0], &[1, 0])).unwrap());
    }

    #[test]
    fn length_pattern_examples() {
        let lens = |x: &UpSeq<Element>| {
            phi_pattern(x, 2, |w| Ok(w[0].seq_len() <= w[1].seq_len())).unwrap()
        };
        let x = UpSeq::new(vec![], vec![Element::atoms(&[0]), Element::atoms(&[1, 1])]).unwrap();
        assert_eq!(lens(&x).per(), &[1, 0]);
        let y = UpSeq::new(vec![], vec![Element::atoms(&[0, 1]), Element::atoms(&[1, 0])]).unwrap();
        assert_eq!(lens(&y).per(), &[1]);
        assert!(lens(&y).eventually_constant().is_some());
    }

    #[test]
    fn entry_time_examples() {
        let u = QoSpec::union(a2(), a2());
        let a = Element::Atom(0);
        let all_left = |z: &UpSeq<Element>| {
            Ok((0..z.window()).all(|k| matches!(z.at(k), Element::Left(_))))
        };
        let x = UpSeq::new(vec![Element::right(a.clone())], vec![Element::left(a.clone())]).unwrap();
        assert_eq!(entry_time(&x, all_left).unwrap(), Some(1));
        assert_eq!(entry_time(&x.shift(), all_left).unwrap(), Some(0));
        let y = UpSeq::new(vec![], vec![Element::left(a.clone()), Element::right(a)]).unwrap();
        assert_eq!(entry_time(&y, all_left).unwrap(), None);
        let lit = up_to_json(&u, &x);
        assert_eq!(up_from_json(&u, &lit).unwrap(), x);
    }

    #[test]
    fn up_literal_errors() {
        assert!(up_from_json(&a2(), &json!({"pre": ["a"], "per": []})).is_err());
        assert!(up_from_json(&a2(), &json!({"per": ["z"]})).is_err());
        assert!(up_from_json(&a2(), &json!({"per": ["a"], "extra": 1})).is_err());
        assert_eq!(up_from_json(&a2(), &json!({"per": ["a", "b"]})).unwrap(), up(&[], &[0, 1]));
    }
}
