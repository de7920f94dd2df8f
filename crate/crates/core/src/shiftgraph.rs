//! Proper 3-colorings on shift orbits of ultimately periodic points, and the
//! rules that transport them along factor maps and monotone maps.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qo::{leq, Element, QoSpec};
use crate::upseq::{entry_time, UpSeq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Color(u8);

impl Color {
    pub fn new(v: u8) -> Result<Self> {
        if v < 3 {
            Ok(Color(v))
        } else {
            Err(Error::Invalid(format!("color {v} is not in {{0,1,2}}")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// `(self + steps) mod 3`.
    pub fn advance(self, steps: usize) -> Self {
        Color(((self.0 as usize + steps) % 3) as u8)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A coloring of (a shift-closed family of) UP points. `C` is [`Color`] or
/// any richer value that carries one, such as a traced color.
pub type Colorer<'a, T, C = Color> = Box<dyn Fn(&UpSeq<T>) -> Result<C> + 'a>;

/// Stepping a color `(c + steps) mod 3`.
pub trait Advance {
    fn advance(self, steps: usize) -> Self;
}

impl Advance for Color {
    fn advance(self, steps: usize) -> Self {
        Color::advance(self, steps)
    }
}

/// Offset of the purely periodic `per` from its least rotation: `per` is the
/// least rotation shifted left `offset` times.
pub fn rotation_offset<T: Ord + Clone>(per: &[T]) -> usize {
    let p = per.len();
    let least = (0..p)
        .min_by(|&i, &j| {
            let ri = per[i..].iter().chain(&per[..i]);
            let rj = per[j..].iter().chain(&per[..j]);
            ri.cmp(rj)
        })
        .unwrap_or(0);
    (p - least) % p
}

/// Color a point by its position on its own shift orbit.
///
/// A purely periodic point at offset `i` on a cycle of length `p` gets
/// `i mod 2`, except that the last index of an odd cycle gets 2. A point with
/// a preperiod steps `(c + 1) mod 3` back from its shift.
pub fn cycle_color<T: Ord + Clone>(x: &UpSeq<T>) -> Result<Color> {
    if x.is_shift_fixed() {
        return Err(Error::ShiftFixed);
    }
    let p = x.per().len();
    let i = rotation_offset(x.per());
    let on_cycle = if p.is_multiple_of(2) || i + 1 < p {
        Color((i % 2) as u8)
    } else {
        Color(2)
    };
    Ok(on_cycle.advance(x.pre().len()))
}

/// `X ↦ base(f(X))`. With `audit`, each call also checks the factor identity
/// `f(shift X) = shift f(X)` and fails on a violation.
pub fn pullback_color<'a, S, T>(
    f: impl Fn(&UpSeq<S>) -> Result<UpSeq<T>> + 'a,
    base: Colorer<'a, T>,
    audit: bool,
) -> Colorer<'a, S>
where
    S: Clone + Eq + fmt::Debug + 'a,
    T: Clone + Eq + fmt::Debug + 'a,
{
    Box::new(move |x| {
        let fx = f(x)?;
        if audit {
            let lhs = f(&x.shift())?;
            if lhs != fx.shift() {
                return Err(Error::FactorIdentity(format!(
                    "f(shift X) = {lhs:?} but shift f(X) = {:?} for X = {x:?}",
                    fx.shift()
                )));
            }
        }
        base(&fx)
    })
}

/// Color points that eventually enter a shift-closed piece: a point in the
/// piece takes `piece_color`, any other point takes one more than its shift.
pub fn tail_color<'a, T: Clone + Eq + 'a, C: Advance + 'a>(
    member: impl Fn(&UpSeq<T>) -> Result<bool> + 'a,
    piece_color: Colorer<'a, T, C>,
) -> Colorer<'a, T, C> {
    Box::new(move |x| {
        let e = entry_time(x, &member)?.ok_or(Error::NeverEnters)?;
        Ok(piece_color(&x.shift_by(e))?.advance(e))
    })
}

/// Outcome of checking `q ≰ p ⇒ f(q) ≰ f(p)` on sampled pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotoneReport {
    pub checked: usize,
    /// `(q, p)` with `q ≰ p` in the source but `f(q) <= f(p)` in the target.
    pub violations: Vec<(Element, Element)>,
}

pub fn monotone_pullback_check<'e>(
    f: impl Fn(&Element) -> Result<Element>,
    src: &QoSpec,
    dst: &QoSpec,
    pairs: impl IntoIterator<Item = (&'e Element, &'e Element)>,
) -> Result<MonotoneReport> {
    let mut report = MonotoneReport::default();
    for (q, p) in pairs {
        report.checked += 1;
        if !leq(src, q, p)? && leq(dst, &f(q)?, &f(p)?)? {
            report.violations.push((q.clone(), p.clone()));
        }
    }
    Ok(report)
}
