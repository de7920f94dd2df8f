//! Recursive proper 3-coloring of bad UP sequences, assembled over the
//! constructors of a [`QoSpec`].
//!
//! Every composite case is a split on a relation `Φ` evaluated over sliding
//! windows: points whose `Φ`-pattern is not eventually constant are colored
//! through that binary pattern, and points that eventually become `Φ`- or
//! `¬Φ`-homogeneous step back from the homogeneous piece one shift at a
//! time. Homogeneous pieces are then reduced to smaller carriers:
//!
//! * union: the all-left and all-right pieces are bad sequences of the parts;
//! * product: first-coordinate comparability decides which projection stays bad;
//! * sequences: length split, then `∂^∞`, two monotonicity splits and the
//!   witness condition, ending in a bad sequence of labels;
//! * trees: linearize, and fall back to the orbit coloring when the
//!   linearization never becomes bad;
//! * finite sets: sort members, which always preserves badness.

use serde::Serialize;
use serde_json::Value;

use crate::derive::{d_infty_with_depths, is_stable, pair_mn, witness_extract};
use crate::error::{Error, Result};
use crate::qo::{Element, QoSpec, Tree};
use crate::shiftgraph::{cycle_color, tail_color, Advance, Color, Colorer};
use crate::upseq::{entry_time, is_bad, phi_pattern, UpSeq};

/// One decision taken while coloring a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub branch: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
}

impl Step {
    fn branch(name: &str) -> Self {
        Step {
            branch: name.to_string(),
            relation: None,
            steps: None,
            depth: None,
            color: None,
        }
    }

    fn colored(name: &str, color: Color) -> Self {
        Step {
            color: Some(color),
            ..Step::branch(name)
        }
    }

    fn binary(relation: &str, color: Color) -> Self {
        Step {
            relation: Some(relation.to_string()),
            ..Step::colored("binary-factor", color)
        }
    }
}

/// A color together with the branches that produced it, outermost first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorTrace {
    pub color: Color,
    pub trace: Vec<Step>,
}

impl ColorTrace {
    fn terminal(step: Step) -> Self {
        let color = step.color.expect("terminal steps carry a color");
        ColorTrace {
            color,
            trace: vec![step],
        }
    }

    fn enter(mut self, step: Step) -> Self {
        self.trace.insert(0, step);
        self
    }

    /// Recompute the color from the log alone: the last colored step,
    /// advanced by every tail step.
    pub fn replay(&self) -> Option<Color> {
        let base = self.trace.iter().rev().find_map(|s| s.color)?;
        let steps: usize = self
            .trace
            .iter()
            .filter(|s| s.branch == "tail-step")
            .filter_map(|s| s.steps)
            .sum();
        Some(base.advance(steps))
    }

    pub fn branches(&self) -> Vec<&str> {
        self.trace.iter().map(|s| s.branch.as_str()).collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

impl Advance for ColorTrace {
    fn advance(self, steps: usize) -> Self {
        if steps == 0 {
            return self;
        }
        let color = self.color.advance(steps);
        let mut t = self.enter(Step {
            steps: Some(steps),
            ..Step::branch("tail-step")
        });
        t.color = color;
        t
    }
}

type Traced<'a> = Colorer<'a, Element, ColorTrace>;

/// Split on a window relation `phi` of the given arity. Points whose pattern
/// is not eventually constant are colored by the orbit coloring of the
/// pattern; the rest step into `c_hom` (pattern eventually all 1) or
/// `c_antihom` (eventually all 0).
pub fn split_color<'a>(
    relation: &'a str,
    arity: usize,
    phi: impl Fn(&[Element]) -> Result<bool> + Clone + 'a,
    c_hom: Traced<'a>,
    c_antihom: Traced<'a>,
) -> Traced<'a> {
    let pattern = move |x: &UpSeq<Element>| phi_pattern(x, arity, &phi);
    let hom_member = {
        let pattern = pattern.clone();
        move |z: &UpSeq<Element>| Ok(pattern(z)? == UpSeq::constant(1))
    };
    let anti_member = {
        let pattern = pattern.clone();
        move |z: &UpSeq<Element>| Ok(pattern(z)? == UpSeq::constant(0))
    };
    let hom = tail_color(hom_member, c_hom);
    let anti = tail_color(anti_member, c_antihom);
    Box::new(move |x| {
        let p = pattern(x)?;
        let (mut t, v) = match p.eventually_constant() {
            None => return Ok(ColorTrace::terminal(Step::binary(relation, cycle_color(&p)?))),
            Some((&1, _)) => (hom(x)?, 1),
            Some(_) => (anti(x)?, 0),
        };
        // label the tail step with the relation and the side it entered
        if let Some(s) = t.trace.first_mut().filter(|s| s.branch == "tail-step" && s.relation.is_none()) {
            s.relation = Some(format!("{relation}={v}"));
        }
        Ok(t)
    })
}

fn fail(err: impl Fn() -> Error + 'static) -> Traced<'static> {
    Box::new(move |_| Err(err()))
}

/// Orbit coloring on a finite base order.
pub fn color_base(spec: &QoSpec, x: &UpSeq<Element>) -> Result<ColorTrace> {
    require_bad(spec, x)?;
    Ok(ColorTrace::terminal(Step::colored("base", cycle_color(x)?)))
}

pub fn color_union(spec: &QoSpec, x: &UpSeq<Element>) -> Result<ColorTrace> {
    let QoSpec::Union(l, r) = spec else {
        return Err(Error::Shape(format!("{} is not a union", spec.describe())));
    };
    require_bad(spec, x)?;
    let left = |z: &UpSeq<Element>| {
        let inner = z.map(|e| match e {
            Element::Left(y) => Ok((**y).clone()),
            _ => Err(Error::EmptyPiece("right element in all-left piece".into())),
        })?;
        Ok(color(l, &inner)?.enter(Step::branch("left")))
    };
    let right = |z: &UpSeq<Element>| {
        let inner = z.map(|e| match e {
            Element::Right(y) => Ok((**y).clone()),
            _ => Err(Error::EmptyPiece("left element in all-right piece".into())),
        })?;
        Ok(color(r, &inner)?.enter(Step::branch("right")))
    };
    let c = split_color(
        "is-left",
        1,
        |w: &[Element]| Ok(matches!(w[0], Element::Left(_))),
        Box::new(left),
        Box::new(right),
    );
    c(x)
}

pub fn color_product(spec: &QoSpec, x: &UpSeq<Element>) -> Result<ColorTrace> {
    let QoSpec::Product(l, r) = spec else {
        return Err(Error::Shape(format!("{} is not a product", spec.describe())));
    };
    require_bad(spec, x)?;
    let project = |z: &UpSeq<Element>, first: bool| {
        z.map(|e| match e {
            Element::Pair(a, b) => Ok(if first { (**a).clone() } else { (**b).clone() }),
            _ => Err(Error::Shape(format!("{e:?} is not a pair"))),
        })
    };
    // first coordinates comparable: badness lives in the second coordinate
    let pi2 = |z: &UpSeq<Element>| {
        let y = project(z, false)?;
        if !is_bad(r, &y)? {
            return Err(Error::EmptyPiece("second projection is not bad".into()));
        }
        Ok(color(r, &y)?.enter(Step::branch("pi2")))
    };
    let pi1 = |z: &UpSeq<Element>| {
        let y = project(z, true)?;
        if !is_bad(l, &y)? {
            return Err(Error::EmptyPiece("first projection is not bad".into()));
        }
        Ok(color(l, &y)?.enter(Step::branch("pi1")))
    };
    let first_leq = |w: &[Element]| match (&w[0], &w[1]) {
        (Element::Pair(p1, _), Element::Pair(q1, _)) => crate::qo::leq(l, p1, q1),
        _ => Err(Error::Shape("product window holds non-pairs".into())),
    };
    let c = split_color("first-leq", 2, first_leq, Box::new(pi2), Box::new(pi1));
    c(x)
}

/// Coloring for `Seq(of)` (also used for linear orders).
pub fn color_seq(spec: &QoSpec, x: &UpSeq<Element>) -> Result<ColorTrace> {
    let of = match spec {
        QoSpec::Seq(of) | QoSpec::LinOrd(of) => of.as_ref(),
        _ => return Err(Error::Shape(format!("{} is not a sequence order", spec.describe()))),
    };
    require_bad(spec, x)?;
    seq_pipeline(of)(x)
}

fn mn(of: &QoSpec, a: &Element, b: &Element) -> Result<(usize, usize)> {
    match (a, b) {
        (Element::Seq(s), Element::Seq(t)) => pair_mn(of, s, t),
        _ => Err(Error::Shape("sequence window holds non-sequences".into())),
    }
}

fn seq_pipeline(of: &QoSpec) -> Traced<'_> {
    let witness = move |z: &UpSeq<Element>| {
        let y = witness_extract(of, z)?;
        Ok(color(of, &y)?.enter(Step::branch("witness")))
    };
    let psi = split_color(
        "witness-condition",
        3,
        move |w: &[Element]| Ok(mn(of, &w[1], &w[2])?.0 >= mn(of, &w[0], &w[1])?.1),
        Box::new(witness),
        fail(|| Error::EmptyPiece("m_(k+1) < n_k forever on a stable point".into())),
    );
    let n_mono = split_color(
        "n-monotone",
        3,
        move |w: &[Element]| Ok(mn(of, &w[0], &w[1])?.1 <= mn(of, &w[1], &w[2])?.1),
        psi,
        fail(|| Error::EmptyPiece("n_k strictly decreasing forever".into())),
    );
    let stab = split_color(
        "m-monotone",
        3,
        move |w: &[Element]| Ok(mn(of, &w[0], &w[1])?.0 <= mn(of, &w[1], &w[2])?.0),
        n_mono,
        fail(|| Error::EmptyPiece("m_k strictly decreasing forever".into())),
    );
    // the derived point is stable from some shift on, not always from the start
    let stab = tail_color(move |z: &UpSeq<Element>| is_stable(of, z), stab);
    let in_b = move |x: &UpSeq<Element>| {
        let (z, depths) = d_infty_with_depths(of, x)?;
        let mut t = stab(&z)?;
        if let Some(s) = t.trace.first_mut().filter(|s| s.branch == "tail-step" && s.relation.is_none()) {
            s.relation = Some("stable".to_string());
        }
        Ok(t
            .enter(Step {
                depth: Some(*depths.at(0)),
                ..Step::branch("d-infty")
            })
            .enter(Step::branch("B")))
    };
    split_color(
        "length-leq",
        2,
        |w: &[Element]| Ok(w[0].seq_len() <= w[1].seq_len()),
        Box::new(in_b),
        fail(|| Error::WellFoundedness("lengths strictly decreasing forever".into())),
    )
}

/// Preorder listing of labels, siblings ordered by the canonical encoding of
/// their subtrees. It extends the tree order.
pub fn linearize(t: &Tree) -> Vec<Element> {
    fn go(t: &Tree, out: &mut Vec<Element>) {
        out.push((*t.label).clone());
        let mut kids: Vec<&Tree> = t.children.iter().collect();
        kids.sort();
        for c in kids {
            go(c, out);
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

fn linearize_element(e: &Element) -> Result<Element> {
    match e {
        Element::Tree(t) => Ok(Element::Seq(linearize(t))),
        _ => Err(Error::Shape(format!("{e:?} is not a tree"))),
    }
}

/// Members in canonical order, as a sequence.
pub fn sort_set(e: &Element) -> Result<Element> {
    match e {
        Element::Set(v) => {
            let mut v = v.clone();
            v.sort();
            Ok(Element::Seq(v))
        }
        _ => Err(Error::Shape(format!("{e:?} is not a finite set"))),
    }
}

pub fn color_tree(spec: &QoSpec, x: &UpSeq<Element>) -> Result<ColorTrace> {
    let of = match spec {
        QoSpec::Tree1(of) | QoSpec::TreeM(of) => of.as_ref(),
        _ => return Err(Error::Shape(format!("{} is not a tree order", spec.describe()))),
    };
    require_bad(spec, x)?;
    let seq = QoSpec::seq(of.clone());
    let lin = |z: &UpSeq<Element>| z.map(linearize_element);
    let lin_bad = |z: &UpSeq<Element>| is_bad(&seq, &lin(z)?);
    match entry_time(x, lin_bad)? {
        Some(e) => {
            let y = lin(&x.shift_by(e))?;
            Ok(color_seq(&seq, &y)?
                .enter(Step::branch("linearized"))
                .advance(e))
        }
        None => Ok(ColorTrace::terminal(Step::colored("fallback", cycle_color(x)?))),
    }
}

pub fn color_finset(spec: &QoSpec, x: &UpSeq<Element>) -> Result<ColorTrace> {
    let QoSpec::FinSet(of) = spec else {
        return Err(Error::Shape(format!("{} is not a finite-set order", spec.describe())));
    };
    require_bad(spec, x)?;
    let seq = QoSpec::seq((**of).clone());
    let y = x.map(sort_set)?;
    if !is_bad(&seq, &y)? {
        return Err(Error::FinsetBadness(format!("sorted image of {x:?} is not bad")));
    }
    Ok(color_seq(&seq, &y)?.enter(Step::branch("sorted")))
}

/// Color a bad UP sequence of any supported spec.
pub fn color(spec: &QoSpec, x: &UpSeq<Element>) -> Result<ColorTrace> {
    match spec {
        QoSpec::Finite(_) => color_base(spec, x),
        QoSpec::Union(..) => color_union(spec, x),
        QoSpec::Product(..) => color_product(spec, x),
        QoSpec::Seq(_) | QoSpec::LinOrd(_) => color_seq(spec, x),
        QoSpec::Tree1(_) | QoSpec::TreeM(_) => color_tree(spec, x),
        QoSpec::FinSet(_) => color_finset(spec, x),
    }
}

fn require_bad(spec: &QoSpec, x: &UpSeq<Element>) -> Result<()> {
    if is_bad(spec, x)? {
        Ok(())
    } else {
        Err(Error::NotBad(format!("{x:?} in {}", spec.describe())))
    }
}
