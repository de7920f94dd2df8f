use bqo_core::derive::pair_mn;
use bqo_core::embed::{brute_force_higman_witnesses, le_higman, le_tree_inj, le_tree_mono};
use bqo_core::qo::{canonical_encode, enumerate_elements, leq, Element};
use bqo_core::shiftgraph::{cycle_color, monotone_pullback_check, pullback_color};
use bqo_core::upseq::{is_bad, UpSeq};
use bqo_core::{FiniteOrder, QoSpec};
use proptest::prelude::*;

fn a2() -> QoSpec {
    QoSpec::finite(FiniteOrder::antichain(&["a", "b"]))
}

fn c2() -> QoSpec {
    QoSpec::finite(FiniteOrder::chain(&["a", "b"]))
}

fn zoo() -> Vec<QoSpec> {
    vec![
        a2(),
        c2(),
        QoSpec::union(a2(), c2()),
        QoSpec::product(c2(), a2()),
        QoSpec::seq(a2()),
        QoSpec::seq(QoSpec::seq(a2())),
        QoSpec::tree1(a2()),
        QoSpec::treem(a2()),
        QoSpec::finset(a2()),
    ]
}

#[test]
fn leq_is_a_quasi_order_on_small_elements() {
    for spec in zoo() {
        let elems = enumerate_elements(&spec, 3);
        let table: Vec<Vec<bool>> = elems
            .iter()
            .map(|x| elems.iter().map(|y| leq(&spec, x, y).unwrap()).collect())
            .collect();
        for i in 0..elems.len() {
            assert!(table[i][i], "{} not reflexive at {:?}", spec.describe(), elems[i]);
            for j in 0..elems.len() {
                for k in 0..elems.len() {
                    if table[i][j] && table[j][k] {
                        assert!(table[i][k], "{} not transitive", spec.describe());
                    }
                }
            }
        }
    }
}

#[test]
fn encoding_is_injective() {
    for spec in zoo() {
        let elems = enumerate_elements(&spec, 4);
        let mut codes: Vec<Vec<u8>> = elems.iter().map(|x| canonical_encode(&spec, x).unwrap()).collect();
        let n = codes.len();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), n, "{}", spec.describe());
    }
}

#[test]
fn injective_tree_embedding_implies_monotone() {
    let spec = QoSpec::tree1(a2());
    let trees = enumerate_elements(&spec, 4);
    for s in &trees {
        for t in &trees {
            if let (Element::Tree(s), Element::Tree(t)) = (s, t) {
                if le_tree_inj(&a2(), s, t).unwrap().holds() {
                    assert!(le_tree_mono(&a2(), s, t).unwrap().holds());
                }
            }
        }
    }
}

#[test]
fn linearization_pullback_flags_the_adversarial_pair() {
    let labels = QoSpec::finite(FiniteOrder::antichain(&["a", "b", "c0"]));
    let (a, b, c0) = (Element::Atom(0), Element::Atom(1), Element::Atom(2));
    let chain = Element::Tree(bqo_core::Tree::node(a.clone(), vec![bqo_core::Tree::leaf(b.clone())]));
    let fork = Element::Tree(bqo_core::Tree::node(
        c0,
        vec![bqo_core::Tree::leaf(a), bqo_core::Tree::leaf(b)],
    ));
    let lin = |e: &Element| match e {
        Element::Tree(t) => Ok(Element::Seq(bqo_core::colorer::linearize(t))),
        _ => unreachable!(),
    };
    let report = monotone_pullback_check(
        lin,
        &QoSpec::tree1(labels.clone()),
        &QoSpec::seq(labels),
        [(&chain, &fork)],
    )
    .unwrap();
    assert_eq!(report.checked, 1);
    assert_eq!(report.violations, vec![(chain, fork)]);
}

#[test]
fn identity_map_passes_monotone_check() {
    let spec = QoSpec::seq(a2());
    let elems = enumerate_elements(&spec, 3);
    let pairs: Vec<(&Element, &Element)> = elems.iter().flat_map(|x| elems.iter().map(move |y| (x, y))).collect();
    let report = monotone_pullback_check(|e| Ok(e.clone()), &spec, &spec, pairs).unwrap();
    assert!(report.violations.is_empty());
    assert_eq!(report.checked, elems.len() * elems.len());
}

fn word(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..2, 0..=max)
}

fn atoms(w: &[usize]) -> Vec<Element> {
    w.iter().map(|&i| Element::Atom(i)).collect()
}

proptest! {
    #[test]
    fn higman_witness_is_leftmost(s in word(5), t in word(6)) {
        let (s, t) = (atoms(&s), atoms(&t));
        let fast = le_higman(&a2(), &s, &t).unwrap();
        let all = brute_force_higman_witnesses(&a2(), &s, &t).unwrap();
        prop_assert_eq!(fast.holds(), !all.is_empty());
        if let Some(w) = fast.witness {
            let ends: Vec<usize> = w.iter().map(|p| p.1).collect();
            // pointwise least among all witnesses
            for other in &all {
                prop_assert!(ends.iter().zip(other).all(|(a, b)| a <= b));
            }
        }
    }

    #[test]
    fn prefixes_of_embedded_words_embed(s in word(5), t in word(6), cut in 0usize..6) {
        let (s, t) = (atoms(&s), atoms(&t));
        if le_higman(&a2(), &s, &t).unwrap().holds() {
            let cut = cut.min(s.len());
            prop_assert!(le_higman(&a2(), &s[..cut], &t).unwrap().holds());
        }
    }

    #[test]
    fn m_and_n_agree_with_prefix_scan(s in word(5), t in word(6)) {
        let (s, t) = (atoms(&s), atoms(&t));
        let (m, n) = pair_mn(&a2(), &s, &t).unwrap();
        let m_scan = (0..=s.len()).filter(|&i| le_higman(&a2(), &s[..i], &t).unwrap().holds()).max().unwrap();
        let n_scan = (0..=t.len()).find(|&j| le_higman(&a2(), &s[..m_scan], &t[..j]).unwrap().holds()).unwrap();
        prop_assert_eq!((m, n), (m_scan, n_scan));
        prop_assert!(m <= n);
    }

    #[test]
    fn canonical_form_is_idempotent(pre in word(3), per in prop::collection::vec(0usize..2, 1..5)) {
        let x = UpSeq::new(pre.clone(), per.clone()).unwrap();
        let again = UpSeq::new(x.pre().to_vec(), x.per().to_vec()).unwrap();
        prop_assert_eq!(&again, &x);
        let y = UpSeq::new(pre.clone(), per.clone()).unwrap();
        for k in 0..12 {
            let raw = if k < pre.len() { pre[k] } else { per[(k - pre.len()) % per.len()] };
            prop_assert_eq!(*y.at(k), raw);
        }
    }

    #[test]
    fn badness_is_shift_closed(pre in word(2), per in prop::collection::vec(0usize..2, 1..5)) {
        let x = UpSeq::new(atoms(&pre), atoms(&per)).unwrap();
        if is_bad(&a2(), &x).unwrap() {
            prop_assert!(is_bad(&a2(), &x.shift()).unwrap());
        }
    }

    #[test]
    fn identity_pullback_is_a_proper_coloring(pre in word(3), per in prop::collection::vec(0usize..3, 2..6)) {
        let x = UpSeq::new(pre, per).unwrap();
        prop_assume!(!x.is_shift_fixed() && !x.shift().is_shift_fixed());
        let c = pullback_color(|y: &UpSeq<usize>| Ok(y.clone()), Box::new(cycle_color), true);
        prop_assert_ne!(c(&x).unwrap(), c(&x.shift()).unwrap());
    }

    #[test]
    fn union_and_product_follow_components(i in 0usize..2, j in 0usize..2, k in 0usize..2, l in 0usize..2) {
        let u = QoSpec::union(a2(), c2());
        let (a, b) = (Element::Atom(i), Element::Atom(j));
        prop_assert!(!leq(&u, &Element::left(a.clone()), &Element::right(b.clone())).unwrap());
        prop_assert_eq!(
            leq(&u, &Element::right(a.clone()), &Element::right(b.clone())).unwrap(),
            leq(&c2(), &a, &b).unwrap()
        );
        let p = QoSpec::product(c2(), a2());
        let (c, d) = (Element::Atom(k), Element::Atom(l));
        prop_assert_eq!(
            leq(&p, &Element::pair(a.clone(), c.clone()), &Element::pair(b.clone(), d.clone())).unwrap(),
            leq(&c2(), &a, &b).unwrap() && leq(&a2(), &c, &d).unwrap()
        );
    }
}
