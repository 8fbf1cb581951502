mod common;

use godp::emit::{emit_manchester, parse_manchester, stratify};
use godp::model::{union_flat, Axiom, NameTerm, SymbolKind};
use proptest::prelude::*;

use common::*;

fn graded_count(n: usize) -> usize {
    let o = expand(&library_from(&graded_program(n)), "T");
    o.signature()
        .iter()
        .filter(|s| s.kind == SymbolKind::ObjectProperty && s.name.base == "p" && !s.name.is_plain())
        .count()
}

#[test]
fn recursion_length_edge_cases() {
    for n in [0, 1, 2, 5, 20] {
        assert_eq!(graded_count(n), n);
    }
}

#[test]
fn long_lists_stay_within_budget() {
    assert_eq!(graded_count(500), 500);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn recursion_length(n in 0usize..40) {
        prop_assert_eq!(graded_count(n), n);
    }

    #[test]
    fn value_sets(n in 1usize..12, ordered in any::<bool>()) {
        let o = expand(&library_from(&valset_program(n, ordered)), "T");
        let asserted = o.axioms().iter().filter(|a| matches!(a, Axiom::ClassAssertion(..))).count();
        prop_assert_eq!(asserted, n);
        let different: Vec<_> = o.axioms().iter().filter(|a| matches!(a, Axiom::DifferentIndividuals(_))).collect();
        prop_assert_eq!(different.len(), usize::from(n >= 2));
        let greater = NameTerm::with_args("greater", vec![NameTerm::plain("V")]);
        if ordered {
            prop_assert!(o.contains_axiom(&Axiom::Transitive(greater)));
            let facts = o.axioms().iter().filter(|a| matches!(a, Axiom::PropertyAssertion(..))).count();
            prop_assert_eq!(facts, n - 1);
        } else {
            prop_assert!(o.signature().iter().all(|s| !s.name.mentions_base("greater")));
            prop_assert!(o.axioms().iter().all(|a| a.symbols().iter().all(|s| !s.name.mentions_base("greater"))));
        }
    }

    #[test]
    fn random_instantiations(src in strategies::program()) {
        let lib = library_from(&src);
        let a = expand(&lib, "T");
        let b = expand(&lib, "T");
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&union_flat(&a, &b).unwrap(), &a);
        let s = stratify(&a).unwrap();
        prop_assert_eq!(&stratify(&s).unwrap(), &s);
        let text = emit_manchester(&s).unwrap();
        prop_assert_eq!(parse_manchester(&text, "t.omn").unwrap(), s);
    }

    #[test]
    fn constraints_hold_in_the_result(a in "p[a-z]{0,3}", b in "p[a-z]{0,3}", c in "C[a-z]{0,3}") {
        prop_assume!(a != b);
        let src = format!(
            "ontology T = Class: {c} then TransitiveRelation[{a}; {c}] then SubProp[{b}; {c}; {c}; {a}]"
        );
        let o = expand(&library_from(&src), "T");
        let n = NameTerm::plain;
        prop_assert!(o.contains_axiom(&Axiom::Domain(n(&a), n(&c))));
        prop_assert!(o.contains_axiom(&Axiom::Range(n(&a), n(&c))));
        prop_assert!(o.contains_axiom(&Axiom::SubPropertyOf(n(&b), n(&a))));
    }
}
