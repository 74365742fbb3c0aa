use grope::{FiniteGroup, Generator, GroupWord};
use proptest::prelude::*;

const GENS: usize = 3;

fn letter() -> impl Strategy<Value = Generator> {
    (0..GENS as u8, any::<bool>()).prop_map(|(index, inverted)| Generator { index, inverted })
}

fn raw() -> impl Strategy<Value = Vec<Generator>> {
    prop::collection::vec(letter(), 0..24)
}

fn word() -> impl Strategy<Value = GroupWord> {
    raw().prop_map(|r| GroupWord::reduce(r, GENS).unwrap())
}

/// Free reduction by a stack, letter by letter.
fn stack_reduce(raw: &[Generator]) -> Vec<Generator> {
    let mut out: Vec<Generator> = Vec::new();
    for &g in raw {
        if out.last() == Some(&g.inverse()) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

/// S3 as permutations of three points, identity first; generators map to a
/// transposition, a 3-cycle and another transposition.
fn s3() -> FiniteGroup {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [1, 2, 0], [2, 1, 0], [0, 2, 1], [2, 0, 1]];
    let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
    let table = perms
        .iter()
        .map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    FiniteGroup::new(table, vec![1, 2, 3]).unwrap()
}

proptest! {
    #[test]
    fn reduction_matches_stack_oracle(r in raw()) {
        let w = GroupWord::reduce(r.clone(), GENS).unwrap();
        prop_assert_eq!(w.letters(), &stack_reduce(&r)[..]);
        prop_assert!(w.is_reduced());
    }

    #[test]
    fn multiplication_is_associative(a in word(), b in word(), c in word()) {
        prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
    }

    #[test]
    fn identity_and_inverses(a in word()) {
        let e = GroupWord::identity();
        prop_assert_eq!(a.multiply(&e), a.clone());
        prop_assert_eq!(e.multiply(&a), a.clone());
        prop_assert!(a.multiply(&a.invert()).is_identity());
        prop_assert!(a.invert().multiply(&a).is_identity());
        prop_assert_eq!(a.invert().invert(), a);
    }

    #[test]
    fn product_matches_concatenation(a in raw(), b in raw()) {
        let joined: Vec<Generator> = a.iter().chain(&b).copied().collect();
        let wa = GroupWord::reduce(a, GENS).unwrap();
        let wb = GroupWord::reduce(b, GENS).unwrap();
        prop_assert_eq!(wa.multiply(&wb), GroupWord::reduce(joined, GENS).unwrap());
    }

    #[test]
    fn class_is_shared_with_the_inverse(a in word()) {
        prop_assert_eq!(a.class(), a.invert().class());
        prop_assert!(a.class() == a || a.class() == a.invert());
    }

    #[test]
    fn text_round_trips(a in word()) {
        prop_assert_eq!(GroupWord::parse(&a.to_string(), GENS).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in word(), b in word()) {
        let g = s3();
        let ab = g.evaluate(&a.multiply(&b)).unwrap();
        prop_assert_eq!(ab, g.multiply(g.evaluate(&a).unwrap(), g.evaluate(&b).unwrap()));
        prop_assert_eq!(g.evaluate(&a.multiply(&a.invert())).unwrap(), 0);
    }
}

#[test]
fn cyclic_quotient_counts_exponents() {
    let z = FiniteGroup::cyclic(7);
    let w = GroupWord::parse("a a a a' a a", 1).unwrap();
    assert_eq!(z.evaluate(&w).unwrap(), 4);
    assert!(FiniteGroup::new(vec![vec![0, 1], vec![1, 1]], vec![1]).is_err());
}
