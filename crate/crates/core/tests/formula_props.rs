use ltlbc::formula::gen::{random_formula, random_lasso};
use ltlbc::formula::{eval_lasso, Formula, LassoWord};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ATOMS: usize = 3;

fn props() -> Vec<String> {
    (0..ATOMS).map(|i| format!("p{i}")).collect()
}

/// (formula, formula, word) triples drawn from a seeded generator.
fn case() -> impl Strategy<Value = (Formula, Formula, LassoWord)> {
    (any::<u64>(), 0usize..6, 0usize..6).prop_map(|(seed, n1, n2)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_formula(&mut rng, ATOMS, n1);
        let b = random_formula(&mut rng, ATOMS, n2);
        let w = random_lasso(&mut rng, ATOMS, 4, 4);
        (a, b, w)
    })
}

/// Direct suffix semantics on the unrolled positions of a lasso, used as an
/// oracle. Positions beyond prefix + cycle repeat, so checking until-style
/// operators over one unrolling from each position is exact.
fn oracle(f: &Formula, w: &LassoWord, pos: usize) -> bool {
    use Formula::*;
    let horizon = w.prefix().len().max(pos) + w.cycle().len();
    let future = || (pos..=horizon).map(|k| w.succ_n(pos, k - pos));
    match f {
        True => true,
        False => false,
        Atom(i) => w.letter(pos) >> i & 1 == 1,
        Not(a) => !oracle(a, w, pos),
        And(a, b) => oracle(a, w, pos) && oracle(b, w, pos),
        Or(a, b) => oracle(a, w, pos) || oracle(b, w, pos),
        Implies(a, b) => !oracle(a, w, pos) || oracle(b, w, pos),
        Eventually(a) => future().any(|k| oracle(a, w, k)),
        Always(a) => future().all(|k| oracle(a, w, k)),
        Until(a, b) => {
            for k in future() {
                if oracle(b, w, k) {
                    return true;
                }
                if !oracle(a, w, k) {
                    return false;
                }
            }
            false
        }
        Release(a, b) => !oracle(&Until(Box::new(Not(a.clone())), Box::new(Not(b.clone()))), w, pos),
    }
}

trait SuccN {
    fn succ_n(&self, pos: usize, n: usize) -> usize;
}

impl SuccN for LassoWord {
    fn succ_n(&self, mut pos: usize, n: usize) -> usize {
        for _ in 0..n {
            pos = self.succ(pos);
        }
        pos
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn evaluation_matches_suffix_oracle((a, _b, w) in case()) {
        prop_assert_eq!(eval_lasso(&a, &w), oracle(&a, &w, 0));
    }

    #[test]
    fn double_negation((a, _b, w) in case()) {
        let nn = Formula::not(Formula::not(a.clone()));
        prop_assert_eq!(eval_lasso(&nn, &w), eval_lasso(&a, &w));
        prop_assert_eq!(eval_lasso(&a.negate(), &w), !eval_lasso(&a, &w));
    }

    #[test]
    fn derived_operators((a, b, w) in case()) {
        let f = Formula::eventually(a.clone());
        prop_assert_eq!(eval_lasso(&f, &w), eval_lasso(&Formula::until(Formula::True, a.clone()), &w));
        let g = Formula::always(a.clone());
        let ng = Formula::not(Formula::eventually(Formula::not(a.clone())));
        prop_assert_eq!(eval_lasso(&g, &w), eval_lasso(&ng, &w));
        let r = Formula::release(a.clone(), b.clone());
        let nu = Formula::not(Formula::until(Formula::not(a.clone()), Formula::not(b.clone())));
        prop_assert_eq!(eval_lasso(&r, &w), eval_lasso(&nu, &w));
        let imp = Formula::implies(a.clone(), b.clone());
        let or = Formula::or(Formula::not(a), b);
        prop_assert_eq!(eval_lasso(&imp, &w), eval_lasso(&or, &w));
    }

    #[test]
    fn normal_forms_preserve_meaning((a, _b, w) in case()) {
        let v = eval_lasso(&a, &w);
        prop_assert_eq!(eval_lasso(&a.nnf(), &w), v);
        prop_assert_eq!(eval_lasso(&a.to_core(), &w), v);
    }

    #[test]
    fn display_parse_round_trip((a, _b, _w) in case()) {
        let p = props();
        let text = a.display_with(&p).to_string();
        let back = Formula::parse(&text, &p).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn lasso_positions_wrap_into_the_cycle() {
    let w = LassoWord::new(vec![1, 2], vec![3, 4, 5]).unwrap();
    let seen: Vec<u64> = (0..8).map(|i| w.letter(w.succ_n(0, i))).collect();
    assert_eq!(seen, [1, 2, 3, 4, 5, 3, 4, 5]);
    assert!(LassoWord::new(vec![1], vec![]).is_err());
}
