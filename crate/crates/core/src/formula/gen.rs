//! Random formulas and lasso words for randomized testing.

use rand::Rng;

use super::{Formula, LassoWord, Letter};

/// A random formula over `n_atoms` atoms with exactly `n_ops` operators.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, n_atoms: usize, n_ops: usize) -> Formula {
    if n_ops == 0 {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Atom(rng.gen_range(0..n_atoms)),
        };
    }
    let kind = rng.gen_range(0..9);
    if kind < 3 {
        let sub = random_formula(rng, n_atoms, n_ops - 1);
        match kind {
            0 => Formula::not(sub),
            1 => Formula::eventually(sub),
            _ => Formula::always(sub),
        }
    } else {
        let left = rng.gen_range(0..n_ops);
        let a = random_formula(rng, n_atoms, left);
        let b = random_formula(rng, n_atoms, n_ops - 1 - left);
        match kind {
            3 => Formula::and(a, b),
            4 => Formula::or(a, b),
            5 => Formula::implies(a, b),
            6 | 7 => Formula::until(a, b),
            _ => Formula::release(a, b),
        }
    }
}

pub fn random_letter<R: Rng + ?Sized>(rng: &mut R, n_atoms: usize) -> Letter {
    if n_atoms == 0 {
        0
    } else {
        rng.gen_range(0..(1u64 << n_atoms))
    }
}

/// Prefix length in `0..=max_prefix`, cycle length in `1..=max_cycle`.
pub fn random_lasso<R: Rng + ?Sized>(
    rng: &mut R,
    n_atoms: usize,
    max_prefix: usize,
    max_cycle: usize,
) -> LassoWord {
    let p = rng.gen_range(0..=max_prefix);
    let c = rng.gen_range(1..=max_cycle.max(1));
    let prefix = (0..p).map(|_| random_letter(rng, n_atoms)).collect();
    let cycle = (0..c).map(|_| random_letter(rng, n_atoms)).collect();
    LassoWord::new(prefix, cycle).expect("nonempty cycle")
}
