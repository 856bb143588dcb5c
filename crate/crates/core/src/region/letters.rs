//! Letter and guard regions built from proposition regions.
//!
//! Set differences are over-approximated by closure: removing `{g >= 0}`
//! leaves `{-g >= 0}`. A removal is skipped when the two sets are disjoint
//! by a ball test, and a part is dropped when it is covered by the removed set.

use super::{ball_form, BallForm, BasicRegion, Region, RegionError};
use crate::automaton::{Cube, Guard};
use crate::formula::Letter;
use crate::poly::Polynomial;

/// Regions of the atomic propositions inside the domain `X`.
#[derive(Clone, Debug)]
pub struct PropositionRegions {
    props: Vec<String>,
    regions: Vec<Region>,
    domain: Region,
}

impl PropositionRegions {
    pub fn new(
        props: Vec<String>,
        regions: Vec<Region>,
        domain: Region,
    ) -> Result<Self, RegionError> {
        if props.len() != regions.len() {
            return Err(RegionError::VarCountMismatch);
        }
        let n = domain.nvars();
        if regions.iter().any(|r| r.nvars() != n) {
            return Err(RegionError::VarCountMismatch);
        }
        Ok(PropositionRegions {
            props,
            regions,
            domain,
        })
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn region(&self, i: usize) -> &Region {
        &self.regions[i]
    }

    pub fn domain(&self) -> &Region {
        &self.domain
    }

    pub fn nvars(&self) -> usize {
        self.domain.nvars()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, RegionError> {
        self.props
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| RegionError::UnknownProposition(name.to_string()))
    }

    /// Letter given by proposition names.
    pub fn letter(&self, names: &[&str]) -> Result<Letter, RegionError> {
        names
            .iter()
            .try_fold(0, |a, n| Ok(a | (1u64 << self.index_of(n)?)))
    }

    /// Propositions of `a` that hold at `x`.
    pub fn letter_at(&self, x: &[f64], tol: f64) -> Letter {
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains(x, tol))
            .fold(0, |a, (i, _)| a | (1u64 << i))
    }

    /// Closure over-approximation of the set where exactly the letter `a` holds.
    pub fn letter_region(&self, a: Letter) -> Region {
        let all = if self.props.len() >= 64 {
            u64::MAX
        } else {
            (1u64 << self.props.len()) - 1
        };
        self.cube_region(&Cube {
            pos: a & all,
            neg: !a & all,
        })
    }

    /// Closure over-approximation of the letters satisfying `c`.
    pub fn cube_region(&self, c: &Cube) -> Region {
        let n = self.nvars();
        let mut parts: Vec<Vec<Polynomial>> = if c.pos == 0 {
            self.domain
                .parts()
                .iter()
                .map(|p| p.ineqs().to_vec())
                .collect()
        } else {
            vec![Vec::new()]
        };
        for i in bits(c.pos) {
            let mut next = Vec::new();
            for base in &parts {
                for q in self.regions[i].parts() {
                    let mut g = base.clone();
                    extend_unique(&mut g, q.ineqs());
                    if !quick_empty(&g) {
                        next.push(g);
                    }
                }
            }
            parts = next;
        }
        for i in bits(c.neg) {
            let removed = &self.regions[i];
            let mut next = Vec::new();
            for base in parts {
                if removed.parts().iter().all(|q| quick_disjoint(&base, q.ineqs())) {
                    next.push(base);
                    continue;
                }
                if removed.parts().iter().any(|q| covered_by(&base, q.ineqs())) {
                    continue;
                }
                // complement of a union of basic sets: pick one negated
                // inequality from every part
                let mut acc = vec![base];
                for q in removed.parts() {
                    let mut grown = Vec::new();
                    for a in &acc {
                        for g in q.ineqs() {
                            let mut b = a.clone();
                            extend_unique(&mut b, &[-g]);
                            if !quick_empty(&b) {
                                grown.push(b);
                            }
                        }
                    }
                    acc = grown;
                }
                next.extend(acc);
            }
            parts = next;
        }
        let parts = parts
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(|g| BasicRegion::new(g).expect("nonempty inequality list"))
            .collect();
        Region::from_parts(n, parts)
            .expect("consistent variable counts")
            .simplified()
    }

    /// Union of the cube regions of a guard in disjunctive normal form.
    pub fn guard_region(&self, g: &Guard) -> Region {
        let mut out = Region::empty(self.nvars());
        for c in g.cubes() {
            out = out.union(&self.cube_region(c));
        }
        out.simplified()
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn extend_unique(target: &mut Vec<Polynomial>, add: &[Polynomial]) {
    for g in add {
        if !target.contains(g) {
            target.push(g.clone());
        }
    }
}

fn inside_balls(g: &[Polynomial]) -> Vec<super::Ball> {
    g.iter()
        .filter_map(|p| match ball_form(p)? {
            BallForm::Inside(b) => Some(b),
            _ => None,
        })
        .collect()
}

/// Two inside-ball inequalities with disjoint balls.
fn quick_disjoint(a: &[Polynomial], b: &[Polynomial]) -> bool {
    let ba = inside_balls(a);
    let bb = inside_balls(b);
    ba.iter()
        .any(|x| bb.iter().any(|y| x.distance_to(y) > x.radius + y.radius))
}

/// Ball test for emptiness: disjoint balls, or a ball inside an excluded one.
pub(super) fn quick_empty(g: &[Polynomial]) -> bool {
    let inside = inside_balls(g);
    if quick_disjoint(g, g) {
        return true;
    }
    g.iter().any(|p| match ball_form(p) {
        Some(BallForm::Outside(hole)) => inside
            .iter()
            .any(|b| b.distance_to(&hole) + b.radius < hole.radius),
        _ => false,
    })
}

/// The basic set `base` lies inside the basic set `q`.
fn covered_by(base: &[Polynomial], q: &[Polynomial]) -> bool {
    let Ok(b) = BasicRegion::new(base.to_vec()) else {
        return false;
    };
    let Ok(q) = BasicRegion::new(q.to_vec()) else {
        return false;
    };
    b.is_subset_of(&q)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use rand::SeedableRng;

    fn ctx() -> PropositionRegions {
        let (x, props) = example1();
        PropositionRegions::new(
            (0..4).map(|i| format!("p{i}")).collect(),
            props,
            x,
        )
        .unwrap()
    }

    #[test]
    fn single_disk_letter() {
        let c = ctx();
        let r = c.letter_region(c.letter(&["p0"]).unwrap());
        assert_eq!(r.parts().len(), 1);
        assert_eq!(r.parts()[0].ineqs(), &[disk(-2.0, 4.5, 0.25)]);
    }

    #[test]
    fn disjoint_pair_letter_is_empty() {
        let c = ctx();
        assert!(c.letter_region(c.letter(&["p0", "p2"]).unwrap()).is_trivially_empty());
        assert!(c.letter_region(c.letter(&["p2", "p3"]).unwrap()).is_trivially_empty());
        assert!(!c.letter_region(c.letter(&["p1", "p3"]).unwrap()).is_trivially_empty());
    }

    #[test]
    fn guard_regions_of_example() {
        let c = ctx();
        let not_p1 = Guard::from_cubes([Cube { pos: 0, neg: 0b10 }]);
        let r = c.guard_region(&not_p1);
        assert_eq!(r.parts().len(), 1);
        assert_eq!(r.parts()[0].ineqs().len(), 2);
        assert!(!r.contains(&[3f64.sqrt(), 0.0], 0.0));
        assert!(r.contains(&[-5.0, 0.0], 0.0));
        assert_eq!(c.guard_region(&Guard::truth()), *c.domain());
        let p0_not_p1 = Guard::from_cubes([Cube { pos: 1, neg: 0b10 }]);
        assert_eq!(c.guard_region(&p0_not_p1), *c.region(0));
    }

    #[test]
    fn empty_letter_contains_outside_samples() {
        let c = ctx();
        let r = c.letter_region(0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let bounds = c.domain().bounds().unwrap();
        for _ in 0..2000 {
            let x = bounds.sample(&mut rng);
            if c.domain().contains(&x, 0.0) && c.letter_at(&x, 0.0) == 0 {
                assert!(r.contains(&x, 0.0));
            }
        }
    }

    #[test]
    fn letter_regions_cover_domain() {
        let c = ctx();
        let regions: Vec<Region> = (0..16).map(|a| c.letter_region(a)).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let bounds = c.domain().bounds().unwrap();
        for _ in 0..2000 {
            let x = bounds.sample(&mut rng);
            if !c.domain().contains(&x, 0.0) {
                continue;
            }
            let exact = c.letter_at(&x, 0.0);
            assert!(regions[exact as usize].contains(&x, 1e-9));
        }
    }
}
