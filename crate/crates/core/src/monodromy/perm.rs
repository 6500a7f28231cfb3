//! Permutations of a small fiber and the groups they generate.
//!
//! Composition is left to right: `a.then(&b)` applies `a` first.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// From 0-based images; `None` unless the images form a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Self { images })
    }

    /// Transposition of the 1-based points `a` and `b` in a fiber of size `n`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a - 1, b - 1);
        p
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based image of 0-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, e: u32) -> Permutation {
        (0..e).fold(Self::identity(self.degree()), |acc, _| acc.then(self))
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Nontrivial cycles as 0-based points, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.images[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.images[cur];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Lengths of the nontrivial cycles, longest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn order(&self) -> usize {
        self.cycle_type().into_iter().fold(1, num_integer::lcm)
    }

    pub fn is_transposition(&self) -> bool {
        self.cycle_type() == [2]
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.then(other) == other.then(self)
    }

    /// Moved points.
    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.degree())
            .filter(|&i| self.images[i] != i)
            .collect()
    }

    pub fn is_disjoint_from(&self, other: &Permutation) -> bool {
        self.support().is_disjoint(&other.support())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// All elements of the group generated by `gens`, sorted.
pub fn generate_group(gens: &[Permutation]) -> Vec<Permutation> {
    let Some(first) = gens.first() else {
        return Vec::new();
    };
    let id = Permutation::identity(first.degree());
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.then(s);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoClass {
    Z2,
    Z2xZ2,
    S3,
    Other,
}

impl fmt::Display for IsoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsoClass::Z2 => "Z2",
            IsoClass::Z2xZ2 => "Z2xZ2",
            IsoClass::S3 => "S3",
            IsoClass::Other => "Other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub order: usize,
    pub iso_class: IsoClass,
    pub generator_cycle_types: Vec<Vec<usize>>,
}

impl GroupDescriptor {
    pub fn of(gens: &[Permutation]) -> Self {
        let elements = generate_group(gens);
        let order = elements.len();
        let abelian = gens.iter().all(|a| gens.iter().all(|b| a.commutes_with(b)));
        let exponent_two = elements.iter().all(|g| g.order() <= 2);
        let iso_class = match order {
            2 => IsoClass::Z2,
            4 if exponent_two => IsoClass::Z2xZ2,
            6 if !abelian => IsoClass::S3,
            _ => IsoClass::Other,
        };
        GroupDescriptor {
            order,
            iso_class,
            generator_cycle_types: gens.iter().map(Permutation::cycle_type).collect(),
        }
    }
}

/// Whether `(t1 t2)^k t1^{1-δ} = (t2 t1)^k t2^{1-δ}` holds for `t1 = (1 3)`,
/// `t2 = (2 3)` in `S3`, where `m = 2k - δ` with `δ ∈ {0, 1}`.
pub fn presentation_admissible(m: u32) -> bool {
    assert!(m >= 1, "m must be positive");
    let k = m.div_ceil(2);
    let delta = 2 * k - m;
    let t1 = Permutation::transposition(3, 1, 3);
    let t2 = Permutation::transposition(3, 2, 3);
    let lhs = t1.then(&t2).pow(k).then(&t1.pow(1 - delta));
    let rhs = t2.then(&t1).pow(k).then(&t2.pow(1 - delta));
    lhs == rhs
}

pub fn admissible_set(m_max: u32) -> BTreeSet<u32> {
    (1..=m_max)
        .filter(|&m| presentation_admissible(m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cycle_notation() {
        assert_eq!(Permutation::transposition(4, 1, 2).to_string(), "(1 2)");
        let p = Permutation::from_images(vec![1, 2, 0, 3]).unwrap();
        assert_eq!(p.to_string(), "(1 2 3)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert!(Permutation::from_images(vec![0, 0]).is_none());
    }

    #[test]
    fn left_to_right_composition() {
        let a = Permutation::transposition(3, 1, 2);
        let b = Permutation::transposition(3, 2, 3);
        // 1 -> 2 -> 3
        assert_eq!(a.then(&b).apply(0), 2);
        assert_eq!(a.then(&b).order(), 3);
    }

    #[test]
    fn groups() {
        let s3 = [
            Permutation::transposition(3, 1, 3),
            Permutation::transposition(3, 2, 3),
        ];
        let d = GroupDescriptor::of(&s3);
        assert_eq!((d.order, d.iso_class), (6, IsoClass::S3));
        let v4 = [
            Permutation::transposition(4, 1, 2),
            Permutation::transposition(4, 3, 4),
        ];
        let d = GroupDescriptor::of(&v4);
        assert_eq!((d.order, d.iso_class), (4, IsoClass::Z2xZ2));
        assert_eq!(d.generator_cycle_types, vec![vec![2], vec![2]]);
        let z4 = [Permutation::from_images(vec![1, 2, 3, 0]).unwrap()];
        assert_eq!(GroupDescriptor::of(&z4).iso_class, IsoClass::Other);
        let z2 = [Permutation::transposition(2, 1, 2)];
        assert_eq!(GroupDescriptor::of(&z2).iso_class, IsoClass::Z2);
    }

    #[test]
    fn presentation_examples() {
        assert!(presentation_admissible(2));
        assert!(!presentation_admissible(1));
        assert!(presentation_admissible(5));
        assert!(!presentation_admissible(3));
        assert!(!presentation_admissible(4));
    }

    #[test]
    fn admissible_set_examples() {
        assert_eq!(admissible_set(10), BTreeSet::from([2, 5, 8]));
        assert_eq!(admissible_set(2), BTreeSet::from([2]));
        assert!(admissible_set(1).is_empty());
    }

    #[test]
    fn presentation_is_convention_independent() {
        // right-to-left composition is left-to-right on inverses
        let t1 = Permutation::transposition(3, 1, 3);
        let t2 = Permutation::transposition(3, 2, 3);
        for m in 1..40u32 {
            let k = m.div_ceil(2);
            let delta = 2 * k - m;
            let rl = |a: &Permutation, b: &Permutation| b.then(a);
            let mut lhs = Permutation::identity(3);
            let mut rhs = Permutation::identity(3);
            for _ in 0..k {
                lhs = rl(&lhs, &rl(&t1, &t2));
                rhs = rl(&rhs, &rl(&t2, &t1));
            }
            lhs = rl(&lhs, &t1.pow(1 - delta));
            rhs = rl(&rhs, &t2.pow(1 - delta));
            assert_eq!(lhs == rhs, presentation_admissible(m), "m={m}");
        }
    }

    fn arb_perm() -> impl Strategy<Value = Permutation> {
        Just((0..4).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(p in arb_perm()) {
            prop_assert!(p.then(&p.inverse()).is_identity());
            prop_assert!(p.pow(p.order() as u32).is_identity());
        }

        #[test]
        fn group_order_divides_factorial(a in arb_perm(), b in arb_perm()) {
            let order = generate_group(&[a, b]).len();
            prop_assert_eq!(24 % order, 0);
        }
    }
}
