//! Permutation groups on at most a handful of points: enough to enumerate
//! subgroups of S4, A4 and A5 and their actions on small G-sets.

use std::collections::{BTreeSet, HashSet, VecDeque};

/// A permutation of {0, .., n-1} stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u8).collect())
    }

    pub fn from_cycles(n: usize, cycles: &[&[u8]]) -> Perm {
        let mut img: Vec<u8> = (0..n as u8).collect();
        for c in cycles {
            for i in 0..c.len() {
                img[c[i] as usize] = c[(i + 1) % c.len()];
            }
        }
        Perm(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// (self ∘ other)(i) = self(other(i))
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    pub fn pow(&self, k: usize) -> Perm {
        (0..k).fold(Perm::identity(self.degree()), |acc, _| acc.compose(self))
    }

    pub fn order(&self) -> usize {
        let mut k = 1;
        let mut q = self.clone();
        while !q.is_identity() {
            q = q.compose(self);
            k += 1;
        }
        k
    }

    /// Cycle lengths, sorted ascending, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.apply(i);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycle_type().iter().filter(|&&l| l % 2 == 0).count() % 2 == 0
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &j)| *i == j as usize).count()
    }
}

/// A finite permutation group stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Group {
    pub elements: Vec<Perm>,
}

impl Group {
    pub fn generated(n: usize, gens: &[Perm]) -> Group {
        let id = Perm::identity(n);
        let mut seen: HashSet<Perm> = HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in gens {
                let h = s.compose(&g);
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        Group { elements }
    }

    pub fn symmetric(n: usize) -> Group {
        if n == 1 {
            return Group::generated(1, &[]);
        }
        let cyc: Vec<u8> = (0..n as u8).collect();
        Group::generated(n, &[Perm::from_cycles(n, &[&cyc]), Perm::from_cycles(n, &[&[0, 1]])])
    }

    pub fn alternating(n: usize) -> Group {
        let s = Group::symmetric(n);
        Group { elements: s.elements.into_iter().filter(|g| g.is_even()).collect() }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.elements[0].degree()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }

    pub fn is_normal_in(&self, other: &Group) -> bool {
        other.elements.iter().all(|g| {
            let gi = g.inverse();
            self.elements.iter().all(|h| self.contains(&g.compose(h).compose(&gi)))
        })
    }

    pub fn conjugate(&self, g: &Perm) -> Group {
        let gi = g.inverse();
        let mut elements: Vec<Perm> = self.elements.iter().map(|h| g.compose(h).compose(&gi)).collect();
        elements.sort();
        Group { elements }
    }

    pub fn is_cyclic(&self) -> bool {
        self.elements.iter().any(|g| g.order() == self.order())
    }

    pub fn is_abelian(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    /// Dihedral of order 2m with m ≥ 2 (V4 counts as dihedral of order 4).
    pub fn is_dihedral(&self) -> bool {
        let n = self.order();
        if n < 4 || n % 2 == 1 || self.is_cyclic() {
            return false;
        }
        let m = n / 2;
        // a cyclic subgroup of index 2 and an involution outside it inverting it
        self.elements.iter().filter(|r| r.order() == m).any(|r| {
            let rot = Group::generated(self.degree(), std::slice::from_ref(r));
            self.elements
                .iter()
                .filter(|s| !rot.contains(s))
                .all(|s| s.order() == 2 && s.compose(r).compose(&s.inverse()) == r.inverse())
        })
    }

    /// All subgroups, each once, sorted by order then elements.
    pub fn subgroups(&self) -> Vec<Group> {
        let n = self.degree();
        let mut set: BTreeSet<Group> = BTreeSet::new();
        for a in &self.elements {
            for b in &self.elements {
                if b < a {
                    continue;
                }
                set.insert(Group::generated(n, &[a.clone(), b.clone()]));
            }
        }
        let mut v: Vec<Group> = set.into_iter().collect();
        v.sort_by(|x, y| x.order().cmp(&y.order()).then_with(|| x.cmp(y)));
        v
    }

    pub fn normal_subgroups(&self) -> Vec<Group> {
        self.subgroups().into_iter().filter(|h| h.is_normal_in(self)).collect()
    }

    /// The unique Sylow p-subgroup if it is normal.
    pub fn normal_sylow(&self, p: usize) -> Option<Group> {
        let mut pk = 1;
        while self.order().is_multiple_of(pk * p) {
            pk *= p;
        }
        let sub: Vec<Perm> = self
            .elements
            .iter()
            .filter(|g| {
                let o = g.order();
                pk % o == 0
            })
            .cloned()
            .collect();
        if sub.len() == pk {
            Some(Group { elements: sub })
        } else {
            None
        }
    }

    /// Orbits of this group on points.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(&self.elements, self.degree())
    }
}

pub fn orbits_of(elements: &[Perm], n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut orbit: BTreeSet<usize> = BTreeSet::new();
        for g in elements {
            orbit.insert(g.apply(s));
        }
        for &i in &orbit {
            seen[i] = true;
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

/// Action of `g` on the left cosets of `h` in `group`, as a permutation of coset indices.
pub struct CosetAction {
    cosets: Vec<BTreeSet<Perm>>,
}

impl CosetAction {
    pub fn new(group: &Group, h: &Group) -> CosetAction {
        let mut cosets: Vec<BTreeSet<Perm>> = Vec::new();
        for g in &group.elements {
            if cosets.iter().any(|c| c.contains(g)) {
                continue;
            }
            cosets.push(h.elements.iter().map(|x| g.compose(x)).collect());
        }
        CosetAction { cosets }
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn image(&self, g: &Perm) -> Perm {
        Perm(
            self.cosets
                .iter()
                .map(|c| {
                    let rep = c.iter().next().unwrap();
                    let moved = g.compose(rep);
                    self.cosets.iter().position(|d| d.contains(&moved)).unwrap() as u8
                })
                .collect(),
        )
    }
}

/// Splitting data predicted for a G-set: each D-orbit gives (e, f) with e the
/// common size of the I-orbits inside it and f their number.
pub fn ef_pattern(d: &Group, i: &Group, action: &dyn Fn(&Perm) -> Perm, npoints: usize) -> Vec<(u32, u32)> {
    let dimg: Vec<Perm> = d.elements.iter().map(action).collect();
    let iimg: Vec<Perm> = i.elements.iter().map(action).collect();
    let dorb = orbits_of(&dimg, npoints);
    let iorb = orbits_of(&iimg, npoints);
    let mut out: Vec<(u32, u32)> = dorb
        .iter()
        .map(|o| {
            let pieces: Vec<&Vec<usize>> = iorb.iter().filter(|x| o.contains(&x[0])).collect();
            let e = pieces[0].len() as u32;
            (e, pieces.len() as u32)
        })
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgroup_counts() {
        assert_eq!(Group::symmetric(4).subgroups().len(), 30);
        assert_eq!(Group::alternating(4).subgroups().len(), 10);
        assert_eq!(Group::alternating(5).subgroups().len(), 59);
    }

    #[test]
    fn dihedral_recognition() {
        let s4 = Group::symmetric(4);
        let d4 = Group::generated(4, &[Perm::from_cycles(4, &[&[0, 1, 2, 3]]), Perm::from_cycles(4, &[&[0, 2]])]);
        assert_eq!(d4.order(), 8);
        assert!(d4.is_dihedral());
        assert!(!s4.is_dihedral());
        let v4 = Group::generated(4, &[Perm::from_cycles(4, &[&[0, 1]]), Perm::from_cycles(4, &[&[2, 3]])]);
        assert!(v4.is_dihedral());
        assert!(!Group::alternating(4).is_dihedral());
    }

    #[test]
    fn coset_action_of_a5_on_six_points() {
        let a5 = Group::alternating(5);
        let d5 = Group::generated(5, &[Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]), Perm::from_cycles(5, &[&[1, 4], &[2, 3]])]);
        assert_eq!(d5.order(), 10);
        let act = CosetAction::new(&a5, &d5);
        assert_eq!(act.len(), 6);
        let c5 = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]);
        assert_eq!(act.image(&c5).cycle_type(), vec![1, 5]);
    }
}
