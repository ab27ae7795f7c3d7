//! Brute-force computations in tiny explicit groups: Eulerian functions
//! `phi_d` (number of generating `d`-tuples), automorphism counts and the
//! minimal number of generators of a direct power `S^k`.
//!
//! Elements are indices into a full multiplication table. Generating-tuple
//! counts are obtained by a dynamic program over the subgroups reached by
//! tuple prefixes: a `d`-tuple generates `G` iff the subgroup generated by its
//! first `d - 1` entries together with the last entry is `G`, and subgroup
//! closures are memoised per `(subgroup, element)`.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Largest group order accepted by the constructors.
pub const MAX_ORDER: usize = 2000;
/// Largest order accepted by [`ConcreteGroup::automorphism_count`].
pub const MAX_AUT_ORDER: usize = 400;

#[derive(Clone, Debug)]
pub struct ConcreteGroup {
    name: String,
    order: usize,
    table: Vec<u16>,
    inverse: Vec<u16>,
    identity: usize,
}

impl ConcreteGroup {
    /// Closes `generators` under `mul` and tabulates the result.
    pub fn from_generators<T, F>(name: &str, identity: T, generators: &[T], mul: F) -> Result<Self>
    where
        T: Clone + Eq + std::hash::Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let y = mul(&elements[i], g);
                if !index.contains_key(&y) {
                    if elements.len() >= MAX_ORDER {
                        return Err(Error::Budget(format!(
                            "{name}: group order exceeds {MAX_ORDER}"
                        )));
                    }
                    index.insert(y.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(y);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![0u16; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                table[i * n + j] = index[&mul(a, b)] as u16;
            }
        }
        let mut inverse = vec![0u16; n];
        for i in 0..n {
            inverse[i] = (0..n)
                .find(|&j| table[i * n + j] == 0)
                .ok_or_else(|| Error::Invariant(format!("{name}: element {i} has no inverse")))?
                as u16;
        }
        let g = ConcreteGroup {
            name: name.to_string(),
            order: n,
            table,
            inverse,
            identity: 0,
        };
        g.spot_check_associativity(1000)?;
        Ok(g)
    }

    /// Permutation group on `0..points` generated by the given images.
    pub fn from_permutations(name: &str, points: usize, generators: &[Vec<u8>]) -> Result<Self> {
        if points > 8 || generators.iter().any(|g| g.len() != points) {
            return Err(Error::precondition(
                "permutations must act on at most 8 points and agree in degree",
            ));
        }
        let id: Vec<u8> = (0..points as u8).collect();
        // (a * b)(x) = a(b(x))
        Self::from_generators(name, id, generators, |a, b| {
            b.iter().map(|&x| a[x as usize]).collect::<Vec<u8>>()
        })
    }

    /// Matrix group generated inside `GL2(F_p)`; with `projective`, matrices
    /// are identified up to sign.
    pub fn from_matrices(name: &str, p: u16, generators: &[[u16; 4]], projective: bool) -> Result<Self> {
        if !crate::arith::is_prime(p as u64) || p > 13 {
            return Err(Error::precondition("matrix groups need a prime p <= 13"));
        }
        let normalise = move |m: [u16; 4]| -> [u16; 4] {
            if !projective {
                return m;
            }
            let neg = m.map(|x| (p - x) % p);
            m.min(neg)
        };
        let mul = move |a: &[u16; 4], b: &[u16; 4]| -> [u16; 4] {
            let (a, b) = (a.map(u32::from), b.map(u32::from));
            let p32 = p as u32;
            normalise([
                ((a[0] * b[0] + a[1] * b[2]) % p32) as u16,
                ((a[0] * b[1] + a[1] * b[3]) % p32) as u16,
                ((a[2] * b[0] + a[3] * b[2]) % p32) as u16,
                ((a[2] * b[1] + a[3] * b[3]) % p32) as u16,
            ])
        };
        let gens: Vec<[u16; 4]> = generators.iter().map(|g| normalise(*g)).collect();
        Self::from_generators(name, normalise([1, 0, 0, 1]), &gens, mul)
    }

    /// Looks up a catalog group by id: `C2`, `C3`, `A5`, `A6` (= `PSL2_9`),
    /// `PSL2_5`, `PSL2_7`, `SL2_5`.
    pub fn catalog(id: &str) -> Result<Self> {
        let sl2_gens = |p: u16| [[1, 1, 0, 1], [0, p - 1, 1, 0]];
        match id {
            "C2" => Self::from_permutations("C2", 2, &[vec![1, 0]]),
            "C3" => Self::from_permutations("C3", 3, &[vec![1, 2, 0]]),
            "A5" => Self::from_permutations("A5", 5, &[vec![1, 2, 0, 3, 4], vec![1, 2, 3, 4, 0]]),
            "A6" | "PSL2_9" => Self::from_permutations(
                id,
                6,
                &[vec![1, 2, 0, 3, 4, 5], vec![0, 2, 3, 4, 5, 1]],
            ),
            "PSL2_5" => Self::from_matrices("PSL2_5", 5, &sl2_gens(5), true),
            "PSL2_7" => Self::from_matrices("PSL2_7", 7, &sl2_gens(7), true),
            "SL2_5" => Self::from_matrices("SL2_5", 5, &sl2_gens(5), false),
            other => Err(Error::parse(
                "/group",
                format!("unknown catalog group {other:?}; known: C2 C3 A5 A6 PSL2_5 PSL2_7 PSL2_9 SL2_5"),
            )),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn spot_check_associativity(&self, trials: usize) -> Result<()> {
        // xorshift keeps this independent of any RNG crate and deterministic
        let mut s: u64 = 0x9E37_79B9_7F4A_7C15;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s % self.order as u64) as usize
        };
        for _ in 0..trials {
            let (a, b, c) = (next(), next(), next());
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(Error::Invariant(format!(
                    "{}: multiplication is not associative on ({a},{b},{c})",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by `gens`, as a membership bitmap.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    queue.push_back(y);
                }
            }
        }
        member
    }

    pub fn generates(&self, gens: &[usize]) -> bool {
        self.closure(gens).iter().all(|&b| b)
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for a in 0..self.order {
            if seen[a] {
                continue;
            }
            let mut class = Vec::new();
            for g in 0..self.order {
                let c = self.mul(self.mul(g, a), self.inv(g));
                if !seen[c] {
                    seen[c] = true;
                    class.push(c);
                }
            }
            classes.push(class);
        }
        classes
    }

    /// Nonabelian and without proper nontrivial normal subgroups.
    pub fn is_nonabelian_simple(&self) -> bool {
        if self.is_abelian() {
            return false;
        }
        self.conjugacy_classes()
            .iter()
            .filter(|c| c[0] != self.identity)
            .all(|c| self.generates(c))
    }

    /// Eulerian functions `phi_1, ..., phi_max_d`, exactly.
    pub fn eulerian_functions(&self, max_d: usize, subgroup_budget: usize) -> Result<Vec<BigUint>> {
        let mut lattice = SubgroupWalk::new(self, subgroup_budget);
        let mut counts: HashMap<usize, BigUint> = HashMap::from([(lattice.trivial(), BigUint::one())]);
        let mut out = Vec::with_capacity(max_d);
        for _ in 0..max_d {
            let mut next: HashMap<usize, BigUint> = HashMap::new();
            let mut keys: Vec<usize> = counts.keys().copied().collect();
            keys.sort_unstable();
            for h in keys {
                let c = &counts[&h];
                for (target, hits) in lattice.extensions(h)? {
                    *next.entry(target).or_insert_with(BigUint::zero) += c * BigUint::from(hits);
                }
            }
            counts = next;
            out.push(counts.get(&lattice.whole()).cloned().unwrap_or_default());
        }
        Ok(out)
    }

    /// Number of `d`-tuples generating the group.
    pub fn generating_tuple_count(&self, d: usize) -> Result<BigUint> {
        if d == 0 {
            return Ok(if self.order == 1 { BigUint::one() } else { BigUint::zero() });
        }
        Ok(self
            .eulerian_functions(d, DEFAULT_SUBGROUP_BUDGET)?
            .pop()
            .unwrap_or_default())
    }

    /// Some generating pair, scanning in index order.
    pub fn generating_pair(&self) -> Option<(usize, usize)> {
        for a in 0..self.order {
            for b in a..self.order {
                if self.generates(&[a, b]) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `|Aut(G)|` for a 2-generated group, by counting the images `(x, y)` of
    /// a fixed generating pair `(a, b)` that extend to automorphisms.
    pub fn automorphism_count(&self) -> Result<u64> {
        if self.order > MAX_AUT_ORDER {
            return Err(Error::Budget(format!(
                "automorphism counting is limited to order {MAX_AUT_ORDER}"
            )));
        }
        if self.order == 1 {
            return Ok(1);
        }
        let (a, b) = self
            .generating_pair()
            .ok_or_else(|| Error::precondition(format!("{} is not 2-generated", self.name)))?;
        let (oa, ob, oab) = (
            self.element_order(a),
            self.element_order(b),
            self.element_order(self.mul(a, b)),
        );
        let orders: Vec<usize> = (0..self.order).map(|x| self.element_order(x)).collect();
        let tree = self.spanning_tree(&[a, b]);
        let count: u64 = (0..self.order)
            .into_par_iter()
            .filter(|&x| orders[x] == oa)
            .map(|x| {
                (0..self.order)
                    .filter(|&y| orders[y] == ob && orders[self.mul(x, y)] == oab)
                    .filter(|&y| self.extends_to_automorphism(&tree, &[a, b], &[x, y]))
                    .count() as u64
            })
            .sum();
        Ok(count)
    }

    /// BFS order from the identity by right multiplication with `gens`:
    /// `(element, parent, generator index)`.
    fn spanning_tree(&self, gens: &[usize]) -> Vec<(usize, usize, usize)> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut order = vec![(self.identity, self.identity, usize::MAX)];
        let mut i = 0;
        while i < order.len() {
            let x = order[i].0;
            for (k, &g) in gens.iter().enumerate() {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    order.push((y, x, k));
                }
            }
            i += 1;
        }
        order
    }

    fn extends_to_automorphism(&self, tree: &[(usize, usize, usize)], gens: &[usize], images: &[usize]) -> bool {
        let mut phi = vec![usize::MAX; self.order];
        phi[self.identity] = self.identity;
        for &(y, parent, k) in tree.iter().skip(1) {
            phi[y] = self.mul(phi[parent], images[k]);
        }
        // compatibility with right multiplication by every generator
        for x in 0..self.order {
            for (k, &g) in gens.iter().enumerate() {
                if phi[self.mul(x, g)] != self.mul(phi[x], images[k]) {
                    return false;
                }
            }
        }
        let mut hit = vec![false; self.order];
        for &v in &phi {
            if hit[v] {
                return false;
            }
            hit[v] = true;
        }
        true
    }

    /// `d(G^k) = min { d >= 2 : phi_d(G) / |Aut G| >= k }` for nonabelian
    /// simple `G`.
    pub fn min_generators_power(&self, k: &BigUint) -> Result<MinGenerators> {
        if k.is_zero() {
            return Err(Error::precondition("the power k must be positive"));
        }
        if !self.is_nonabelian_simple() {
            return Err(Error::precondition(format!(
                "{} is not a nonabelian simple group",
                self.name
            )));
        }
        let aut = BigUint::from(self.automorphism_count()?);
        let needed = k * &aut;
        let mut lattice = SubgroupWalk::new(self, DEFAULT_SUBGROUP_BUDGET);
        let mut counts: HashMap<usize, BigUint> = HashMap::from([(lattice.trivial(), BigUint::one())]);
        let mut phis = Vec::new();
        for d in 1..=MAX_GENERATOR_SEARCH {
            let mut next: HashMap<usize, BigUint> = HashMap::new();
            let mut keys: Vec<usize> = counts.keys().copied().collect();
            keys.sort_unstable();
            for h in keys {
                let c = &counts[&h];
                for (target, hits) in lattice.extensions(h)? {
                    *next.entry(target).or_insert_with(BigUint::zero) += c * BigUint::from(hits);
                }
            }
            counts = next;
            let phi = counts.get(&lattice.whole()).cloned().unwrap_or_default();
            phis.push(phi.clone());
            if d >= 2 && phi >= needed {
                return Ok(MinGenerators {
                    d,
                    aut: aut.clone(),
                    phi,
                    eulerian: phis,
                });
            }
        }
        Err(Error::Budget(format!(
            "no d <= {MAX_GENERATOR_SEARCH} generates {}^{k}; needs larger enumeration",
            self.name
        )))
    }

    pub fn counts_json(&self, max_d: usize) -> Result<Value> {
        let phis = self.eulerian_functions(max_d, DEFAULT_SUBGROUP_BUDGET)?;
        let phi: serde_json::Map<String, Value> = phis
            .iter()
            .enumerate()
            .map(|(i, p)| ((i + 1).to_string(), Value::String(p.to_string())))
            .collect();
        let aut = if self.order <= MAX_AUT_ORDER {
            json!(self.automorphism_count()?)
        } else {
            Value::Null
        };
        Ok(json!({"group": self.name, "order": self.order, "phi": phi, "aut": aut}))
    }
}

pub const DEFAULT_SUBGROUP_BUDGET: usize = 20_000;
pub const MAX_GENERATOR_SEARCH: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinGenerators {
    pub d: usize,
    pub aut: BigUint,
    /// `phi_d` at the returned `d`.
    pub phi: BigUint,
    /// `phi_1 ..= phi_d`.
    pub eulerian: Vec<BigUint>,
}

/// Memoised subgroup lattice walk used by the Eulerian-function DP.
struct SubgroupWalk<'g> {
    group: &'g ConcreteGroup,
    budget: usize,
    ids: HashMap<Vec<u64>, usize>,
    /// per subgroup: member bitmap and a generating list
    subgroups: Vec<(Vec<bool>, Vec<usize>)>,
    /// per subgroup: multiset of closures reached by appending one element
    extensions: HashMap<usize, Vec<(usize, u64)>>,
}

impl<'g> SubgroupWalk<'g> {
    fn new(group: &'g ConcreteGroup, budget: usize) -> Self {
        let mut w = SubgroupWalk {
            group,
            budget,
            ids: HashMap::new(),
            subgroups: Vec::new(),
            extensions: HashMap::new(),
        };
        let trivial = group.closure(&[]);
        w.intern(trivial, Vec::new()).expect("trivial subgroup fits any budget");
        let whole = vec![true; group.order];
        w.intern(whole, Vec::new()).expect("whole group fits any budget");
        w
    }

    fn trivial(&self) -> usize {
        0
    }

    fn whole(&self) -> usize {
        1
    }

    fn key(bits: &[bool]) -> Vec<u64> {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }

    fn intern(&mut self, bits: Vec<bool>, gens: Vec<usize>) -> Result<usize> {
        let key = Self::key(&bits);
        if let Some(&id) = self.ids.get(&key) {
            return Ok(id);
        }
        if self.subgroups.len() >= self.budget {
            return Err(Error::Budget(format!(
                "more than {} distinct subgroups reached in {}",
                self.budget, self.group.name
            )));
        }
        let id = self.subgroups.len();
        self.ids.insert(key, id);
        self.subgroups.push((bits, gens));
        Ok(id)
    }

    fn extensions(&mut self, h: usize) -> Result<Vec<(usize, u64)>> {
        if let Some(e) = self.extensions.get(&h) {
            return Ok(e.clone());
        }
        let (members, gens) = self.subgroups[h].clone();
        let mut tally: HashMap<usize, u64> = HashMap::new();
        for (x, &inside) in members.iter().enumerate() {
            let target = if inside {
                h
            } else {
                let mut g = gens.clone();
                g.push(x);
                let bits = self.group.closure(&g);
                self.intern(bits, g)?
            };
            *tally.entry(target).or_insert(0) += 1;
        }
        let mut out: Vec<(usize, u64)> = tally.into_iter().collect();
        out.sort_unstable();
        self.extensions.insert(h, out.clone());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: test every pair with a fresh closure.
    fn brute_force_pairs(g: &ConcreteGroup) -> u64 {
        let mut c = 0;
        for a in 0..g.order() {
            for b in 0..g.order() {
                if g.generates(&[a, b]) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn catalog_orders() {
        for (id, n) in [
            ("C2", 2),
            ("C3", 3),
            ("A5", 60),
            ("A6", 360),
            ("PSL2_5", 60),
            ("PSL2_7", 168),
            ("SL2_5", 120),
        ] {
            assert_eq!(ConcreteGroup::catalog(id).unwrap().order(), n, "{id}");
        }
        assert!(ConcreteGroup::catalog("M11").is_err());
    }

    #[test]
    fn class_numbers_match_character_counts() {
        use crate::char_tables::DegreeTable;
        let sl = ConcreteGroup::catalog("SL2_5").unwrap();
        assert_eq!(sl.conjugacy_classes().len() as u64, DegreeTable::sl2(5).unwrap().character_count());
        let a5 = ConcreteGroup::catalog("A5").unwrap();
        assert_eq!(a5.conjugacy_classes().len() as u64, DegreeTable::psl2(5).unwrap().character_count());
        let l27 = ConcreteGroup::catalog("PSL2_7").unwrap();
        assert_eq!(l27.conjugacy_classes().len() as u64, DegreeTable::psl2(7).unwrap().character_count());
    }

    #[test]
    fn small_tuple_counts() {
        let c2 = ConcreteGroup::catalog("C2").unwrap();
        assert_eq!(c2.generating_tuple_count(1).unwrap(), BigUint::from(1u32));
        let a5 = ConcreteGroup::catalog("A5").unwrap();
        assert_eq!(a5.generating_tuple_count(1).unwrap(), BigUint::zero());
    }

    #[test]
    fn dp_matches_brute_force_pairs() {
        for id in ["A5", "SL2_5"] {
            let g = ConcreteGroup::catalog(id).unwrap();
            let dp = g.generating_tuple_count(2).unwrap();
            assert_eq!(dp, BigUint::from(brute_force_pairs(&g)), "{id}");
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(ConcreteGroup::catalog("C3").unwrap().automorphism_count().unwrap(), 2);
        assert_eq!(ConcreteGroup::catalog("A5").unwrap().automorphism_count().unwrap(), 120);
        assert_eq!(ConcreteGroup::catalog("PSL2_7").unwrap().automorphism_count().unwrap(), 336);
    }

    #[test]
    fn simplicity() {
        assert!(ConcreteGroup::catalog("A5").unwrap().is_nonabelian_simple());
        assert!(ConcreteGroup::catalog("PSL2_7").unwrap().is_nonabelian_simple());
        assert!(!ConcreteGroup::catalog("SL2_5").unwrap().is_nonabelian_simple());
        assert!(!ConcreteGroup::catalog("C3").unwrap().is_nonabelian_simple());
        let sl = ConcreteGroup::catalog("SL2_5").unwrap();
        assert!(sl.min_generators_power(&BigUint::one()).is_err());
    }

    #[test]
    fn min_generators_small_powers() {
        let a5 = ConcreteGroup::catalog("A5").unwrap();
        assert_eq!(a5.min_generators_power(&BigUint::one()).unwrap().d, 2);
        assert_eq!(a5.min_generators_power(&BigUint::from(60u32)).unwrap().d, 3);
        assert!(a5.min_generators_power(&BigUint::zero()).is_err());
    }

    #[test]
    fn eulerian_functions_are_monotone_and_bounded() {
        let g = ConcreteGroup::catalog("PSL2_7").unwrap();
        let phis = g.eulerian_functions(4, DEFAULT_SUBGROUP_BUDGET).unwrap();
        for (i, w) in phis.windows(2).enumerate() {
            assert!(w[0] <= w[1], "phi_{} > phi_{}", i + 1, i + 2);
        }
        for (i, p) in phis.iter().enumerate() {
            assert!(p <= &num_traits::pow(BigUint::from(168u32), i + 1));
        }
        let aut = BigUint::from(g.automorphism_count().unwrap());
        assert!((&phis[1] % &aut).is_zero());
    }
}
