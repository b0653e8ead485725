//! Admissible pair sets over a decomposition of `{1, ..., N}` into
//! consecutive intervals.
//!
//! Slot positions in this module are 1-based so that pair sets read the same
//! as in hand calculations; per-interval permutations are 0-based
//! [`Permutation`]s like everywhere else.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Permutation;

/// Upper limit on `N` for enumeration.
pub const MAX_ENUM_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IntervalDecomposition {
    lengths: Vec<usize>,
    offsets: Vec<usize>,
}

impl TryFrom<Vec<usize>> for IntervalDecomposition {
    type Error = Error;
    fn try_from(lengths: Vec<usize>) -> Result<Self> {
        Self::new(lengths)
    }
}

impl From<IntervalDecomposition> for Vec<usize> {
    fn from(d: IntervalDecomposition) -> Self {
        d.lengths
    }
}

impl IntervalDecomposition {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        if lengths.contains(&0) {
            return Err(Error::InvalidDecomposition(format!(
                "interval lengths must be positive: {lengths:?}"
            )));
        }
        let mut offsets = Vec::with_capacity(lengths.len());
        let mut s = 0;
        for &d in &lengths {
            offsets.push(s);
            s += d;
        }
        Ok(Self { lengths, offsets })
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// `s_j`: number of slots before interval `j` (0-based `j`).
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn num_intervals(&self) -> usize {
        self.lengths.len()
    }

    pub fn total(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Slots of interval `j` as a 1-based inclusive range.
    pub fn interval(&self, j: usize) -> std::ops::RangeInclusive<usize> {
        self.offsets[j] + 1..=self.offsets[j] + self.lengths[j]
    }

    /// Interval (0-based) containing the 1-based slot `i`.
    pub fn interval_of(&self, i: usize) -> Option<usize> {
        if i == 0 || i > self.total() {
            return None;
        }
        Some(self.offsets.partition_point(|&s| s < i) - 1)
    }

    /// Decomposition with one more interval of length `d` appended.
    pub fn extended(&self, d: usize) -> Result<Self> {
        let mut l = self.lengths.clone();
        l.push(d);
        Self::new(l)
    }
}

/// A set of admissible pairs, each stored as `(m, n)` with `m < n`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPairSet", into = "RawPairSet")]
pub struct PairSet {
    decomp: IntervalDecomposition,
    pairs: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawPairSet {
    lengths: Vec<usize>,
    pairs: Vec<[usize; 2]>,
}

impl TryFrom<RawPairSet> for PairSet {
    type Error = Error;
    fn try_from(raw: RawPairSet) -> Result<Self> {
        let decomp = IntervalDecomposition::new(raw.lengths)?;
        PairSet::new(decomp, raw.pairs.into_iter().map(|[m, n]| (m, n)).collect())
    }
}

impl From<PairSet> for RawPairSet {
    fn from(v: PairSet) -> Self {
        RawPairSet {
            lengths: v.decomp.lengths,
            pairs: v.pairs.into_iter().map(|(m, n)| [m, n]).collect(),
        }
    }
}

impl PairSet {
    /// Builds and validates a pair set; pairs may be given in any order and
    /// orientation.
    pub fn new(decomp: IntervalDecomposition, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n_total = decomp.total();
        let mut seen = vec![false; n_total + 1];
        let mut canon = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (m, n) = if a < b { (a, b) } else { (b, a) };
            if m == 0 || n > n_total {
                return Err(Error::Inadmissible(format!("pair {{{m},{n}}} outside 1..={n_total}")));
            }
            if m == n || seen[m] || seen[n] {
                return Err(Error::Inadmissible(format!("endpoint repeated in {{{m},{n}}}")));
            }
            seen[m] = true;
            seen[n] = true;
            if decomp.interval_of(m) == decomp.interval_of(n) {
                return Err(Error::Inadmissible(format!(
                    "pair {{{m},{n}}} lies within one interval"
                )));
            }
            canon.push((m, n));
        }
        canon.sort_unstable();
        Ok(Self { decomp, pairs: canon })
    }

    pub fn empty(decomp: IntervalDecomposition) -> Self {
        Self { decomp, pairs: Vec::new() }
    }

    pub fn decomposition(&self) -> &IntervalDecomposition {
        &self.decomp
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// `k = |V|`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Order of the cancelled tensor, `N - 2k`.
    pub fn output_order(&self) -> usize {
        self.decomp.total() - 2 * self.pairs.len()
    }

    /// Partner of each slot (index 0 unused), `None` for survivors.
    pub fn partner_map(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.decomp.total() + 1];
        for &(m, n) in &self.pairs {
            p[m] = Some(n);
            p[n] = Some(m);
        }
        p
    }

    /// `V_*` in increasing order, i.e. the enumeration `o`.
    pub fn v_star(&self) -> Vec<usize> {
        let partners = self.partner_map();
        (1..=self.decomp.total()).filter(|&i| partners[i].is_none()).collect()
    }

    /// The global permutation `π(i) = s_j + π_j(i - s_j)` as a 1-based map
    /// (index 0 unused).
    pub fn global_permutation(&self, perms: &[Permutation]) -> Result<Vec<usize>> {
        if perms.len() != self.decomp.num_intervals() {
            return Err(Error::InvalidPermutation(format!(
                "{} permutations for {} intervals",
                perms.len(),
                self.decomp.num_intervals()
            )));
        }
        let mut pi = vec![0; self.decomp.total() + 1];
        for (j, p) in perms.iter().enumerate() {
            let d = self.decomp.lengths[j];
            if p.len() != d {
                return Err(Error::InvalidPermutation(format!(
                    "interval {} has length {d}, permutation has length {}",
                    j + 1,
                    p.len()
                )));
            }
            let s = self.decomp.offsets[j];
            for i in 1..=d {
                pi[s + i] = s + p.apply(i - 1) + 1;
            }
        }
        Ok(pi)
    }

    /// `V^π`.
    pub fn permuted(&self, perms: &[Permutation]) -> Result<Self> {
        let pi = self.global_permutation(perms)?;
        Self::new(
            self.decomp.clone(),
            self.pairs.iter().map(|&(m, n)| (pi[m], pi[n])).collect(),
        )
    }

    /// `V_*^{(j)}`: survivors inside interval `j`, shifted to `1..=d_j`.
    pub fn trace(&self, j: usize) -> Vec<usize> {
        let s = self.decomp.offsets[j];
        self.v_star()
            .into_iter()
            .filter(|&i| self.decomp.interval_of(i) == Some(j))
            .map(|i| i - s)
            .collect()
    }

    /// The sets `V_j = {{i, d_j + i} : i ∈ V_*^{(j)}}` over `(d_j, d_j)`.
    pub fn trace_sets(&self) -> Vec<PairSet> {
        (0..self.decomp.num_intervals())
            .map(|j| {
                let d = self.decomp.lengths[j];
                let decomp = IntervalDecomposition::new(vec![d, d]).expect("positive length");
                let pairs = self.trace(j).into_iter().map(|i| (i, d + i)).collect();
                PairSet::new(decomp, pairs).expect("trace set is admissible")
            })
            .collect()
    }

    /// Decomposition `({1..N-2k}, {N-2k+1..N-2k+d})` on which a follow-up
    /// pair set `V'` must live.
    pub fn follow_up_decomposition(&self, d: usize) -> Result<IntervalDecomposition> {
        let r = self.output_order();
        if r == 0 {
            return Err(Error::InvalidArgument(
                "composition needs 2|V| < N".into(),
            ));
        }
        IntervalDecomposition::new(vec![r, d])
    }

    /// `V ∪ V''` over the decomposition extended by the second interval of
    /// `v_prime`.
    pub fn compose(&self, v_prime: &PairSet) -> Result<PairSet> {
        let r = self.output_order();
        if r == 0 {
            return Err(Error::InvalidArgument("composition needs 2|V| < N".into()));
        }
        let dl = v_prime.decomp.lengths();
        if dl.len() != 2 || dl[0] != r {
            return Err(Error::InvalidDecomposition(format!(
                "follow-up pair set must live on ({r}, d), got {dl:?}"
            )));
        }
        let o = self.v_star();
        let k = self.len();
        let mut pairs = self.pairs.clone();
        for &(m, n) in &v_prime.pairs {
            pairs.push((o[m - 1], n + 2 * k));
        }
        PairSet::new(self.decomp.extended(dl[1])?, pairs)
    }

    /// Just the `V''` part of [`compose`](Self::compose).
    pub fn lifted(&self, v_prime: &PairSet) -> Result<Vec<(usize, usize)>> {
        let all = self.compose(v_prime)?;
        Ok(all
            .pairs
            .into_iter()
            .filter(|p| !self.pairs.contains(p))
            .collect())
    }
}

fn check_k(decomp: &IntervalDecomposition, k: usize) -> Result<()> {
    if 2 * k > decomp.total() {
        return Err(Error::InvalidArgument(format!(
            "2k = {} exceeds N = {}",
            2 * k,
            decomp.total()
        )));
    }
    Ok(())
}

/// All admissible pair sets of size `k`, in lexicographic order of their
/// sorted pair lists.
pub fn enumerate_admissible(decomp: &IntervalDecomposition, k: usize) -> Result<Vec<PairSet>> {
    check_k(decomp, k)?;
    let n = decomp.total();
    if n > MAX_ENUM_N {
        return Err(Error::CapExceeded {
            what: "enumeration size N",
            value: n,
            cap: MAX_ENUM_N,
        });
    }
    let owner: Vec<usize> = (0..=n)
        .map(|i| decomp.interval_of(i).unwrap_or(usize::MAX))
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; n + 1];
    let mut current = Vec::with_capacity(k);
    backtrack(1, n, k, &owner, &mut used, &mut current, &mut |pairs| {
        out.push(PairSet {
            decomp: decomp.clone(),
            pairs: pairs.to_vec(),
        })
    });
    Ok(out)
}

type Emit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

fn backtrack(
    i: usize,
    n: usize,
    k: usize,
    owner: &[usize],
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    emit: &mut Emit<'_>,
) {
    if current.len() == k {
        emit(current);
        return;
    }
    let mut i = i;
    while i <= n && used[i] {
        i += 1;
    }
    let free = (i..=n).filter(|&s| !used[s]).count();
    if free < 2 * (k - current.len()) {
        return;
    }
    used[i] = true;
    for j in i + 1..=n {
        if used[j] || owner[j] == owner[i] {
            continue;
        }
        used[j] = true;
        current.push((i, j));
        backtrack(i + 1, n, k, owner, used, current, emit);
        current.pop();
        used[j] = false;
    }
    // leave i unpaired; it stays marked so the scan skips it
    backtrack(i + 1, n, k, owner, used, current, emit);
    used[i] = false;
}

/// `|E^k|` without enumerating, by recursion on the multiset of free slot
/// counts per interval.
pub fn count_admissible(decomp: &IntervalDecomposition, k: usize) -> Result<u128> {
    check_k(decomp, k)?;
    let mut counts: Vec<usize> = decomp.lengths().to_vec();
    counts.sort_unstable();
    let mut memo = HashMap::new();
    Ok(count_rec(counts, k, &mut memo))
}

fn count_rec(counts: Vec<usize>, k: usize, memo: &mut HashMap<(Vec<usize>, usize), u128>) -> u128 {
    if k == 0 {
        return 1;
    }
    let free: usize = counts.iter().sum();
    if free < 2 * k {
        return 0;
    }
    if let Some(&v) = memo.get(&(counts.clone(), k)) {
        return v;
    }
    let first = counts.iter().position(|&c| c > 0).expect("free slots remain");
    let mut total = 0u128;
    // the chosen slot stays unpaired
    let mut next = counts.clone();
    next[first] -= 1;
    total += count_rec(canonical(next), k, memo);
    // or pairs with a slot of another interval
    for j in 0..counts.len() {
        if j == first || counts[j] == 0 {
            continue;
        }
        let mut next = counts.clone();
        next[first] -= 1;
        next[j] -= 1;
        total += counts[j] as u128 * count_rec(canonical(next), k - 1, memo);
    }
    memo.insert((counts, k), total);
    total
}

fn canonical(mut c: Vec<usize>) -> Vec<usize> {
    c.retain(|&x| x > 0);
    c.sort_unstable();
    c
}

/// `N! / (2^k k! (N-2k)!)`, the number of `k`-pairings of `N` points with no
/// interval restriction.
pub fn cardinality_bound(n: usize, k: usize) -> u128 {
    if 2 * k > n {
        return 0;
    }
    let mut num: u128 = 1;
    for i in (n - 2 * k + 1)..=n {
        num *= i as u128;
    }
    let mut den: u128 = 1;
    for i in 1..=k {
        den *= 2 * i as u128;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dec(l: &[usize]) -> IntervalDecomposition {
        IntervalDecomposition::new(l.to_vec()).unwrap()
    }

    fn figure_set() -> PairSet {
        PairSet::new(dec(&[5, 5, 3, 1, 4]), vec![(3, 6), (5, 10), (9, 11), (13, 14)]).unwrap()
    }

    /// Every `k`-subset of pairs from the full pair list, filtered by the
    /// admissibility rules.
    fn brute_force(d: &IntervalDecomposition, k: usize) -> Vec<Vec<(usize, usize)>> {
        let n = d.total();
        let all: Vec<(usize, usize)> = (1..=n)
            .flat_map(|m| (m + 1..=n).map(move |j| (m, j)))
            .collect();
        let mut out = Vec::new();
        let mut pick = Vec::new();
        fn rec(
            start: usize,
            k: usize,
            all: &[(usize, usize)],
            pick: &mut Vec<(usize, usize)>,
            out: &mut Vec<Vec<(usize, usize)>>,
            d: &IntervalDecomposition,
        ) {
            if pick.len() == k {
                if PairSet::new(d.clone(), pick.clone()).is_ok() {
                    out.push(pick.clone());
                }
                return;
            }
            for t in start..all.len() {
                pick.push(all[t]);
                rec(t + 1, k, all, pick, out, d);
                pick.pop();
            }
        }
        rec(0, k, &all, &mut pick, &mut out, d);
        out.sort();
        out
    }

    #[test]
    fn decomposition_geometry() {
        let d = dec(&[5, 5, 3, 1, 4]);
        assert_eq!(d.total(), 18);
        assert_eq!(d.offsets(), &[0, 5, 10, 13, 14]);
        assert_eq!(d.interval(2), 11..=13);
        assert_eq!(d.interval_of(1), Some(0));
        assert_eq!(d.interval_of(5), Some(0));
        assert_eq!(d.interval_of(6), Some(1));
        assert_eq!(d.interval_of(14), Some(3));
        assert_eq!(d.interval_of(18), Some(4));
        assert_eq!(d.interval_of(19), None);
        assert!(IntervalDecomposition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn admissibility_rules() {
        assert!(matches!(
            PairSet::new(dec(&[2, 2]), vec![(1, 2)]),
            Err(Error::Inadmissible(_))
        ));
        assert!(PairSet::new(dec(&[2, 2]), vec![(1, 3), (3, 2)]).is_err());
        assert!(PairSet::new(dec(&[2, 2]), vec![(1, 5)]).is_err());
        let v = PairSet::new(dec(&[2, 2]), vec![(4, 1)]).unwrap();
        assert_eq!(v.pairs(), &[(1, 4)]);
    }

    #[test]
    fn enumerate_small_cases() {
        let e = enumerate_admissible(&dec(&[1, 1]), 1).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].pairs(), &[(1, 2)]);
        let e0 = enumerate_admissible(&dec(&[1, 1]), 0).unwrap();
        assert_eq!(e0.len(), 1);
        assert!(e0[0].is_empty());
        let e = enumerate_admissible(&dec(&[2, 2]), 1).unwrap();
        let got: Vec<_> = e.iter().map(|v| v.pairs().to_vec()).collect();
        assert_eq!(got, vec![vec![(1, 3)], vec![(1, 4)], vec![(2, 3)], vec![(2, 4)]]);
        assert!(enumerate_admissible(&dec(&[1, 1]), 2).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for lengths in [
            vec![1, 1, 1, 1],
            vec![2, 2],
            vec![3, 1, 2],
            vec![2, 2, 2],
            vec![1, 3, 1, 2],
            vec![4, 4],
        ] {
            let d = dec(&lengths);
            for k in 0..=d.total() / 2 {
                let got: Vec<_> = enumerate_admissible(&d, k)
                    .unwrap()
                    .into_iter()
                    .map(|v| v.pairs().to_vec())
                    .collect();
                assert_eq!(got, brute_force(&d, k), "{lengths:?} k={k}");
            }
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_admissible(&dec(&[1, 1, 1, 1]), 2).unwrap(), 3);
        assert_eq!(cardinality_bound(4, 2), 3);
        assert_eq!(count_admissible(&dec(&[2, 2]), 2).unwrap(), 2);
        assert_eq!(cardinality_bound(4, 2), 3);
        assert_eq!(count_admissible(&dec(&[5, 5, 3, 1, 4]), 0).unwrap(), 1);
        assert_eq!(cardinality_bound(10, 0), 1);
        assert_eq!(cardinality_bound(6, 3), 15);
    }

    #[test]
    fn count_equals_enumeration_up_to_ten() {
        let shapes: Vec<Vec<usize>> = vec![
            vec![1; 10],
            vec![2, 3, 5],
            vec![5, 5],
            vec![3, 3, 3, 1],
            vec![2, 2, 2, 2, 2],
            vec![4, 1, 1, 4],
            vec![1, 9],
        ];
        for l in shapes {
            let d = dec(&l);
            let mut total = 0u128;
            let mut bound = 0u128;
            for k in 0..=d.total() / 2 {
                let c = count_admissible(&d, k).unwrap();
                assert_eq!(c as usize, enumerate_admissible(&d, k).unwrap().len());
                assert!(c <= cardinality_bound(d.total(), k));
                if l.iter().all(|&x| x == 1) {
                    assert_eq!(c, cardinality_bound(d.total(), k));
                }
                total += c;
                bound += cardinality_bound(d.total(), k);
            }
            assert!(total <= bound);
        }
    }

    #[test]
    fn v_star_examples() {
        let v = PairSet::new(dec(&[2, 2]), vec![(1, 3)]).unwrap();
        assert_eq!(v.v_star(), vec![2, 4]);
        assert_eq!(PairSet::empty(dec(&[2, 3])).v_star(), vec![1, 2, 3, 4, 5]);
        let full = PairSet::new(dec(&[2, 2]), vec![(1, 3), (2, 4)]).unwrap();
        assert!(full.v_star().is_empty());
        assert_eq!(figure_set().v_star(), vec![1, 2, 4, 7, 8, 12, 15, 16, 17, 18]);
    }

    #[test]
    fn permuted_examples() {
        let v = PairSet::new(dec(&[2, 2]), vec![(1, 3)]).unwrap();
        let id = [Permutation::identity(2), Permutation::identity(2)];
        assert_eq!(v.permuted(&id).unwrap(), v);
        let p = [Permutation::swap(2, 0, 1), Permutation::identity(2)];
        assert_eq!(v.permuted(&p).unwrap().pairs(), &[(2, 3)]);
        assert!(v.permuted(&[Permutation::identity(2)]).is_err());
        assert!(v
            .permuted(&[Permutation::identity(3), Permutation::identity(2)])
            .is_err());
    }

    #[test]
    fn trace_set_examples() {
        let t = PairSet::empty(dec(&[2, 2])).trace_sets();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].pairs(), &[(1, 3), (2, 4)]);
        assert_eq!(t[1].pairs(), &[(1, 3), (2, 4)]);
        let full = PairSet::new(dec(&[2, 2]), vec![(1, 3), (2, 4)]).unwrap();
        assert!(full.trace_sets().iter().all(|v| v.is_empty()));
        let f = figure_set().trace_sets();
        assert_eq!(f[0].decomposition().lengths(), &[5, 5]);
        assert_eq!(f[0].pairs(), &[(1, 6), (2, 7), (4, 9)]);
        // I_2 = {6..10}, survivors 7, 8 → local 2, 3
        assert_eq!(f[1].pairs(), &[(2, 7), (3, 8)]);
        assert_eq!(f[2].pairs(), &[(2, 5)]);
        assert!(f[3].is_empty());
        assert_eq!(f[4].pairs(), &[(1, 5), (2, 6), (3, 7), (4, 8)]);
    }

    #[test]
    fn compose_figure_instance() {
        let v = figure_set();
        let vp = PairSet::new(v.follow_up_decomposition(3).unwrap(), vec![(2, 11), (9, 13)]).unwrap();
        assert_eq!(v.lifted(&vp).unwrap(), vec![(2, 19), (17, 21)]);
        let c = v.compose(&vp).unwrap();
        assert_eq!(c.decomposition().lengths(), &[5, 5, 3, 1, 4, 3]);
        assert_eq!(c.len(), 6);
        assert_eq!(c.v_star(), vec![1, 4, 7, 8, 12, 15, 16, 18, 20]);
    }

    #[test]
    fn compose_with_empty_follow_up() {
        let v = figure_set();
        let vp = PairSet::empty(v.follow_up_decomposition(2).unwrap());
        let c = v.compose(&vp).unwrap();
        assert_eq!(c.pairs(), v.pairs());
        assert_eq!(c.decomposition().lengths(), &[5, 5, 3, 1, 4, 2]);
        let full = PairSet::new(dec(&[1, 1]), vec![(1, 2)]).unwrap();
        assert!(full.follow_up_decomposition(1).is_err());
    }

    #[test]
    fn json_form() {
        let v = PairSet::new(dec(&[2, 2]), vec![(3, 1)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"lengths":[2,2],"pairs":[[1,3]]}"#);
        assert_eq!(serde_json::from_str::<PairSet>(&s).unwrap(), v);
        assert!(serde_json::from_str::<PairSet>(r#"{"lengths":[2,2],"pairs":[[1,2]]}"#).is_err());
    }

    fn arb_decomp() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(1usize..=3, 1..=4)
    }

    proptest! {
        #[test]
        fn prop_enumeration_is_admissible_and_unique(l in arb_decomp(), kk in 0usize..=6) {
            let d = dec(&l);
            let k = kk.min(d.total() / 2);
            let e = enumerate_admissible(&d, k).unwrap();
            for w in e.windows(2) {
                prop_assert!(w[0].pairs() < w[1].pairs());
            }
            for v in &e {
                prop_assert!(PairSet::new(d.clone(), v.pairs().to_vec()).is_ok());
                prop_assert_eq!(v.len(), k);
            }
        }

        #[test]
        fn prop_permuted_stays_admissible(l in arb_decomp(), seed in 0u64..1000) {
            use rand::{seq::{IndexedRandom, SliceRandom}, Rng, SeedableRng};
            let d = dec(&l);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rng.random_range(0..=d.total() / 2);
            let e = enumerate_admissible(&d, k).unwrap();
            if let Some(v) = e.choose(&mut rng) {
                let perms: Vec<Permutation> = l.iter().map(|&n| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut rng);
                    Permutation::new(p).unwrap()
                }).collect();
                let w = v.permuted(&perms).unwrap();
                prop_assert_eq!(w.len(), v.len());
            }
        }

        #[test]
        fn prop_compose_is_admissible(l in arb_decomp(), extra in 1usize..=3, seed in 0u64..1000) {
            use rand::{seq::IndexedRandom, Rng, SeedableRng};
            let d = dec(&l);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rng.random_range(0..d.total().div_ceil(2));
            let e = enumerate_admissible(&d, k).unwrap();
            let Some(v) = e.choose(&mut rng) else { return Ok(()) };
            let fd = v.follow_up_decomposition(extra).unwrap();
            let kp = rng.random_range(0..=extra.min(v.output_order()));
            let ep = enumerate_admissible(&fd, kp).unwrap();
            let vp = ep.choose(&mut rng).unwrap();
            let c = v.compose(vp).unwrap();
            prop_assert_eq!(c.len(), v.len() + vp.len());
        }
    }
}
