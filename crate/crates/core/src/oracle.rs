//! Definition-level reference implementations.
//!
//! Nothing here shares code with the structures it validates: every routine
//! evaluates the defining formula directly over all candidates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::Letter;

/// Largest input accepted by [`lcs_dp`].
pub const LCS_DP_CAP: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeCapExceeded {
    pub len: usize,
    pub cap: usize,
}

impl fmt::Display for SizeCapExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "oracle input of length {} exceeds cap {}", self.len, self.cap)
    }
}

/// A computed reference value together with what it was computed on.
/// `elapsed` is filled in by callers that have a clock.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport<V> {
    pub value: V,
    pub elapsed: Option<Duration>,
    pub instance: String,
}

impl<V> OracleReport<V> {
    pub fn new(value: V, instance: impl Into<String>) -> Self {
        OracleReport { value, elapsed: None, instance: instance.into() }
    }
}

/// Longest common substring by the suffix-match table. Returns the length and
/// 1-based starts of the first occurrence found (row-major), or `(0, None,
/// None)`.
pub fn lcs_dp(
    s: &[Letter],
    t: &[Letter],
) -> Result<(usize, Option<usize>, Option<usize>), SizeCapExceeded> {
    for len in [s.len(), t.len()] {
        if len > LCS_DP_CAP {
            return Err(SizeCapExceeded { len, cap: LCS_DP_CAP });
        }
    }
    let mut prev = vec![0usize; t.len() + 1];
    let mut cur = vec![0usize; t.len() + 1];
    let (mut best, mut end_s, mut end_t) = (0usize, 0usize, 0usize);
    for i in 1..=s.len() {
        for j in 1..=t.len() {
            cur[j] = if s[i - 1] == t[j - 1] { prev[j - 1] + 1 } else { 0 };
            if cur[j] > best {
                best = cur[j];
                end_s = i;
                end_t = j;
            }
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    if best == 0 {
        Ok((0, None, None))
    } else {
        Ok((best, Some(end_s - best + 1), Some(end_t - best + 1)))
    }
}

/// Rooted tree given by parent pointers (root has `None`), node weights and
/// optional leaf labels.
#[derive(Clone, Debug)]
pub struct BruteTree<'a> {
    pub parent: &'a [Option<usize>],
    pub weight: &'a [u64],
    pub label: &'a [Option<u64>],
}

impl BruteTree<'_> {
    fn ancestors(&self, mut u: usize) -> Vec<usize> {
        let mut out = vec![u];
        while let Some(p) = self.parent[u] {
            out.push(p);
            u = p;
        }
        out
    }

    fn labels_below(&self, u: usize) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for x in 0..self.parent.len() {
            if let Some(l) = self.label[x] {
                if self.ancestors(x).contains(&u) {
                    out.insert(l);
                }
            }
        }
        out
    }
}

/// Heaviest induced ancestors by enumeration of every ancestor pair; weights of
/// `u` and `v` themselves are clamped to the caps.
pub fn hia_brute(
    t1: &BruteTree<'_>,
    t2: &BruteTree<'_>,
    u: usize,
    cap_u: u64,
    v: usize,
    cap_v: u64,
) -> Option<u64> {
    let mut best = None;
    for a in t1.ancestors(u) {
        let la = t1.labels_below(a);
        for b in t2.ancestors(v) {
            let lb = t2.labels_below(b);
            if la.intersection(&lb).next().is_some() {
                let total = t1.weight[a].min(cap_u) + t2.weight[b].min(cap_v);
                best = Some(best.map_or(total, |x: u64| x.max(total)));
            }
        }
    }
    best
}

/// Best red/blue pair value `min(x,x') + min(y,y')` over all pairs, where
/// `red` tells the color of each point.
pub fn bichromatic_brute(points: &[(u64, u64, bool)]) -> Option<u64> {
    let mut best = None;
    for &(x, y, _) in points.iter().filter(|p| p.2) {
        for &(x2, y2, _) in points.iter().filter(|p| !p.2) {
            let v = x.min(x2) + y.min(y2);
            best = Some(best.map_or(v, |b: u64| b.max(v)));
        }
    }
    best
}

/// Explicit nodes of the compacted trie of `strings` (each string is taken as
/// given; callers append unique terminators). Maps every explicit node's
/// path-label to its number of children.
pub fn trie_brute(strings: &[Vec<u64>]) -> BTreeMap<Vec<u64>, usize> {
    // Children of every prefix in the uncompacted trie.
    let mut children: BTreeMap<Vec<u64>, BTreeSet<u64>> = BTreeMap::new();
    let mut is_end: BTreeSet<Vec<u64>> = BTreeSet::new();
    for s in strings {
        for i in 0..=s.len() {
            let e = children.entry(s[..i].to_vec()).or_default();
            if i < s.len() {
                e.insert(s[i]);
            }
        }
        is_end.insert(s.clone());
    }
    let mut out = BTreeMap::new();
    for (label, ch) in &children {
        let explicit = label.is_empty() || ch.len() != 1 || is_end.contains(label);
        if explicit {
            out.insert(label.clone(), ch.len());
        }
    }
    out
}

fn lcp(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// `max lcp(P,P') + lcp(Q,Q')` over red pairs `(P,Q)` and blue pairs `(P',Q')`.
pub fn family_brute(
    red: &[(Vec<Letter>, Vec<Letter>)],
    blue: &[(Vec<Letter>, Vec<Letter>)],
) -> Option<usize> {
    let mut best = None;
    for (p, q) in red {
        for (p2, q2) in blue {
            let v = lcp(p, p2) + lcp(q, q2);
            best = Some(best.map_or(v, |b: usize| b.max(v)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<Letter> {
        s.bytes().map(Letter::from).collect()
    }

    #[test]
    fn lcs_dp_examples() {
        assert_eq!(lcs_dp(&w("baaba"), &w("abaab")).unwrap().0, 4);
        assert_eq!(lcs_dp(&w("abcab"), &w("abcab")).unwrap(), (5, Some(1), Some(1)));
        assert_eq!(lcs_dp(&w("a"), &w("b")).unwrap(), (0, None, None));
        let big = vec![1; LCS_DP_CAP + 1];
        assert!(lcs_dp(&big, &w("a")).is_err());
    }

    #[test]
    fn hia_brute_examples() {
        // T1 = root(0) -> {a(1) -> leaf 1, b(1) -> leaf 2}
        let p1 = [None, Some(0), Some(0), Some(1), Some(2)];
        let w1 = [0, 1, 1, 2, 2];
        let l1 = [None, None, None, Some(1), Some(2)];
        // T2 = root(0) -> c(1) -> {leaf 1, leaf 2}
        let p2 = [None, Some(0), Some(1), Some(1)];
        let w2 = [0, 1, 2, 2];
        let l2 = [None, None, Some(1), Some(2)];
        let t1 = BruteTree { parent: &p1, weight: &w1, label: &l1 };
        let t2 = BruteTree { parent: &p2, weight: &w2, label: &l2 };
        assert_eq!(hia_brute(&t1, &t2, 1, 1, 1, 1), Some(2));
        assert_eq!(hia_brute(&t1, &t2, 1, 1, 1, 0), Some(1));
        assert_eq!(hia_brute(&t1, &t2, 0, 0, 0, 0), Some(0));
        let l3 = [None, None, Some(7), Some(8)];
        let t3 = BruteTree { parent: &p2, weight: &w2, label: &l3 };
        assert_eq!(hia_brute(&t1, &t3, 3, 2, 2, 2), None);
    }

    #[test]
    fn bichromatic_examples() {
        assert_eq!(bichromatic_brute(&[]), None);
        assert_eq!(bichromatic_brute(&[(3, 5, true)]), None);
        let pts = [(3, 5, true), (4, 2, false), (1, 9, true), (2, 8, false)];
        assert_eq!(bichromatic_brute(&pts[..2]), Some(5));
        assert_eq!(bichromatic_brute(&pts), Some(9));
    }

    #[test]
    fn family_example() {
        let red = [(w("ab"), w("cd"))];
        let blue = [(w("ab"), w("ce"))];
        assert_eq!(family_brute(&red, &blue), Some(3));
        assert_eq!(family_brute(&red, &[]), None);
    }

    #[test]
    fn trie_brute_shape() {
        let t = trie_brute(&[vec![1, 2, 100], vec![1, 2, 101], vec![1, 3, 102]]);
        assert_eq!(t.get(&vec![]), Some(&1));
        assert_eq!(t.get(&vec![1]), Some(&2));
        assert_eq!(t.get(&vec![1, 2]), Some(&2));
        assert_eq!(t.len(), 3 + 3);
    }
}
