//! LCS of a dynamic string `S` and a static string `T`.
//!
//! `S` is kept as a maximal block decomposition: every block is a fragment of
//! `T` (or a single letter absent from `T`), and no two consecutive blocks
//! concatenate to a fragment of `T`. Any longest common substring crosses a
//! block boundary within three consecutive blocks, so each block proposes the
//! best substring around the boundary to its right and a heap keeps the best
//! proposal. A substitution only disturbs a constant number of blocks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::core_strings::{IndexError, NodeId, Span, StaticIndex};
use crate::hash::{new_map, FxHashMap};
use crate::hia::{HiaError, HiaIndex, WeightedTree};
use crate::{LcsAnswer, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialError {
    EmptyText,
    EmptyPattern,
    PositionOutOfRange { pos: usize, len: usize },
}

impl fmt::Display for PartialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartialError::EmptyText => f.write_str("T must not be empty"),
            PartialError::EmptyPattern => f.write_str("S must not be empty"),
            PartialError::PositionOutOfRange { pos, len } => {
                write!(f, "position {pos} outside 1..={len}")
            }
        }
    }
}

/// A block of the decomposition; `witness` is an occurrence in `T`, absent for
/// a letter that does not occur in `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub witness: Option<Span>,
    id: u64,
}

impl Block {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_foreign(&self) -> bool {
        self.witness.is_none()
    }
}

/// The best common substring around the boundary right after block `owner`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub length: usize,
    pub s_pos: usize,
    pub t_pos: usize,
    pub owner: u64,
}

/// Work done by the most recent substitution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub merges: usize,
    pub recomputed: usize,
}

#[derive(Clone, Debug)]
pub struct PartialLcs {
    index: StaticIndex,
    hia: HiaIndex,
    s: Vec<Option<Letter>>,
    blocks: BTreeMap<usize, Block>,
    cands: FxHashMap<u64, Candidate>,
    heap: BTreeSet<(usize, u64)>,
    next_id: u64,
    stats: UpdateStats,
}

#[derive(Clone, Copy)]
struct Piece {
    start: usize,
    end: usize,
    witness: Option<Span>,
}

impl PartialLcs {
    /// Starts with `S` made of `s_len` letters that occur nowhere in `T`.
    pub fn new(t: &[Letter], s_len: usize) -> Result<Self, PartialError> {
        if s_len == 0 {
            return Err(PartialError::EmptyPattern);
        }
        let index = StaticIndex::build(t).map_err(|_| PartialError::EmptyText)?;
        let n = t.len();
        let rev = WeightedTree::from_suffix_tree(&index.rev.tree, |s0| (n + 1 - s0) as u64);
        let fwd = WeightedTree::from_suffix_tree(&index.fwd.tree, |s0| (s0 + 1) as u64);
        let hia = HiaIndex::build(&rev, &fwd).unwrap_or_else(|e: HiaError| {
            unreachable!("suffix trees always form valid weighted trees: {e}")
        });
        let mut me = PartialLcs {
            index,
            hia,
            s: alloc::vec![None; s_len],
            blocks: BTreeMap::new(),
            cands: new_map(),
            heap: BTreeSet::new(),
            next_id: 0,
            stats: UpdateStats::default(),
        };
        for p in 1..=s_len {
            me.insert_block(Piece { start: p, end: p, witness: None });
        }
        let starts: Vec<usize> = me.blocks.keys().copied().collect();
        for st in starts {
            me.recompute(st);
        }
        Ok(me)
    }

    /// Builds the engine and substitutes the letters of `s` one by one.
    pub fn with_string(t: &[Letter], s: &[Letter]) -> Result<Self, PartialError> {
        let mut me = Self::new(t, s.len())?;
        for (i, &c) in s.iter().enumerate() {
            me.substitute(i + 1, c)?;
        }
        Ok(me)
    }

    pub fn t(&self) -> &[Letter] {
        self.index.text()
    }

    /// Current `S`; `None` marks the initial placeholder letters.
    pub fn s(&self) -> &[Option<Letter>] {
        &self.s
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> + '_ {
        self.blocks.values()
    }

    pub fn last_stats(&self) -> UpdateStats {
        self.stats
    }

    pub fn current_lcs(&self) -> LcsAnswer {
        match self.heap.iter().next_back() {
            Some(&(len, owner)) if len > 0 => {
                let c = self.cands[&owner];
                LcsAnswer::new(c.length, c.s_pos, c.t_pos)
            }
            _ => LcsAnswer::EMPTY,
        }
    }

    pub fn substitute(&mut self, pos: usize, letter: Letter) -> Result<LcsAnswer, PartialError> {
        if pos == 0 || pos > self.s.len() {
            return Err(PartialError::PositionOutOfRange { pos, len: self.s.len() });
        }
        self.stats = UpdateStats::default();
        self.s[pos - 1] = Some(letter);
        let (&bs, &blk) = self.blocks.range(..=pos).next_back().expect("blocks cover S");

        let mut region: Vec<Piece> = Vec::with_capacity(5);
        if let Some((&ps, _)) = self.blocks.range(..bs).next_back() {
            region.push(self.remove_block(ps));
        }
        self.remove_block(bs);
        if pos > bs {
            let w = blk.witness.map(|w| Span::new(w.start, w.start + (pos - bs) - 1));
            region.push(Piece { start: bs, end: pos - 1, witness: w });
        }
        let wy = self.index.find_letter(letter).map(|p| Span::new(p + 1, p + 1));
        region.push(Piece { start: pos, end: pos, witness: wy });
        if pos < blk.end {
            let w = blk.witness.map(|w| Span::new(w.end - (blk.end - pos) + 1, w.end));
            region.push(Piece { start: pos + 1, end: blk.end, witness: w });
        }
        if let Some((&ns, _)) = self.blocks.range(blk.end + 1..).next() {
            region.push(self.remove_block(ns));
        }

        // Merge left to right until no two neighbours concatenate into a
        // fragment of T.
        loop {
            let mut changed = false;
            let mut k = 0;
            while k + 1 < region.len() {
                if let (Some(a), Some(b)) = (region[k].witness, region[k + 1].witness) {
                    let (l, wit) = self
                        .index
                        .extend_prefix(a, b, false)
                        .expect("witnesses are valid spans");
                    if l == a.len() + b.len() {
                        region[k].end = region[k + 1].end;
                        region[k].witness = Some(wit);
                        region.remove(k + 1);
                        self.stats.merges += 1;
                        changed = true;
                        continue;
                    }
                }
                k += 1;
            }
            if !changed {
                break;
            }
        }
        debug_assert!(self.stats.merges <= 4);

        let first = region[0].start;
        let last = region[region.len() - 1].start;
        for p in region {
            self.insert_block(p);
        }
        let mut todo: Vec<usize> = self.blocks.range(..first).rev().take(2).map(|(&k, _)| k).collect();
        todo.reverse();
        todo.extend(self.blocks.range(first..=last).map(|(&k, _)| k));
        todo.extend(self.blocks.range(last + 1..).take(1).map(|(&k, _)| k));
        for st in todo {
            self.recompute(st);
            self.stats.recomputed += 1;
        }
        debug_assert!(self.stats.recomputed <= 12);
        Ok(self.current_lcs())
    }

    fn insert_block(&mut self, p: Piece) {
        let id = self.next_id;
        self.next_id += 1;
        self.blocks.insert(p.start, Block { start: p.start, end: p.end, witness: p.witness, id });
    }

    fn remove_block(&mut self, start: usize) -> Piece {
        let b = self.blocks.remove(&start).expect("block exists");
        if let Some(c) = self.cands.remove(&b.id) {
            self.heap.remove(&(c.length, b.id));
        }
        Piece { start: b.start, end: b.end, witness: b.witness }
    }

    fn recompute(&mut self, start: usize) {
        let cur = self.blocks[&start];
        if let Some(c) = self.cands.remove(&cur.id) {
            self.heap.remove(&(c.length, cur.id));
        }
        let c = self.candidate_for(&cur);
        self.heap.insert((c.length, cur.id));
        self.cands.insert(cur.id, c);
    }

    /// Longest substring of `UV` occurring in `T`, where `U` is the longest
    /// suffix of `s_{i-1} s_i` and `V` the longest prefix of `s_{i+1} s_{i+2}`
    /// that occur in `T`.
    pub fn candidate_for(&self, cur: &Block) -> Candidate {
        let prev = self.blocks.range(..cur.start).next_back().map(|(_, b)| *b);
        let next = self.blocks.range(cur.end + 1..).next().map(|(_, b)| *b);
        let next2 = next.and_then(|n| self.blocks.range(n.end + 1..).next().map(|(_, b)| *b));
        let eps = Span::empty_at(1);
        let ix = &self.index;

        let (lu, u_rev) = match cur.witness {
            None => (0, eps),
            Some(w) => {
                let b = prev.and_then(|p| p.witness).map_or(eps, |pw| ix.mirror(pw));
                ix.extend_prefix(ix.mirror(w), b, true).expect("valid spans")
            }
        };
        let (lv, v_fwd) = match next.and_then(|n| n.witness) {
            None => (0, eps),
            Some(w) => {
                let b = next2.and_then(|n| n.witness).unwrap_or(eps);
                ix.extend_prefix(w, b, false).expect("valid spans")
            }
        };
        let node_of = |lo: Result<crate::core_strings::Locus, IndexError>| lo.expect("valid span").node;
        let un = if lu == 0 { NodeId(0) } else { node_of(ix.locus(u_rev, true)) };
        let vn = if lv == 0 { NodeId(0) } else { node_of(ix.locus(v_fwd, false)) };
        let ans = self
            .hia
            .query(un.idx(), lu as u64, vn.idx(), lv as u64)
            .expect("nodes come from the right trees")
            .expect("the roots are always induced");
        let d1 = (ix.rev.tree.depth(NodeId(ans.u as u32)) as u64).min(lu as u64) as usize;
        let total = ans.total as usize;
        let boundary = cur.end + 1;
        Candidate {
            length: total,
            s_pos: boundary - d1,
            t_pos: ans.label as usize - d1,
            owner: cur.id,
        }
    }

    /// Checks the decomposition against `S` and `T` directly. Meant for tests.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        let t = self.index.text();
        let occurs = |x: &[Letter]| t.windows(x.len()).any(|w| w == x);
        let mut expect = 1;
        let mut prev: Option<&Block> = None;
        for b in self.blocks.values() {
            if b.start != expect {
                return Err("blocks do not tile S");
            }
            expect = b.end + 1;
            let content = &self.s[b.start - 1..b.end];
            match b.witness {
                None => {
                    if b.len() != 1 {
                        return Err("foreign block longer than one letter");
                    }
                    if let Some(c) = content[0] {
                        if t.contains(&c) {
                            return Err("foreign block letter occurs in T");
                        }
                    }
                }
                Some(w) => {
                    let tw = t[w.start - 1..w.end].iter().map(|&c| Some(c));
                    if w.len() != b.len() || !tw.eq(content.iter().copied()) {
                        return Err("witness does not spell the block");
                    }
                }
            }
            if let Some(p) = prev {
                if !p.is_foreign() && !b.is_foreign() {
                    let joined: Vec<Letter> =
                        self.s[p.start - 1..b.end].iter().map(|c| c.expect("non-foreign")).collect();
                    if occurs(&joined) {
                        return Err("two consecutive blocks occur together in T");
                    }
                }
            }
            prev = Some(b);
        }
        if expect != self.s.len() + 1 {
            return Err("blocks do not reach the end of S");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::lcs_dp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Vec<Letter> {
        s.bytes().map(Letter::from).collect()
    }

    fn letters(e: &PartialLcs) -> Vec<Letter> {
        e.s().iter().map(|c| c.unwrap_or(u32::MAX)).collect()
    }

    #[test]
    fn init_examples() {
        let e = PartialLcs::new(&w("abaab"), 5).unwrap();
        assert_eq!(e.blocks().count(), 5);
        assert!(e.blocks().all(|b| b.is_foreign()));
        assert_eq!(e.current_lcs(), LcsAnswer::EMPTY);
        assert_eq!(PartialLcs::new(&w("a"), 1).unwrap().blocks().count(), 1);
        assert_eq!(PartialLcs::new(&w("abaab"), 1).unwrap().current_lcs().length, 0);
        assert_eq!(PartialLcs::new(&w("abaab"), 0).unwrap_err(), PartialError::EmptyPattern);
        assert_eq!(PartialLcs::new(&[], 3).unwrap_err(), PartialError::EmptyText);
    }

    #[test]
    fn substitute_examples() {
        let t = w("abaab");
        let mut e = PartialLcs::with_string(&t, &w("bbbbb")).unwrap();
        let a = e.substitute(3, b'a' as Letter).unwrap();
        assert_eq!(a.length, 2);
        assert!(a.validates(&letters(&e), &t));
        e.check_invariants().unwrap();
        let parts: Vec<usize> = e.blocks().map(|b| b.len()).collect();
        assert_eq!(parts.iter().sum::<usize>(), 5);

        let mut e = PartialLcs::new(&w("ab"), 2).unwrap();
        e.substitute(1, b'a' as Letter).unwrap();
        assert_eq!(e.substitute(2, b'b' as Letter).unwrap(), LcsAnswer::new(2, 1, 1));

        let before = e.current_lcs().length;
        assert_eq!(e.substitute(1, b'a' as Letter).unwrap().length, before);
        assert_eq!(
            e.substitute(3, 0).unwrap_err(),
            PartialError::PositionOutOfRange { pos: 3, len: 2 }
        );
    }

    #[test]
    fn candidate_example() {
        let t = w("abaab");
        let mut e = PartialLcs::with_string(&t, &w("bbbbb")).unwrap();
        e.substitute(3, b'a' as Letter).unwrap();
        let first = *e.blocks().next().unwrap();
        assert_eq!(first.len(), 1);
        assert_eq!(e.candidate_for(&first).length, 2);
        let last = *e.blocks().last().unwrap();
        assert_eq!(e.candidate_for(&last).length, 1);
    }

    #[test]
    fn identity_gives_full_length() {
        let t = w("abracadabra");
        let e = PartialLcs::with_string(&t, &t).unwrap();
        assert_eq!(e.current_lcs().length, t.len());
    }

    #[test]
    fn random_updates_match_dp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for round in 0..60 {
            let sigma = 2 + round % 3;
            let n = rng.gen_range(1..40);
            let m = rng.gen_range(1..40);
            let t: Vec<Letter> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
            let mut e = PartialLcs::new(&t, m).unwrap();
            for _ in 0..80 {
                let pos = rng.gen_range(1..=m);
                let c = rng.gen_range(0..sigma + 1);
                let ans = e.substitute(pos, c).unwrap();
                e.check_invariants().unwrap();
                let st = e.last_stats();
                assert!(st.merges <= 4 && st.recomputed <= 12);
                let s = letters(&e);
                let (len, _, _) = lcs_dp(&s, &t).unwrap();
                assert_eq!(ans.length, len, "S={s:?} T={t:?}");
                assert!(ans.validates(&s, &t));
            }
        }
    }
}
