//! Fully dynamic LCS: both strings take substitutions.
//!
//! Both strings and their reversals live in one grammar collection. The anchor
//! pairs of `S` form the red family and those of `T` the blue family; the best
//! red/blue pair of [`PairFamilies`] is the LCS. A substitution reparses the
//! touched string, turns the changed parse-tree layers into pair deletions and
//! insertions, and reads the answer off the families again.

use alloc::vec::Vec;
use core::fmt;

use crate::anchors::{diff_update, family, AnchorConfig, AnchorPair, Owner, PairKey, Version};
use crate::geom::Color;
use crate::grammar::Grammar;
use crate::hash::{new_map, FxHashMap};
use crate::pair_families::{PairFamilies, PairRecord};
use crate::{LcsAnswer, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    S,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FullError {
    EmptyString(Which),
    PositionOutOfRange { which: Which, pos: usize, len: usize },
}

impl fmt::Display for FullError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FullError::EmptyString(w) => write!(f, "{w:?} must not be empty"),
            FullError::PositionOutOfRange { which, pos, len } => {
                write!(f, "position {pos} of {which:?} outside 1..={len}")
            }
        }
    }
}

/// Pair churn of the last substitution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FullStats {
    pub deleted: usize,
    pub inserted: usize,
}

pub struct FullEngine {
    g: Grammar,
    s: Version,
    t: Version,
    cfg: AnchorConfig,
    families: PairFamilies,
    ids: FxHashMap<PairKey, u64>,
    pairs: FxHashMap<u64, AnchorPair>,
    next_id: u64,
    answer: LcsAnswer,
    stats: FullStats,
}

impl FullEngine {
    pub fn new(s: &[Letter], t: &[Letter], seed: u64) -> Result<Self, FullError> {
        Self::with_config(s, t, seed, AnchorConfig::for_length(s.len() + t.len()))
    }

    pub fn with_config(s: &[Letter], t: &[Letter], seed: u64, cfg: AnchorConfig) -> Result<Self, FullError> {
        if s.is_empty() {
            return Err(FullError::EmptyString(Which::S));
        }
        if t.is_empty() {
            return Err(FullError::EmptyString(Which::T));
        }
        let mut g = Grammar::new(seed);
        let mut version = |w: &[Letter]| {
            let r: Vec<Letter> = w.iter().rev().copied().collect();
            Version { fwd: g.makestring(w).expect("non-empty"), rev: g.makestring(&r).expect("non-empty") }
        };
        let (s, t) = (version(s), version(t));
        let mut me = FullEngine {
            g,
            s,
            t,
            cfg,
            families: PairFamilies::new(),
            ids: new_map(),
            pairs: new_map(),
            next_id: 0,
            answer: LcsAnswer::EMPTY,
            stats: FullStats::default(),
        };
        let mut recs = Vec::new();
        for (v, owner) in [(s, Owner::S), (t, Owner::T)] {
            for p in family(&me.g, v, owner, cfg) {
                recs.push(me.register(p));
            }
        }
        me.families.extend(&me.g, recs).expect("fresh ids");
        me.answer = me.read_answer();
        Ok(me)
    }

    pub fn config(&self) -> AnchorConfig {
        self.cfg
    }

    pub fn current_lcs(&self) -> LcsAnswer {
        self.answer
    }

    pub fn last_stats(&self) -> FullStats {
        self.stats
    }

    /// Number of live anchor pairs over both strings.
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn grammar(&self) -> &Grammar {
        &self.g
    }

    pub fn families(&self) -> &PairFamilies {
        &self.families
    }

    pub fn string(&self, which: Which) -> Vec<Letter> {
        self.g.gen(self.version(which).fwd)
    }

    pub fn len(&self, which: Which) -> usize {
        self.version(which).len()
    }

    fn version(&self, which: Which) -> Version {
        match which {
            Which::S => self.s,
            Which::T => self.t,
        }
    }

    /// Replaces the letter at 1-based `pos` of `which` and returns the new LCS.
    pub fn substitute(&mut self, which: Which, pos: usize, letter: Letter) -> Result<LcsAnswer, FullError> {
        let before = self.version(which);
        let n = before.len();
        if pos == 0 || pos > n {
            return Err(FullError::PositionOutOfRange { which, pos, len: n });
        }
        let (fwd, regions) = self.g.substitute_with_regions(before.fwd, pos, letter).expect("position checked");
        let rev = self.g.substitute(before.rev, n + 1 - pos, letter).expect("position checked");
        let after = Version { fwd, rev };
        let owner = match which {
            Which::S => Owner::S,
            Which::T => Owner::T,
        };
        let diff = diff_update(&self.g, before, after, &regions, pos - 1, owner, self.cfg);
        match which {
            Which::S => self.s = after,
            Which::T => self.t = after,
        }
        self.stats = FullStats { deleted: diff.deleted.len(), inserted: diff.inserted.len() };
        for key in &diff.deleted {
            let id = self.ids.remove(key).expect("deleted pair is live");
            self.pairs.remove(&id);
            self.families.delete_pair(&self.g, id).expect("live record");
        }
        for p in diff.inserted {
            self.insert(p);
        }
        self.answer = self.read_answer();
        Ok(self.answer)
    }

    fn register(&mut self, p: AnchorPair) -> PairRecord {
        let id = self.next_id;
        self.next_id += 1;
        let color = match p.key.owner {
            Owner::S => Color::Red,
            Owner::T => Color::Blue,
        };
        self.ids.insert(p.key, id);
        self.pairs.insert(id, p);
        PairRecord { id, color, p: p.left, q: p.right }
    }

    fn insert(&mut self, p: AnchorPair) {
        let rec = self.register(p);
        self.families.insert_pair(&self.g, rec).expect("fresh id");
    }

    /// The winning pairs meet at their split points: `lcp` of the reversed
    /// left layers reaches back from the split, the right layers forward.
    fn read_answer(&self) -> LcsAnswer {
        let Some(best) = self.families.best() else {
            return LcsAnswer::EMPTY;
        };
        if best.total == 0 {
            return LcsAnswer::EMPTY;
        }
        let (red, blue) = (&self.pairs[&best.red], &self.pairs[&best.blue]);
        let back = self.g.lcp_frag(red.left, blue.left);
        LcsAnswer::new(best.total as usize, red.key.split - back + 1, blue.key.split - back + 1)
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

    #[test]
    fn examples() {
        let e = FullEngine::new(&w("a"), &w("a"), 1).unwrap();
        assert_eq!(e.current_lcs(), LcsAnswer::new(1, 1, 1));
        let e = FullEngine::new(&w("a"), &w("b"), 1).unwrap();
        assert_eq!(e.current_lcs(), LcsAnswer::EMPTY);
        let e = FullEngine::new(&w("baaba"), &w("abaab"), 1).unwrap();
        let a = e.current_lcs();
        assert_eq!(a.length, 4);
        assert!(a.validates(&w("baaba"), &w("abaab")));
        assert!(matches!(FullEngine::new(&[], &w("a"), 1), Err(FullError::EmptyString(Which::S))));
    }

    #[test]
    fn substitutions_to_equal_strings() {
        let mut e = FullEngine::new(&w("abcd"), &w("xbcz"), 3).unwrap();
        assert_eq!(e.current_lcs().length, 2);
        e.substitute(Which::T, 1, b'a' as Letter).unwrap();
        let same = e.substitute(Which::T, 4, b'd' as Letter).unwrap();
        assert_eq!(same, LcsAnswer::new(4, 1, 1));
        let again = e.substitute(Which::S, 2, b'b' as Letter).unwrap();
        assert_eq!(again, same);
        assert_eq!(e.last_stats(), FullStats::default());
        assert!(e.substitute(Which::S, 5, 0).is_err());
    }

    #[test]
    fn random_against_dp() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for round in 0..6 {
            let sigma = rng.gen_range(1..=4);
            let mut s: Vec<Letter> = (0..rng.gen_range(1..60)).map(|_| rng.gen_range(0..sigma)).collect();
            let mut t: Vec<Letter> = (0..rng.gen_range(1..60)).map(|_| rng.gen_range(0..sigma)).collect();
            let mut e = FullEngine::new(&s, &t, round).unwrap();
            for step in 0..80 {
                let which = if rng.gen_bool(0.5) { Which::S } else { Which::T };
                let target = if which == Which::S { &mut s } else { &mut t };
                let pos = rng.gen_range(1..=target.len());
                let c = rng.gen_range(0..sigma);
                target[pos - 1] = c;
                let a = e.substitute(which, pos, c).unwrap();
                assert_eq!(a.length, lcs_dp(&s, &t).unwrap().0, "round {round} step {step}");
                assert!(a.validates(&s, &t));
            }
            assert_eq!(e.string(Which::S), s);
        }
    }
}
