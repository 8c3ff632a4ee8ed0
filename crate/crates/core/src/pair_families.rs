//! LCP for two families of pairs of strings: red pairs `(P, Q)` and blue pairs
//! `(P', Q')`, maximizing `lcp(P, P') + lcp(Q, Q')`.
//!
//! All `P` strings go into one compacted trie and all `Q` strings into
//! another, each terminated by a letter unique to its pair. The tries are the
//! two trees of a [`BicoloredTrees`] instance (node weights = string depths),
//! so the answer is its global best. Deletion only unlabels a leaf; the whole
//! structure is rebuilt once dead leaves outnumber live ones.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bicolored::{BicoloredTrees, TreeSide};
use crate::geom::Color;
use crate::grammar::{Frag, Grammar};
use crate::hash::{new_map, FxHashMap};
use crate::Letter;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairRecord {
    pub id: u64,
    pub color: Color,
    pub p: Frag,
    pub q: Frag,
}

impl PairRecord {
    fn string(&self, side: TreeSide) -> Frag {
        match side {
            TreeSide::One => self.p,
            TreeSide::Two => self.q,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyError {
    DuplicateId(u64),
    UnknownId(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyBest {
    pub red: u64,
    pub blue: u64,
    pub total: u64,
}

/// Structural changes of the last insertion in one trie.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrieChanges {
    pub splits: u32,
    pub attaches: u32,
}

/// A trie symbol: a letter or the terminator of one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Letter(Letter),
    End(u64),
}

impl Sym {
    /// Flat encoding used by the trie oracle: terminators sit above all letters.
    pub fn encode(self) -> u64 {
        match self {
            Sym::Letter(c) => c as u64,
            Sym::End(id) => (1 << 63) | id,
        }
    }
}

fn shifted(f: Frag, d: usize) -> Frag {
    Frag { handle: f.handle, start: f.start + d, len: f.len - d }
}

#[derive(Clone, Debug)]
struct Trie {
    /// Some pair whose leaf lies below the node (its string spells the path).
    rep: Vec<u64>,
    first: Vec<Sym>,
    child: FxHashMap<(u32, Sym), u32>,
    leaf_of: FxHashMap<u64, u32>,
}

impl Trie {
    fn new() -> Self {
        Trie { rep: alloc::vec![u64::MAX], first: alloc::vec![Sym::End(u64::MAX)], child: new_map(), leaf_of: new_map() }
    }

    fn note(&mut self, node: u32, rep: u64, first: Sym) {
        let i = node as usize;
        if self.rep.len() <= i {
            self.rep.resize(i + 1, u64::MAX);
            self.first.resize(i + 1, Sym::End(u64::MAX));
        }
        self.rep[i] = rep;
        self.first[i] = first;
    }
}

#[derive(Clone, Debug)]
pub struct PairFamilies {
    tries: [Trie; 2],
    trees: BicoloredTrees,
    live: BTreeMap<u64, PairRecord>,
    /// Every record with a leaf in the current tries, live or not.
    known: FxHashMap<u64, PairRecord>,
    last: [TrieChanges; 2],
    rebuilds: u64,
}

impl Default for PairFamilies {
    fn default() -> Self {
        Self::new()
    }
}

impl PairFamilies {
    pub fn new() -> Self {
        PairFamilies {
            tries: [Trie::new(), Trie::new()],
            trees: BicoloredTrees::new(),
            live: BTreeMap::new(),
            known: new_map(),
            last: [TrieChanges::default(); 2],
            rebuilds: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&PairRecord> {
        self.live.get(&id)
    }

    pub fn trees(&self) -> &BicoloredTrees {
        &self.trees
    }

    /// Leaves in the tries, labeled or not.
    pub fn leaf_count(&self) -> usize {
        self.known.len()
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    /// Splits and attaches done by the last insertion, per trie.
    pub fn last_changes(&self) -> [TrieChanges; 2] {
        self.last
    }

    pub fn best(&self) -> Option<FamilyBest> {
        self.trees.global_best().map(|b| FamilyBest { red: b.red, blue: b.blue, total: b.total })
    }

    pub fn insert_pair(&mut self, g: &Grammar, rec: PairRecord) -> Result<(), FamilyError> {
        if self.live.contains_key(&rec.id) || self.known.contains_key(&rec.id) {
            return Err(FamilyError::DuplicateId(rec.id));
        }
        self.live.insert(rec.id, rec);
        self.known.insert(rec.id, rec);
        for side in [TreeSide::One, TreeSide::Two] {
            self.last[side as usize] = self.trie_insert(g, side, &rec);
        }
        self.maybe_rebuild(g);
        Ok(())
    }

    pub fn delete_pair(&mut self, g: &Grammar, id: u64) -> Result<(), FamilyError> {
        self.live.remove(&id).ok_or(FamilyError::UnknownId(id))?;
        for side in [TreeSide::One, TreeSide::Two] {
            let leaf = self.tries[side as usize].leaf_of[&id];
            self.trees.delete_leaf(side, leaf).expect("labeled leaf");
        }
        self.maybe_rebuild(g);
        Ok(())
    }

    fn maybe_rebuild(&mut self, g: &Grammar) {
        if self.known.len() > 2 * self.live.len().max(32) {
            self.rebuild(g);
        }
    }

    /// Rebuilds both tries and the bicolored structure over the live pairs.
    pub fn rebuild(&mut self, g: &Grammar) {
        self.rebuilds += 1;
        let live = core::mem::take(&mut self.live);
        self.tries = [Trie::new(), Trie::new()];
        self.trees = BicoloredTrees::new();
        self.known = new_map();
        self.extend(g, live.into_values()).expect("fresh structure");
    }

    /// Inserts a batch of pairs, building the bicolored structure once at the
    /// end instead of maintaining it pair by pair.
    pub fn extend(&mut self, g: &Grammar, recs: impl IntoIterator<Item = PairRecord>) -> Result<(), FamilyError> {
        self.trees.set_deferred(true);
        let mut res = Ok(());
        for rec in recs {
            if self.live.contains_key(&rec.id) || self.known.contains_key(&rec.id) {
                res = Err(FamilyError::DuplicateId(rec.id));
                break;
            }
            self.live.insert(rec.id, rec);
            self.known.insert(rec.id, rec);
            for side in [TreeSide::One, TreeSide::Two] {
                self.last[side as usize] = self.trie_insert(g, side, &rec);
            }
        }
        self.trees.set_deferred(false);
        res
    }

    fn sym(&self, g: &Grammar, side: TreeSide, id: u64, i: usize) -> Sym {
        let f = self.known[&id].string(side);
        if i < f.len {
            Sym::Letter(g.char_at(f.handle, f.start + i))
        } else {
            Sym::End(id)
        }
    }

    fn trie_insert(&mut self, g: &Grammar, side: TreeSide, rec: &PairRecord) -> TrieChanges {
        let s = side as usize;
        let f = rec.string(side);
        let mut changes = TrieChanges::default();
        let mut x = self.trees.root();
        'descend: loop {
            let d = self.trees.weight(side, x) as usize;
            let c = self.sym(g, side, rec.id, d);
            let Some(&y) = self.tries[s].child.get(&(x, c)) else {
                self.attach(side, x, c, rec);
                changes.attaches += 1;
                return changes;
            };
            // Every node on the way to the representative's leaf shares its
            // first `l` letters with the new string.
            let r = self.tries[s].rep[y as usize];
            let rf = self.known[&r].string(side);
            let l = d + 1 + g.lcp_frag(shifted(f, d + 1), shifted(rf, d + 1));
            let (mut par, mut z) = (x, y);
            while self.trees.weight(side, z) as usize <= l {
                let wz = self.trees.weight(side, z) as usize;
                if wz == l {
                    x = z;
                    continue 'descend;
                }
                par = z;
                z = self.tries[s].child[&(z, self.sym(g, side, rec.id, wz))];
            }
            let mid = self.trees.split_edge(side, z, l as u64).expect("split inside the edge");
            let trie = &mut self.tries[s];
            let zfirst = trie.first[z as usize];
            let zrep = trie.rep[z as usize];
            trie.child.insert((par, zfirst), mid);
            trie.note(mid, zrep, zfirst);
            let below = self.sym(g, side, zrep, l);
            let trie = &mut self.tries[s];
            trie.child.insert((mid, below), z);
            trie.first[z as usize] = below;
            changes.splits += 1;
            let c = self.sym(g, side, rec.id, l);
            self.attach(side, mid, c, rec);
            changes.attaches += 1;
            return changes;
        }
    }

    fn attach(&mut self, side: TreeSide, parent: u32, first: Sym, rec: &PairRecord) {
        let w = rec.string(side).len as u64 + 1;
        let leaf = self.trees.attach_leaf(side, parent, w, rec.id, rec.color).expect("valid leaf");
        let trie = &mut self.tries[side as usize];
        trie.child.insert((parent, first), leaf);
        trie.note(leaf, rec.id, first);
        trie.leaf_of.insert(rec.id, leaf);
    }

    /// Path labels of all explicit nodes of one trie (encoded with
    /// [`Sym::encode`]) with their numbers of children.
    pub fn shape(&self, g: &Grammar, side: TreeSide) -> BTreeMap<Vec<u64>, usize> {
        let mut out = BTreeMap::new();
        let mut stack = alloc::vec![self.trees.root()];
        while let Some(u) = stack.pop() {
            let w = self.trees.weight(side, u) as usize;
            let label = if u == self.trees.root() {
                Vec::new()
            } else {
                let r = self.tries[side as usize].rep[u as usize];
                let f = self.known[&r].string(side);
                let mut v: Vec<u64> = g.gen_frag(Frag { len: w.min(f.len), ..f }).iter().map(|&c| c as u64).collect();
                if w > f.len {
                    v.push(Sym::End(r).encode());
                }
                v
            };
            let ch = self.trees.children(side, u);
            out.insert(label, ch.len());
            stack.extend(ch.iter().copied());
        }
        out
    }

    /// Every record currently holding a leaf, live or not.
    pub fn known_records(&self) -> impl Iterator<Item = &PairRecord> {
        self.known.values()
    }
}
