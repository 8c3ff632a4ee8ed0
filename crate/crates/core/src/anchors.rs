//! Anchor pairs `(Y_ℓ(v)^R, Y_r(v))` of parse-tree nodes.
//!
//! A node `v` whose parent has at least two children anchors the layer of
//! `K` same-level nodes ending at `v` (`J_up`) and the layer of nodes that
//! follow it (`J_down`). Every common substring of `S` and `T` splits into a
//! suffix of some `Y_ℓ` and a prefix of the matching `Y_r` at anchors in both
//! trees, so the LCS is the best red/blue pair of these families.
//!
//! A level of a parse tree is handled as a sequence of *units*: either a single
//! node or all children of one power node. Layer boundaries are then plain
//! index arithmetic over unit node counts, even for huge powers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::grammar::{Frag, Grammar, Handle, Regions, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    S,
    T,
}

/// Layer width `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnchorConfig {
    pub k: usize,
}

impl AnchorConfig {
    /// `K = ⌈log₂ n⌉ / 2 + 1`, at least 4. Exhaustive and oracle checks find
    /// `K = 3` already complete on strings up to a few thousand letters; this
    /// keeps a margin while staying logarithmic.
    pub fn for_length(n: usize) -> Self {
        let lg = usize::BITS - n.max(2).saturating_sub(1).leading_zeros();
        AnchorConfig { k: (lg as usize / 2 + 1).max(4) }
    }
}

/// Identity of a pair: owner, level and absolute layer boundaries
/// (`J_up = [up_start, split)`, `J_down = [split, down_end)`, 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub owner: Owner,
    pub level: u32,
    pub up_start: usize,
    pub split: usize,
    pub down_end: usize,
}

impl PairKey {
    fn touches(&self, pos: usize) -> bool {
        self.up_start <= pos && pos < self.down_end
    }
}

/// A pair with its strings: `left` spells `Y_ℓ` reversed (a fragment of the
/// reversed string), `right` spells `Y_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnchorPair {
    pub key: PairKey,
    pub left: Frag,
    pub right: Frag,
}

/// The forward and reversed handles of one string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Version {
    pub fwd: Handle,
    pub rev: Handle,
}

impl Version {
    pub fn len(&self) -> usize {
        self.fwd.len
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.len == 0
    }

    fn pair(&self, key: PairKey) -> AnchorPair {
        let n = self.fwd.len;
        AnchorPair {
            key,
            left: Frag { handle: self.rev, start: n - key.split, len: key.split - key.up_start },
            right: Frag { handle: self.fwd, start: key.split, len: key.down_end - key.split },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnchorDiff {
    pub deleted: Vec<PairKey>,
    pub inserted: Vec<AnchorPair>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Parent {
    Root,
    Unary,
    Pair,
    Power,
}

#[derive(Clone, Copy, Debug)]
struct Unit {
    start: usize,
    node_len: usize,
    count: usize,
    parent: Parent,
}

impl Unit {
    fn parent_degree(&self) -> usize {
        match self.parent {
            Parent::Root => 0,
            Parent::Unary => 1,
            Parent::Pair => 2,
            Parent::Power => self.count,
        }
    }
}

/// Consecutive units of one level with prefix node counts.
struct LevelSlice {
    units: Vec<Unit>,
    before: Vec<usize>,
    total: usize,
    at_start: bool,
    at_end: bool,
}

impl LevelSlice {
    fn locate(&self, t: usize) -> (usize, usize) {
        let u = self.before.partition_point(|&b| b <= t) - 1;
        (u, t - self.before[u])
    }

    fn node_start(&self, t: usize) -> usize {
        let (u, j) = self.locate(t);
        self.units[u].start + j * self.units[u].node_len
    }

    fn node_end(&self, t: usize) -> usize {
        let (u, j) = self.locate(t);
        self.units[u].start + (j + 1) * self.units[u].node_len
    }

    /// Start of node `t - back`, clamped to the string start.
    fn start_back(&self, t: usize, back: usize) -> usize {
        if back > t {
            debug_assert!(self.at_start, "level slice too narrow on the left");
            return self.units[0].start;
        }
        self.node_start(t - back)
    }

    /// End of node `t + ahead`, clamped to the string end.
    fn end_ahead(&self, t: usize, ahead: usize, n: usize) -> usize {
        if t + ahead >= self.total {
            debug_assert!(self.at_end, "level slice too narrow on the right");
            return n;
        }
        self.node_end(t + ahead)
    }
}

fn level_slice(g: &Grammar, h: Handle, level: u32, lo: usize, hi: usize, margin: usize) -> Option<LevelSlice> {
    if level > g.height(h) || h.len == 0 {
        return None;
    }
    let mut cur = g.cursor(h, level, lo.min(h.len - 1))?;
    let to_unit_start = |cur: &mut crate::grammar::Cursor| {
        if is_power_child(g, cur) {
            cur.jump_sibling(g, 0);
        }
    };
    to_unit_start(&mut cur);
    let mut at_start = false;
    for _ in 0..margin {
        if !cur.prev(g) {
            at_start = true;
            break;
        }
        to_unit_start(&mut cur);
    }
    if cur.start() == 0 {
        at_start = true;
    }
    let mut units = Vec::new();
    let mut after = 0;
    let mut at_end = false;
    loop {
        let (parent, count) = match cur.position_in_parent(g) {
            None => (Parent::Root, 1),
            Some((_, deg)) => {
                if is_power_child(g, &cur) {
                    (Parent::Power, deg)
                } else if deg == 1 {
                    (Parent::Unary, 1)
                } else {
                    (Parent::Pair, 1)
                }
            }
        };
        let node_len = g.sym_len(cur.label());
        units.push(Unit { start: cur.start(), node_len, count, parent });
        if cur.start() >= hi {
            after += 1;
        }
        if parent == Parent::Power {
            cur.jump_sibling(g, count - 1);
        }
        if after > margin {
            break;
        }
        if !cur.next(g) {
            at_end = true;
            break;
        }
    }
    let mut before = Vec::with_capacity(units.len());
    let mut total = 0;
    for u in &units {
        before.push(total);
        total += u.count;
    }
    Some(LevelSlice { units, before, total, at_start, at_end })
}

fn is_power_child(g: &Grammar, cur: &crate::grammar::Cursor) -> bool {
    match (cur.position_in_parent(g), cur.parent_label()) {
        (Some((_, deg)), Some(p)) if deg >= 2 => {
            matches!(g.rule(p), Rule::Power(..)) && g.level(p) == cur.level() + 1
        }
        _ => false,
    }
}

/// Pairs of the nodes in units `[from, to)` of a level slice.
fn slice_pairs(
    slice: &LevelSlice,
    from: usize,
    to: usize,
    level: u32,
    n: usize,
    owner: Owner,
    k: usize,
    out: &mut Vec<PairKey>,
) {
    let key = |up_start, split, down_end| PairKey { owner, level, up_start, split, down_end };
    for u in from..to {
        let unit = slice.units[u];
        let first = slice.before[u];
        match unit.parent {
            Parent::Unary => {}
            Parent::Root => out.push(key(0, n, n)),
            Parent::Pair => {
                let t = first;
                let split = unit.start + unit.node_len;
                let up_start = slice.start_back(t, k - 1);
                let down_end = if split >= n {
                    n
                } else {
                    let (ru, _) = slice.locate(t + 1);
                    let dw = slice.units[ru].parent_degree();
                    slice.end_ahead(t, k + dw, n)
                };
                out.push(key(up_start, split, down_end));
            }
            Parent::Power => {
                let cnt = unit.count;
                let up_start = slice.start_back(first, k);
                let chosen = (0..cnt.min(k + 1)).chain(cnt.saturating_sub(k + 1).max(k + 1)..cnt);
                for j in chosen {
                    let t = first + j;
                    let split = unit.start + (j + 1) * unit.node_len;
                    let down_end = if split >= n {
                        n
                    } else {
                        let mut extra = 0;
                        if j + 1 == cnt {
                            let (ru, _) = slice.locate(t + 1);
                            let dw = slice.units[ru].parent_degree();
                            if dw > 2 {
                                extra = dw;
                            }
                        }
                        slice.end_ahead(t, k + extra, n)
                    };
                    out.push(key(up_start, split, down_end));
                }
            }
        }
    }
}

/// The whole family of a string, computed from scratch.
pub fn family(g: &Grammar, v: Version, owner: Owner, cfg: AnchorConfig) -> Vec<AnchorPair> {
    let mut keys = Vec::new();
    for level in 0..=g.height(v.fwd) {
        if let Some(sl) = level_slice(g, v.fwd, level, 0, v.len(), 0) {
            debug_assert!(sl.at_start && sl.at_end);
            slice_pairs(&sl, 0, sl.units.len(), level, v.len(), owner, cfg.k, &mut keys);
        }
    }
    keys.into_iter().map(|k| v.pair(k)).collect()
}

/// Pairs anchored at the level-`level` node containing 0-based `offset`
/// (for a power child this is the node's own pair, if it has one).
pub fn pairs_for_node(
    g: &Grammar,
    v: Version,
    owner: Owner,
    cfg: AnchorConfig,
    level: u32,
    offset: usize,
) -> Vec<AnchorPair> {
    let Some(sl) = level_slice(g, v.fwd, level, offset, offset + 1, cfg.k + 3) else {
        return Vec::new();
    };
    let u = sl.units.partition_point(|u| u.start + u.count * u.node_len <= offset);
    let mut keys = Vec::new();
    slice_pairs(&sl, u, u + 1, level, v.len(), owner, cfg.k, &mut keys);
    let (a, b) = (sl.units[u].start, sl.units[u].node_len);
    let node_end = a + ((offset - a) / b + 1) * b;
    keys.retain(|k| k.split == node_end || (k.split == v.len() && k.up_start == 0 && level == g.height(v.fwd)));
    keys.into_iter().map(|k| v.pair(k)).collect()
}

/// Pairs of the nodes within `reach` units of `[lo, hi)` at `level`.
fn pairs_near(
    g: &Grammar,
    h: Handle,
    level: u32,
    lo: usize,
    hi: usize,
    owner: Owner,
    k: usize,
    reach: usize,
    out: &mut Vec<PairKey>,
) {
    let Some(sl) = level_slice(g, h, level, lo, hi, reach + k + 3) else {
        return;
    };
    let first_in = sl.units.partition_point(|u| u.start + u.count * u.node_len <= lo);
    let last_in = sl.units.partition_point(|u| u.start < hi);
    let from = first_in.saturating_sub(reach);
    let to = (last_in + reach).min(sl.units.len());
    slice_pairs(&sl, from, to, level, h.len, owner, k, out);
}

/// Pair events turning the family of `before` into the family of `after`,
/// where `after` is `before` with the letter at 0-based `edit` replaced and
/// `regions` are the rebuilt extents reported by the substitution.
pub fn diff_update(
    g: &Grammar,
    before: Version,
    after: Version,
    regions: &Regions,
    edit: usize,
    owner: Owner,
    cfg: AnchorConfig,
) -> AnchorDiff {
    if before.fwd == after.fwd {
        return AnchorDiff::default();
    }
    let n = after.len();
    let reach = cfg.k + 4;
    let top = g.height(before.fwd).max(g.height(after.fwd));
    let mut old = Vec::new();
    let mut new = Vec::new();
    for level in 0..=top {
        let (lo, hi) = regions.get(level as usize + 1).copied().unwrap_or((0, n));
        pairs_near(g, before.fwd, level, lo, hi, owner, cfg.k, reach, &mut old);
        pairs_near(g, after.fwd, level, lo, hi, owner, cfg.k, reach, &mut new);
    }
    let mut seen: BTreeMap<PairKey, u8> = BTreeMap::new();
    for k in old {
        *seen.entry(k).or_default() |= 1;
    }
    for k in new {
        *seen.entry(k).or_default() |= 2;
    }
    let mut diff = AnchorDiff::default();
    for (k, m) in seen {
        let changed = k.touches(edit);
        if m & 1 != 0 && (m == 1 || changed) {
            diff.deleted.push(k);
        }
        if m & 2 != 0 && (m == 2 || changed) {
            diff.inserted.push(after.pair(k));
        }
    }
    diff
}
