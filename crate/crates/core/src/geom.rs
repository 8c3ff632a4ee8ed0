//! Dynamic best bichromatic point: a multiset of red and blue points with
//! `max min(x,x') + min(y,y')` over red/blue pairs.
//!
//! Augmented 2D range tree. The primary tree is over x, leaf-oriented and
//! weight-balanced by partial rebuilding; each internal primary node `u` owns a
//! secondary tree over the y's of its points, every point tagged with the side
//! of `u` it lies on. A secondary node `v` splits the points of `u` into four
//! quadrants (A: left-x low-y, B: left-x high-y, C: right-x low-y, D: right-x
//! high-y); the pairs it shatters are A×D, where the A point decides both
//! minima, and B×C, where x comes from B and y from C.
//!
//! Coordinates are perturbed by a scrambled insertion counter so all keys are
//! distinct; reported values use the raw coordinates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::hash::{mix64, new_map, FxHashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    fn idx(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColoredPoint {
    pub x: u64,
    pub y: u64,
    pub color: Color,
    pub label: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BestPair {
    pub red: u64,
    pub blue: u64,
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomError {
    DuplicateLabel(u64),
    UnknownLabel(u64),
}

type Key = (u64, u64);
/// `(value + 1, label)`; zero means no point.
type Top = (u64, u64);

const NIL: u32 = u32::MAX;
/// Left-side points only need their max x, right-side points their max y.
const AXIS: usize = 0;
const SUM: usize = 1;

fn better(a: Option<BestPair>, b: Option<BestPair>) -> Option<BestPair> {
    match (a, b) {
        (Some(p), Some(q)) => Some(if q.value > p.value { q } else { p }),
        (p, None) => p,
        (None, q) => q,
    }
}

fn top_max(a: Top, b: Top) -> Top {
    if b.0 > a.0 {
        b
    } else {
        a
    }
}

fn pair_of(c: Color, mine: u64, theirs: u64, value: u64) -> BestPair {
    match c {
        Color::Red => BestPair { red: mine, blue: theirs, value },
        Color::Blue => BestPair { red: theirs, blue: mine, value },
    }
}

#[derive(Clone, Copy, Debug)]
struct Stored {
    p: ColoredPoint,
    seq: u64,
}

impl Stored {
    fn xkey(&self) -> Key {
        (self.p.x, self.seq)
    }

    fn ykey(&self) -> Key {
        (self.p.y, self.seq)
    }
}

/// A point as seen by a secondary tree: `side` 0 = left primary child.
#[derive(Clone, Copy, Debug)]
struct Item {
    st: Stored,
    side: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
struct Aug {
    /// `[side][color][AXIS | SUM]`
    ext: [[[Top; 2]; 2]; 2],
    best: Option<BestPair>,
}

impl Aug {
    fn leaf(it: &Item) -> Aug {
        let mut a = Aug::default();
        let p = it.st.p;
        let axis = if it.side == 0 { p.x } else { p.y };
        a.ext[it.side as usize][p.color.idx()] = [(axis + 1, p.label), (p.x + p.y + 1, p.label)];
        a
    }

    fn merge(lo: &Aug, hi: &Aug) -> Aug {
        let mut a = Aug::default();
        for s in 0..2 {
            for c in 0..2 {
                for k in 0..2 {
                    a.ext[s][c][k] = top_max(lo.ext[s][c][k], hi.ext[s][c][k]);
                }
            }
        }
        let mut best = better(lo.best, hi.best);
        for c in [Color::Red, Color::Blue] {
            let (ci, oi) = (c.idx(), c.other().idx());
            // A × D: the A point is below and left of the D point.
            let (p, q) = (lo.ext[0][ci][SUM], hi.ext[1][oi][SUM]);
            if p.0 > 0 && q.0 > 0 {
                best = better(best, Some(pair_of(c, p.1, q.1, p.0 - 1)));
            }
            // B × C: x from B, y from C.
            let (p, q) = (hi.ext[0][ci][AXIS], lo.ext[1][oi][AXIS]);
            if p.0 > 0 && q.0 > 0 {
                best = better(best, Some(pair_of(c, p.1, q.1, p.0 + q.0 - 2)));
            }
        }
        a.best = best;
        a
    }
}

#[derive(Clone, Debug)]
struct SNode {
    left: u32,
    right: u32,
    size: u32,
    /// Leaf: own key; internal: largest key of the left subtree.
    key: Key,
    item: Option<Item>,
    aug: Aug,
}

#[derive(Clone, Debug)]
struct PNode {
    left: u32,
    right: u32,
    size: u32,
    key: Key,
    label: u64,
    sec: u32,
    best: Option<BestPair>,
}

fn unbalanced(a: u32, b: u32) -> bool {
    let s = a + b;
    s >= 4 && 4 * a.max(b) > 3 * s
}

/// The dynamic best-bichromatic-point structure.
#[derive(Clone, Debug)]
pub struct BichromaticSet {
    points: FxHashMap<u64, Stored>,
    seq: u64,
    root: u32,
    pnodes: Vec<PNode>,
    pfree: Vec<u32>,
    snodes: Vec<SNode>,
    sfree: Vec<u32>,
    rebuilds: u64,
}

impl Default for BichromaticSet {
    fn default() -> Self {
        Self::new()
    }
}

impl BichromaticSet {
    pub fn new() -> Self {
        BichromaticSet {
            points: new_map(),
            seq: 0,
            root: NIL,
            pnodes: Vec::new(),
            pfree: Vec::new(),
            snodes: Vec::new(),
            sfree: Vec::new(),
            rebuilds: 0,
        }
    }

    /// Tie-breaker for equal coordinates: a bijective scramble of an
    /// insertion counter, so points sharing a coordinate land at spread-out
    /// positions instead of piling up at one end.
    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        mix64(self.seq)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of partial rebuilds performed so far.
    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    pub fn best_pair(&self) -> Option<BestPair> {
        if self.root == NIL {
            None
        } else {
            self.pnodes[self.root as usize].best
        }
    }

    pub fn get(&self, label: u64) -> Option<ColoredPoint> {
        self.points.get(&label).map(|s| s.p)
    }

    /// The stored points, in no particular order.
    pub fn points(&self) -> impl Iterator<Item = ColoredPoint> + '_ {
        self.points.values().map(|s| s.p)
    }

    /// Builds the structure over a batch of points in one pass.
    pub fn from_points(points: &[ColoredPoint]) -> Result<Self, GeomError> {
        let mut me = Self::new();
        let mut st: Vec<Stored> = Vec::with_capacity(points.len());
        for &p in points {
            let s = Stored { p, seq: me.next_seq() };
            if me.points.insert(p.label, s).is_some() {
                return Err(GeomError::DuplicateLabel(p.label));
            }
            st.push(s);
        }
        if !st.is_empty() {
            st.sort_unstable_by_key(|s| s.xkey());
            me.root = me.p_build(&st).0;
        }
        Ok(me)
    }

    pub fn insert(&mut self, p: ColoredPoint) -> Result<(), GeomError> {
        if self.points.contains_key(&p.label) {
            return Err(GeomError::DuplicateLabel(p.label));
        }
        let st = Stored { p, seq: self.next_seq() };
        self.points.insert(p.label, st);
        self.root = self.p_insert(self.root, st);
        Ok(())
    }

    pub fn delete(&mut self, label: u64) -> Result<ColoredPoint, GeomError> {
        let st = self.points.remove(&label).ok_or(GeomError::UnknownLabel(label))?;
        self.root = self.p_delete(self.root, &st);
        Ok(st.p)
    }

    // ---- secondary trees ----------------------------------------------

    fn s_alloc(&mut self, n: SNode) -> u32 {
        if let Some(i) = self.sfree.pop() {
            self.snodes[i as usize] = n;
            i
        } else {
            self.snodes.push(n);
            (self.snodes.len() - 1) as u32
        }
    }

    fn s_leaf(&mut self, it: Item) -> u32 {
        self.s_alloc(SNode { left: NIL, right: NIL, size: 1, key: it.st.ykey(), item: Some(it), aug: Aug::leaf(&it) })
    }

    fn s_join(&mut self, lo: u32, hi: u32) -> u32 {
        let (l, h) = (&self.snodes[lo as usize], &self.snodes[hi as usize]);
        let n = SNode {
            left: lo,
            right: hi,
            size: l.size + h.size,
            key: self.s_max_key(lo),
            item: None,
            aug: Aug::merge(&l.aug, &h.aug),
        };
        self.s_alloc(n)
    }

    fn s_max_key(&self, mut v: u32) -> Key {
        loop {
            let n = &self.snodes[v as usize];
            if n.item.is_some() {
                return n.key;
            }
            v = n.right;
        }
    }

    fn s_pull(&mut self, v: u32) {
        let (l, r) = (self.snodes[v as usize].left, self.snodes[v as usize].right);
        let aug = Aug::merge(&self.snodes[l as usize].aug, &self.snodes[r as usize].aug);
        let size = self.snodes[l as usize].size + self.snodes[r as usize].size;
        let n = &mut self.snodes[v as usize];
        n.aug = aug;
        n.size = size;
    }

    fn s_build(&mut self, items: &[Item]) -> u32 {
        if items.is_empty() {
            return NIL;
        }
        if items.len() == 1 {
            return self.s_leaf(items[0]);
        }
        let mid = items.len() / 2;
        let lo = self.s_build(&items[..mid]);
        let hi = self.s_build(&items[mid..]);
        self.s_join(lo, hi)
    }

    fn s_collect(&self, v: u32, out: &mut Vec<Item>) {
        if v == NIL {
            return;
        }
        let n = &self.snodes[v as usize];
        match n.item {
            Some(it) => out.push(it),
            None => {
                self.s_collect(n.left, out);
                self.s_collect(n.right, out);
            }
        }
    }

    fn s_free(&mut self, v: u32) {
        if v == NIL {
            return;
        }
        let (l, r) = (self.snodes[v as usize].left, self.snodes[v as usize].right);
        self.s_free(l);
        self.s_free(r);
        self.sfree.push(v);
    }

    fn s_rebuild_with(&mut self, v: u32, add: Option<Item>, remove: Option<Key>) -> u32 {
        self.rebuilds += 1;
        let mut items = Vec::with_capacity(self.snodes[v as usize].size as usize + 1);
        self.s_collect(v, &mut items);
        self.s_free(v);
        if let Some(k) = remove {
            items.retain(|it| it.st.ykey() != k);
        }
        if let Some(it) = add {
            let at = items.partition_point(|o| o.st.ykey() < it.st.ykey());
            items.insert(at, it);
        }
        self.s_build(&items)
    }

    fn s_insert(&mut self, v: u32, it: Item) -> u32 {
        if v == NIL {
            return self.s_leaf(it);
        }
        let key = it.st.ykey();
        let n = &self.snodes[v as usize];
        if n.item.is_some() {
            let leaf = self.s_leaf(it);
            return if key < self.snodes[v as usize].key { self.s_join(leaf, v) } else { self.s_join(v, leaf) };
        }
        let go_left = key <= n.key;
        let (ls, rs) = (self.snodes[n.left as usize].size, self.snodes[n.right as usize].size);
        let (ls, rs) = if go_left { (ls + 1, rs) } else { (ls, rs + 1) };
        if unbalanced(ls, rs) {
            return self.s_rebuild_with(v, Some(it), None);
        }
        if go_left {
            let c = self.s_insert(n.left, it);
            self.snodes[v as usize].left = c;
        } else {
            let c = self.s_insert(n.right, it);
            self.snodes[v as usize].right = c;
        }
        self.s_pull(v);
        v
    }

    fn s_delete(&mut self, v: u32, key: Key) -> u32 {
        let n = &self.snodes[v as usize];
        if n.item.is_some() {
            debug_assert_eq!(n.key, key);
            self.sfree.push(v);
            return NIL;
        }
        let go_left = key <= n.key;
        let (l, r) = (n.left, n.right);
        let (ls, rs) = (self.snodes[l as usize].size, self.snodes[r as usize].size);
        let (ls, rs) = if go_left { (ls - 1, rs) } else { (ls, rs - 1) };
        if ls > 0 && rs > 0 && unbalanced(ls, rs) {
            return self.s_rebuild_with(v, None, Some(key));
        }
        let c = self.s_delete(if go_left { l } else { r }, key);
        if c == NIL {
            self.sfree.push(v);
            return if go_left { r } else { l };
        }
        if go_left {
            self.snodes[v as usize].left = c;
            self.snodes[v as usize].key = self.s_max_key(c);
        } else {
            self.snodes[v as usize].right = c;
        }
        self.s_pull(v);
        v
    }

    // ---- primary tree -------------------------------------------------

    fn p_alloc(&mut self, n: PNode) -> u32 {
        if let Some(i) = self.pfree.pop() {
            self.pnodes[i as usize] = n;
            i
        } else {
            self.pnodes.push(n);
            (self.pnodes.len() - 1) as u32
        }
    }

    fn p_leaf(&mut self, st: &Stored) -> u32 {
        self.p_alloc(PNode { left: NIL, right: NIL, size: 1, key: st.xkey(), label: st.p.label, sec: NIL, best: None })
    }

    fn is_p_leaf(&self, u: u32) -> bool {
        self.pnodes[u as usize].left == NIL
    }

    fn p_pull(&mut self, u: u32) {
        let n = &self.pnodes[u as usize];
        let (l, r) = (&self.pnodes[n.left as usize], &self.pnodes[n.right as usize]);
        let size = l.size + r.size;
        let best = better(better(l.best, r.best), self.snodes[n.sec as usize].aug.best);
        let n = &mut self.pnodes[u as usize];
        n.size = size;
        n.best = best;
    }

    fn p_max_key(&self, mut u: u32) -> Key {
        while !self.is_p_leaf(u) {
            u = self.pnodes[u as usize].right;
        }
        self.pnodes[u as usize].key
    }

    /// Builds a subtree over x-sorted points; returns it with its points in
    /// y order.
    fn p_build(&mut self, pts: &[Stored]) -> (u32, Vec<Stored>) {
        if pts.len() == 1 {
            return (self.p_leaf(&pts[0]), pts.to_vec());
        }
        let mid = pts.len() / 2;
        let (lo, ly) = self.p_build(&pts[..mid]);
        let (hi, hy) = self.p_build(&pts[mid..]);
        let mut items = Vec::with_capacity(pts.len());
        let mut merged = Vec::with_capacity(pts.len());
        let (mut i, mut j) = (0, 0);
        while i < ly.len() || j < hy.len() {
            let take_lo = j == hy.len() || (i < ly.len() && ly[i].ykey() < hy[j].ykey());
            let (st, side) = if take_lo {
                i += 1;
                (ly[i - 1], 0)
            } else {
                j += 1;
                (hy[j - 1], 1)
            };
            items.push(Item { st, side });
            merged.push(st);
        }
        let sec = self.s_build(&items);
        let u = self.p_alloc(PNode { left: lo, right: hi, size: 0, key: pts[mid - 1].xkey(), label: 0, sec, best: None });
        self.p_pull(u);
        (u, merged)
    }

    fn p_collect(&self, u: u32, out: &mut Vec<Stored>) {
        if self.is_p_leaf(u) {
            let l = self.pnodes[u as usize].label;
            out.push(self.points.get(&l).copied().unwrap_or_else(|| self.ghost(u)));
        } else {
            self.p_collect(self.pnodes[u as usize].left, out);
            self.p_collect(self.pnodes[u as usize].right, out);
        }
    }

    /// A leaf whose label was just removed from `points` (the one being deleted).
    fn ghost(&self, u: u32) -> Stored {
        let n = &self.pnodes[u as usize];
        Stored { p: ColoredPoint { x: n.key.0, y: 0, color: Color::Red, label: n.label }, seq: n.key.1 }
    }

    fn p_free(&mut self, u: u32) {
        if !self.is_p_leaf(u) {
            let n = self.pnodes[u as usize].clone();
            self.s_free(n.sec);
            self.p_free(n.left);
            self.p_free(n.right);
        }
        self.pfree.push(u);
    }

    fn p_rebuild_with(&mut self, u: u32, add: Option<&Stored>, remove: Option<&Stored>) -> u32 {
        self.rebuilds += 1;
        let mut pts = Vec::with_capacity(self.pnodes[u as usize].size as usize + 1);
        self.p_collect(u, &mut pts);
        self.p_free(u);
        if let Some(r) = remove {
            pts.retain(|s| s.seq != r.seq);
        }
        if let Some(a) = add {
            let at = pts.partition_point(|o| o.xkey() < a.xkey());
            pts.insert(at, *a);
        }
        if pts.is_empty() {
            return NIL;
        }
        self.p_build(&pts).0
    }

    fn p_insert(&mut self, u: u32, st: Stored) -> u32 {
        if u == NIL {
            return self.p_leaf(&st);
        }
        if self.is_p_leaf(u) {
            let other = self.points[&self.pnodes[u as usize].label];
            let mut pair = [other, st];
            pair.sort_by_key(|s| s.xkey());
            self.pfree.push(u);
            return self.p_build(&pair).0;
        }
        let n = &self.pnodes[u as usize];
        let go_left = st.xkey() <= n.key;
        let (l, r) = (n.left, n.right);
        let (ls, rs) = (self.pnodes[l as usize].size, self.pnodes[r as usize].size);
        let (ls, rs) = if go_left { (ls + 1, rs) } else { (ls, rs + 1) };
        if unbalanced(ls, rs) {
            return self.p_rebuild_with(u, Some(&st), None);
        }
        let sec = self.s_insert(n.sec, Item { st, side: if go_left { 0 } else { 1 } });
        self.pnodes[u as usize].sec = sec;
        if go_left {
            let c = self.p_insert(l, st);
            self.pnodes[u as usize].left = c;
        } else {
            let c = self.p_insert(r, st);
            self.pnodes[u as usize].right = c;
        }
        self.p_pull(u);
        u
    }

    fn p_delete(&mut self, u: u32, st: &Stored) -> u32 {
        if self.is_p_leaf(u) {
            debug_assert_eq!(self.pnodes[u as usize].key, st.xkey());
            self.pfree.push(u);
            return NIL;
        }
        let n = &self.pnodes[u as usize];
        let go_left = st.xkey() <= n.key;
        let (l, r) = (n.left, n.right);
        let (ls, rs) = (self.pnodes[l as usize].size, self.pnodes[r as usize].size);
        let (ls, rs) = if go_left { (ls - 1, rs) } else { (ls, rs - 1) };
        if ls > 0 && rs > 0 && unbalanced(ls, rs) {
            return self.p_rebuild_with(u, None, Some(st));
        }
        let c = self.p_delete(if go_left { l } else { r }, st);
        if c == NIL {
            let sec = self.pnodes[u as usize].sec;
            self.s_free(sec);
            self.pfree.push(u);
            return if go_left { r } else { l };
        }
        let sec = self.s_delete(self.pnodes[u as usize].sec, st.ykey());
        self.pnodes[u as usize].sec = sec;
        if go_left {
            let key = self.p_max_key(c);
            let n = &mut self.pnodes[u as usize];
            n.left = c;
            n.key = key;
        } else {
            self.pnodes[u as usize].right = c;
        }
        self.p_pull(u);
        u
    }

    // ---- audits -------------------------------------------------------

    /// Recomputes every augmentation from scratch and compares it with the
    /// stored one; also checks that every secondary tree holds exactly the
    /// points of its primary subtree, tagged with the right side.
    pub fn audit(&self) -> Result<(), String> {
        if self.root == NIL {
            return if self.points.is_empty() { Ok(()) } else { Err("points without a tree".into()) };
        }
        let (n, _) = self.audit_p(self.root)?;
        if n != self.points.len() {
            return Err(format!("tree holds {n} points, map holds {}", self.points.len()));
        }
        Ok(())
    }

    fn audit_p(&self, u: u32) -> Result<(usize, Option<BestPair>), String> {
        let n = &self.pnodes[u as usize];
        if self.is_p_leaf(u) {
            let st = self.points.get(&n.label).ok_or("leaf with unknown label")?;
            if st.xkey() != n.key {
                return Err(format!("leaf {} has a stale key", n.label));
            }
            return Ok((1, None));
        }
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        self.p_collect(n.left, &mut lo);
        self.p_collect(n.right, &mut hi);
        if lo.iter().any(|s| s.xkey() > n.key) || hi.iter().any(|s| s.xkey() <= n.key) {
            return Err("primary routing key out of order".into());
        }
        let mut want: Vec<(Key, u64, u8)> = lo.iter().map(|s| (s.ykey(), s.p.label, 0)).collect();
        want.extend(hi.iter().map(|s| (s.ykey(), s.p.label, 1)));
        want.sort();
        let mut have = Vec::new();
        self.s_collect(n.sec, &mut have);
        let have: Vec<(Key, u64, u8)> = have.iter().map(|it| (it.st.ykey(), it.st.p.label, it.side)).collect();
        if have != want {
            return Err(format!("secondary tree of a node with {} points has the wrong contents", want.len()));
        }
        let sec = self.audit_s(n.sec)?;
        let (a, ba) = self.audit_p(n.left)?;
        let (b, bb) = self.audit_p(n.right)?;
        let best = better(better(ba, bb), sec.best);
        if n.size as usize != a + b {
            return Err("primary size field is stale".into());
        }
        if best.map(|p| p.value) != n.best.map(|p| p.value) {
            return Err(format!("primary best {:?} should be {:?}", n.best, best));
        }
        Ok((a + b, n.best))
    }

    fn audit_s(&self, v: u32) -> Result<Aug, String> {
        let n = &self.snodes[v as usize];
        let aug = match n.item {
            Some(it) => Aug::leaf(&it),
            None => {
                let (a, b) = (self.audit_s(n.left)?, self.audit_s(n.right)?);
                if self.s_max_key(n.left) != n.key {
                    return Err("secondary routing key is stale".into());
                }
                Aug::merge(&a, &b)
            }
        };
        if aug.best.map(|p| p.value) != n.aug.best.map(|p| p.value) || aug.ext != n.aug.ext {
            return Err("secondary augmentation is stale".into());
        }
        Ok(aug)
    }

    /// Number of (primary node, secondary node) pairs that shatter the two
    /// points: they sit in different children of both. Brute force, for tests.
    pub fn shattering_count(&self, a: u64, b: u64) -> usize {
        let mut count = 0;
        let mut stack = if self.root == NIL { Vec::new() } else { alloc::vec![self.root] };
        while let Some(u) = stack.pop() {
            if self.is_p_leaf(u) {
                continue;
            }
            let n = &self.pnodes[u as usize];
            stack.push(n.left);
            stack.push(n.right);
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            self.p_collect(n.left, &mut lo);
            self.p_collect(n.right, &mut hi);
            let has = |v: &Vec<Stored>, l| v.iter().any(|s| s.p.label == l);
            if !((has(&lo, a) && has(&hi, b)) || (has(&lo, b) && has(&hi, a))) {
                continue;
            }
            let mut sstack = alloc::vec![n.sec];
            while let Some(v) = sstack.pop() {
                let sn = &self.snodes[v as usize];
                if sn.item.is_some() {
                    continue;
                }
                sstack.push(sn.left);
                sstack.push(sn.right);
                let mut x = Vec::new();
                let mut y = Vec::new();
                self.s_collect(sn.left, &mut x);
                self.s_collect(sn.right, &mut y);
                let has = |v: &Vec<Item>, l| v.iter().any(|it| it.st.p.label == l);
                if (has(&x, a) && has(&y, b)) || (has(&x, b) && has(&y, a)) {
                    count += 1;
                }
            }
        }
        count
    }
}
