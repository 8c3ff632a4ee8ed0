//! Dynamic bicolored trees: two weighted trees whose leaves carry labels (one
//! leaf per label and tree) and a color; find `u ∈ T1`, `v ∈ T2` of maximum
//! `w(u) + w(v)` such that some red label and some blue label each have their
//! leaves below `u` and `v`.
//!
//! Both trees keep a heavy-light decomposition maintained by partial
//! rebuilding: every heavy-path root `r` counts insertions `I(r)` below it and
//! the subtree is re-decomposed once `I(r) ≥ L(r)/6`, `L` being the leaf
//! counts of the last rebuild. A node continues the heavy path of root `r`
//! through its child `v` when `L(v) ≥ 5/6·L(r)`, so between rebuilds the end
//! of every path keeps at least `(5/6)/(7/6) > 2/3` of the leaves of its root.
//!
//! For every pair of heavy paths `(p, q)` a [`BichromaticSet`] holds one point
//! per label below both path roots: the weights of the deepest nodes of `p`
//! and `q` above its leaves. The best pair of that set is the best answer with
//! `u ∈ p` and `v ∈ q`; a max-heap over all sets gives the global answer.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::{BestPair, BichromaticSet, Color, ColoredPoint};
use crate::hash::{new_map, FxHashMap};

pub const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeSide {
    One,
    Two,
}

impl TreeSide {
    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BicoloredError {
    NodeOutOfRange(u32),
    LabeledParent(u32),
    WeightNotIncreasing,
    NotAnEdge(u32),
    DuplicateLabel(u64),
    ColorMismatch(u64),
    UnlabeledLeaf(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GlobalBest {
    pub u: u32,
    pub v: u32,
    pub total: u64,
    pub red: u64,
    pub blue: u64,
}

#[derive(Clone, Debug)]
struct Node {
    parent: u32,
    children: Vec<u32>,
    weight: u64,
    label: Option<u64>,
    /// `L`: leaves below at the last rebuild.
    leaves: u32,
    /// `I`: insertions below since the last rebuild (kept at path roots).
    inserted: u32,
    path: u32,
    pos: u32,
}

#[derive(Clone, Debug, Default)]
struct Tree {
    nodes: Vec<Node>,
    paths: Vec<Vec<u32>>,
    free_paths: Vec<u32>,
}

impl Tree {
    fn new() -> Self {
        let root = Node { parent: NIL, children: Vec::new(), weight: 0, label: None, leaves: 0, inserted: 0, path: 0, pos: 0 };
        Tree { nodes: alloc::vec![root], paths: alloc::vec![alloc::vec![0]], free_paths: Vec::new() }
    }

    fn new_path(&mut self) -> u32 {
        if let Some(p) = self.free_paths.pop() {
            p
        } else {
            self.paths.push(Vec::new());
            (self.paths.len() - 1) as u32
        }
    }

    fn path_root(&self, u: u32) -> u32 {
        self.paths[self.nodes[u as usize].path as usize][0]
    }

    /// `(path, weight of its deepest node above u)` for every heavy path above `u`.
    fn paths_above(&self, mut u: u32) -> Vec<(u32, u64)> {
        let mut out = Vec::with_capacity(16);
        while u != NIL {
            let n = &self.nodes[u as usize];
            out.push((n.path, n.weight));
            u = self.nodes[self.path_root(u) as usize].parent;
        }
        out
    }

    fn subtree(&self, r: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![r];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.nodes[u as usize].children.iter().copied());
        }
        out
    }

    fn current_leaves(&self, r: u32) -> usize {
        self.subtree(r).iter().filter(|&&u| u != 0 && self.nodes[u as usize].children.is_empty()).count()
    }

    /// Recomputes `L` below `r` and re-decomposes the subtree; `r` must be a
    /// path root.
    fn decompose(&mut self, r: u32) {
        let order = self.subtree(r);
        for &u in order.iter().rev() {
            let n = &self.nodes[u as usize];
            let l = if n.children.is_empty() {
                u32::from(u != 0)
            } else {
                n.children.iter().map(|&c| self.nodes[c as usize].leaves).sum()
            };
            let n = &mut self.nodes[u as usize];
            n.leaves = l;
            n.inserted = 0;
        }
        // A new path whose root already rooted a path keeps that path's id,
        // so unchanged parts of the decomposition keep their points.
        let rp = self.nodes[r as usize].path;
        let mut old_ids: FxHashMap<u32, u32> = new_map();
        for &u in &order {
            let n = &self.nodes[u as usize];
            if n.pos == 0 && u != r {
                old_ids.insert(u, n.path);
            }
            if n.path != rp {
                self.paths[n.path as usize].clear();
            }
        }
        self.paths[rp as usize].clear();
        let mut stack = alloc::vec![(r, rp)];
        while let Some((u, p)) = stack.pop() {
            let path = &mut self.paths[p as usize];
            path.push(u);
            let root_l = self.nodes[path[0] as usize].leaves;
            let n = &mut self.nodes[u as usize];
            n.path = p;
            n.pos = (path.len() - 1) as u32;
            let children = n.children.clone();
            let heavy = children
                .iter()
                .copied()
                .max_by_key(|&c| (self.nodes[c as usize].leaves, core::cmp::Reverse(c)))
                .filter(|&c| 6 * self.nodes[c as usize].leaves as u64 >= 5 * root_l as u64 && root_l > 0);
            for c in children {
                if Some(c) != heavy {
                    let q = match old_ids.remove(&c) {
                        Some(q) => q,
                        None => self.new_path(),
                    };
                    stack.push((c, q));
                }
            }
            if let Some(h) = heavy {
                stack.push((h, p));
            }
        }
        let mut unused: Vec<u32> = old_ids.into_values().collect();
        unused.sort_unstable();
        self.free_paths.extend(unused);
    }
}

#[derive(Clone, Copy, Debug)]
struct LabelInfo {
    leaf: [u32; 2],
    color: Color,
}

/// Most path pairs see only a handful of points; those are kept in a plain
/// list with the best pair maintained directly, and move into a
/// [`BichromaticSet`] once they grow.
#[derive(Clone, Debug)]
enum PointSet {
    Small(Vec<ColoredPoint>, Option<BestPair>),
    Tree(BichromaticSet),
}

const SMALL_MAX: usize = 128;
const SMALL_BACK: usize = 64;

fn pair_value(a: &ColoredPoint, b: &ColoredPoint) -> Option<BestPair> {
    if a.color == b.color {
        return None;
    }
    let value = a.x.min(b.x) + a.y.min(b.y);
    let (red, blue) = if a.color == Color::Red { (a.label, b.label) } else { (b.label, a.label) };
    Some(BestPair { red, blue, value })
}

fn better(a: Option<BestPair>, b: Option<BestPair>) -> Option<BestPair> {
    match (a, b) {
        (Some(p), Some(q)) => Some(if q.value > p.value { q } else { p }),
        (p, None) => p,
        (None, q) => q,
    }
}

fn best_with(pts: &[ColoredPoint], p: &ColoredPoint) -> Option<BestPair> {
    pts.iter().fold(None, |acc, q| better(acc, pair_value(q, p)))
}

fn brute_best(pts: &[ColoredPoint]) -> Option<BestPair> {
    (0..pts.len()).fold(None, |acc, i| better(acc, best_with(&pts[..i], &pts[i])))
}

impl Default for PointSet {
    fn default() -> Self {
        PointSet::Small(Vec::new(), None)
    }
}

impl PointSet {
    fn from_points(pts: Vec<ColoredPoint>) -> Self {
        if pts.len() <= SMALL_MAX {
            let best = brute_best(&pts);
            PointSet::Small(pts, best)
        } else {
            PointSet::Tree(BichromaticSet::from_points(&pts).expect("one point per label"))
        }
    }

    fn get(&self, label: u64) -> Option<ColoredPoint> {
        match self {
            PointSet::Small(v, _) => v.iter().find(|p| p.label == label).copied(),
            PointSet::Tree(t) => t.get(label),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            PointSet::Small(v, _) => v.is_empty(),
            PointSet::Tree(t) => t.is_empty(),
        }
    }

    fn best_pair(&self) -> Option<BestPair> {
        match self {
            PointSet::Small(_, b) => *b,
            PointSet::Tree(t) => t.best_pair(),
        }
    }

    fn insert(&mut self, p: ColoredPoint) {
        match self {
            PointSet::Small(v, best) => {
                debug_assert!(v.iter().all(|q| q.label != p.label));
                *best = better(*best, best_with(v, &p));
                v.push(p);
                if v.len() > SMALL_MAX {
                    *self = PointSet::Tree(BichromaticSet::from_points(v).expect("one point per label"));
                }
            }
            PointSet::Tree(t) => t.insert(p).expect("fresh point"),
        }
    }

    fn delete(&mut self, label: u64) {
        match self {
            PointSet::Small(v, best) => {
                let i = v.iter().position(|q| q.label == label).expect("stored point");
                v.swap_remove(i);
                if best.is_some_and(|b| b.red == label || b.blue == label) {
                    *best = brute_best(v);
                }
            }
            PointSet::Tree(t) => {
                t.delete(label).expect("stored point");
                if t.len() < SMALL_BACK {
                    let mut pts: Vec<ColoredPoint> = t.points().collect();
                    pts.sort_unstable_by_key(|p| p.label);
                    *self = PointSet::from_points(pts);
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Bucket {
    set: PointSet,
    best: Option<BestPair>,
}

#[derive(Clone, Debug)]
pub struct BicoloredTrees {
    trees: [Tree; 2],
    labels: FxHashMap<u64, LabelInfo>,
    buckets: FxHashMap<(u32, u32), Bucket>,
    heap: BTreeSet<(u64, u32, u32)>,
    points: usize,
    rebuilds: u64,
    deferred: bool,
}

impl Default for BicoloredTrees {
    fn default() -> Self {
        Self::new()
    }
}

impl BicoloredTrees {
    pub fn new() -> Self {
        BicoloredTrees {
            trees: [Tree::new(), Tree::new()],
            labels: new_map(),
            buckets: new_map(),
            heap: BTreeSet::new(),
            points: 0,
            rebuilds: 0,
            deferred: false,
        }
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn node_count(&self, side: TreeSide) -> usize {
        self.trees[side.idx()].nodes.len()
    }

    pub fn weight(&self, side: TreeSide, u: u32) -> u64 {
        self.trees[side.idx()].nodes[u as usize].weight
    }

    pub fn parent(&self, side: TreeSide, u: u32) -> Option<u32> {
        let p = self.trees[side.idx()].nodes[u as usize].parent;
        (p != NIL).then_some(p)
    }

    pub fn children(&self, side: TreeSide, u: u32) -> &[u32] {
        &self.trees[side.idx()].nodes[u as usize].children
    }

    pub fn label(&self, side: TreeSide, u: u32) -> Option<u64> {
        self.trees[side.idx()].nodes[u as usize].label
    }

    /// Points currently stored over all path-pair structures.
    pub fn point_count(&self) -> usize {
        self.points
    }

    pub fn structure_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    fn check_node(&self, side: TreeSide, u: u32) -> Result<(), BicoloredError> {
        if (u as usize) < self.trees[side.idx()].nodes.len() {
            Ok(())
        } else {
            Err(BicoloredError::NodeOutOfRange(u))
        }
    }

    pub fn attach_leaf(
        &mut self,
        side: TreeSide,
        parent: u32,
        weight: u64,
        label: u64,
        color: Color,
    ) -> Result<u32, BicoloredError> {
        self.check_node(side, parent)?;
        let s = side.idx();
        let t = &self.trees[s];
        if t.nodes[parent as usize].label.is_some() {
            return Err(BicoloredError::LabeledParent(parent));
        }
        if weight <= t.nodes[parent as usize].weight {
            return Err(BicoloredError::WeightNotIncreasing);
        }
        if let Some(info) = self.labels.get(&label) {
            if info.leaf[s] != NIL {
                return Err(BicoloredError::DuplicateLabel(label));
            }
            if info.color != color {
                return Err(BicoloredError::ColorMismatch(label));
            }
        }
        let t = &mut self.trees[s];
        let leaf = t.nodes.len() as u32;
        let path = t.new_path();
        t.paths[path as usize].push(leaf);
        t.nodes.push(Node { parent, children: Vec::new(), weight, label: Some(label), leaves: 1, inserted: 0, path, pos: 0 });
        t.nodes[parent as usize].children.push(leaf);

        let info = self.labels.entry(label).or_insert(LabelInfo { leaf: [NIL, NIL], color });
        info.leaf[s] = leaf;
        let complete = info.leaf[1 - s] != NIL;
        if self.deferred {
            return Ok(leaf);
        }
        if complete {
            self.add_points(label);
        }

        // Count the insertion at every path root above and rebuild the
        // highest one that went over budget.
        let t = &mut self.trees[s];
        let mut u = parent;
        let mut highest = NIL;
        while u != NIL {
            let r = t.path_root(u);
            let n = &mut t.nodes[r as usize];
            n.inserted += 1;
            if 6 * n.inserted as u64 >= n.leaves as u64 {
                highest = r;
            }
            u = n.parent;
        }
        if highest != NIL {
            self.rebuild(side, highest);
        }
        Ok(leaf)
    }

    /// Inserts a node of the given weight on the edge above `child`.
    pub fn split_edge(&mut self, side: TreeSide, child: u32, weight: u64) -> Result<u32, BicoloredError> {
        self.check_node(side, child)?;
        let t = &mut self.trees[side.idx()];
        let c = t.nodes[child as usize].clone();
        if c.parent == NIL {
            return Err(BicoloredError::NotAnEdge(child));
        }
        if !(t.nodes[c.parent as usize].weight < weight && weight < c.weight) {
            return Err(BicoloredError::WeightNotIncreasing);
        }
        let z = t.nodes.len() as u32;
        t.nodes.push(Node {
            parent: c.parent,
            children: alloc::vec![child],
            weight,
            label: None,
            leaves: c.leaves,
            inserted: c.inserted,
            path: c.path,
            pos: c.pos,
        });
        for x in t.nodes[c.parent as usize].children.iter_mut() {
            if *x == child {
                *x = z;
            }
        }
        t.nodes[child as usize].parent = z;
        let path = &mut t.paths[c.path as usize];
        path.insert(c.pos as usize, z);
        for i in c.pos as usize + 1..path.len() {
            let v = path[i];
            t.nodes[v as usize].pos = i as u32;
        }
        Ok(z)
    }

    /// Removes the label of a leaf (the leaf itself stays, unlabeled).
    pub fn delete_leaf(&mut self, side: TreeSide, leaf: u32) -> Result<(), BicoloredError> {
        self.check_node(side, leaf)?;
        let s = side.idx();
        let label = self.trees[s].nodes[leaf as usize].label.ok_or(BicoloredError::UnlabeledLeaf(leaf))?;
        let info = self.labels[&label];
        if info.leaf[1 - s] != NIL {
            self.remove_points(label);
        }
        self.trees[s].nodes[leaf as usize].label = None;
        if info.leaf[1 - s] == NIL {
            self.labels.remove(&label);
        } else {
            self.labels.get_mut(&label).unwrap().leaf[s] = NIL;
        }
        Ok(())
    }

    /// While deferred, attached leaves get neither points nor insertion
    /// counts; switching back decomposes both trees from scratch and builds
    /// every path-pair structure in one batch.
    pub fn set_deferred(&mut self, on: bool) {
        if self.deferred == on {
            return;
        }
        self.deferred = on;
        if on {
            return;
        }
        self.rebuilds += 1;
        self.trees[0].decompose(0);
        self.trees[1].decompose(0);
        self.buckets.clear();
        self.heap.clear();
        self.points = 0;
        let mut batches: FxHashMap<(u32, u32), Vec<ColoredPoint>> = new_map();
        let mut labels: Vec<u64> = self.labels.iter().filter(|(_, i)| i.leaf[0] != NIL && i.leaf[1] != NIL).map(|(&l, _)| l).collect();
        labels.sort_unstable();
        for label in labels {
            let (a, b, color) = self.label_paths(label);
            for &(p, x) in &a {
                for &(q, y) in &b {
                    batches.entry((p, q)).or_default().push(ColoredPoint { x, y, color, label });
                }
            }
            self.points += a.len() * b.len();
        }
        self.install(batches);
    }

    pub fn global_best(&self) -> Option<GlobalBest> {
        let &(total, p, q) = self.heap.last()?;
        let b = self.buckets[&(p, q)].best?;
        let (r, bl) = (self.buckets[&(p, q)].set.get(b.red)?, self.buckets[&(p, q)].set.get(b.blue)?);
        let on_path = |t: &Tree, path: u32, w: u64| {
            let nodes = &t.paths[path as usize];
            nodes[nodes.partition_point(|&x| t.nodes[x as usize].weight < w)]
        };
        Some(GlobalBest {
            u: on_path(&self.trees[0], p, r.x.min(bl.x)),
            v: on_path(&self.trees[1], q, r.y.min(bl.y)),
            total,
            red: b.red,
            blue: b.blue,
        })
    }

    /// Number of heavy paths met on the way from `u` to the root.
    pub fn heavy_paths_above(&self, side: TreeSide, u: u32) -> usize {
        self.trees[side.idx()].paths_above(u).len()
    }

    fn refresh(&mut self, key: (u32, u32)) {
        let bucket = self.buckets.get_mut(&key).expect("bucket exists");
        let new = bucket.set.best_pair();
        if new != bucket.best {
            if let Some(old) = bucket.best {
                self.heap.remove(&(old.value, key.0, key.1));
            }
            if let Some(b) = new {
                self.heap.insert((b.value, key.0, key.1));
            }
            bucket.best = new;
        }
        if bucket.set.is_empty() {
            self.buckets.remove(&key);
        }
    }

    fn label_paths(&self, label: u64) -> (Vec<(u32, u64)>, Vec<(u32, u64)>, Color) {
        let info = self.labels[&label];
        (self.trees[0].paths_above(info.leaf[0]), self.trees[1].paths_above(info.leaf[1]), info.color)
    }

    fn add_points(&mut self, label: u64) {
        let (a, b, color) = self.label_paths(label);
        for &(p, x) in &a {
            for &(q, y) in &b {
                let bucket = self.buckets.entry((p, q)).or_default();
                bucket.set.insert(ColoredPoint { x, y, color, label });
                self.refresh((p, q));
            }
        }
        self.points += a.len() * b.len();
    }

    fn remove_points(&mut self, label: u64) {
        let (a, b, _) = self.label_paths(label);
        for &(p, _) in &a {
            for &(q, _) in &b {
                self.buckets.get_mut(&(p, q)).expect("bucket exists").set.delete(label);
                self.refresh((p, q));
            }
        }
        self.points -= a.len() * b.len();
    }

    /// Re-decomposes below the path root `r`. Points on paths outside the
    /// subtree keep their coordinates; for the labels inside, only the points
    /// whose inner path or coordinate changed are moved.
    fn rebuild(&mut self, side: TreeSide, r: u32) {
        self.rebuilds += 1;
        let s = side.idx();
        let stop = self.trees[s].nodes[r as usize].parent;
        let mut complete = Vec::new();
        for u in self.trees[s].subtree(r) {
            if let Some(l) = self.trees[s].nodes[u as usize].label {
                if self.labels[&l].leaf[1 - s] != NIL {
                    complete.push(l);
                }
            }
        }
        complete.sort_unstable();
        let inner = |bt: &Self, label: u64| -> Vec<(u32, u64)> {
            let t = &bt.trees[s];
            let mut mine = Vec::with_capacity(16);
            let mut u = bt.labels[&label].leaf[s];
            while u != stop {
                let n = &t.nodes[u as usize];
                mine.push((n.path, n.weight));
                u = t.nodes[t.path_root(u) as usize].parent;
            }
            mine
        };
        let before: Vec<Vec<(u32, u64)>> = complete.iter().map(|&l| inner(self, l)).collect();
        self.trees[s].decompose(r);
        for (&label, old) in complete.iter().zip(before) {
            let new = inner(self, label);
            if new == old {
                continue;
            }
            let info = self.labels[&label];
            let other = self.trees[1 - s].paths_above(info.leaf[1 - s]);
            let key = |a: u32, b: u32| if s == 0 { (a, b) } else { (b, a) };
            for &(p, x) in &old {
                if new.contains(&(p, x)) {
                    continue;
                }
                for &(q, _) in &other {
                    let k = key(p, q);
                    self.buckets.get_mut(&k).expect("bucket exists").set.delete(label);
                    self.refresh(k);
                }
            }
            for &(p, x) in &new {
                if old.contains(&(p, x)) {
                    continue;
                }
                for &(q, y) in &other {
                    let k = key(p, q);
                    let (x, y) = if s == 0 { (x, y) } else { (y, x) };
                    self.buckets.entry(k).or_default().set.insert(ColoredPoint { x, y, color: info.color, label });
                    self.refresh(k);
                }
            }
            self.points = self.points + new.len() * other.len() - old.len() * other.len();
        }
    }

    fn install(&mut self, mut batches: FxHashMap<(u32, u32), Vec<ColoredPoint>>) {
        let mut keys: Vec<(u32, u32)> = batches.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let set = PointSet::from_points(batches.remove(&key).expect("listed key"));
            self.buckets.insert(key, Bucket { set, best: None });
            self.refresh(key);
        }
    }

    /// Checks the decomposition and point invariants; `Err` describes the
    /// first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let m = (self.trees[0].nodes.len() + self.trees[1].nodes.len()).max(2) as f64;
        let bound = 6.0 * libm::log2(m);
        for (s, t) in self.trees.iter().enumerate() {
            for (pi, path) in t.paths.iter().enumerate() {
                if path.is_empty() {
                    continue;
                }
                for w in path.windows(2) {
                    if t.nodes[w[1] as usize].parent != w[0] {
                        return Err(format!("tree {s}: path {pi} is not a chain"));
                    }
                }
                let (r, e) = (path[0], *path.last().unwrap());
                let (lr, le) = (t.current_leaves(r), t.current_leaves(e));
                if 3 * le < 2 * lr {
                    return Err(format!("tree {s}: path {pi} ends with {le} of {lr} leaves"));
                }
            }
            for u in 0..t.nodes.len() as u32 {
                let n = &t.nodes[u as usize];
                if t.paths[n.path as usize].get(n.pos as usize) != Some(&u) {
                    return Err(format!("tree {s}: node {u} has a stale path position"));
                }
                if n.children.is_empty() {
                    let k = t.paths_above(u).len();
                    if k as f64 > bound {
                        return Err(format!("tree {s}: {k} heavy paths above node {u}"));
                    }
                }
            }
        }
        let mut expected = 0;
        for (&l, info) in &self.labels {
            if info.leaf[0] == NIL || info.leaf[1] == NIL {
                continue;
            }
            let (a, b, _) = self.label_paths(l);
            for &(p, x) in &a {
                for &(q, y) in &b {
                    let got = self.buckets.get(&(p, q)).and_then(|bk| bk.set.get(l));
                    if got.map(|pt| (pt.x, pt.y)) != Some((x, y)) {
                        return Err(format!("label {l}: point for paths ({p}, {q}) missing or stale"));
                    }
                }
            }
            expected += a.len() * b.len();
        }
        if expected != self.points {
            return Err(format!("{} points stored, {expected} expected", self.points));
        }
        for (&(p, q), bk) in &self.buckets {
            if bk.best != bk.set.best_pair() {
                return Err(format!("structure ({p}, {q}) caches a stale answer"));
            }
            if let Some(b) = bk.best {
                if !self.heap.contains(&(b.value, p, q)) {
                    return Err(format!("structure ({p}, {q}) missing from the heap"));
                }
            }
        }
        if self.heap.len() != self.buckets.values().filter(|b| b.best.is_some()).count() {
            return Err("heap holds stale entries".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ancestors(bt: &BicoloredTrees, side: TreeSide, mut u: u32) -> Vec<u32> {
        let mut out = Vec::new();
        loop {
            out.push(u);
            match bt.parent(side, u) {
                Some(p) => u = p,
                None => return out,
            }
        }
    }

    /// Best pair by definition: for every red and blue label, the deepest
    /// common ancestors in both trees.
    fn brute(bt: &BicoloredTrees) -> Option<u64> {
        let mut red = Vec::new();
        let mut blue = Vec::new();
        for (&l, info) in &bt.labels {
            if info.leaf[0] != NIL && info.leaf[1] != NIL {
                let e = (l, info.leaf[0], info.leaf[1]);
                if info.color == Color::Red {
                    red.push(e)
                } else {
                    blue.push(e)
                }
            }
        }
        let lca_w = |side, a, b| {
            let aa = ancestors(bt, side, a);
            let bb = ancestors(bt, side, b);
            aa.iter().filter(|x| bb.contains(x)).map(|&x| bt.weight(side, x)).max().unwrap()
        };
        let mut best = None;
        for r in &red {
            for b in &blue {
                let v = lca_w(TreeSide::One, r.1, b.1) + lca_w(TreeSide::Two, r.2, b.2);
                best = Some(best.map_or(v, |x: u64| x.max(v)));
            }
        }
        best
    }

    #[test]
    fn first_pair_gives_one_point() {
        let mut bt = BicoloredTrees::new();
        let a = bt.attach_leaf(TreeSide::One, 0, 3, 1, Color::Red).unwrap();
        assert_eq!(bt.point_count(), 0);
        bt.attach_leaf(TreeSide::Two, 0, 4, 1, Color::Red).unwrap();
        assert_eq!(bt.point_count(), 1);
        assert_eq!(bt.global_best(), None);
        let key = (bt.trees[0].nodes[a as usize].path, bt.trees[1].nodes[2.min(1) as usize].path);
        assert_eq!(bt.buckets[&key].set.get(1).map(|p| (p.x, p.y)), Some((3, 4)));
        assert_eq!(bt.attach_leaf(TreeSide::One, 0, 1, 1, Color::Red), Err(BicoloredError::DuplicateLabel(1)));
        assert_eq!(bt.attach_leaf(TreeSide::One, a, 9, 2, Color::Red), Err(BicoloredError::LabeledParent(a)));
        bt.check_invariants().unwrap();
    }

    #[test]
    fn split_keeps_the_answer_and_delete_counts_points() {
        let mut bt = BicoloredTrees::new();
        let r1 = bt.attach_leaf(TreeSide::One, 0, 5, 1, Color::Red).unwrap();
        let r2 = bt.attach_leaf(TreeSide::Two, 0, 5, 1, Color::Red).unwrap();
        let z1 = bt.split_edge(TreeSide::One, r1, 2).unwrap();
        let z2 = bt.split_edge(TreeSide::Two, r2, 3).unwrap();
        bt.attach_leaf(TreeSide::One, z1, 4, 2, Color::Blue).unwrap();
        bt.attach_leaf(TreeSide::Two, z2, 6, 2, Color::Blue).unwrap();
        let best = bt.global_best().unwrap();
        assert_eq!((best.total, best.u, best.v), (5, z1, z2));
        let before = bt.global_best();
        let leaf = bt.attach_leaf(TreeSide::One, 0, 1, 3, Color::Red).unwrap();
        bt.split_edge(TreeSide::One, leaf, 0).unwrap_err();
        assert_eq!(bt.global_best(), before);

        let k = bt.heavy_paths_above(TreeSide::One, r1) * bt.heavy_paths_above(TreeSide::Two, r2);
        let pts = bt.point_count();
        bt.delete_leaf(TreeSide::One, r1).unwrap();
        assert_eq!(bt.point_count(), pts - k);
        assert_eq!(bt.global_best(), None);
        bt.check_invariants().unwrap();
    }

    #[test]
    fn random_updates_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for round in 0..12 {
            let mut bt = BicoloredTrees::new();
            let mut next_label = 0u64;
            let mut live: Vec<(u64, u32, u32)> = Vec::new();
            for step in 0..150 {
                let roll = rng.gen_range(0..10);
                if roll < 6 || live.is_empty() {
                    let color = if rng.gen_bool(0.5) { Color::Red } else { Color::Blue };
                    let mut leaves = [0; 2];
                    for (s, side) in [TreeSide::One, TreeSide::Two].into_iter().enumerate() {
                        let n = bt.node_count(side) as u32;
                        let mut parent = rng.gen_range(0..n);
                        while bt.label(side, parent).is_some() {
                            parent = bt.parent(side, parent).unwrap();
                        }
                        let w = bt.weight(side, parent) + rng.gen_range(1..5);
                        leaves[s] = bt.attach_leaf(side, parent, w, next_label, color).unwrap();
                    }
                    live.push((next_label, leaves[0], leaves[1]));
                    next_label += 1;
                } else if roll < 8 {
                    let side = if rng.gen_bool(0.5) { TreeSide::One } else { TreeSide::Two };
                    let n = bt.node_count(side) as u32;
                    let c = rng.gen_range(1..n);
                    let (pw, cw) = (bt.weight(side, bt.parent(side, c).unwrap()), bt.weight(side, c));
                    if cw - pw >= 2 {
                        bt.split_edge(side, c, pw + 1).unwrap();
                    }
                } else {
                    let (_, a, b) = live.swap_remove(rng.gen_range(0..live.len()));
                    bt.delete_leaf(TreeSide::One, a).unwrap();
                    bt.delete_leaf(TreeSide::Two, b).unwrap();
                }
                assert_eq!(bt.global_best().map(|b| b.total), brute(&bt), "round {round} step {step}");
                if let Some(b) = bt.global_best() {
                    assert_eq!(bt.weight(TreeSide::One, b.u) + bt.weight(TreeSide::Two, b.v), b.total);
                }
                bt.check_invariants().unwrap();
            }
        }
    }
}
