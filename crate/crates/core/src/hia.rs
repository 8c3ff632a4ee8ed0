//! Heaviest induced ancestors over two leaf-labelled weighted trees.
//!
//! Both trees are split into heavy paths. For every label `ℓ` present in both
//! trees and every pair `(p, q)` of heavy paths met on the way from the two
//! `ℓ`-leaves to the roots, the pair structure of `(p, q)` receives the point
//! `(x, y)`: the positions of the deepest nodes of `p` and `q` above the
//! leaves. A query walks the heavy paths above `u` and above `v` and asks each
//! pair structure for the best point, which is a handful of dominance queries
//! answered by a merge-sort tree.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::core_strings::SuffixTree;
use crate::hash::{new_map, FxHashMap};

/// A rooted tree with node weights increasing away from the root and optional
/// distinct labels.
#[derive(Clone, Debug, Default)]
pub struct WeightedTree {
    pub parent: Vec<Option<usize>>,
    pub weight: Vec<u64>,
    pub label: Vec<Option<u64>>,
}

impl WeightedTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Weighted view of a suffix tree with string-depths as weights; leaves are
    /// labelled by `leaf_label(suffix start)`.
    pub fn from_suffix_tree(tree: &SuffixTree, leaf_label: impl Fn(usize) -> u64) -> Self {
        let n = tree.len();
        let mut out = WeightedTree {
            parent: Vec::with_capacity(n),
            weight: Vec::with_capacity(n),
            label: Vec::with_capacity(n),
        };
        for i in 0..n {
            let v = crate::core_strings::NodeId(i as u32);
            out.parent.push(tree.parent(v).map(|p| p.idx()));
            out.weight.push(tree.depth(v) as u64);
            out.label.push(tree.leaf_suffix(v).map(&leaf_label));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HiaError {
    DuplicateLabel { tree: u8, label: u64 },
    MalformedTree { tree: u8 },
    NodeOutOfRange { tree: u8, node: usize },
}

impl fmt::Display for HiaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HiaError::DuplicateLabel { tree, label } => {
                write!(f, "label {label} appears twice in tree {tree}")
            }
            HiaError::MalformedTree { tree } => write!(f, "tree {tree} is not a rooted tree"),
            HiaError::NodeOutOfRange { tree, node } => {
                write!(f, "node {node} does not belong to tree {tree}")
            }
        }
    }
}

/// Result of a query: the induced ancestors, their capped total weight and a
/// label found below both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HiaAnswer {
    pub u: usize,
    pub v: usize,
    pub total: u64,
    pub label: u64,
}

#[derive(Clone, Debug)]
struct HeavyPaths {
    parent: Vec<Option<usize>>,
    weight: Vec<u64>,
    path_of: Vec<u32>,
    pos: Vec<u32>,
    /// Nodes of each path from its head downwards.
    paths: Vec<Vec<usize>>,
}

impl HeavyPaths {
    fn new(t: &WeightedTree, which: u8) -> Result<Self, HiaError> {
        let n = t.len();
        if n == 0 || t.weight.len() != n || t.label.len() != n {
            return Err(HiaError::MalformedTree { tree: which });
        }
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (v, p) in t.parent.iter().enumerate() {
            match *p {
                Some(p) if p < n => children[p].push(v),
                Some(_) => return Err(HiaError::MalformedTree { tree: which }),
                None if root.is_none() => root = Some(v),
                None => return Err(HiaError::MalformedTree { tree: which }),
            }
        }
        let root = root.ok_or(HiaError::MalformedTree { tree: which })?;
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(children[v].iter().copied());
        }
        if order.len() != n {
            return Err(HiaError::MalformedTree { tree: which });
        }
        let mut size = vec![1usize; n];
        for &v in order.iter().rev() {
            if let Some(p) = t.parent[v] {
                size[p] += size[v];
            }
        }
        let mut path_of = vec![0u32; n];
        let mut pos = vec![0u32; n];
        let mut paths: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            let is_head = match t.parent[v] {
                None => true,
                Some(p) => {
                    let heavy = children[p].iter().copied().max_by_key(|&c| (size[c], usize::MAX - c));
                    heavy != Some(v)
                }
            };
            if is_head {
                path_of[v] = paths.len() as u32;
                pos[v] = 0;
                paths.push(vec![v]);
            } else {
                let p = t.parent[v].expect("non-head has a parent");
                path_of[v] = path_of[p];
                pos[v] = pos[p] + 1;
                paths[path_of[p] as usize].push(v);
            }
        }
        Ok(HeavyPaths {
            parent: t.parent.clone(),
            weight: t.weight.clone(),
            path_of,
            pos,
            paths,
        })
    }

    /// `(path, position of the deepest ancestor on it)` for every heavy path
    /// on the way from `v` to the root.
    fn climb(&self, v: usize) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut v = Some(v);
        while let Some(x) = v {
            let p = self.path_of[x];
            out.push((p, self.pos[x]));
            v = self.parent[self.paths[p as usize][0]];
        }
        out
    }

    fn weight_at(&self, path: u32, pos: u32) -> u64 {
        self.weight[self.paths[path as usize][pos as usize]]
    }

    fn node_at(&self, path: u32, pos: u32) -> usize {
        self.paths[path as usize][pos as usize]
    }
}

#[derive(Clone, Copy, Debug)]
struct Point {
    x: u32,
    y: u32,
    sum: u64,
    label: u64,
}

/// Merge-sort tree over points ordered by `x`; each aligned block of `2^k`
/// points is stored sorted by `y` with prefix maxima of `sum` and suffix maxima
/// of `x`.
#[derive(Clone, Debug)]
struct PairStructure {
    xs: Vec<u32>,
    levels: Vec<Level>,
}

#[derive(Clone, Debug)]
struct Level {
    pts: Vec<Point>,
    pref_sum: Vec<u32>,
    suf_x: Vec<u32>,
}

impl PairStructure {
    fn new(mut pts: Vec<Point>) -> Self {
        pts.sort_unstable_by_key(|p| (p.x, p.y));
        let m = pts.len();
        let xs = pts.iter().map(|p| p.x).collect();
        let mut levels = Vec::new();
        let mut cur = pts;
        let mut width = 1usize;
        loop {
            let mut pref_sum = vec![0u32; m];
            let mut suf_x = vec![0u32; m];
            for bs in (0..m).step_by(width) {
                let be = (bs + width).min(m);
                for i in bs..be {
                    pref_sum[i] = if i > bs && cur[pref_sum[i - 1] as usize].sum >= cur[i].sum {
                        pref_sum[i - 1]
                    } else {
                        i as u32
                    };
                }
                for i in (bs..be).rev() {
                    suf_x[i] = if i + 1 < be && cur[suf_x[i + 1] as usize].x >= cur[i].x {
                        suf_x[i + 1]
                    } else {
                        i as u32
                    };
                }
            }
            let done = width >= m;
            let next = if done {
                Vec::new()
            } else {
                let mut next = Vec::with_capacity(m);
                for bs in (0..m).step_by(2 * width) {
                    let mid = (bs + width).min(m);
                    let be = (bs + 2 * width).min(m);
                    let (mut a, mut b) = (bs, mid);
                    while a < mid || b < be {
                        if b >= be || (a < mid && cur[a].y <= cur[b].y) {
                            next.push(cur[a]);
                            a += 1;
                        } else {
                            next.push(cur[b]);
                            b += 1;
                        }
                    }
                }
                next
            };
            levels.push(Level { pts: cur, pref_sum, suf_x });
            if done {
                break;
            }
            cur = next;
            width *= 2;
        }
        PairStructure { xs, levels }
    }

    /// Calls `f(level, block start, block end)` for the canonical blocks
    /// covering `[lo, hi)`.
    fn blocks(&self, mut lo: usize, hi: usize, mut f: impl FnMut(&Level, usize, usize)) {
        let m = self.xs.len();
        let top = self.levels.len() - 1;
        while lo < hi {
            let mut k = (lo.trailing_zeros() as usize).min(top);
            while k > 0 && (lo + (1 << k)).min(m) > hi {
                k -= 1;
            }
            let end = (lo + (1 << k)).min(m);
            f(&self.levels[k], lo, end);
            lo = end;
        }
    }

    /// Best point for prefixes `[0, i]` of the first path and `[0, j]` of the
    /// second, where `wi` and `wj` are the (possibly capped) weights at `i`, `j`.
    fn query(
        &self,
        i: u32,
        wi: u64,
        j: u32,
        wj: u64,
        w1: impl Fn(u32) -> u64,
        w2: impl Fn(u32) -> u64,
    ) -> Option<(u64, u32, u32, u64)> {
        let m = self.xs.len();
        let split = self.xs.partition_point(|&x| x < i);
        let mut best: Option<(u64, u32, u32, u64)> = None;
        let mut offer = |c: (u64, u32, u32, u64)| {
            if best.map_or(true, |b| c.0 > b.0) {
                best = Some(c);
            }
        };
        self.blocks(0, split, |lv, bs, be| {
            let cut = bs + lv.pts[bs..be].partition_point(|p| p.y < j);
            if cut > bs {
                let p = lv.pts[lv.pref_sum[cut - 1] as usize];
                offer((p.sum, p.x, p.y, p.label));
            }
            if cut < be {
                let p = lv.pts[lv.suf_x[cut] as usize];
                offer((w1(p.x) + wj, p.x, j, p.label));
            }
        });
        self.blocks(split, m, |lv, bs, be| {
            let cut = bs + lv.pts[bs..be].partition_point(|p| p.y < j);
            if cut > bs {
                let p = lv.pts[cut - 1];
                offer((wi + w2(p.y), i, p.y, p.label));
            }
            if cut < be {
                offer((wi + wj, i, j, lv.pts[cut].label));
            }
        });
        best
    }
}

/// Heaviest-induced-ancestor index over two weighted trees.
#[derive(Clone, Debug)]
pub struct HiaIndex {
    t1: HeavyPaths,
    t2: HeavyPaths,
    pairs: FxHashMap<(u32, u32), PairStructure>,
}

impl HiaIndex {
    pub fn build(t1: &WeightedTree, t2: &WeightedTree) -> Result<Self, HiaError> {
        let h1 = HeavyPaths::new(t1, 1)?;
        let h2 = HeavyPaths::new(t2, 2)?;
        let mut by_label: FxHashMap<u64, usize> = new_map();
        for (v, l) in t1.label.iter().enumerate() {
            if let Some(l) = *l {
                if by_label.insert(l, v).is_some() {
                    return Err(HiaError::DuplicateLabel { tree: 1, label: l });
                }
            }
        }
        let mut seen2: FxHashMap<u64, ()> = new_map();
        let mut buckets: FxHashMap<(u32, u32), Vec<Point>> = new_map();
        for (v2, l) in t2.label.iter().enumerate() {
            let Some(l) = *l else { continue };
            if seen2.insert(l, ()).is_some() {
                return Err(HiaError::DuplicateLabel { tree: 2, label: l });
            }
            let Some(&v1) = by_label.get(&l) else { continue };
            let c1 = h1.climb(v1);
            let c2 = h2.climb(v2);
            for &(p, x) in &c1 {
                for &(q, y) in &c2 {
                    let sum = h1.weight_at(p, x) + h2.weight_at(q, y);
                    buckets.entry((p, q)).or_default().push(Point { x, y, sum, label: l });
                }
            }
        }
        let mut pairs = new_map();
        for (k, pts) in buckets {
            pairs.insert(k, PairStructure::new(pts));
        }
        Ok(HiaIndex { t1: h1, t2: h2, pairs })
    }

    /// Maximises `min(w(u'), cap_u) + min(w(v'), cap_v)` over ancestors `u'` of
    /// `u` and `v'` of `v` sharing a label below them.
    pub fn query(&self, u: usize, cap_u: u64, v: usize, cap_v: u64) -> Result<Option<HiaAnswer>, HiaError> {
        if u >= self.t1.weight.len() {
            return Err(HiaError::NodeOutOfRange { tree: 1, node: u });
        }
        if v >= self.t2.weight.len() {
            return Err(HiaError::NodeOutOfRange { tree: 2, node: v });
        }
        // Every ancestor at or above the cap weighs exactly the cap after
        // clamping; the highest of them sees the most labels, so it stands in
        // for the rest.
        let (u, cap_u) = clamp_to_cap(&self.t1, u, cap_u);
        let (v, cap_v) = clamp_to_cap(&self.t2, v, cap_v);
        let c1 = self.t1.climb(u);
        let c2 = self.t2.climb(v);
        let mut best: Option<HiaAnswer> = None;
        for (a, &(p, i)) in c1.iter().enumerate() {
            let wi = if a == 0 { cap_u } else { self.t1.weight_at(p, i) };
            for (b, &(q, j)) in c2.iter().enumerate() {
                let Some(ps) = self.pairs.get(&(p, q)) else { continue };
                let wj = if b == 0 { cap_v } else { self.t2.weight_at(q, j) };
                let found = ps.query(
                    i,
                    wi,
                    j,
                    wj,
                    |x| self.t1.weight_at(p, x),
                    |y| self.t2.weight_at(q, y),
                );
                if let Some((total, x, y, label)) = found {
                    if best.map_or(true, |bb| total > bb.total) {
                        best = Some(HiaAnswer {
                            u: self.t1.node_at(p, x),
                            v: self.t2.node_at(q, y),
                            total,
                            label,
                        });
                    }
                }
            }
        }
        Ok(best)
    }
}

fn clamp_to_cap(t: &HeavyPaths, mut v: usize, cap: u64) -> (usize, u64) {
    let cap = cap.min(t.weight[v]);
    while let Some(p) = t.parent[v] {
        if t.weight[p] >= cap {
            v = p;
        } else {
            break;
        }
    }
    (v, cap)
}
