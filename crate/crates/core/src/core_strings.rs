//! Static indexing of the fixed string `T`.
//!
//! Both `T$` and `T^R#` get a suffix array, an LCP array with a sparse table
//! for longest-common-extension queries, and an explicit suffix tree built from
//! the two arrays. The trees carry binary-lifting tables for weighted-ancestor
//! lookups, which is how a fragment `T[i..j]` is mapped to its locus.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::Letter;

/// 1-based inclusive fragment bounds; `end == start - 1` encodes the empty
/// fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    /// Empty fragment positioned before `start`.
    pub fn empty_at(start: usize) -> Self {
        Span { start, end: start.wrapping_sub(1) }
    }

    pub fn len(&self) -> usize {
        (self.end + 1).saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexError {
    EmptyText,
    SpanOutOfBounds { start: usize, end: usize, text_len: usize },
}

impl fmt::Display for IndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexError::EmptyText => f.write_str("static text must not be empty"),
            IndexError::SpanOutOfBounds { start, end, text_len } => {
                write!(f, "span {start}..{end} outside text of length {text_len}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// A (possibly implicit) position in a suffix tree: the explicit node at or
/// directly below the position, and the position's string-depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Locus {
    pub node: NodeId,
    pub depth_cap: usize,
    pub is_implicit: bool,
}

#[derive(Clone, Debug)]
struct TreeNode {
    parent: Option<NodeId>,
    depth: usize,
    children: Vec<NodeId>,
    /// Suffix-array interval `[lo, hi]` of the leaves below.
    lo: usize,
    hi: usize,
    /// 0-based start of the suffix for leaves.
    suffix: Option<usize>,
}

/// Explicit suffix tree of a sentinel-terminated text.
#[derive(Clone, Debug)]
pub struct SuffixTree {
    nodes: Vec<TreeNode>,
    leaf_of_suffix: Vec<NodeId>,
    /// `lift[j][v]` is the `2^j`-th ancestor of `v` (root maps to itself).
    lift: Vec<Vec<NodeId>>,
}

impl SuffixTree {
    pub const ROOT: NodeId = NodeId(0);

    fn build(sa: &[usize], lcp: &[usize]) -> Self {
        let n = sa.len();
        let mut nodes = vec![TreeNode {
            parent: None,
            depth: 0,
            children: Vec::new(),
            lo: 0,
            hi: n.saturating_sub(1),
            suffix: None,
        }];
        let mut leaf_of_suffix = vec![NodeId(0); n];
        let mut stack: Vec<NodeId> = vec![NodeId(0)];
        for (k, &start) in sa.iter().enumerate() {
            let l = if k == 0 { 0 } else { lcp[k] };
            let mut last: Option<NodeId> = None;
            while nodes[stack[stack.len() - 1].idx()].depth > l {
                last = stack.pop();
            }
            let top = stack[stack.len() - 1];
            if nodes[top.idx()].depth < l {
                let x = NodeId(nodes.len() as u32);
                let last = last.expect("deeper node popped before creating a branch");
                nodes.push(TreeNode {
                    parent: Some(top),
                    depth: l,
                    children: vec![last],
                    lo: 0,
                    hi: 0,
                    suffix: None,
                });
                let ch = &mut nodes[top.idx()].children;
                let pos = ch.iter().rposition(|&c| c == last).expect("last is a child of top");
                ch[pos] = x;
                nodes[last.idx()].parent = Some(x);
                stack.push(x);
            }
            let top = stack[stack.len() - 1];
            let leaf = NodeId(nodes.len() as u32);
            nodes.push(TreeNode {
                parent: Some(top),
                depth: n - start,
                children: Vec::new(),
                lo: k,
                hi: k,
                suffix: Some(start),
            });
            nodes[top.idx()].children.push(leaf);
            leaf_of_suffix[start] = leaf;
            stack.push(leaf);
        }
        // Leaves were created in suffix-array order; children lists are in
        // creation order, so one post-order pass fixes the intervals.
        let mut order = Vec::with_capacity(nodes.len());
        let mut st = vec![NodeId(0)];
        while let Some(v) = st.pop() {
            order.push(v);
            st.extend(nodes[v.idx()].children.iter().copied());
        }
        for &v in order.iter().rev() {
            if nodes[v.idx()].suffix.is_none() {
                let ch = &nodes[v.idx()].children;
                let lo = ch.iter().map(|c| nodes[c.idx()].lo).min().unwrap_or(0);
                let hi = ch.iter().map(|c| nodes[c.idx()].hi).max().unwrap_or(0);
                nodes[v.idx()].lo = lo;
                nodes[v.idx()].hi = hi;
            }
        }
        let levels = usize::BITS as usize - nodes.len().leading_zeros() as usize;
        let mut lift = Vec::with_capacity(levels.max(1));
        lift.push(
            nodes.iter().map(|nd| nd.parent.unwrap_or(NodeId(0))).collect::<Vec<_>>(),
        );
        for j in 1..levels.max(1) {
            let prev = &lift[j - 1];
            let next = prev.iter().map(|&p| prev[p.idx()]).collect();
            lift.push(next);
        }
        SuffixTree { nodes, leaf_of_suffix, lift }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v.idx()].parent
    }

    /// String-depth of an explicit node.
    pub fn depth(&self, v: NodeId) -> usize {
        self.nodes[v.idx()].depth
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v.idx()].children
    }

    /// 0-based start of the suffix a leaf spells, `None` for internal nodes.
    pub fn leaf_suffix(&self, v: NodeId) -> Option<usize> {
        self.nodes[v.idx()].suffix
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_of_suffix.len()
    }

    pub fn leaf(&self, suffix: usize) -> NodeId {
        self.leaf_of_suffix[suffix]
    }

    /// Suffix-array interval of the leaves below `v`.
    pub fn interval(&self, v: NodeId) -> (usize, usize) {
        (self.nodes[v.idx()].lo, self.nodes[v.idx()].hi)
    }

    /// Highest ancestor of `v` (inclusive) with string-depth at least `depth`.
    pub fn weighted_ancestor(&self, v: NodeId, depth: usize) -> NodeId {
        debug_assert!(self.depth(v) >= depth);
        let mut v = v;
        for j in (0..self.lift.len()).rev() {
            let a = self.lift[j][v.idx()];
            if self.nodes[a.idx()].depth >= depth && a != v {
                v = a;
            }
        }
        // The root is its own ancestor in the table; climb one more step if
        // the table stopped short of it.
        while let Some(p) = self.parent(v) {
            if self.depth(p) >= depth {
                v = p;
            } else {
                break;
            }
        }
        v
    }
}

/// Index over one orientation of the text (`T$` or `T^R#`).
#[derive(Clone, Debug)]
pub struct OrientedIndex {
    /// Letters shifted up by one, followed by the sentinel 0.
    text: Vec<u64>,
    sa: Vec<usize>,
    rank: Vec<usize>,
    /// `lcp[k]` = LCP of suffixes `sa[k-1]` and `sa[k]`; `lcp[0] = 0`.
    lcp: Vec<usize>,
    sparse: Vec<Vec<usize>>,
    pub tree: SuffixTree,
}

impl OrientedIndex {
    fn build(letters: impl Iterator<Item = Letter>) -> Self {
        let mut text: Vec<u64> = letters.map(|c| c as u64 + 1).collect();
        text.push(0);
        let sa = suffix_array(&text);
        let n = text.len();
        let mut rank = vec![0; n];
        for (k, &s) in sa.iter().enumerate() {
            rank[s] = k;
        }
        let lcp = kasai(&text, &sa, &rank);
        let mut sparse = vec![lcp.clone()];
        let mut w = 1;
        while 2 * w <= n {
            let prev = &sparse[sparse.len() - 1];
            let next: Vec<usize> =
                (0..=n - 2 * w).map(|i| prev[i].min(prev[i + w])).collect();
            sparse.push(next);
            w *= 2;
        }
        let tree = SuffixTree::build(&sa, &lcp);
        OrientedIndex { text, sa, rank, lcp, sparse, tree }
    }

    /// Length of the text without the sentinel.
    pub fn text_len(&self) -> usize {
        self.text.len() - 1
    }

    pub fn suffix_array(&self) -> &[usize] {
        &self.sa
    }

    pub fn lcp_array(&self) -> &[usize] {
        &self.lcp
    }

    /// Longest common extension of the suffixes starting at 0-based `a`, `b`.
    pub fn lce(&self, a: usize, b: usize) -> usize {
        let n = self.text.len();
        if a == b {
            return n - a;
        }
        let (mut lo, mut hi) = (self.rank[a], self.rank[b]);
        if lo > hi {
            core::mem::swap(&mut lo, &mut hi);
        }
        let (l, r) = (lo + 1, hi);
        let k = (usize::BITS - 1 - (r - l + 1).leading_zeros()) as usize;
        self.sparse[k][l].min(self.sparse[k][r + 1 - (1 << k)])
    }

    fn check(&self, s: Span) -> Result<(), IndexError> {
        let n = self.text_len();
        let ok = s.start >= 1 && s.end + 1 >= s.start && s.end <= n;
        if ok {
            Ok(())
        } else {
            Err(IndexError::SpanOutOfBounds { start: s.start, end: s.end, text_len: n })
        }
    }

    /// Locus of a fragment of this orientation's text. The empty fragment maps
    /// to the root.
    pub fn locus(&self, frag: Span) -> Result<Locus, IndexError> {
        self.check(frag)?;
        let len = frag.len();
        if len == 0 {
            return Ok(Locus { node: SuffixTree::ROOT, depth_cap: 0, is_implicit: false });
        }
        let leaf = self.tree.leaf(frag.start - 1);
        let node = self.tree.weighted_ancestor(leaf, len);
        Ok(Locus { node, depth_cap: len, is_implicit: self.tree.depth(node) > len })
    }

    /// Longest prefix of `UV` occurring in the text, with one occurrence.
    pub fn extend_prefix(&self, u: Span, v: Span) -> Result<(usize, Span), IndexError> {
        self.check(u)?;
        self.check(v)?;
        let ul = u.len();
        let (lo, hi, witness) = if ul == 0 {
            (0, self.sa.len() - 1, self.sa[0])
        } else {
            let loc = self.locus(u)?;
            let (lo, hi) = self.tree.interval(loc.node);
            (lo, hi, u.start - 1)
        };
        let vl = v.len();
        if vl == 0 {
            return Ok((ul, Span::new(witness + 1, witness + ul)));
        }
        let vs = v.start - 1;
        // Compare the remainder of suffix sa[k] (after U) with V.
        let cmp = |k: usize| -> (usize, core::cmp::Ordering) {
            let a = self.sa[k] + ul;
            let l = self.lce(a, vs).min(vl);
            if l == vl {
                (l, core::cmp::Ordering::Equal)
            } else {
                (l, self.text[a + l].cmp(&self.text[vs + l]))
            }
        };
        // First k in [lo, hi] whose remainder is >= V.
        let (mut a, mut b) = (lo, hi + 1);
        while a < b {
            let mid = (a + b) / 2;
            let (l, ord) = cmp(mid);
            if l == vl {
                let s = self.sa[mid];
                return Ok((ul + vl, Span::new(s + 1, s + ul + vl)));
            }
            if ord == core::cmp::Ordering::Less {
                a = mid + 1;
            } else {
                b = mid;
            }
        }
        let mut best = (0usize, self.sa[lo.max(a.min(hi))]);
        for k in [a.wrapping_sub(1), a] {
            if k >= lo && k <= hi {
                let (l, _) = cmp(k);
                if l >= best.0 {
                    best = (l, self.sa[k]);
                }
            }
        }
        let total = ul + best.0;
        let s = if ul == 0 && best.0 == 0 { witness } else { best.1 };
        Ok((total, Span::new(s + 1, s + total)))
    }

    pub fn letter(&self, pos0: usize) -> u64 {
        self.text[pos0]
    }
}

/// Suffix trees and extension queries over `T$` and `T^R#`.
#[derive(Clone, Debug)]
pub struct StaticIndex {
    text: Vec<Letter>,
    pub fwd: OrientedIndex,
    pub rev: OrientedIndex,
}

impl StaticIndex {
    pub fn build(text: &[Letter]) -> Result<Self, IndexError> {
        if text.is_empty() {
            return Err(IndexError::EmptyText);
        }
        Ok(StaticIndex {
            text: text.to_vec(),
            fwd: OrientedIndex::build(text.iter().copied()),
            rev: OrientedIndex::build(text.iter().rev().copied()),
        })
    }

    pub fn text(&self) -> &[Letter] {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    fn side(&self, reversed: bool) -> &OrientedIndex {
        if reversed {
            &self.rev
        } else {
            &self.fwd
        }
    }

    /// Locus of a non-empty fragment; positions refer to `T^R` when `reversed`.
    pub fn locus(&self, frag: Span, reversed: bool) -> Result<Locus, IndexError> {
        if frag.is_empty() {
            return Err(IndexError::SpanOutOfBounds {
                start: frag.start,
                end: frag.end,
                text_len: self.len(),
            });
        }
        self.side(reversed).locus(frag)
    }

    /// Longest prefix of `UV` that occurs in `T` (in `T^R` when `reversed`),
    /// together with one occurrence of that prefix.
    pub fn extend_prefix(
        &self,
        u: Span,
        v: Span,
        reversed: bool,
    ) -> Result<(usize, Span), IndexError> {
        self.side(reversed).extend_prefix(u, v)
    }

    /// Maps a fragment of `T` to the fragment of `T^R` spelling its reverse.
    pub fn mirror(&self, s: Span) -> Span {
        let n = self.len();
        if s.is_empty() {
            return Span::empty_at(n + 2 - s.start);
        }
        Span::new(n + 1 - s.end, n + 1 - s.start)
    }

    /// 0-based position of some occurrence of `c` in `T`.
    pub fn find_letter(&self, c: Letter) -> Option<usize> {
        let key = c as u64 + 1;
        let sa = self.fwd.suffix_array();
        let k = sa.partition_point(|&s| self.fwd.letter(s) < key);
        (k < sa.len() && self.fwd.letter(sa[k]) == key).then(|| sa[k])
    }
}

/// Prefix-doubling suffix array, `O(n log^2 n)`.
fn suffix_array(text: &[u64]) -> Vec<usize> {
    let n = text.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<u64> = text.to_vec();
    let mut tmp = vec![0u64; n];
    let mut k = 1;
    loop {
        let key = |i: usize, rank: &[u64]| (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i, &rank));
        tmp[sa[0]] = 0;
        for w in 1..n {
            let bump = key(sa[w - 1], &rank) != key(sa[w], &rank);
            tmp[sa[w]] = tmp[sa[w - 1]] + bump as u64;
        }
        core::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

fn kasai(text: &[u64], sa: &[usize], rank: &[usize]) -> Vec<usize> {
    let n = text.len();
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && text[i + h] == text[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}
