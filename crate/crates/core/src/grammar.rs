//! A persistent collection of strings, each represented by a locally
//! consistent run-length grammar.
//!
//! Every string `W = W_0` is parsed bottom-up: at even levels maximal runs
//! `B^r` become power symbols, at odd levels adjacent pairs `BC` with `B` on the
//! left side and `C` on the right side of a seeded random bipartition become
//! concatenation symbols. Symbols are hash-consed by `(rule, level)` and the
//! bipartition only looks at a content signature, so the parse of a string is
//! a function of its content and the seed alone. This is what makes the
//! incremental operations checkable: their result must have the same root id as
//! parsing from scratch.
//!
//! Incremental operations work on the context-insensitive decomposition of the
//! reused fragments: the nodes of a fragment that are parsed the same way in
//! every context are kept as they are, and only a thin boundary of peeled
//! symbols is recompressed level by level.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::hash::{combine, mix64, new_map, FxHashMap};
use crate::Letter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Letter(Letter),
    Pair(SymbolId, SymbolId),
    Power(SymbolId, usize),
}

#[derive(Clone, Copy, Debug)]
struct SymInfo {
    rule: Rule,
    level: u32,
    len: usize,
    sig: u64,
}

/// Side of the bipartition used by pair compression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A string of the collection: its root symbol and length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Handle {
    pub root: SymbolId,
    pub len: usize,
}

/// A fragment `[start, start + len)` (0-based) of a string in the collection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Frag {
    pub handle: Handle,
    pub start: usize,
    pub len: usize,
}

impl Frag {
    pub fn whole(h: Handle) -> Self {
        Frag { handle: h, start: 0, len: h.len }
    }
}

/// Run-length encoded symbol sequence, left to right.
pub type PoweredSeq = Vec<(SymbolId, usize)>;

/// Context-insensitive decomposition `d_up · d_down` of a fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub up: PoweredSeq,
    pub down: PoweredSeq,
}

impl Decomposition {
    pub fn size(&self) -> usize {
        self.up.len() + self.down.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrammarError {
    EmptyString,
    PositionOutOfRange { pos: usize, len: usize },
    InvalidRange { a: usize, b: usize, len: usize },
}

impl fmt::Display for GrammarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarError::EmptyString => f.write_str("strings in the collection must be non-empty"),
            GrammarError::PositionOutOfRange { pos, len } => {
                write!(f, "position {pos} outside 1..={len}")
            }
            GrammarError::InvalidRange { a, b, len } => {
                write!(f, "range {a}..={b} invalid for length {len}")
            }
        }
    }
}

/// A piece of a string under construction.
#[derive(Clone, Debug)]
enum Piece {
    Letters(Vec<Letter>),
    Frag(Frag),
}

/// A reused fragment during splicing: the nodes of `root`'s tree covering
/// `[lo, hi)` at the current level.
#[derive(Clone, Copy, Debug)]
struct Core {
    root: SymbolId,
    lo: usize,
    hi: usize,
}

/// Per-level extent `[lo, hi)` of the nodes rebuilt by a substitution; nodes
/// outside the extent are shared with the tree before the edit.
pub type Regions = Vec<(usize, usize)>;

#[derive(Clone, Debug)]
pub struct Grammar {
    seed: u64,
    syms: Vec<SymInfo>,
    intern: FxHashMap<(Rule, u32), SymbolId>,
}

const TAG_LETTER: u64 = 0x6c65_7474_6572;
const TAG_PAIR: u64 = 0x7061_6972;
const TAG_POWER: u64 = 0x706f_7765_72;

impl Grammar {
    pub fn new(seed: u64) -> Self {
        Grammar { seed, syms: Vec::new(), intern: new_map() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of distinct symbols created so far.
    pub fn symbol_count(&self) -> usize {
        self.syms.len()
    }

    fn intern(&mut self, rule: Rule, level: u32) -> SymbolId {
        if let Some(&id) = self.intern.get(&(rule, level)) {
            return id;
        }
        let (len, sig) = match rule {
            Rule::Letter(c) => (1, mix64(TAG_LETTER ^ c as u64)),
            Rule::Pair(b, c) => {
                let (b, c) = (self.syms[b.idx()], self.syms[c.idx()]);
                (b.len + c.len, combine(combine(TAG_PAIR ^ level as u64, b.sig), c.sig))
            }
            Rule::Power(b, k) => {
                let b = self.syms[b.idx()];
                (b.len * k, combine(combine(TAG_POWER ^ level as u64, b.sig), k as u64))
            }
        };
        let id = SymbolId(self.syms.len() as u32);
        self.syms.push(SymInfo { rule, level, len, sig });
        self.intern.insert((rule, level), id);
        id
    }

    pub fn letter(&mut self, c: Letter) -> SymbolId {
        self.intern(Rule::Letter(c), 0)
    }

    pub fn rule(&self, s: SymbolId) -> Rule {
        self.syms[s.idx()].rule
    }

    /// Level at which the symbol's rule applies (0 for letters).
    pub fn level(&self, s: SymbolId) -> u32 {
        self.syms[s.idx()].level
    }

    pub fn sym_len(&self, s: SymbolId) -> usize {
        self.syms[s.idx()].len
    }

    /// Bipartition side of `s` when pairing at level `h`.
    pub fn side(&self, s: SymbolId, h: u32) -> Side {
        let z = mix64(self.seed ^ combine(h as u64, self.syms[s.idx()].sig));
        if z & 1 == 0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    fn degree_of_rule(&self, s: SymbolId) -> usize {
        match self.rule(s) {
            Rule::Letter(_) => 0,
            Rule::Pair(..) => 2,
            Rule::Power(_, k) => k,
        }
    }

    fn child(&self, s: SymbolId, i: usize) -> SymbolId {
        match self.rule(s) {
            Rule::Letter(_) => unreachable!("letters have no children"),
            Rule::Pair(b, c) => {
                if i == 0 {
                    b
                } else {
                    c
                }
            }
            Rule::Power(b, _) => b,
        }
    }

    /// Height of the parse tree of `h`.
    pub fn height(&self, h: Handle) -> u32 {
        self.level(h.root)
    }

    /// Node at `level` whose value contains `offset`, as `(label, start)`.
    pub fn locate(&self, root: SymbolId, level: u32, offset: usize) -> (SymbolId, usize) {
        let mut sym = root;
        let mut lvl = self.level(root);
        let mut start = 0;
        while lvl > level {
            let own = self.level(sym);
            if own < lvl {
                lvl = own.max(level);
                continue;
            }
            match self.rule(sym) {
                Rule::Letter(_) => unreachable!("letters live at level 0"),
                Rule::Pair(b, c) => {
                    let lb = self.sym_len(b);
                    if offset < start + lb {
                        sym = b;
                    } else {
                        start += lb;
                        sym = c;
                    }
                }
                Rule::Power(b, _) => {
                    let lb = self.sym_len(b);
                    start += (offset - start) / lb * lb;
                    sym = b;
                }
            }
            lvl -= 1;
        }
        (sym, start)
    }

    pub fn char_at(&self, h: Handle, offset: usize) -> Letter {
        match self.rule(self.locate(h.root, 0, offset).0) {
            Rule::Letter(c) => c,
            _ => unreachable!("level-0 nodes are letters"),
        }
    }

    /// Expands a handle back into its letters.
    pub fn gen(&self, h: Handle) -> Vec<Letter> {
        self.gen_frag(Frag::whole(h))
    }

    pub fn gen_frag(&self, f: Frag) -> Vec<Letter> {
        let mut out = Vec::with_capacity(f.len);
        let mut stack = self.frontier(f.handle.root, f.start);
        while out.len() < f.len {
            let (s, cnt) = stack.pop().expect("fragment inside the string");
            if cnt > 1 {
                stack.push((s, cnt - 1));
            }
            match self.rule(s) {
                Rule::Letter(c) => out.push(c),
                Rule::Pair(b, c) => {
                    stack.push((c, 1));
                    stack.push((b, 1));
                }
                Rule::Power(b, k) => stack.push((b, k)),
            }
        }
        out
    }

    // ---- construction -------------------------------------------------

    pub fn makestring(&mut self, w: &[Letter]) -> Result<Handle, GrammarError> {
        if w.is_empty() {
            return Err(GrammarError::EmptyString);
        }
        Ok(self.splice(vec![Piece::Letters(w.to_vec())], None).0)
    }

    /// Parses the content of `h` from scratch; used as the reference for the
    /// incremental operations.
    pub fn reparse(&mut self, h: Handle) -> Handle {
        let w = self.gen(h);
        self.makestring(&w).expect("handles are non-empty")
    }

    pub fn concat(&mut self, a: Handle, b: Handle) -> Handle {
        self.splice(vec![Piece::Frag(Frag::whole(a)), Piece::Frag(Frag::whole(b))], None).0
    }

    /// Splits after the first `i` letters.
    pub fn split(&mut self, h: Handle, i: usize) -> Result<(Handle, Handle), GrammarError> {
        if i == 0 || i >= h.len {
            return Err(GrammarError::PositionOutOfRange { pos: i, len: h.len });
        }
        let l = self.splice(vec![Piece::Frag(Frag { handle: h, start: 0, len: i })], None).0;
        let r = self.splice(vec![Piece::Frag(Frag { handle: h, start: i, len: h.len - i })], None).0;
        Ok((l, r))
    }

    /// Canonical handle for the content of a fragment.
    pub fn substring(&mut self, f: Frag) -> Result<Handle, GrammarError> {
        if f.len == 0 || f.start + f.len > f.handle.len {
            return Err(GrammarError::InvalidRange {
                a: f.start + 1,
                b: f.start + f.len,
                len: f.handle.len,
            });
        }
        if f.len == f.handle.len {
            return Ok(f.handle);
        }
        Ok(self.splice(vec![Piece::Frag(f)], None).0)
    }

    /// Replaces the letter at 1-based `pos`.
    pub fn substitute(&mut self, h: Handle, pos: usize, c: Letter) -> Result<Handle, GrammarError> {
        Ok(self.substitute_with_regions(h, pos, c)?.0)
    }

    /// Like [`Grammar::substitute`], also reporting for every level the extent
    /// of the nodes that differ from the tree of `h`.
    pub fn substitute_with_regions(
        &mut self,
        h: Handle,
        pos: usize,
        c: Letter,
    ) -> Result<(Handle, Regions), GrammarError> {
        if pos == 0 || pos > h.len {
            return Err(GrammarError::PositionOutOfRange { pos, len: h.len });
        }
        let mut pieces = Vec::with_capacity(3);
        if pos > 1 {
            pieces.push(Piece::Frag(Frag { handle: h, start: 0, len: pos - 1 }));
        }
        pieces.push(Piece::Letters(vec![c]));
        if pos < h.len {
            pieces.push(Piece::Frag(Frag { handle: h, start: pos, len: h.len - pos }));
        }
        let (out, regions) = self.splice(pieces, Some(pos - 1));
        Ok((out, regions.expect("regions requested")))
    }

    /// Peels the context-dependent boundary of a core at level `h`.
    fn peel(&self, core: &mut Core, h: u32) -> (Option<(SymbolId, usize)>, Option<(SymbolId, usize)>) {
        let top = self.level(core.root);
        let (mut up, mut down) = (None, None);
        if h % 2 == 0 {
            let (s, st) = self.locate(core.root, h, core.lo);
            let len = self.sym_len(s);
            let run_end = match self.run_parent(core.root, h, top, core.lo) {
                Some((pst, plen)) => pst + plen,
                None => st + len,
            };
            if run_end >= core.hi {
                up = Some((s, (core.hi - core.lo) / len));
                core.lo = core.hi;
                return (up, down);
            }
            up = Some((s, (run_end - core.lo) / len));
            core.lo = run_end;
            let (s2, st2) = self.locate(core.root, h, core.hi - 1);
            let len2 = self.sym_len(s2);
            let run_start = match self.run_parent(core.root, h, top, core.hi - 1) {
                Some((pst, _)) => pst,
                None => st2,
            };
            down = Some((s2, (core.hi - run_start) / len2));
            core.hi = run_start;
        } else {
            let (s, st) = self.locate(core.root, h, core.lo);
            if self.side(s, h) == Side::Right {
                up = Some((s, 1));
                core.lo = st + self.sym_len(s);
            }
            if core.lo == core.hi {
                return (up, down);
            }
            let (s2, st2) = self.locate(core.root, h, core.hi - 1);
            if self.side(s2, h) == Side::Left {
                down = Some((s2, 1));
                core.hi = st2;
            }
        }
        (up, down)
    }

    /// The power node at level `h + 1` above `offset`, if the level-`h` node
    /// there belongs to a run.
    fn run_parent(&self, root: SymbolId, h: u32, top: u32, offset: usize) -> Option<(usize, usize)> {
        if h >= top {
            return None;
        }
        let (p, pst) = self.locate(root, h + 1, offset);
        match self.rule(p) {
            Rule::Power(..) if self.level(p) == h + 1 => Some((pst, self.sym_len(p))),
            _ => None,
        }
    }

    /// Context-insensitive decomposition of the 1-based fragment `[a..b]`.
    pub fn decompose(&self, h: Handle, a: usize, b: usize) -> Result<Decomposition, GrammarError> {
        if a == 0 || a > b || b > h.len {
            return Err(GrammarError::InvalidRange { a, b, len: h.len });
        }
        Ok(self.decompose_frag(Frag { handle: h, start: a - 1, len: b + 1 - a }))
    }

    pub fn decompose_frag(&self, f: Frag) -> Decomposition {
        let mut core = Core { root: f.handle.root, lo: f.start, hi: f.start + f.len };
        let mut up = Vec::new();
        let mut down = Vec::new();
        let mut h = 0;
        while core.lo < core.hi {
            let (u, d) = self.peel(&mut core, h);
            up.extend(u);
            down.extend(d);
            h += 1;
        }
        down.reverse();
        Decomposition { up, down }
    }

    /// Builds the canonical parse of the concatenation of `pieces`.
    ///
    /// The level-`h` sequence of the result is kept as alternating windows
    /// (explicit run-length encoded symbols) and cores (node ranges of the
    /// reused trees). Each level peels the context-dependent ends of every core
    /// into the neighbouring windows and compresses the windows; the remaining
    /// core nodes are parsed identically in any context, so their parents are
    /// taken from the reused trees as they are.
    fn splice(&mut self, pieces: Vec<Piece>, edit: Option<usize>) -> (Handle, Option<Regions>) {
        let mut wins: Vec<PoweredSeq> = vec![Vec::new()];
        let mut cores: Vec<Core> = Vec::new();
        let mut total = 0;
        for p in pieces {
            match p {
                Piece::Letters(ls) => {
                    total += ls.len();
                    for c in ls {
                        let s = self.letter(c);
                        push_back(wins.last_mut().expect("window list is non-empty"), (s, 1));
                    }
                }
                Piece::Frag(f) if f.len > 0 => {
                    total += f.len;
                    cores.push(Core { root: f.handle.root, lo: f.start, hi: f.start + f.len });
                    wins.push(Vec::new());
                }
                Piece::Frag(_) => {}
            }
        }
        let mut regions = edit.map(|_| Vec::new());
        let mut h = 0u32;
        loop {
            if let (Some(regs), Some(e)) = (regions.as_mut(), edit) {
                regs.push(self.window_extent(&cores, &wins, total, e));
            }
            let mut i = 0;
            while i < cores.len() {
                let (u, d) = self.peel(&mut cores[i], h);
                if let Some(u) = u {
                    push_back(&mut wins[i], u);
                }
                if let Some(d) = d {
                    push_front(&mut wins[i + 1], d);
                }
                if cores[i].lo == cores[i].hi {
                    cores.remove(i);
                    let right = wins.remove(i + 1);
                    for e in right {
                        push_back(&mut wins[i], e);
                    }
                } else {
                    i += 1;
                }
            }
            if cores.is_empty() && wins.len() == 1 && wins[0].len() == 1 && wins[0][0].1 == 1 {
                let root = wins[0][0].0;
                debug_assert_eq!(self.sym_len(root), total);
                return (Handle { root, len: total }, regions);
            }
            for w in wins.iter_mut() {
                let taken = core::mem::take(w);
                *w = self.compress(taken, h);
            }
            h += 1;
        }
    }

    /// Extent of the window holding offset `e`; windows and cores tile the
    /// result left to right.
    fn window_extent(&self, cores: &[Core], wins: &[PoweredSeq], total: usize, e: usize) -> (usize, usize) {
        let mut at = 0;
        for (i, w) in wins.iter().enumerate() {
            let wl: usize = w.iter().map(|&(s, k)| self.sym_len(s) * k).sum();
            if e >= at && e < at + wl {
                return (at, at + wl);
            }
            at += wl;
            if let Some(c) = cores.get(i) {
                at += c.hi - c.lo;
            }
        }
        debug_assert_eq!(at, total);
        unreachable!("the edited letter always sits in a window")
    }

    fn compress(&mut self, w: PoweredSeq, h: u32) -> PoweredSeq {
        let mut out = Vec::with_capacity(w.len());
        if h % 2 == 0 {
            for (s, r) in w {
                let s = if r >= 2 { self.intern(Rule::Power(s, r), h + 1) } else { s };
                push_back(&mut out, (s, 1));
            }
        } else {
            let mut i = 0;
            while i < w.len() {
                debug_assert_eq!(w[i].1, 1, "no runs survive run compression");
                if i + 1 < w.len()
                    && self.side(w[i].0, h) == Side::Left
                    && self.side(w[i + 1].0, h) == Side::Right
                {
                    let s = self.intern(Rule::Pair(w[i].0, w[i + 1].0), h + 1);
                    push_back(&mut out, (s, 1));
                    i += 2;
                } else {
                    push_back(&mut out, w[i]);
                    i += 1;
                }
            }
        }
        out
    }

    // ---- comparison ---------------------------------------------------

    /// Stack of `(symbol, count)` whose expansion, read from the top, spells
    /// the suffix of `root` starting at `offset`.
    fn frontier(&self, root: SymbolId, offset: usize) -> Vec<(SymbolId, usize)> {
        let mut stack = Vec::with_capacity(64);
        let mut sym = root;
        let mut start = 0;
        loop {
            match self.rule(sym) {
                Rule::Letter(_) => {
                    stack.push((sym, 1));
                    return stack;
                }
                Rule::Pair(b, c) => {
                    let lb = self.sym_len(b);
                    if offset < start + lb {
                        stack.push((c, 1));
                        sym = b;
                    } else {
                        start += lb;
                        sym = c;
                    }
                }
                Rule::Power(b, k) => {
                    let lb = self.sym_len(b);
                    let j = (offset - start) / lb;
                    if j + 1 < k {
                        stack.push((b, k - j - 1));
                    }
                    start += j * lb;
                    sym = b;
                }
            }
        }
    }

    /// Longest common prefix of two fragments, by synchronized expansion:
    /// equal symbols are skipped whole, otherwise the longer one is expanded.
    pub fn lcp_frag(&self, a: Frag, b: Frag) -> usize {
        let cap = a.len.min(b.len);
        if cap == 0 {
            return 0;
        }
        let mut sa = self.frontier(a.handle.root, a.start);
        let mut sb = self.frontier(b.handle.root, b.start);
        let mut matched = 0;
        while matched < cap {
            let (Some(&(x, cx)), Some(&(y, cy))) = (sa.last(), sb.last()) else {
                break;
            };
            if x == y {
                let k = cx.min(cy);
                matched += k * self.sym_len(x);
                pop_n(&mut sa, k);
                pop_n(&mut sb, k);
                continue;
            }
            let (lx, ly) = (self.sym_len(x), self.sym_len(y));
            if lx == 1 && ly == 1 {
                break;
            }
            if lx >= ly {
                self.expand_top(&mut sa);
            }
            if ly >= lx {
                self.expand_top(&mut sb);
            }
        }
        matched.min(cap)
    }

    pub fn lcp(&self, a: Handle, b: Handle) -> usize {
        self.lcp_frag(Frag::whole(a), Frag::whole(b))
    }

    fn expand_top(&self, st: &mut Vec<(SymbolId, usize)>) {
        let (s, c) = st.pop().expect("non-empty stack");
        if c > 1 {
            st.push((s, c - 1));
        }
        match self.rule(s) {
            Rule::Letter(_) => unreachable!("letters are never expanded"),
            Rule::Pair(b, c) => {
                st.push((c, 1));
                st.push((b, 1));
            }
            Rule::Power(b, k) => st.push((b, k)),
        }
    }

    // ---- navigation ---------------------------------------------------

    pub fn root_ref(&self, h: Handle) -> NodeRef {
        NodeRef { root: h.root, len: h.len, level: self.level(h.root), start: 0, label: h.root }
    }

    /// Cursor on the level-`level` node containing `offset`.
    pub fn cursor(&self, h: Handle, level: u32, offset: usize) -> Option<Cursor> {
        if offset >= h.len || level > self.level(h.root) {
            return None;
        }
        let mut c = Cursor {
            frames: vec![Frame { sym: h.root, top: self.level(h.root), start: 0, idx: 0 }],
            level,
        };
        c.descend_to(self, offset);
        Some(c)
    }
}

fn push_back(w: &mut PoweredSeq, e: (SymbolId, usize)) {
    match w.last_mut() {
        Some(last) if last.0 == e.0 => last.1 += e.1,
        _ => w.push(e),
    }
}

fn push_front(w: &mut PoweredSeq, e: (SymbolId, usize)) {
    match w.first_mut() {
        Some(first) if first.0 == e.0 => first.1 += e.1,
        _ => w.insert(0, e),
    }
}

fn pop_n(st: &mut Vec<(SymbolId, usize)>, k: usize) {
    let top = st.last_mut().expect("non-empty stack");
    if top.1 == k {
        st.pop();
    } else {
        top.1 -= k;
    }
}

/// A node of an (implicit) parse tree, addressed by level and position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRef {
    root: SymbolId,
    len: usize,
    level: u32,
    start: usize,
    label: SymbolId,
}

impl NodeRef {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn label(&self) -> SymbolId {
        self.label
    }

    /// 0-based half-open span of the node's value.
    pub fn span(&self, g: &Grammar) -> (usize, usize) {
        (self.start, self.start + g.sym_len(self.label))
    }

    pub fn degree(&self, g: &Grammar) -> usize {
        if self.level == 0 {
            0
        } else if g.level(self.label) == self.level {
            g.degree_of_rule(self.label)
        } else {
            1
        }
    }

    fn at(&self, g: &Grammar, level: u32, offset: usize) -> NodeRef {
        let (label, start) = g.locate(self.root, level, offset);
        NodeRef { root: self.root, len: self.len, level, start, label }
    }

    pub fn parent(&self, g: &Grammar) -> Option<NodeRef> {
        (self.level < g.level(self.root)).then(|| self.at(g, self.level + 1, self.start))
    }

    /// `k`-th child (0-based).
    pub fn child(&self, g: &Grammar, k: usize) -> Option<NodeRef> {
        if k >= self.degree(g) {
            return None;
        }
        let offset = if g.level(self.label) == self.level {
            match g.rule(self.label) {
                Rule::Pair(b, _) => self.start + if k == 0 { 0 } else { g.sym_len(b) },
                Rule::Power(b, _) => self.start + k * g.sym_len(b),
                Rule::Letter(_) => unreachable!("letters have degree 0"),
            }
        } else {
            self.start
        };
        Some(self.at(g, self.level - 1, offset))
    }

    pub fn left(&self, g: &Grammar) -> Option<NodeRef> {
        (self.start > 0).then(|| self.at(g, self.level, self.start - 1))
    }

    pub fn right(&self, g: &Grammar) -> Option<NodeRef> {
        let end = self.start + g.sym_len(self.label);
        (end < self.len).then(|| self.at(g, self.level, end))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frame {
    sym: SymbolId,
    /// Highest level at which this symbol is the node on the path.
    top: u32,
    start: usize,
    /// Index among the children of the previous frame's symbol.
    idx: usize,
}

/// Root-to-node path supporting amortized constant-time moves to the left or
/// right neighbour at a fixed level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cursor {
    frames: Vec<Frame>,
    level: u32,
}

impl Cursor {
    fn last(&self) -> &Frame {
        self.frames.last().expect("cursor paths are non-empty")
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn label(&self) -> SymbolId {
        self.last().sym
    }

    pub fn start(&self) -> usize {
        self.last().start
    }

    pub fn end(&self, g: &Grammar) -> usize {
        self.start() + g.sym_len(self.label())
    }

    fn descend_to(&mut self, g: &Grammar, offset: usize) {
        loop {
            let f = *self.last();
            let own = g.level(f.sym);
            if own <= self.level {
                return;
            }
            let lb_first;
            let (idx, sym, start) = match g.rule(f.sym) {
                Rule::Letter(_) => unreachable!("letters live at level 0"),
                Rule::Pair(b, c) => {
                    lb_first = g.sym_len(b);
                    if offset < f.start + lb_first {
                        (0, b, f.start)
                    } else {
                        (1, c, f.start + lb_first)
                    }
                }
                Rule::Power(b, _) => {
                    let lb = g.sym_len(b);
                    let j = (offset - f.start) / lb;
                    (j, b, f.start + j * lb)
                }
            };
            self.frames.push(Frame { sym, top: own - 1, start, idx });
        }
    }

    fn descend_edge(&mut self, g: &Grammar, leftmost: bool) {
        loop {
            let f = *self.last();
            let own = g.level(f.sym);
            if own <= self.level {
                return;
            }
            let deg = g.degree_of_rule(f.sym);
            let idx = if leftmost { 0 } else { deg - 1 };
            let sym = g.child(f.sym, idx);
            let start = if leftmost { f.start } else { f.start + g.sym_len(f.sym) - g.sym_len(sym) };
            self.frames.push(Frame { sym, top: own - 1, start, idx });
        }
    }

    /// Moves to the right neighbour at the same level.
    pub fn next(&mut self, g: &Grammar) -> bool {
        let Some(k) = (1..self.frames.len())
            .rev()
            .find(|&k| self.frames[k].idx + 1 < g.degree_of_rule(self.frames[k - 1].sym))
        else {
            return false;
        };
        self.frames.truncate(k + 1);
        let parent = self.frames[k - 1].sym;
        let f = &mut self.frames[k];
        f.start += g.sym_len(f.sym);
        f.idx += 1;
        f.sym = g.child(parent, f.idx);
        self.descend_edge(g, true);
        true
    }

    /// Moves to the left neighbour at the same level.
    pub fn prev(&mut self, g: &Grammar) -> bool {
        let Some(k) = (1..self.frames.len()).rev().find(|&k| self.frames[k].idx > 0) else {
            return false;
        };
        self.frames.truncate(k + 1);
        let parent = self.frames[k - 1].sym;
        let f = &mut self.frames[k];
        f.idx -= 1;
        f.sym = g.child(parent, f.idx);
        f.start -= g.sym_len(f.sym);
        self.descend_edge(g, false);
        true
    }

    /// Moves to the parent (one level up).
    pub fn up(&mut self) -> bool {
        let f = *self.last();
        if f.top > self.level {
            self.level += 1;
            return true;
        }
        if self.frames.len() == 1 {
            return false;
        }
        self.frames.pop();
        self.level += 1;
        true
    }

    /// Index among the parent's children and the parent's degree; `None` at
    /// the root.
    pub fn position_in_parent(&self, g: &Grammar) -> Option<(usize, usize)> {
        let f = self.last();
        if f.top > self.level {
            return Some((0, 1));
        }
        let k = self.frames.len();
        if k == 1 {
            return None;
        }
        Some((f.idx, g.degree_of_rule(self.frames[k - 2].sym)))
    }

    /// Label of the parent node, `None` at the root.
    pub fn parent_label(&self) -> Option<SymbolId> {
        let f = self.last();
        if f.top > self.level {
            return Some(f.sym);
        }
        let k = self.frames.len();
        (k >= 2).then(|| self.frames[k - 2].sym)
    }

    pub fn degree(&self, g: &Grammar) -> usize {
        let s = self.label();
        if self.level == 0 {
            0
        } else if g.level(s) == self.level {
            g.degree_of_rule(s)
        } else {
            1
        }
    }

    /// Jumps to sibling `idx` under the same parent (no-op for unary parents).
    pub fn jump_sibling(&mut self, g: &Grammar, idx: usize) {
        let f = *self.last();
        if f.top > self.level || self.frames.len() == 1 || f.idx == idx {
            return;
        }
        let k = self.frames.len();
        let parent = self.frames[k - 2];
        let pstart = parent.start;
        let sym = g.child(parent.sym, idx);
        let start = match g.rule(parent.sym) {
            Rule::Pair(b, _) => pstart + if idx == 0 { 0 } else { g.sym_len(b) },
            Rule::Power(b, _) => pstart + idx * g.sym_len(b),
            Rule::Letter(_) => unreachable!("letters have no children"),
        };
        let last = self.frames.last_mut().expect("non-empty");
        *last = Frame { sym, top: f.top, start, idx };
    }
}
