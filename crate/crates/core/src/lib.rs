//! Longest common substring of two strings under single-letter substitutions.
//!
//! Two engines are provided:
//!
//! * [`partial_lcs::PartialLcs`] keeps one string static and maintains a maximal
//!   block decomposition of the other, answering each update with a constant
//!   number of heaviest-induced-ancestor queries over the suffix trees of the
//!   static string.
//! * [`full_lcs::FullEngine`] lets both strings change. It parses both strings
//!   with a locally consistent grammar, anchors every common substring at a pair
//!   of parse-tree layers, and keeps the best red/blue pair of layers in a
//!   dynamic bicolored-trees structure backed by augmented 2D range trees.
//!
//! The crate is `no_std` and only needs `alloc`. Brute-force references used by
//! the test suites live in [`oracle`].

#![no_std]

extern crate alloc;

pub mod anchors;
pub mod bicolored;
pub mod core_strings;
pub mod full_lcs;
pub mod geom;
pub mod grammar;
pub mod hia;
pub mod oracle;
pub mod pair_families;
pub mod partial_lcs;

mod hash;

pub use full_lcs::FullEngine;
pub use partial_lcs::PartialLcs;

/// A letter of the input alphabet.
pub type Letter = u32;

/// Answer reported after every update: the LCS length and 1-based start
/// positions of one occurrence in `S` and in `T` (absent when the length is 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct LcsAnswer {
    pub length: usize,
    pub s_pos: Option<usize>,
    pub t_pos: Option<usize>,
}

impl LcsAnswer {
    pub const EMPTY: LcsAnswer = LcsAnswer { length: 0, s_pos: None, t_pos: None };

    pub fn new(length: usize, s_pos: usize, t_pos: usize) -> Self {
        if length == 0 {
            Self::EMPTY
        } else {
            LcsAnswer { length, s_pos: Some(s_pos), t_pos: Some(t_pos) }
        }
    }

    /// Checks that the reported positions spell the same fragment of the
    /// reported length in both strings.
    pub fn validates(&self, s: &[Letter], t: &[Letter]) -> bool {
        match (self.length, self.s_pos, self.t_pos) {
            (0, None, None) => true,
            (len, Some(i), Some(j)) if len > 0 && i >= 1 && j >= 1 => {
                let (i, j) = (i - 1, j - 1);
                i + len <= s.len() && j + len <= t.len() && s[i..i + len] == t[j..j + len]
            }
            _ => false,
        }
    }
}
