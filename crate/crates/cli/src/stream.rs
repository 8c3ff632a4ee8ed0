//! Update stream files.
//!
//! ```text
//! full            <- "partial" or "full"
//! abaab           <- initial T
//! baaba           <- initial S
//! S 3 a           <- "<S|T> <1-based position> <letter>", one per line
//! T 1 b
//! ```
//!
//! Letters are single printable, non-space characters. Blank lines are
//! ignored. `T` updates are rejected in partial mode, where `T` is static.

use std::fmt;

use dynlcs_core::Letter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Partial,
    Full,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Partial => "partial",
            Mode::Full => "full",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    S,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Update {
    /// 1-based line in the stream file, for diagnostics.
    pub line: usize,
    pub target: Target,
    pub pos: usize,
    pub letter: Letter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub mode: Mode,
    pub t: Vec<Letter>,
    pub s: Vec<Letter>,
    pub updates: Vec<Update>,
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Unsupported(String),
}

fn err(line: usize, msg: impl Into<String>) -> InputError {
    InputError::Parse { line, msg: msg.into() }
}

fn letter_of(c: char) -> Option<Letter> {
    (!c.is_whitespace() && !c.is_control()).then_some(c as Letter)
}

fn word(line: usize, text: &str, what: &str) -> Result<Vec<Letter>, InputError> {
    let text = text.trim_end_matches('\r');
    if text.is_empty() {
        return Err(err(line, format!("{what} must not be empty")));
    }
    text.chars()
        .map(|c| letter_of(c).ok_or_else(|| err(line, format!("{what} contains {c:?}; letters must be printable and non-space"))))
        .collect()
}

/// Renders a letter back as the character it was read from.
pub fn show(letter: Letter) -> char {
    char::from_u32(letter).unwrap_or(char::REPLACEMENT_CHARACTER)
}

pub fn parse(text: &str) -> Result<Stream, InputError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty stream: expected \"partial\" or \"full\""))?;
    let mode = match header.trim() {
        "partial" => Mode::Partial,
        "full" => Mode::Full,
        other => return Err(err(1, format!("expected \"partial\" or \"full\", found {other:?}"))),
    };
    let (_, t) = lines.next().ok_or_else(|| err(2, "missing initial T"))?;
    let t = word(2, t, "T")?;
    let (_, s) = lines.next().ok_or_else(|| err(3, "missing initial S"))?;
    let s = word(3, s, "S")?;

    let mut updates = Vec::new();
    for (line, raw) in lines {
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [target, pos, letter] = fields[..] else {
            return Err(err(line, format!("expected \"<S|T> <pos> <letter>\", found {raw:?}")));
        };
        let target = match target {
            "S" => Target::S,
            "T" if mode == Mode::Partial => return Err(err(line, "T is static in partial mode")),
            "T" => Target::T,
            other => return Err(err(line, format!("unknown target {other:?}; expected S or T"))),
        };
        let len = if target == Target::S { s.len() } else { t.len() };
        let pos: usize = pos.parse().map_err(|_| err(line, format!("position {pos:?} is not a number")))?;
        if pos == 0 || pos > len {
            return Err(err(line, format!("position {pos} outside 1..={len}")));
        }
        let mut chars = letter.chars();
        let letter = match (chars.next().and_then(letter_of), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(err(line, format!("expected a single letter, found {letter:?}"))),
        };
        updates.push(Update { line, target, pos, letter });
    }
    Ok(Stream { mode, t, s, updates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_stream() {
        let st = parse("full\nabaab\nbaaba\nS 3 b\n\nT 5 a\n").unwrap();
        assert_eq!(st.mode, Mode::Full);
        assert_eq!(st.t, "abaab".chars().map(|c| c as Letter).collect::<Vec<_>>());
        assert_eq!(st.updates.len(), 2);
        assert_eq!(st.updates[1], Update { line: 6, target: Target::T, pos: 5, letter: 'a' as Letter });
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let cases = [
            ("", 1),
            ("half\nab\nab\n", 1),
            ("full\n\nab\n", 2),
            ("full\nab\n", 3),
            ("full\nab\na b\n", 3),
            ("partial\nab\nab\nT 1 a\n", 4),
            ("full\nab\nab\nS 1 a\nS 3 a\n", 5),
            ("full\nab\nab\nS 0 a\n", 4),
            ("full\nab\nab\nS x a\n", 4),
            ("full\nab\nab\nS 1 ab\n", 4),
            ("full\nab\nab\nS 1\n", 4),
            ("full\nab\nab\nU 1 a\n", 4),
        ];
        for (text, want) in cases {
            match parse(text) {
                Err(InputError::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }
}
