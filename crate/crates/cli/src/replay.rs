//! Replaying a stream against an engine, with optional oracle checking.

use std::io::Write;

use dynlcs_core::oracle::{lcs_dp, LCS_DP_CAP};
use dynlcs_core::{full_lcs::Which, FullEngine, LcsAnswer, Letter, PartialLcs};
use serde::Serialize;

use crate::stream::{InputError, Mode, Stream, Target, Update};

pub enum Engine {
    Partial(PartialLcs),
    Full(FullEngine),
}

impl Engine {
    /// `seed` drives the grammar of the full engine; the partial engine is
    /// deterministic on its own.
    pub fn new(mode: Mode, s: &[Letter], t: &[Letter], seed: u64) -> Result<Self, InputError> {
        match mode {
            Mode::Partial => PartialLcs::with_string(t, s)
                .map(Engine::Partial)
                .map_err(|e| InputError::Unsupported(format!("cannot start the partial engine: {e:?}"))),
            Mode::Full => FullEngine::new(s, t, seed)
                .map(Engine::Full)
                .map_err(|e| InputError::Unsupported(format!("cannot start the full engine: {e}"))),
        }
    }

    pub fn current(&self) -> LcsAnswer {
        match self {
            Engine::Partial(e) => e.current_lcs(),
            Engine::Full(e) => e.current_lcs(),
        }
    }

    /// Applies an update that has already been bounds-checked.
    pub fn apply(&mut self, target: Target, pos: usize, letter: Letter) -> LcsAnswer {
        match (self, target) {
            (Engine::Partial(e), Target::S) => e.substitute(pos, letter).expect("checked update"),
            (Engine::Partial(_), Target::T) => unreachable!("partial streams never update T"),
            (Engine::Full(e), Target::S) => e.substitute(Which::S, pos, letter).expect("checked update"),
            (Engine::Full(e), Target::T) => e.substitute(Which::T, pos, letter).expect("checked update"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub oracle_check: bool,
    pub json: bool,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("output: {0}")]
    Output(std::io::Error),
    #[error("oracle mismatch at update {index}{}: engine reported {got}, expected length {want}", at_line(*.line))]
    Mismatch { index: usize, line: Option<usize>, got: String, want: usize },
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

#[derive(Serialize)]
struct JsonLine {
    index: usize,
    length: usize,
    s_pos: Option<usize>,
    t_pos: Option<usize>,
}

/// One output line, without the trailing newline.
pub fn format_line(index: usize, a: LcsAnswer, json: bool) -> String {
    if json {
        let row = JsonLine { index, length: a.length, s_pos: a.s_pos, t_pos: a.t_pos };
        return serde_json::to_string(&row).expect("plain struct serializes");
    }
    let pos = |p: Option<usize>| p.map_or_else(|| "-".to_string(), |p| p.to_string());
    format!("{index} {} {} {}", a.length, pos(a.s_pos), pos(a.t_pos))
}

fn check(index: usize, line: Option<usize>, a: LcsAnswer, s: &[Letter], t: &[Letter]) -> Result<(), RunError> {
    let want = lcs_dp(s, t).expect("sizes checked up front").0;
    if a.length != want || !a.validates(s, t) {
        return Err(RunError::Mismatch { index, line, got: format_line(index, a, false), want });
    }
    Ok(())
}

/// Writes the initial answer (index 0) and one line per update.
pub fn run(stream: &Stream, opts: Options, out: &mut impl Write) -> Result<(), RunError> {
    let (mut s, mut t) = (stream.s.clone(), stream.t.clone());
    if opts.oracle_check && s.len().max(t.len()) > LCS_DP_CAP {
        return Err(InputError::Unsupported(format!("--oracle-check supports strings of up to {LCS_DP_CAP} letters")).into());
    }
    let mut engine = Engine::new(stream.mode, &s, &t, opts.seed)?;
    let mut emit = |index: usize, a: LcsAnswer| writeln!(out, "{}", format_line(index, a, opts.json)).map_err(RunError::Output);

    let first = engine.current();
    emit(0, first)?;
    if opts.oracle_check {
        check(0, None, first, &s, &t)?;
    }
    for (i, &Update { line, target, pos, letter }) in stream.updates.iter().enumerate() {
        let a = engine.apply(target, pos, letter);
        emit(i + 1, a)?;
        if opts.oracle_check {
            match target {
                Target::S => s[pos - 1] = letter,
                Target::T => t[pos - 1] = letter,
            }
            check(i + 1, Some(line), a, &s, &t)?;
        }
    }
    Ok(())
}
