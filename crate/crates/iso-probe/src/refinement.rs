//! Color refinement with trace recording.
//!
//! The engine runs the classic worklist refinement: pop a cell, count every
//! vertex's neighbors in it, split the affected cells by those counts, push
//! the fragments (withholding one largest per split). All iteration orders
//! are functions of cell ids and sizes only, so the emitted token stream is
//! identical across isomorphic inputs.
//!
//! Three modes share that loop:
//!
//! - **Record** writes the token stream of a fresh walk,
//! - **CompareAgainst** additionally compares each token against a target
//!   trace and, on the first mismatch, keeps refining for `k` more worklist
//!   pops to accumulate a more distinctive deviation value before bailing
//!   out,
//! - **Blueprint** further skips popped cells that the target marked as
//!   non-splitting, splicing the target's tokens so traces stay aligned.

use crate::coloring::{Coloring, Fragment};
use crate::graph::Graph;
use crate::Error;

/// Rolling-hash seed; the hash of an empty trace.
pub const TRACE_SEED: u64 = 0xCBF2_9CE4_8422_2325;
const TRACE_PRIME: u64 = 0x0000_0100_0000_01B3;

/// One rolling-hash step.
#[inline]
pub(crate) fn fold(h: u64, v: u64) -> u64 {
    (h ^ v).wrapping_mul(TRACE_PRIME)
}

/// What a trace position holds: a worklist pop (flagged splitting when its
/// processing changed the coloring) or a per-affected-cell record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Pop { splitting: bool },
    Split,
}

/// The invariant token stream of one walk, with a rolling 64-bit hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    tokens: Vec<u64>,
    kinds: Vec<TokenKind>,
    hash: u64,
}

impl Default for Trace {
    fn default() -> Self {
        Trace::new()
    }
}

impl Trace {
    pub fn new() -> Trace {
        Trace {
            tokens: Vec::new(),
            kinds: Vec::new(),
            hash: TRACE_SEED,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[u64] {
        &self.tokens
    }

    pub fn kind(&self, i: usize) -> TokenKind {
        self.kinds[i]
    }

    /// The rolling hash of the whole token sequence.
    pub fn hash(&self) -> u64 {
        self.hash
    }

    fn push(&mut self, token: u64, kind: TokenKind) {
        self.tokens.push(token);
        self.kinds.push(kind);
        self.hash = fold(self.hash, token);
    }

    fn mark_splitting(&mut self, i: usize) {
        self.kinds[i] = TokenKind::Pop { splitting: true };
    }

    /// Recomputes the hash from scratch; always equals [`Trace::hash`].
    pub fn recompute_hash(&self) -> u64 {
        self.tokens.iter().fold(TRACE_SEED, |h, &t| fold(h, t))
    }
}

/// Where and how a trace first differed from the target: the token position
/// and a hash over the differing tokens (extended by `k` extra pops).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeviationValue {
    pub position: usize,
    pub value: u64,
}

/// Result of one refinement run. `Stable` means the worklist drained and the
/// coloring (mutated in place) is stable; `Deviated` means the run compared
/// against a target trace, mismatched, and stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementOutcome {
    Stable,
    Deviated(DeviationValue),
}

/// How a refinement run treats its trace.
#[derive(Debug, Clone, Copy)]
pub enum RefineMode<'t> {
    /// Record tokens only.
    Record,
    /// Record and compare against `target`; extend past the first mismatch
    /// for `k` more worklist pops.
    CompareAgainst { target: &'t Trace, k: u32 },
    /// As `CompareAgainst`, and skip cells the target marked non-splitting
    /// while no deviation has occurred.
    Blueprint { target: &'t Trace, k: u32 },
}

struct Dev {
    position: usize,
    value: u64,
    pops_left: u32,
}

struct Cmp<'t> {
    target: &'t Trace,
    k: u32,
    blueprint: bool,
    dev: Option<Dev>,
}

fn pop_token(cell: u32, len: u32) -> u64 {
    fold(fold(fold(TRACE_SEED, 1), cell as u64), len as u64)
}

fn split_token_base(cell: u32, fragments: u32) -> u64 {
    fold(fold(fold(TRACE_SEED, 2), cell as u64), fragments as u64)
}

fn emit(trace: &mut Trace, cmp: &mut Option<Cmp<'_>>, token: u64, kind: TokenKind) {
    if let Some(m) = cmp {
        match &mut m.dev {
            Some(d) => d.value = fold(d.value, token),
            None => {
                let pos = trace.len();
                let mismatch = pos >= m.target.len() || m.target.tokens()[pos] != token;
                if mismatch {
                    m.dev = Some(Dev {
                        position: pos,
                        value: fold(TRACE_SEED, token),
                        pops_left: m.k,
                    });
                }
            }
        }
    }
    trace.push(token, kind);
}

/// A refinement engine owning reusable scratch buffers, sized for graphs of
/// a fixed vertex count. Single-threaded; independent engines may run
/// concurrently on the same graph.
#[derive(Debug)]
pub struct Refiner {
    count: Vec<u32>,
    touched: Vec<u32>,
    cell_touched: Vec<bool>,
    worklist: Vec<u32>,
    in_worklist: Vec<bool>,
    members: Vec<(u32, u32)>,
    frags: Vec<Fragment>,
    ops: u64,
    skips: u64,
}

impl Refiner {
    pub fn new(n: usize) -> Refiner {
        Refiner {
            count: vec![0; n],
            touched: Vec::new(),
            cell_touched: vec![false; n],
            worklist: Vec::new(),
            in_worklist: vec![false; n],
            members: Vec::new(),
            frags: Vec::new(),
            ops: 0,
            skips: 0,
        }
    }

    /// Work units spent so far (adjacency arcs and member visits).
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// Worklist cells skipped via blueprints so far.
    pub fn skips(&self) -> u64 {
        self.skips
    }

    fn push_cell(&mut self, c: u32) {
        debug_assert!(!self.in_worklist[c as usize]);
        self.in_worklist[c as usize] = true;
        self.worklist.push(c);
    }

    fn pop_cell(&mut self) -> Option<u32> {
        let c = self.worklist.pop()?;
        self.in_worklist[c as usize] = false;
        Some(c)
    }

    fn drain_worklist(&mut self) {
        while self.pop_cell().is_some() {}
    }

    /// Refines `pi` to a stable coloring (or to an early deviation exit).
    ///
    /// Every vertex of `nu` must already be a singleton cell: callers
    /// individualize first. With `nu` empty (the root call) all cells of
    /// `pi` seed the worklist; otherwise each singleton of `nu` does,
    /// together with the remainder cell its individualization split off.
    pub fn refine(
        &mut self,
        g: &Graph,
        pi: &mut Coloring,
        nu: &[u32],
        trace: &mut Trace,
        mode: RefineMode<'_>,
    ) -> Result<RefinementOutcome, Error> {
        for &v in nu {
            if v as usize >= pi.n() {
                return Err(Error::Contract(format!("refine: vertex {v} out of range")));
            }
            if pi.cell_len(pi.cell_of(v)) != 1 {
                return Err(Error::Contract(format!(
                    "refine: vertex {v} of nu is not a singleton cell"
                )));
            }
        }
        let mut cmp = match mode {
            RefineMode::Record => None,
            RefineMode::CompareAgainst { target, k } => Some(Cmp {
                target,
                k,
                blueprint: false,
                dev: None,
            }),
            RefineMode::Blueprint { target, k } => Some(Cmp {
                target,
                k,
                blueprint: true,
                dev: None,
            }),
        };

        if pi.is_discrete() {
            for &v in nu {
                let c = pi.cell_of(v);
                emit(
                    trace,
                    &mut cmp,
                    pop_token(c, 1),
                    TokenKind::Pop { splitting: false },
                );
            }
            return Ok(Self::finish(cmp));
        }

        debug_assert!(self.worklist.is_empty());
        if nu.is_empty() {
            for c in pi.cell_ids() {
                self.push_cell(c);
            }
        } else {
            for &v in nu {
                let s = pi.cell_of(v);
                let rem = s + 1;
                if (rem as usize) < pi.n()
                    && pi.cell_of(pi.vertex_order()[rem as usize]) == rem
                    && !self.in_worklist[rem as usize]
                {
                    self.push_cell(rem);
                }
                if !self.in_worklist[s as usize] {
                    self.push_cell(s);
                }
            }
        }

        while let Some(c) = self.pop_cell() {
            let clen = pi.cell_len(c);
            let ptok = pop_token(c, clen);

            if let Some(m) = &cmp {
                let pos = trace.len();
                if m.blueprint
                    && m.dev.is_none()
                    && pos < m.target.len()
                    && m.target.kind(pos) == (TokenKind::Pop { splitting: false })
                    && m.target.tokens()[pos] == ptok
                {
                    // The target proved this cell idle; replay its tokens
                    // instead of doing the work.
                    trace.push(ptok, TokenKind::Pop { splitting: false });
                    let mut i = pos + 1;
                    while i < m.target.len() && m.target.kind(i) == TokenKind::Split {
                        trace.push(m.target.tokens()[i], TokenKind::Split);
                        i += 1;
                    }
                    self.skips += 1;
                    continue;
                }
            }

            let pop_idx = trace.len();
            emit(trace, &mut cmp, ptok, TokenKind::Pop { splitting: false });

            let any_split = self.process_cell(g, pi, c, clen, trace, &mut cmp);
            if any_split {
                trace.mark_splitting(pop_idx);
            }

            if let Some(m) = &mut cmp {
                if let Some(d) = &mut m.dev {
                    if d.pops_left == 0 {
                        self.drain_worklist();
                        return Ok(Self::finish(cmp));
                    }
                    d.pops_left -= 1;
                }
            }
        }
        Ok(Self::finish(cmp))
    }

    fn finish(cmp: Option<Cmp<'_>>) -> RefinementOutcome {
        match cmp.and_then(|m| m.dev) {
            Some(d) => RefinementOutcome::Deviated(DeviationValue {
                position: d.position,
                value: d.value,
            }),
            None => RefinementOutcome::Stable,
        }
    }

    fn process_cell(
        &mut self,
        g: &Graph,
        pi: &mut Coloring,
        c: u32,
        clen: u32,
        trace: &mut Trace,
        cmp: &mut Option<Cmp<'_>>,
    ) -> bool {
        let start = c as usize;
        for i in start..start + clen as usize {
            let u = pi.vertex_order()[i];
            for &w in g.neighbors(u) {
                self.ops += 1;
                if self.count[w as usize] == 0 {
                    let cw = pi.cell_of(w);
                    if !self.cell_touched[cw as usize] {
                        self.cell_touched[cw as usize] = true;
                        self.touched.push(cw);
                    }
                }
                self.count[w as usize] += 1;
            }
        }
        // Affected cells in ascending id order keeps token emission
        // isomorphism-invariant.
        self.touched.sort_unstable();

        let mut any_split = false;
        for ti in 0..self.touched.len() {
            let x = self.touched[ti];
            let xstart = x as usize;
            let xlen = pi.cell_len(x) as usize;

            self.members.clear();
            let mut min_count = u32::MAX;
            let mut max_count = 0u32;
            for i in xstart..xstart + xlen {
                let v = pi.vertex_order()[i];
                let cnt = self.count[v as usize];
                self.ops += 1;
                min_count = min_count.min(cnt);
                max_count = max_count.max(cnt);
                self.members.push((cnt, v));
            }

            if min_count == max_count {
                let tok = fold(fold(split_token_base(x, 1), xlen as u64), min_count as u64);
                emit(trace, cmp, tok, TokenKind::Split);
            } else {
                // Stable sort: fragments in ascending count order, previous
                // relative order preserved inside each fragment.
                self.members.sort_by_key(|&(cnt, _)| cnt);
                self.frags.clear();
                pi.apply_split(x, &self.members, &mut self.frags);
                any_split = true;

                let mut tok = split_token_base(x, self.frags.len() as u32);
                for f in &self.frags {
                    tok = fold(fold(tok, f.len as u64), f.count as u64);
                }
                emit(trace, cmp, tok, TokenKind::Split);

                if self.in_worklist[x as usize] {
                    // The old entry now denotes the first fragment; pushing
                    // the rest leaves every fragment pending, which is what
                    // replacing the split cell by its withheld part amounts
                    // to membership-wise.
                    for fi in 1..self.frags.len() {
                        let s = self.frags[fi].start;
                        self.push_cell(s);
                    }
                } else {
                    let mut withheld = 0usize;
                    let mut wlen = 0u32;
                    for (fi, f) in self.frags.iter().enumerate() {
                        if f.len > wlen {
                            wlen = f.len;
                            withheld = fi;
                        }
                    }
                    for fi in 0..self.frags.len() {
                        if fi != withheld {
                            let s = self.frags[fi].start;
                            self.push_cell(s);
                        }
                    }
                }
            }

            for i in xstart..xstart + xlen {
                self.count[pi.vertex_order()[i] as usize] = 0;
            }
            self.cell_touched[x as usize] = false;
        }
        self.touched.clear();
        any_split
    }
}
