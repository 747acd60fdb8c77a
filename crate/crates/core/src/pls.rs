//! Partial line swaps between model rows and the reachability graph they
//! generate.
//!
//! Rows are cyclic: a swap acts on a cyclic segment of length 2..=f whose
//! row difference matches +-(p-1, ..., p-1) or +-(-1, p-1, ..., p-1, p)
//! read along the segment. Only the second family (and full-length constant
//! segments) preserves row residues; the others are still reported as moves
//! but fail the validity check, and the reachability search ignores them.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{enumerate_models, CharClass, Model, WeightTemplate};
use crate::params::GlobalParams;
use crate::rank1::Sign;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PlsPattern {
    /// sign * (p-1, ..., p-1) along the segment.
    PMinusOneRun,
    /// sign * (-1, p-1, ..., p-1, p) along the segment (no interior entries
    /// when the segment has length 2).
    MinusOneRunP,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PlsMove {
    pub row_a: usize,
    pub row_b: usize,
    /// First column of the cyclic segment.
    pub start: usize,
    /// Segment length, in [2, f].
    pub len: usize,
    /// Sign such that row_a - row_b = sign * pattern on the segment.
    pub sign: Sign,
    pub pattern: PlsPattern,
}

fn pattern_value(pattern: PlsPattern, k: usize, len: usize, p: i64) -> i64 {
    match pattern {
        PlsPattern::PMinusOneRun => p - 1,
        PlsPattern::MinusOneRunP => {
            if k == 0 {
                -1
            } else if k + 1 == len {
                p
            } else {
                p - 1
            }
        }
    }
}

fn segment_matches(
    params: &GlobalParams,
    model: &Model,
    mv: &PlsMove,
) -> bool {
    let f = model.f();
    let p = params.p();
    (0..mv.len).all(|k| {
        let pos = (mv.start + k) % f;
        let diff = model.entry(mv.row_a, pos) - model.entry(mv.row_b, pos);
        diff == mv.sign.factor() * pattern_value(mv.pattern, k, mv.len, p)
    })
}

/// All legal moves between pairs of rows of `model`. Full-length constant
/// segments are reported once (start 0); shorter constant segments are kept
/// per start since they cover different columns.
pub fn pls_moves(params: &GlobalParams, model: &Model) -> Vec<PlsMove> {
    let d = model.d();
    let f = model.f();
    let mut moves = Vec::new();
    if f < 2 {
        return moves;
    }
    for row_a in 0..d {
        for row_b in (row_a + 1)..d {
            for pattern in [PlsPattern::PMinusOneRun, PlsPattern::MinusOneRunP] {
                for len in 2..=f {
                    // a full-length constant segment covers every column, so
                    // its start is immaterial; keep only start 0 for it
                    let starts = if pattern == PlsPattern::PMinusOneRun && len == f {
                        0..1
                    } else {
                        0..f
                    };
                    for start in starts {
                        for sign in [Sign::Plus, Sign::Minus] {
                            let mv = PlsMove { row_a, row_b, start, len, sign, pattern };
                            if segment_matches(params, model, &mv) {
                                moves.push(mv);
                            }
                        }
                    }
                }
            }
        }
    }
    moves
}

/// Apply a move: exchange the segment entries of the two rows. Errors when
/// the move does not match the model.
pub fn pls_apply(params: &GlobalParams, model: &Model, mv: &PlsMove) -> Result<Model> {
    let f = model.f();
    if mv.row_a >= model.d() || mv.row_b >= model.d() || mv.row_a == mv.row_b {
        return Err(Error::InvalidMove("row indices out of range".into()));
    }
    if mv.len < 2 || mv.len > f || mv.start >= f {
        return Err(Error::InvalidMove(format!(
            "segment (start {}, len {}) does not fit f = {f}",
            mv.start, mv.len
        )));
    }
    // accept either orientation: swapping a matched segment negates its
    // sign, so re-applying a move undoes it
    let flipped = PlsMove {
        sign: match mv.sign {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        },
        ..*mv
    };
    if !segment_matches(params, model, mv) && !segment_matches(params, model, &flipped) {
        return Err(Error::InvalidMove(
            "segment difference does not match the declared pattern".into(),
        ));
    }
    let mut rows = model.rows.clone();
    for k in 0..mv.len {
        let pos = (mv.start + k) % f;
        let tmp = rows[mv.row_a][pos];
        rows[mv.row_a][pos] = rows[mv.row_b][pos];
        rows[mv.row_b][pos] = tmp;
    }
    Ok(Model { rows })
}

/// Apply and re-check modelhood against the bound characters: the result
/// keeps the template columns automatically, so validity is exactly the
/// per-row residue check.
pub fn pls_apply_checked(
    params: &GlobalParams,
    model: &Model,
    mv: &PlsMove,
    chars: &[CharClass],
) -> Result<(Model, bool)> {
    let out = pls_apply(params, model, mv)?;
    let valid = out
        .rows
        .iter()
        .zip(chars)
        .all(|(row, ch)| params.weighted_residue(row) == ch.e);
    Ok((out, valid))
}

/// Partition the models of (chars, template) into components connected by
/// validity-preserving moves. Components are sorted by smallest member and
/// internally sorted.
pub fn pls_reachability(
    params: &GlobalParams,
    chars: &[CharClass],
    template: &WeightTemplate,
) -> Result<Vec<Vec<Model>>> {
    let models = enumerate_models(params, chars, template)?;
    let index: BTreeMap<&Model, usize> =
        models.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut component = vec![usize::MAX; models.len()];
    let mut n_components = 0usize;
    for root in 0..models.len() {
        if component[root] != usize::MAX {
            continue;
        }
        let id = n_components;
        n_components += 1;
        component[root] = id;
        let mut queue = VecDeque::from([root]);
        while let Some(cur) = queue.pop_front() {
            for mv in pls_moves(params, &models[cur]) {
                let (next, valid) = pls_apply_checked(params, &models[cur], &mv, chars)?;
                if !valid {
                    continue;
                }
                let Some(&ni) = index.get(&next) else {
                    // cannot happen: columns and residues are preserved
                    return Err(Error::InvalidInput(
                        "valid move left the model set".into(),
                    ));
                };
                if component[ni] == usize::MAX {
                    component[ni] = id;
                    queue.push_back(ni);
                }
            }
        }
    }
    let mut out: Vec<Vec<Model>> = vec![Vec::new(); n_components];
    for (i, m) in models.into_iter().enumerate() {
        out[component[i]].push(m);
    }
    for c in out.iter_mut() {
        c.sort();
    }
    out.sort();
    Ok(out)
}
