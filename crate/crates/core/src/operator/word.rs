//! Normal form of words in `M` and `D` by literal rewriting.
//!
//! This is deliberately the slow route: every `DM` is replaced by `MD + I`
//! until no `DM` remains. It serves as a reference for [`ExpandedOp::compose`],
//! which uses a closed Leibniz formula instead.

use std::collections::BTreeMap;

use crate::operator::ExpandedOp;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    M,
    D,
}

/// Normal form of `c_1 w_1 + c_2 w_2 + ...` where each word is read left to right
/// as a composition.
pub fn normalize_words<S: Scalar>(words: &[(Vec<Letter>, S)]) -> ExpandedOp<S> {
    let mut pending: BTreeMap<Vec<Letter>, S> = BTreeMap::new();
    for (w, c) in words {
        accumulate(&mut pending, w.clone(), c.clone());
    }
    let mut out = ExpandedOp::zero();
    while let Some((w, c)) = pending.pop_first() {
        match w.windows(2).position(|p| p == [Letter::D, Letter::M]) {
            None => {
                let j = w.iter().filter(|&&l| l == Letter::M).count() as u32;
                let i = w.len() as u32 - j;
                out.add_term(i, j, c);
            }
            Some(p) => {
                let mut swapped = w.clone();
                swapped.swap(p, p + 1);
                let mut dropped = w.clone();
                dropped.drain(p..p + 2);
                accumulate(&mut pending, swapped, c.clone());
                accumulate(&mut pending, dropped, c);
            }
        }
    }
    out
}

/// Normal form of a single word.
pub fn normalize_word<S: Scalar>(word: &[Letter]) -> ExpandedOp<S> {
    normalize_words(&[(word.to_vec(), S::one())])
}

fn accumulate<S: Scalar>(map: &mut BTreeMap<Vec<Letter>, S>, w: Vec<Letter>, c: S) {
    let slot = map.entry(w.clone()).or_insert_with(S::zero);
    *slot = slot.clone() + c;
    if slot.is_zero() {
        map.remove(&w);
    }
}
