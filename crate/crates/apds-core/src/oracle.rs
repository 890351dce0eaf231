//! Brute-force provers used as independent test oracles.
//!
//! `search` is sound but incomplete for general systems: elim rules
//! lengthen premise words going up, so both the proof height and the word
//! length must be capped. Its "absent" answer is therefore only ever used
//! in the consistent direction. `kleene` is exact on systems whose rules
//! never lengthen words upward (multi-automata and negated-automaton
//! fragments).

use std::collections::{BTreeSet, HashMap};

use crate::atom::Atom;
use crate::complement::one_step;
use crate::proof::ProofTree;
use crate::system::System;

/// Iterative-deepening exhaustive proof search: a proof of height ≤
/// `depth` in which every node's word has length ≤ `word_bound`, if one
/// exists within the bounds. Failures are memoized per remaining height.
pub fn search(s: &System, atom: &Atom, depth: usize, word_bound: usize) -> Option<ProofTree> {
    if atom.is_open() || atom.word().len() > word_bound {
        return None;
    }
    let mut failed: HashMap<Atom, usize> = HashMap::new();
    (1..=depth).find_map(|h| dfs(s, atom, h, word_bound, &mut failed))
}

fn dfs(
    s: &System,
    atom: &Atom,
    height: usize,
    word_bound: usize,
    failed: &mut HashMap<Atom, usize>,
) -> Option<ProofTree> {
    if height == 0 {
        return None;
    }
    if failed.get(atom).is_some_and(|&h| h >= height) {
        return None;
    }
    'rules: for (r, binding) in s.rules_concluding(atom) {
        let mut children = Vec::with_capacity(r.premises().len());
        for premise in r.premises() {
            let instance = premise.bind(&binding);
            if instance.word().len() > word_bound {
                continue 'rules;
            }
            match dfs(s, &instance, height - 1, word_bound, failed) {
                Some(sub) => children.push(sub),
                None => continue 'rules,
            }
        }
        return Some(ProofTree::node(atom.clone(), r.id(), children));
    }
    let entry = failed.entry(atom.clone()).or_insert(0);
    *entry = (*entry).max(height);
    None
}

/// The least fixed point of the one-step operator, truncated to words of
/// length ≤ `word_bound`. Exact on word-non-lengthening systems.
pub fn kleene(s: &System, word_bound: usize) -> BTreeSet<Atom> {
    let mut x = BTreeSet::new();
    loop {
        let step = one_step(s, &x, word_bound);
        let before = x.len();
        x.extend(step);
        if x.len() == before {
            return x;
        }
    }
}
