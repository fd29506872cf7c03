//! Monochromatic subset extraction for tuple colorings.
//!
//! Finding a maximum monochromatic subset is hard, so the workhorse is the
//! constructive proof-following strategy: repeatedly take the least
//! candidate as a pivot, make the tuples through it one color (recursing on
//! arity), keep the majority class, and finally keep the pivots whose step
//! color occurs most often. Every tuple drawn from the result then shares
//! the color of its first element's step, so the result is homogeneous.
//! For pair colorings over at most 64 candidates an exact branch-and-bound
//! (maximum clique per color class) replaces the greedy pass.
//!
//! Everything is deterministic: ties break to the lexicographically least
//! color key, then to least elements.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A canonical truth pattern used as a color. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ColoringKey(pub Vec<bool>);

impl ColoringKey {
    pub fn single(b: bool) -> ColoringKey {
        ColoringKey(vec![b])
    }
}

/// Tuple coloring callback. Receives an increasing tuple of candidates.
pub type ColorFn<'a> = dyn FnMut(&[u64]) -> Result<ColoringKey> + 'a;

/// Returns the first `m` elements of a homogeneous subset of `candidates`
/// under the strategy, or an `InsufficientRamseyRoom` error carrying the
/// best set found.
///
/// `candidates` must be strictly increasing; `color` must be a function of
/// the tuple values alone.
pub fn ramsey_monochromatic(
    candidates: &[u64],
    arity: usize,
    color: &mut ColorFn,
    m: usize,
) -> Result<Vec<u64>> {
    let h = extract_homogeneous(candidates, arity, color)?;
    if h.len() < m {
        return Err(Error::InsufficientRamseyRoom { needed: m, best: h });
    }
    Ok(h[..m].to_vec())
}

/// Un-truncated extraction; the miners keep the whole set for room.
pub(crate) fn extract_homogeneous(
    candidates: &[u64],
    arity: usize,
    color: &mut ColorFn,
) -> Result<Vec<u64>> {
    debug_assert!(candidates.windows(2).all(|w| w[0] < w[1]));
    match arity {
        0 => Ok(candidates.to_vec()),
        1 => largest_class(candidates, color),
        2 if candidates.len() <= 64 => exact_pairs(candidates, color),
        _ => greedy(candidates.to_vec(), arity, color),
    }
}

/// Arity 1: the largest color class (prefix order preserved).
fn largest_class(candidates: &[u64], color: &mut ColorFn) -> Result<Vec<u64>> {
    let mut classes: BTreeMap<ColoringKey, Vec<u64>> = BTreeMap::new();
    for &c in candidates {
        classes.entry(color(&[c])?).or_default().push(c);
    }
    Ok(pick_majority(classes).map(|(_, v)| v).unwrap_or_default())
}

/// Largest class; ties go to the least key. `None` on empty input.
fn pick_majority(classes: BTreeMap<ColoringKey, Vec<u64>>) -> Option<(ColoringKey, Vec<u64>)> {
    let mut best: Option<(ColoringKey, Vec<u64>)> = None;
    for (k, v) in classes {
        match &best {
            Some((_, bv)) if v.len() <= bv.len() => {}
            _ => best = Some((k, v)),
        }
    }
    best
}

fn greedy(candidates: Vec<u64>, arity: usize, color: &mut ColorFn) -> Result<Vec<u64>> {
    debug_assert!(arity >= 2);
    let mut seq: Vec<(u64, ColoringKey)> = Vec::new();
    let mut current = candidates;
    while current.len() >= arity {
        let pivot = current[0];
        let rest = current[1..].to_vec();
        let (step_key, next) = if arity == 2 {
            let mut classes: BTreeMap<ColoringKey, Vec<u64>> = BTreeMap::new();
            for &x in &rest {
                classes.entry(color(&[pivot, x])?).or_default().push(x);
            }
            match pick_majority(classes) {
                Some(kv) => kv,
                None => break,
            }
        } else {
            // make all tuples through the pivot one color by homogenizing
            // the induced (arity - 1)-coloring of the rest
            let mut sub = |t: &[u64]| {
                let mut full = Vec::with_capacity(arity);
                full.push(pivot);
                full.extend_from_slice(t);
                color(&full)
            };
            let h = extract_homogeneous(&rest, arity - 1, &mut sub)?;
            if h.len() < arity - 1 {
                break;
            }
            let mut probe = Vec::with_capacity(arity);
            probe.push(pivot);
            probe.extend_from_slice(&h[..arity - 1]);
            (color(&probe)?, h)
        };
        seq.push((pivot, step_key));
        current = next;
    }

    // group pivots by step color; any tuple from one group is colored by
    // its first element's step
    let mut groups: BTreeMap<ColoringKey, Vec<u64>> = BTreeMap::new();
    for (p, k) in &seq {
        groups.entry(k.clone()).or_default().push(*p);
    }
    let mut out = pick_majority(groups).map(|(_, v)| v).unwrap_or_default();
    // the unconsumed tail never supplies a tuple's first element as long as
    // fewer than `arity` of its members join
    out.extend(current.into_iter().take(arity - 1));
    out.sort_unstable();
    Ok(out)
}

/// Exact mode for pair colorings over at most 64 candidates: maximum clique
/// within each color class.
fn exact_pairs(candidates: &[u64], color: &mut ColorFn) -> Result<Vec<u64>> {
    let n = candidates.len();
    if n < 2 {
        return Ok(candidates.to_vec());
    }
    let mut adjacency: BTreeMap<ColoringKey, Vec<u64>> = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let key = color(&[candidates[i], candidates[j]])?;
            let adj = adjacency.entry(key).or_insert_with(|| vec![0u64; n]);
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    let mut best_mask = 1u64; // a single vertex is always homogeneous
    let mut best_size = 1u32;
    for adj in adjacency.values() {
        let mut local = 0u64;
        let full: u64 = if n == 64 { !0 } else { (1 << n) - 1 };
        clique_expand(0, full, adj, &mut local);
        let size = local.count_ones();
        if size > best_size {
            best_size = size;
            best_mask = local;
        }
    }
    Ok((0..n).filter(|i| best_mask >> i & 1 == 1).map(|i| candidates[i]).collect())
}

fn clique_expand(taken: u64, mut avail: u64, adj: &[u64], best: &mut u64) {
    if avail == 0 {
        if taken.count_ones() > best.count_ones() {
            *best = taken;
        }
        return;
    }
    while avail != 0 {
        if taken.count_ones() + avail.count_ones() <= best.count_ones() {
            return;
        }
        let v = avail.trailing_zeros() as usize;
        avail &= !(1u64 << v);
        clique_expand(taken | 1 << v, avail & adj[v], adj, best);
    }
    if taken.count_ones() > best.count_ones() {
        *best = taken;
    }
}
