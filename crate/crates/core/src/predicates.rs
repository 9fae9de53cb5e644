//! The haloed and avoidant predicates on finite spaces.
//!
//! Both quantify over every center `a` and every nonzero radius `r` of a
//! range set. Inside a closed ball `B(a, r)` of an ultrametric space, two
//! points are at distance exactly `r` iff they fall in different blocks of
//! the strict relation `d < r`, so the largest `r`-equidistant subset of the
//! ball has one point per block. [`is_haloed`] counts blocks;
//! [`is_avoidant`] searches subsets directly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spaces::{FiniteUltrametricSpace, RangeSet};

/// Distances replaced by their rank in a sorted value table, so the
/// exhaustive searches compare small integers.
pub(crate) struct LevelMatrix {
    values: Vec<Rational>,
    n: usize,
    levels: Vec<u32>,
}

impl LevelMatrix {
    pub(crate) fn new(space: &FiniteUltrametricSpace, range: &RangeSet) -> Self {
        let values = crate::spaces::distance_set(space).union(range).values().to_vec();
        let n = space.len();
        let mut levels = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let lv = values.binary_search(space.d(i, j)).expect("value table covers matrix");
                levels.push(lv as u32);
            }
        }
        LevelMatrix { values, n, levels }
    }

    pub(crate) fn level_of(&self, r: &Rational) -> u32 {
        self.values.binary_search(r).expect("radius in value table") as u32
    }

    pub(crate) fn value(&self, level: u32) -> &Rational {
        &self.values[level as usize]
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> u32 {
        self.levels[i * self.n + j]
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// Bitmask of `{ x : d(i, x) == level }`. Requires `n <= 64`.
    pub(crate) fn exact_mask(&self, i: usize, level: u32) -> u64 {
        (0..self.n)
            .filter(|&x| self.at(i, x) == level)
            .fold(0, |m, x| m | (1 << x))
    }

    pub(crate) fn ball_mask(&self, i: usize, level: u32) -> u64 {
        (0..self.n)
            .filter(|&x| self.at(i, x) <= level)
            .fold(0, |m, x| m | (1 << x))
    }
}

/// An `r`-equidistant subset of `B(center, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HaloWitness {
    pub center: String,
    pub radius: Rational,
    pub points: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HaloFailure {
    pub center: String,
    pub radius: Rational,
    /// Size of the largest `r`-equidistant subset of the ball.
    pub max_equidistant: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HaloedReport {
    pub holds: bool,
    /// One witness per `(center, radius)` when the predicate holds.
    pub witnesses: Vec<HaloWitness>,
    pub failure: Option<HaloFailure>,
}

fn check_arity(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("cardinality bound n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Block representatives of the strict relation `d < r` inside `B(a, r)`,
/// first member of each block in canonical order.
pub fn equidistant_representatives(
    space: &FiniteUltrametricSpace,
    center: usize,
    radius: &Rational,
) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    for x in space.ball_indices(center, radius) {
        if reps.iter().all(|&y| space.d(x, y) >= radius) {
            reps.push(x);
        }
    }
    reps
}

/// Whether every closed ball `B(a, r)`, `r` a nonzero element of `range`,
/// holds an `r`-equidistant subset with at least `n` points.
pub fn is_haloed(space: &FiniteUltrametricSpace, range: &RangeSet, n: usize) -> Result<HaloedReport> {
    check_arity(n)?;
    space.ensure_valid()?;
    let mut witnesses = Vec::new();
    for a in 0..space.len() {
        for r in range.nonzero() {
            let reps = equidistant_representatives(space, a, r);
            if reps.len() < n {
                return Ok(HaloedReport {
                    holds: false,
                    witnesses: Vec::new(),
                    failure: Some(HaloFailure {
                        center: space.label(a).to_string(),
                        radius: r.clone(),
                        max_equidistant: reps.len(),
                    }),
                });
            }
            witnesses.push(HaloWitness {
                center: space.label(a).to_string(),
                radius: r.clone(),
                points: reps.iter().map(|&i| space.label(i).to_string()).collect(),
            });
        }
    }
    Ok(HaloedReport {
        holds: true,
        witnesses,
        failure: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AvoidanceFailure {
    pub center: String,
    pub radius: Rational,
    /// A subset of the ball with fewer than `n` points that no point of the
    /// ball avoids at distance exactly `radius`.
    pub subset: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AvoidantReport {
    pub holds: bool,
    pub counterexample: Option<AvoidanceFailure>,
}

pub(crate) const MAX_EXHAUSTIVE_POINTS: usize = 64;

/// Whether for every ball `B(a, r)` and every `A ⊆ B(a, r)` with `|A| < n`
/// some `p ∈ B(a, r)` has `d(x, p) = r` for all `x ∈ A`.
///
/// Exhaustive over subsets. A subset whose candidate set is already empty
/// is reported without visiting its supersets.
pub fn is_avoidant(space: &FiniteUltrametricSpace, range: &RangeSet, n: usize) -> Result<AvoidantReport> {
    check_arity(n)?;
    space.ensure_valid()?;
    if space.len() > MAX_EXHAUSTIVE_POINTS {
        return Err(Error::TooLarge(format!(
            "{} points (limit {MAX_EXHAUSTIVE_POINTS})",
            space.len()
        )));
    }
    let levels = LevelMatrix::new(space, range);
    let mut seen = std::collections::HashSet::new();
    for a in 0..space.len() {
        for r in range.nonzero() {
            let lv = levels.level_of(r);
            let ball = levels.ball_mask(a, lv);
            // B(a, r) = B(q, r) for every q in it; each ball is searched once.
            if !seen.insert((lv, ball)) {
                continue;
            }
            let members: Vec<usize> = (0..levels.len()).filter(|&x| ball >> x & 1 == 1).collect();
            let exact: Vec<u64> = members.iter().map(|&x| levels.exact_mask(x, lv)).collect();
            let mut chosen = Vec::new();
            if let Some(subset) = find_unavoidable(&exact, &members, ball, 0, n - 1, &mut chosen) {
                return Ok(AvoidantReport {
                    holds: false,
                    counterexample: Some(AvoidanceFailure {
                        center: space.label(a).to_string(),
                        radius: r.clone(),
                        subset: subset.into_iter().map(|i| space.label(i).to_string()).collect(),
                    }),
                });
            }
        }
    }
    Ok(AvoidantReport {
        holds: true,
        counterexample: None,
    })
}

/// Depth-first over subsets of `members` (indices `>= start`) of size at
/// most `budget` beyond `chosen`. `candidates` is the set of ball points at
/// distance exactly `r` from everything chosen so far.
fn find_unavoidable(
    exact: &[u64],
    members: &[usize],
    candidates: u64,
    start: usize,
    budget: usize,
    chosen: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if candidates == 0 {
        return Some(chosen.clone());
    }
    if budget == 0 {
        return None;
    }
    for pos in start..members.len() {
        chosen.push(members[pos]);
        let found = find_unavoidable(
            exact,
            members,
            candidates & exact[pos],
            pos + 1,
            budget - 1,
            chosen,
        );
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}
