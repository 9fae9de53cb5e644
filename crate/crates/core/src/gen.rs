//! Seeded random generators for spaces, points and subsets.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::hyperspace::FiniteSubset;
use crate::model::UrysohnPoint;
use crate::rational::Rational;
use crate::spaces::{FiniteUltrametricSpace, RangeSet};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct positive rationals with small numerators and
/// denominators, ascending.
pub fn random_values(rng: &mut GenRng, count: usize) -> Vec<Rational> {
    let mut values = std::collections::BTreeSet::new();
    while values.len() < count {
        let num = rng.random_range(1..=12u64);
        let den = rng.random_range(1..=12u64);
        values.insert(Rational::new(num, den));
    }
    values.into_iter().collect()
}

/// A range set with `nonzero` positive values.
pub fn random_range_set(rng: &mut GenRng, nonzero: usize) -> RangeSet {
    RangeSet::from_values(random_values(rng, nonzero))
}

/// A random ultrametric on `n` points with distances from `values`
/// (positive, ascending), built as a random dendrogram: the point set is
/// split into at least two groups at some level, cross-group pairs get that
/// level's value, and groups recurse strictly below it.
pub fn random_ultrametric(rng: &mut GenRng, n: usize, values: &[Rational]) -> FiniteUltrametricSpace {
    assert!(n >= 1);
    assert!(n == 1 || !values.is_empty(), "need distance values");
    let mut dist = vec![vec![Rational::zero(); n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    split(rng, &order, values.len(), values, &mut dist);
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    FiniteUltrametricSpace::from_parts(labels, dist, None).expect("square matrix")
}

fn split(rng: &mut GenRng, points: &[usize], below: usize, values: &[Rational], dist: &mut [Vec<Rational>]) {
    if points.len() < 2 {
        return;
    }
    let level = rng.random_range(0..below);
    let groups = if level == 0 {
        points.len()
    } else {
        rng.random_range(2..=points.len())
    };
    let mut assignment: Vec<usize> = (0..points.len()).map(|i| i % groups).collect();
    assignment.shuffle(rng);
    let mut blocks = vec![Vec::new(); groups];
    for (p, g) in points.iter().zip(assignment) {
        blocks[g].push(*p);
    }
    for (gi, a) in blocks.iter().enumerate() {
        for b in &blocks[gi + 1..] {
            for &x in a {
                for &y in b {
                    dist[x][y] = values[level].clone();
                    dist[y][x] = values[level].clone();
                }
            }
        }
    }
    for block in &blocks {
        split(rng, block, level, values, dist);
    }
}

/// A random point with at most `max_support` coordinates from `coords` and
/// values in `1..=max_value`.
pub fn random_point(rng: &mut GenRng, coords: &[Rational], max_support: usize, max_value: u64) -> UrysohnPoint {
    let positive: Vec<&Rational> = coords.iter().filter(|c| c.is_positive()).collect();
    let size = rng.random_range(0..=max_support.min(positive.len()));
    let chosen: Vec<&Rational> = positive.choose_multiple(rng, size).copied().collect();
    chosen.into_iter().fold(UrysohnPoint::origin(), |p, c| {
        p.with(c.clone(), rng.random_range(1..=max_value))
    })
}

/// A random nonempty subset of at most `max_points` random points.
pub fn random_subset(rng: &mut GenRng, coords: &[Rational], max_points: usize, max_support: usize, max_value: u64) -> FiniteSubset {
    let count = rng.random_range(1..=max_points);
    FiniteSubset::new((0..count).map(|_| random_point(rng, coords, max_support, max_value)))
        .expect("nonempty")
}

/// A random symmetric matrix with zero diagonal and entries from `values`;
/// usually not an ultrametric.
pub fn random_matrix_space(rng: &mut GenRng, n: usize, values: &[Rational]) -> FiniteUltrametricSpace {
    let mut dist = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = values[rng.random_range(0..values.len())].clone();
            dist[i][j] = v.clone();
            dist[j][i] = v;
        }
    }
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    FiniteUltrametricSpace::from_parts(labels, dist, None).expect("square matrix")
}
