//! Hausdorff distance between finite subsets of the model.
//!
//! Two independent routes are provided: the directed sup-inf definition and
//! the smallest radius at which both sets meet exactly the same closed balls.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ball_key, delta, equidistant_family, BallKey, UrysohnPoint};
use crate::rational::Rational;

/// A nonempty finite set of model points, iterated in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSubset {
    points: BTreeSet<UrysohnPoint>,
}

impl FiniteSubset {
    pub fn new(points: impl IntoIterator<Item = UrysohnPoint>) -> Result<Self> {
        let points: BTreeSet<_> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::InvalidArgument("finite subset must be nonempty".into()));
        }
        Ok(FiniteSubset { points })
    }

    pub fn singleton(p: UrysohnPoint) -> Self {
        FiniteSubset {
            points: BTreeSet::from([p]),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &UrysohnPoint> {
        self.points.iter()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: subsets are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &UrysohnPoint) -> bool {
        self.points.contains(p)
    }

    pub fn first(&self) -> &UrysohnPoint {
        self.points.first().expect("nonempty")
    }

    pub fn diameter(&self) -> Rational {
        let mut best = Rational::zero();
        for a in &self.points {
            for b in &self.points {
                let d = delta(a, b);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// `min { delta(x, b) : b in self }`.
    pub fn distance_to(&self, x: &UrysohnPoint) -> Rational {
        self.points
            .iter()
            .map(|b| delta(x, b))
            .min()
            .expect("nonempty")
    }
}

impl Serialize for FiniteSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.points.iter())
    }
}

impl<'de> Deserialize<'de> for FiniteSubset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<UrysohnPoint>::deserialize(d)?;
        FiniteSubset::new(points).map_err(serde::de::Error::custom)
    }
}

/// Bounds defining the symmetric product: at most `max_card` points and
/// diameter at most `max_diam`. `None` means unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymmetricProductBound {
    max_card: Option<usize>,
    max_diam: Option<Rational>,
}

impl SymmetricProductBound {
    pub fn new(max_card: Option<usize>, max_diam: Option<Rational>) -> Result<Self> {
        if matches!(max_card, Some(m) if m < 2) {
            return Err(Error::InvalidArgument("cardinality bound must be at least 2".into()));
        }
        if matches!(&max_diam, Some(l) if !l.is_positive()) {
            return Err(Error::InvalidArgument("diameter bound must be positive".into()));
        }
        Ok(SymmetricProductBound { max_card, max_diam })
    }

    pub fn unbounded() -> Self {
        SymmetricProductBound::default()
    }

    pub fn max_card(&self) -> Option<usize> {
        self.max_card
    }

    pub fn max_diam(&self) -> Option<&Rational> {
        self.max_diam.as_ref()
    }
}

/// Whether `E` satisfies the cardinality and (inclusive) diameter bounds.
pub fn check_symmetric_product(e: &FiniteSubset, bound: &SymmetricProductBound) -> bool {
    bound.max_card.is_none_or(|m| e.len() <= m)
        && bound.max_diam.as_ref().is_none_or(|l| e.diameter() <= *l)
}

/// `max( sup_{a∈E} d(a, F), sup_{b∈F} d(b, E) )`.
pub fn hausdorff_supinf(e: &FiniteSubset, f: &FiniteSubset) -> Rational {
    let forward = e.iter().map(|a| f.distance_to(a)).max().expect("nonempty");
    let backward = f.iter().map(|b| e.distance_to(b)).max().expect("nonempty");
    forward.max(backward)
}

/// The set of closed balls of radius `r` centered in `E`.
pub fn ball_family(e: &FiniteSubset, r: &Rational) -> BTreeSet<BallKey> {
    e.iter().map(|a| ball_key(a, r)).collect()
}

/// Candidate radii for [`hausdorff_ballmin`]: 0 and every distance between
/// points of `E ∪ F`, ascending.
pub fn candidate_radii(e: &FiniteSubset, f: &FiniteSubset) -> Vec<Rational> {
    let all: Vec<&UrysohnPoint> = e.iter().chain(f.iter()).collect();
    let mut radii = BTreeSet::from([Rational::zero()]);
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            radii.insert(delta(a, b));
        }
    }
    radii.into_iter().collect()
}

/// The smallest candidate radius `r` at which `E` and `F` have the same
/// family of closed `r`-balls.
pub fn hausdorff_ballmin(e: &FiniteSubset, f: &FiniteSubset) -> Rational {
    candidate_radii(e, f)
        .into_iter()
        .find(|r| ball_family(e, r) == ball_family(f, r))
        .expect("the largest candidate radius covers both sets with one ball")
}

/// `n` subsets pairwise at Hausdorff distance exactly `r`, each within `r`
/// of `A` and each satisfying `bound`.
///
/// With `x` the first point of `A`, member `q` of the equidistant family at
/// `(x, r)` yields `(A \ B(x, r)) ∪ {q}`.
pub fn hyperspace_equidistant_family(
    a: &FiniteSubset,
    r: &Rational,
    n: usize,
    bound: &SymmetricProductBound,
) -> Result<Vec<FiniteSubset>> {
    if !check_symmetric_product(a, bound) {
        return Err(Error::Precondition(format!(
            "A has {} points and diameter {}, outside the declared bound",
            a.len(),
            a.diameter()
        )));
    }
    let x = a.first();
    let outside: Vec<&UrysohnPoint> = a.iter().filter(|p| delta(x, p) > *r).collect();
    equidistant_family(x, r, n)?
        .into_iter()
        .map(|q| FiniteSubset::new(outside.iter().map(|p| (*p).clone()).chain([q])))
        .collect()
}
