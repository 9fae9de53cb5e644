//! One-point isometric extension into the model, embeddings built from it,
//! and the exhaustive one-point injectivity check for finite spaces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{avoidant_witness, delta, UrysohnPoint};
use crate::predicates::{LevelMatrix, MAX_EXHAUSTIVE_POINTS};
use crate::rational::Rational;
use crate::spaces::{FiniteUltrametricSpace, RangeSet, SpaceDocument};

/// A space `Y ∪ {θ}` together with an isometric image of `Y` in the model.
#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    base: FiniteUltrametricSpace,
    theta: usize,
    /// Images of the non-θ points, indexed like `base`.
    phi: Vec<Option<UrysohnPoint>>,
}

impl ExtensionProblem {
    pub fn new(
        base: FiniteUltrametricSpace,
        theta: &str,
        phi: BTreeMap<String, UrysohnPoint>,
    ) -> Result<Self> {
        base.ensure_valid()?;
        let theta = base.index_of(theta)?;
        let mut images = vec![None; base.len()];
        for (label, point) in phi {
            let i = base.index_of(&label)?;
            if i == theta {
                return Err(Error::Precondition("θ must not have an image".into()));
            }
            images[i] = Some(point);
        }
        if let Some(i) = (0..base.len()).find(|&i| i != theta && images[i].is_none()) {
            return Err(Error::Precondition(format!(
                "no image given for `{}`",
                base.label(i)
            )));
        }
        if base.len() < 2 {
            return Err(Error::Precondition("Y must be nonempty".into()));
        }
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                if let (Some(a), Some(b)) = (&images[i], &images[j]) {
                    if delta(a, b) != *base.d(i, j) {
                        return Err(Error::Precondition(format!(
                            "phi is not isometric on `{}`, `{}`",
                            base.label(i),
                            base.label(j)
                        )));
                    }
                }
            }
        }
        Ok(ExtensionProblem {
            base,
            theta,
            phi: images,
        })
    }

    pub fn base(&self) -> &FiniteUltrametricSpace {
        &self.base
    }

    pub fn theta(&self) -> &str {
        self.base.label(self.theta)
    }
}

/// Finds `t` with `delta(images[i], t) = targets[i]` for all `i`.
///
/// `r` is the smallest target, `q` its first attaining index, and `t` avoids
/// every image inside `B(images[q], r)`. Points outside that ball already sit
/// at the prescribed distance from anything in it. The result is re-checked
/// against every target before returning.
pub(crate) fn extend_from_images(images: &[&UrysohnPoint], targets: &[Rational]) -> Result<UrysohnPoint> {
    debug_assert_eq!(images.len(), targets.len());
    let (q, r) = targets
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::Precondition("Y must be nonempty".into()))?;
    let center = images[q];
    let avoid: Vec<UrysohnPoint> = images
        .iter()
        .filter(|p| delta(p, center) <= *r)
        .map(|p| (*p).clone())
        .collect();
    let t = avoidant_witness(center, r, &avoid)?;
    if let Some(i) = (0..images.len()).find(|&i| delta(images[i], &t) != targets[i]) {
        return Err(Error::Postcondition(format!(
            "extension {t} is at distance {} from image {i}, expected {}",
            delta(images[i], &t),
            targets[i]
        )));
    }
    Ok(t)
}

/// A model point realizing every prescribed distance `e(y, θ)`.
pub fn extend_one_point(problem: &ExtensionProblem) -> Result<UrysohnPoint> {
    let ys: Vec<usize> = (0..problem.base.len()).filter(|&i| i != problem.theta).collect();
    let images: Vec<&UrysohnPoint> = ys
        .iter()
        .map(|&i| problem.phi[i].as_ref().expect("checked in new"))
        .collect();
    let targets: Vec<Rational> = ys
        .iter()
        .map(|&i| problem.base.d(i, problem.theta).clone())
        .collect();
    extend_from_images(&images, &targets)
}

/// Labels paired with their images, in the space's label order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub entries: Vec<(String, UrysohnPoint)>,
}

impl Embedding {
    pub fn image(&self, label: &str) -> Option<&UrysohnPoint> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, p)| p)
    }

    pub fn points(&self) -> impl Iterator<Item = &UrysohnPoint> {
        self.entries.iter().map(|(_, p)| p)
    }
}

impl Serialize for Embedding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (label, point) in &self.entries {
            map.serialize_entry(label, point)?;
        }
        map.end()
    }
}

/// Isometric embedding by one-point extension in label order. The first
/// label goes to `basepoint` (the origin by default).
pub fn embed_space(space: &FiniteUltrametricSpace, basepoint: Option<&UrysohnPoint>) -> Result<Embedding> {
    space.ensure_valid()?;
    let mut images: Vec<UrysohnPoint> = Vec::with_capacity(space.len());
    images.push(basepoint.cloned().unwrap_or_default());
    for next in 1..space.len() {
        let prefix: Vec<&UrysohnPoint> = images.iter().collect();
        let targets: Vec<Rational> = (0..next).map(|i| space.d(i, next).clone()).collect();
        let t = extend_from_images(&prefix, &targets)?;
        images.push(t);
    }
    Ok(Embedding {
        entries: space.labels().iter().cloned().zip(images).collect(),
    })
}

/// A subset `Y` and one-point extension distances `e(y, θ)` that no point
/// of the space realizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityFailure {
    pub subset: Vec<String>,
    pub distances: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityReport {
    pub holds: bool,
    pub failure: Option<InjectivityFailure>,
}

/// One-point injectivity with cardinality bound `n`: for every `Y` with
/// `1 <= |Y| < n` and every `range`-valued ultrametric one-point extension of
/// `Y`, some point of the space realizes the prescribed distances.
///
/// Extension vectors are enumerated depth-first over the nonzero range
/// values; a partial vector that already breaks the strong triangle
/// inequality is cut off, so only feasible extensions are searched.
pub fn check_one_point_injectivity(
    space: &FiniteUltrametricSpace,
    range: &RangeSet,
    n: usize,
) -> Result<InjectivityReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("cardinality bound n must be at least 1".into()));
    }
    space.ensure_valid()?;
    if space.len() > MAX_EXHAUSTIVE_POINTS {
        return Err(Error::TooLarge(format!(
            "{} points (limit {MAX_EXHAUSTIVE_POINTS})",
            space.len()
        )));
    }
    let levels = LevelMatrix::new(space, range);
    let nonzero: Vec<u32> = range.nonzero().map(|r| levels.level_of(r)).collect();
    let max_size = (n - 1).min(space.len());
    let mut subset = Vec::new();
    for size in 1..=max_size {
        if let Some(fail) = subsets_of_size(&levels, &nonzero, size, 0, &mut subset) {
            let (ys, lv) = fail;
            return Ok(InjectivityReport {
                holds: false,
                failure: Some(InjectivityFailure {
                    subset: ys.iter().map(|&i| space.label(i).to_string()).collect(),
                    distances: lv.iter().map(|&l| levels.value(l).clone()).collect(),
                }),
            });
        }
    }
    Ok(InjectivityReport {
        holds: true,
        failure: None,
    })
}

type Failure = (Vec<usize>, Vec<u32>);

fn subsets_of_size(
    levels: &LevelMatrix,
    nonzero: &[u32],
    size: usize,
    start: usize,
    subset: &mut Vec<usize>,
) -> Option<Failure> {
    if subset.len() == size {
        let mut assignment = Vec::with_capacity(size);
        return assign(levels, nonzero, subset, &mut assignment);
    }
    for x in start..levels.len() {
        subset.push(x);
        let found = subsets_of_size(levels, nonzero, size, x + 1, subset);
        subset.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn assign(
    levels: &LevelMatrix,
    nonzero: &[u32],
    ys: &[usize],
    assignment: &mut Vec<u32>,
) -> Option<Failure> {
    let i = assignment.len();
    if i == ys.len() {
        let realized = (0..levels.len()).any(|t| ys.iter().zip(assignment.iter()).all(|(&y, &e)| levels.at(y, t) == e));
        return if realized {
            None
        } else {
            Some((ys.to_vec(), assignment.clone()))
        };
    }
    for &e in nonzero {
        let consistent = (0..i).all(|j| {
            let d = levels.at(ys[i], ys[j]);
            let f = assignment[j];
            d <= e.max(f) && e <= d.max(f) && f <= d.max(e)
        });
        if !consistent {
            continue;
        }
        assignment.push(e);
        let found = assign(levels, nonzero, ys, assignment);
        assignment.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// JSON interchange form of an [`ExtensionProblem`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDocument {
    pub space: SpaceDocument,
    pub theta: String,
    pub phi: BTreeMap<String, UrysohnPoint>,
}

impl TryFrom<ExtensionDocument> for ExtensionProblem {
    type Error = Error;
    fn try_from(doc: ExtensionDocument) -> Result<Self> {
        let base = FiniteUltrametricSpace::try_from(doc.space)?;
        ExtensionProblem::new(base, &doc.theta, doc.phi)
    }
}
