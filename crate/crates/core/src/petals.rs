//! Seed inheritances, heir trees and the petal pieces of the model.
//!
//! Fix the origin (the empty map). An inheritance is a chain of seed steps
//! `v_{i+1} = seed_point(v_i, r_i, k_i)` from the origin with strictly
//! decreasing radii; its endpoint is an heir. The `S`-piece of the model is
//! realized as the maps whose support lies in `S \ {0}`.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperspace::FiniteSubset;
use crate::injectivity::embed_space;
use crate::model::{delta, equidistant_family, seed_point, UrysohnPoint};
use crate::rational::Rational;
use crate::spaces::{FiniteUltrametricSpace, RangeSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inheritance {
    pub points: Vec<UrysohnPoint>,
    pub radii: Vec<Rational>,
}

impl Inheritance {
    /// The length-0 inheritance of the origin.
    pub fn origin() -> Self {
        Inheritance {
            points: vec![UrysohnPoint::origin()],
            radii: Vec::new(),
        }
    }

    /// Appends a seed step without validating it.
    pub fn step(&self, r: &Rational, k: u64) -> Result<Inheritance> {
        let last = self.endpoint();
        let next = seed_point(last, r, k)?;
        let mut out = self.clone();
        out.points.push(next);
        out.radii.push(r.clone());
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn endpoint(&self) -> &UrysohnPoint {
        self.points.last().expect("an inheritance has at least one point")
    }

    pub fn last_radius(&self) -> Option<&Rational> {
        self.radii.last()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum InheritanceViolation {
    /// Point and radius sequence lengths disagree.
    Shape { points: usize, radii: usize },
    /// The chain does not start at the origin.
    NotFromOrigin,
    /// Step `index` is not a seed step of radius `radii[index]`.
    NotSeedStep { index: usize },
    /// Step `index` does not move.
    Stationary { index: usize },
    /// `radii[index + 1] >= radii[index]`.
    NotDecreasing { index: usize },
    RadiusOutsideRange { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct InheritanceReport {
    pub violations: Vec<InheritanceViolation>,
}

impl InheritanceReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_seed_step(from: &UrysohnPoint, to: &UrysohnPoint, r: &Rational) -> bool {
    r.is_positive() && from.restrict_above(r) == to.restrict_above(r) && to.support().all(|c| c >= r)
}

/// Checks the five inheritance conditions, with every radius drawn from `s`.
pub fn validate_inheritance(inh: &Inheritance, s: &RangeSet) -> InheritanceReport {
    let mut violations = Vec::new();
    if inh.points.len() != inh.radii.len() + 1 {
        violations.push(InheritanceViolation::Shape {
            points: inh.points.len(),
            radii: inh.radii.len(),
        });
        return InheritanceReport { violations };
    }
    if !inh.points[0].is_origin() {
        violations.push(InheritanceViolation::NotFromOrigin);
    }
    for (i, r) in inh.radii.iter().enumerate() {
        if !s.contains(r) || r.is_zero() {
            violations.push(InheritanceViolation::RadiusOutsideRange { index: i });
        }
        if !is_seed_step(&inh.points[i], &inh.points[i + 1], r) {
            violations.push(InheritanceViolation::NotSeedStep { index: i });
        }
        if inh.points[i] == inh.points[i + 1] {
            violations.push(InheritanceViolation::Stationary { index: i });
        }
    }
    for (i, w) in inh.radii.windows(2).enumerate() {
        if w[1] >= w[0] {
            violations.push(InheritanceViolation::NotDecreasing { index: i });
        }
    }
    InheritanceReport { violations }
}

/// Distance between two heirs read off their inheritances alone.
///
/// With `k` the last index where the point sequences agree: if they diverge
/// at `k + 1`, the distance is the larger of the two radii at `k`; if one
/// chain is a prefix of the other, it is the longer chain's radius at `k`.
pub fn heir_distance(a: &Inheritance, b: &Inheritance) -> Result<Rational> {
    for inh in [a, b] {
        let own = RangeSet::from_values(inh.radii.iter().cloned());
        let report = validate_inheritance(inh, &own);
        if let Some(v) = report.violations.first() {
            return Err(Error::Precondition(format!("invalid inheritance: {v:?}")));
        }
    }
    let common = a
        .points
        .iter()
        .zip(&b.points)
        .take_while(|(v, w)| v == w)
        .count();
    let k = common - 1;
    Ok(match (a.points.len() == common, b.points.len() == common) {
        (true, true) => Rational::zero(),
        (true, false) => b.radii[k].clone(),
        (false, true) => a.radii[k].clone(),
        (false, false) => a.radii[k].clone().max(b.radii[k].clone()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeirNode {
    pub inheritance: Inheritance,
    pub parent: Option<usize>,
    pub seed_index: Option<u64>,
}

impl HeirNode {
    pub fn point(&self) -> &UrysohnPoint {
        self.inheritance.endpoint()
    }

    pub fn step_radius(&self) -> Option<&Rational> {
        self.inheritance.last_radius()
    }
}

/// Heirs of the origin up to a depth and per-radius branching bound, in
/// breadth-first order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeirTree {
    pub range: RangeSet,
    pub depth: usize,
    pub branching: usize,
    pub nodes: Vec<HeirNode>,
}

/// Enumerates heirs: each node gets, for every radius of `s` below its last
/// radius (all nonzero radii at the root), the first `branching` seed
/// indices whose step actually moves.
pub fn generate_heirs(s: &RangeSet, depth: usize, branching: usize) -> Result<HeirTree> {
    if branching == 0 {
        return Err(Error::InvalidArgument("branching must be at least 1".into()));
    }
    let mut nodes = vec![HeirNode {
        inheritance: Inheritance::origin(),
        parent: None,
        seed_index: None,
    }];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &id in &frontier {
            let parent = nodes[id].inheritance.clone();
            let radii: Vec<&Rational> = s
                .nonzero()
                .rev()
                .filter(|r| parent.last_radius().is_none_or(|last| *r < last))
                .collect();
            for r in radii {
                let mut added = 0;
                let mut k = 0u64;
                while added < branching {
                    let child = parent.step(r, k)?;
                    if child.endpoint() != parent.endpoint() {
                        next.push(nodes.len());
                        nodes.push(HeirNode {
                            inheritance: child,
                            parent: Some(id),
                            seed_index: Some(k),
                        });
                        added += 1;
                    }
                    k += 1;
                }
            }
        }
        frontier = next;
    }
    Ok(HeirTree {
        range: s.clone(),
        depth,
        branching,
        nodes,
    })
}

#[derive(Serialize)]
struct NodeExport<'a> {
    point: &'a UrysohnPoint,
    parent: Option<usize>,
    radius: Option<&'a Rational>,
    seed_index: Option<u64>,
}

impl Serialize for HeirTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let nodes: Vec<NodeExport<'_>> = self
            .nodes
            .iter()
            .map(|n| NodeExport {
                point: n.point(),
                parent: n.parent,
                radius: n.step_radius(),
                seed_index: n.seed_index,
            })
            .collect();
        let mut st = s.serialize_struct("HeirTree", 4)?;
        st.serialize_field("range", &self.range)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("branching", &self.branching)?;
        st.serialize_field("nodes", &nodes)?;
        st.end()
    }
}

/// Whether `x` lies in the `S`-piece, i.e. its support is inside `S`.
pub fn in_piece(x: &UrysohnPoint, s: &RangeSet) -> bool {
    x.support().all(|c| s.contains(c))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PetalProjection {
    pub distance: Rational,
    pub nearest: UrysohnPoint,
}

/// Nearest point of the `S`-piece: `x` restricted to `S`, at distance the
/// largest support coordinate of `x` outside `S` (0 if none).
pub fn distance_to_petal(x: &UrysohnPoint, s: &RangeSet) -> PetalProjection {
    let nearest = x.restrict(|c| s.contains(c));
    let distance = x
        .support()
        .rev()
        .find(|c| !s.contains(c))
        .cloned()
        .unwrap_or_default();
    PetalProjection { distance, nearest }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "property")]
pub enum PetalViolation {
    /// Membership in both pieces disagrees with membership in the
    /// intersection piece.
    P3 { sample: usize },
    /// Distance to the `S`-piece outside `{0} ∪ (T \ S)`.
    P4 { sample: usize, distance: Rational },
    /// A sample missing from the piece of its own support.
    P2 { sample: usize },
    /// An equidistant family around an `S`-piece point left the piece.
    P1 { sample: usize, radius: Rational },
    /// The projection is not at the reported distance, or a sampled point of
    /// the piece is strictly closer.
    Projection { sample: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct PetalReport {
    pub violations: Vec<PetalViolation>,
    /// Samples whose support is not inside `T`; skipped for the distance
    /// check.
    pub outside_t: Vec<usize>,
    pub checked: usize,
}

impl PetalReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const PIECE_FAMILY_SIZE: usize = 3;

/// Finite checks of the piece axioms for `S` and `T` over the samples.
pub fn check_petal_properties(s: &RangeSet, t: &RangeSet, samples: &[UrysohnPoint]) -> Result<PetalReport> {
    let mut report = PetalReport::default();
    let both = s.intersection(t);
    let allowed: BTreeSet<Rational> = t.difference(s).into_iter().chain([Rational::zero()]).collect();
    for (i, x) in samples.iter().enumerate() {
        report.checked += 1;
        if (in_piece(x, s) && in_piece(x, t)) != in_piece(x, &both) {
            report.violations.push(PetalViolation::P3 { sample: i });
        }
        let own = RangeSet::from_values(x.support().cloned());
        if !in_piece(x, &own) {
            report.violations.push(PetalViolation::P2 { sample: i });
        }
        let proj = distance_to_petal(x, s);
        if !in_piece(&proj.nearest, s) || delta(x, &proj.nearest) != proj.distance {
            report.violations.push(PetalViolation::Projection { sample: i });
        }
        if samples
            .iter()
            .filter(|y| in_piece(y, s))
            .any(|y| delta(x, y) < proj.distance)
        {
            report.violations.push(PetalViolation::Projection { sample: i });
        }
        if in_piece(x, t) {
            if !allowed.contains(&proj.distance) {
                report.violations.push(PetalViolation::P4 {
                    sample: i,
                    distance: proj.distance.clone(),
                });
            }
        } else {
            report.outside_t.push(i);
        }
        if in_piece(x, s) {
            for r in s.nonzero() {
                let family = equidistant_family(x, r, PIECE_FAMILY_SIZE)?;
                if !family.iter().all(|p| in_piece(p, s)) {
                    report.violations.push(PetalViolation::P1 {
                        sample: i,
                        radius: r.clone(),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PetalCover {
    pub t: RangeSet,
    /// Each point of `K` with its re-embedded image.
    pub images: Vec<(UrysohnPoint, UrysohnPoint)>,
    pub isometric: bool,
    pub inside: bool,
}

/// Re-embeds `(K, delta)` from the origin and checks that every image lies
/// in the piece of `T = d(K²)`.
pub fn build_petal_cover(k: &FiniteSubset) -> Result<PetalCover> {
    let points: Vec<&UrysohnPoint> = k.iter().collect();
    let labels = (0..points.len()).map(|i| format!("k{i}")).collect();
    let space = FiniteUltrametricSpace::from_fn(labels, |i, j| delta(points[i], points[j]))?;
    let t = crate::spaces::distance_set(&space);
    let embedding = embed_space(&space, Some(&UrysohnPoint::origin()))?;
    let images: Vec<UrysohnPoint> = embedding.points().cloned().collect();
    let isometric = (0..points.len())
        .all(|i| (0..points.len()).all(|j| delta(&images[i], &images[j]) == *space.d(i, j)));
    let inside = images.iter().all(|p| in_piece(p, &t));
    Ok(PetalCover {
        t,
        images: points.into_iter().cloned().zip(images).collect(),
        isometric,
        inside,
    })
}

/// Indexes nodes by endpoint; a repeated endpoint returns the clashing pair.
pub fn duplicate_endpoint(tree: &HeirTree) -> Option<(usize, usize)> {
    let mut seen: HashMap<&UrysohnPoint, usize> = HashMap::new();
    for (i, node) in tree.nodes.iter().enumerate() {
        if let Some(&j) = seen.get(node.point()) {
            return Some((j, i));
        }
        seen.insert(node.point(), i);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: u64, d: u64) -> Rational {
        Rational::new(n, d)
    }

    fn range(vals: &[Rational]) -> RangeSet {
        RangeSet::from_values(vals.iter().cloned())
    }

    #[test]
    fn validation() {
        let s = range(&[Rational::one(), q(1, 2)]);
        assert!(validate_inheritance(&Inheritance::origin(), &s).is_ok());
        let ok = Inheritance::origin().step(&Rational::one(), 1).unwrap().step(&q(1, 2), 2).unwrap();
        assert!(validate_inheritance(&ok, &s).is_ok());
        let bad = Inheritance::origin().step(&q(1, 2), 1).unwrap().step(&Rational::one(), 2).unwrap();
        assert_eq!(
            validate_inheritance(&bad, &s).violations,
            vec![InheritanceViolation::NotDecreasing { index: 0 }]
        );
        let stationary = Inheritance::origin().step(&Rational::one(), 0).unwrap();
        assert_eq!(
            validate_inheritance(&stationary, &s).violations,
            vec![InheritanceViolation::Stationary { index: 0 }]
        );
        let outside = Inheritance::origin().step(&q(1, 3), 1).unwrap();
        assert_eq!(
            validate_inheritance(&outside, &s).violations,
            vec![InheritanceViolation::RadiusOutsideRange { index: 0 }]
        );
        let mut forged = ok.clone();
        forged.points[2] = UrysohnPoint::origin().with(q(1, 2), 2u32);
        assert!(validate_inheritance(&forged, &s)
            .violations
            .contains(&InheritanceViolation::NotSeedStep { index: 1 }));
        let mut shifted = ok;
        shifted.points[0] = UrysohnPoint::origin().with(Rational::integer(3), 1u32);
        assert!(validate_inheritance(&shifted, &s)
            .violations
            .contains(&InheritanceViolation::NotFromOrigin));
    }

    #[test]
    fn heir_distance_cases() {
        let a = Inheritance::origin().step(&Rational::one(), 1).unwrap();
        assert_eq!(heir_distance(&a, &a).unwrap(), Rational::zero());
        let b = Inheritance::origin().step(&q(1, 2), 1).unwrap();
        assert_eq!(heir_distance(&a, &b).unwrap(), Rational::one());
        assert_eq!(delta(a.endpoint(), b.endpoint()), Rational::one());
        let c = a.step(&q(1, 4), 3).unwrap();
        assert_eq!(heir_distance(&a, &c).unwrap(), q(1, 4));
        assert_eq!(heir_distance(&c, &a).unwrap(), q(1, 4));
        assert_eq!(delta(a.endpoint(), c.endpoint()), q(1, 4));
        let bad = Inheritance::origin().step(&Rational::one(), 0).unwrap();
        assert!(heir_distance(&a, &bad).is_err());
    }

    #[test]
    fn heir_trees() {
        let t0 = generate_heirs(&range(&[Rational::one()]), 0, 3).unwrap();
        assert_eq!(t0.nodes.len(), 1);
        let t1 = generate_heirs(&range(&[Rational::one()]), 1, 2).unwrap();
        assert_eq!(t1.nodes.len(), 3);
        for n in &t1.nodes[1..] {
            assert_eq!(delta(n.point(), &UrysohnPoint::origin()), Rational::one());
        }
        let t2 = generate_heirs(&range(&[q(1, 2), Rational::one()]), 2, 1).unwrap();
        let paths: Vec<Vec<Rational>> = t2.nodes.iter().map(|n| n.inheritance.radii.clone()).collect();
        assert_eq!(
            paths,
            vec![vec![], vec![Rational::one()], vec![q(1, 2)], vec![Rational::one(), q(1, 2)]]
        );
        assert!(generate_heirs(&range(&[Rational::one()]), 1, 0).is_err());
        assert_eq!(duplicate_endpoint(&t2), None);
    }

    #[test]
    fn tree_export() {
        let t = generate_heirs(&range(&[Rational::one()]), 1, 1).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"range":["0","1"],"depth":1,"branching":1,"nodes":[{"point":{},"parent":null,"radius":null,"seed_index":null},{"point":{"1":1},"parent":0,"radius":"1","seed_index":1}]}"#
        );
    }

    #[test]
    fn petal_distances() {
        let x = UrysohnPoint::origin().with(Rational::one(), 2u32).with(q(1, 3), 1u32);
        let inside = distance_to_petal(&x, &range(&[Rational::one(), q(1, 3)]));
        assert_eq!(inside.distance, Rational::zero());
        assert_eq!(inside.nearest, x);
        let p = distance_to_petal(&x, &range(&[Rational::one()]));
        assert_eq!(p.distance, q(1, 3));
        assert_eq!(p.nearest, UrysohnPoint::origin().with(Rational::one(), 2u32));
        let y = UrysohnPoint::origin().with(Rational::one(), 2u32);
        let p = distance_to_petal(&y, &range(&[q(1, 2)]));
        assert_eq!(p.distance, Rational::one());
        assert!(p.nearest.is_origin());
    }

    #[test]
    fn petal_properties() {
        let s = range(&[Rational::one()]);
        let t = range(&[Rational::one(), q(1, 2)]);
        let x = UrysohnPoint::origin().with(q(1, 2), 1u32);
        let report = check_petal_properties(&s, &t, std::slice::from_ref(&x)).unwrap();
        assert!(report.is_ok(), "{report:?}");
        assert_eq!(distance_to_petal(&x, &s).distance, q(1, 2));

        let report = check_petal_properties(&t, &t, &[x.clone(), UrysohnPoint::origin()]).unwrap();
        assert!(report.is_ok());

        let disjoint_s = range(&[Rational::one()]);
        let disjoint_t = range(&[q(1, 2)]);
        let samples = [UrysohnPoint::origin(), x.clone(), UrysohnPoint::origin().with(Rational::one(), 1u32)];
        let both = disjoint_s.intersection(&disjoint_t);
        let members: Vec<_> = samples.iter().filter(|p| in_piece(p, &both)).collect();
        assert_eq!(members, [&UrysohnPoint::origin()]);
        let report = check_petal_properties(&disjoint_s, &disjoint_t, &samples).unwrap();
        assert!(report.is_ok());
        assert_eq!(report.outside_t, vec![2]);
    }

    #[test]
    fn petal_cover() {
        let single = FiniteSubset::singleton(UrysohnPoint::origin());
        let cover = build_petal_cover(&single).unwrap();
        assert_eq!(cover.t, RangeSet::zero_only());
        assert!(cover.inside && cover.isometric);

        let tri = FiniteSubset::new(equidistant_family(&UrysohnPoint::origin().with(q(5, 1), 1u32), &Rational::one(), 3).unwrap()).unwrap();
        let cover = build_petal_cover(&tri).unwrap();
        assert_eq!(cover.t, range(&[Rational::one()]));
        assert!(cover.inside && cover.isometric);
        for (_, image) in &cover.images {
            assert!(image.support().all(|c| *c == Rational::one()));
        }
    }
}
