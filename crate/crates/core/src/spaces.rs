//! Finite R-valued ultrametric spaces: storage, validation, closed balls and
//! the ball partitions they induce.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite set of admissible distance values: strictly ascending, starting
/// at zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RangeSet {
    values: Vec<Rational>,
}

impl RangeSet {
    /// Checks the sequence is strictly ascending and starts at zero.
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        match values.first() {
            Some(first) if first.is_zero() => {}
            _ => {
                return Err(Error::InvalidArgument(
                    "range set must start with 0".into(),
                ))
            }
        }
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "range set not strictly ascending at {} , {}",
                w[0], w[1]
            )));
        }
        Ok(RangeSet { values })
    }

    /// Sorts, dedups and adds 0.
    pub fn from_values(values: impl IntoIterator<Item = Rational>) -> Self {
        let mut set: BTreeSet<Rational> = values.into_iter().collect();
        set.insert(Rational::zero());
        RangeSet {
            values: set.into_iter().collect(),
        }
    }

    pub fn zero_only() -> Self {
        RangeSet {
            values: vec![Rational::zero()],
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn nonzero(&self) -> impl DoubleEndedIterator<Item = &Rational> + '_ {
        self.values[1..].iter()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.values.binary_search(r).is_ok()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: a range set holds at least 0.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max(&self) -> &Rational {
        self.values.last().expect("range set holds 0")
    }

    pub fn intersection(&self, other: &RangeSet) -> RangeSet {
        RangeSet::from_values(self.values.iter().filter(|v| other.contains(v)).cloned())
    }

    pub fn union(&self, other: &RangeSet) -> RangeSet {
        RangeSet::from_values(self.values.iter().chain(other.values.iter()).cloned())
    }

    /// Elements of `self` not in `other`; may lack 0, so returned as a set.
    pub fn difference(&self, other: &RangeSet) -> BTreeSet<Rational> {
        self.values
            .iter()
            .filter(|v| !other.contains(v))
            .cloned()
            .collect()
    }
}

impl fmt::Display for RangeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for RangeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RangeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<Rational>::deserialize(d)?;
        RangeSet::new(values).map_err(serde::de::Error::custom)
    }
}

/// A labeled point set with an exact distance matrix.
///
/// Construction only checks shape (square matrix, distinct labels). Axioms
/// are checked by [`validate_ultrametric`]; operations that rely on them call
/// [`FiniteUltrametricSpace::ensure_valid`]. Matrix order is the canonical
/// point order used for every deterministic tie-break.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteUltrametricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    range: Option<RangeSet>,
    index: HashMap<String, usize>,
}

impl FiniteUltrametricSpace {
    pub fn from_parts(
        labels: Vec<String>,
        dist: Vec<Vec<Rational>>,
        range: Option<RangeSet>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Structure("space has no points".into()));
        }
        if dist.len() != labels.len() {
            return Err(Error::Structure(format!(
                "{} labels but {} matrix rows",
                labels.len(),
                dist.len()
            )));
        }
        if let Some((i, row)) = dist.iter().enumerate().find(|(_, r)| r.len() != labels.len()) {
            return Err(Error::Structure(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                labels.len()
            )));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Structure(format!("duplicate label `{label}`")));
            }
        }
        Ok(FiniteUltrametricSpace {
            labels,
            dist,
            range,
            index,
        })
    }

    /// Shape check plus full axiom check.
    pub fn new(
        labels: Vec<String>,
        dist: Vec<Vec<Rational>>,
        range: Option<RangeSet>,
    ) -> Result<Self> {
        let space = Self::from_parts(labels, dist, range)?;
        space.ensure_valid()?;
        Ok(space)
    }

    /// Builds a space from a distance function over `labels`.
    pub fn from_fn(
        labels: Vec<String>,
        mut dist: impl FnMut(usize, usize) -> Rational,
    ) -> Result<Self> {
        let n = labels.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| dist(i, j)).collect()).collect();
        Self::from_parts(labels, matrix, None)
    }

    /// The `n`-point space with every distinct pair at distance `d`.
    pub fn equilateral(n: usize, d: Rational) -> Self {
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        Self::from_fn(labels, |i, j| if i == j { Rational::zero() } else { d.clone() })
            .expect("equilateral space is well formed")
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_ultrametric(self);
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Precondition(format!(
                "not a valid ultrametric space: {}",
                v.describe(self)
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn range(&self) -> Option<&RangeSet> {
        self.range.as_ref()
    }

    pub fn with_range(mut self, range: Option<RangeSet>) -> Self {
        self.range = range;
        self
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn dist(&self, a: &str, b: &str) -> Result<&Rational> {
        Ok(self.d(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().flatten().max().cloned().unwrap_or_default()
    }

    /// The subspace on the given indices, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        Self::from_fn(labels, |a, b| self.dist[indices[a]][indices[b]].clone())
            .expect("indices are distinct")
            .with_range(self.range.clone())
    }

    pub(crate) fn ball_indices(&self, center: usize, radius: &Rational) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.dist[center][x] <= *radius)
            .collect()
    }

    /// `{ x : d(center, x) <= radius }`, in canonical order.
    pub fn closed_ball(&self, center: &str, radius: &Rational) -> Result<Vec<&str>> {
        let c = self.index_of(center)?;
        Ok(self
            .ball_indices(c, radius)
            .into_iter()
            .map(|i| self.label(i))
            .collect())
    }

    /// Partition by `d < radius` (`strict`) or `d <= radius`.
    ///
    /// Each block is formed from its first member in canonical order and then
    /// re-checked as an equivalence class; a failure means the matrix is not
    /// an ultrametric.
    pub fn ball_partition_indices(&self, radius: &Rational, strict: bool) -> Result<Vec<Vec<usize>>> {
        if strict && radius.is_zero() {
            return Err(Error::InvalidArgument(
                "strict partition at radius 0 is not reflexive".into(),
            ));
        }
        let related = |i: usize, j: usize| {
            if strict {
                self.dist[i][j] < *radius
            } else {
                self.dist[i][j] <= *radius
            }
        };
        let n = self.len();
        let mut block_of = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if block_of[x] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            let members: Vec<usize> = (x..n)
                .filter(|&y| block_of[y] == usize::MAX && related(x, y))
                .collect();
            for &y in &members {
                block_of[y] = id;
            }
            blocks.push(members);
        }
        for i in 0..n {
            for j in 0..n {
                if related(i, j) != (block_of[i] == block_of[j]) {
                    return Err(Error::Precondition(format!(
                        "relation at radius {radius} is not transitive around `{}`, `{}`",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(blocks)
    }

    pub fn ball_partition(&self, radius: &Rational, strict: bool) -> Result<Vec<Vec<&str>>> {
        Ok(self
            .ball_partition_indices(radius, strict)?
            .into_iter()
            .map(|b| b.into_iter().map(|i| self.label(i)).collect())
            .collect())
    }
}

/// Sorted set of all pairwise distances, including 0.
pub fn distance_set(space: &FiniteUltrametricSpace) -> RangeSet {
    RangeSet::from_values(space.dist.iter().flatten().cloned())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonzeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    ZeroOffDiagonal { i: usize, j: usize },
    /// `d(i, j) > max(d(i, k), d(k, j))`.
    StrongTriangle { i: usize, j: usize, k: usize },
    OutOfRange { i: usize, j: usize },
}

impl Violation {
    pub fn describe(&self, space: &FiniteUltrametricSpace) -> String {
        let l = |i: &usize| space.label(*i);
        match self {
            Violation::NonzeroDiagonal { i } => format!("d({0}, {0}) != 0", l(i)),
            Violation::Asymmetric { i, j } => format!("d({}, {}) != d({1}, {0})", l(i), l(j)),
            Violation::ZeroOffDiagonal { i, j } => {
                format!("d({}, {}) = 0 for distinct points", l(i), l(j))
            }
            Violation::StrongTriangle { i, j, k } => format!(
                "d({a}, {b}) = {} > max(d({a}, {c}), d({c}, {b}))",
                space.d(*i, *j),
                a = l(i),
                b = l(j),
                c = l(k)
            ),
            Violation::OutOfRange { i, j } => {
                format!("d({}, {}) = {} not in range", l(i), l(j), space.d(*i, *j))
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Violation::NonzeroDiagonal { .. } => "nonzero-diagonal",
            Violation::Asymmetric { .. } => "asymmetric",
            Violation::ZeroOffDiagonal { .. } => "zero-off-diagonal",
            Violation::StrongTriangle { .. } => "strong-triangle",
            Violation::OutOfRange { .. } => "out-of-range",
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Violation::NonzeroDiagonal { i } => vec![i],
            Violation::Asymmetric { i, j }
            | Violation::ZeroOffDiagonal { i, j }
            | Violation::OutOfRange { i, j } => vec![i, j],
            Violation::StrongTriangle { i, j, k } => vec![i, j, k],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reports every axiom violation. Pair violations are reported once with
/// `i < j`; strong-triangle violations once per `(i < j, k)`.
pub fn validate_ultrametric(space: &FiniteUltrametricSpace) -> ValidationReport {
    let n = space.len();
    let d = &space.dist;
    let mut violations = Vec::new();
    for i in 0..n {
        if !d[i][i].is_zero() {
            violations.push(Violation::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] != d[j][i] {
                violations.push(Violation::Asymmetric { i, j });
            }
            if d[i][j].is_zero() || d[j][i].is_zero() {
                violations.push(Violation::ZeroOffDiagonal { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in (0..n).filter(|&k| k != i && k != j) {
                if d[i][j] > *(&d[i][k]).max(&d[k][j]) {
                    violations.push(Violation::StrongTriangle { i, j, k });
                }
            }
        }
    }
    if let Some(range) = &space.range {
        for i in 0..n {
            for j in i..n {
                if !range.contains(&d[i][j]) || !range.contains(&d[j][i]) {
                    violations.push(Violation::OutOfRange { i, j });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// JSON interchange form of a space.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeSet>,
}

impl TryFrom<SpaceDocument> for FiniteUltrametricSpace {
    type Error = Error;
    fn try_from(doc: SpaceDocument) -> Result<Self> {
        FiniteUltrametricSpace::from_parts(doc.labels, doc.dist, doc.range)
    }
}

impl From<&FiniteUltrametricSpace> for SpaceDocument {
    fn from(space: &FiniteUltrametricSpace) -> Self {
        SpaceDocument {
            labels: space.labels.clone(),
            dist: space.dist.clone(),
            range: space.range.clone(),
        }
    }
}

impl Serialize for FiniteUltrametricSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpaceDocument::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteUltrametricSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SpaceDocument::deserialize(d)?;
        FiniteUltrametricSpace::try_from(doc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: u64, d: u64) -> Rational {
        Rational::new(n, d)
    }

    fn space(labels: &[&str], rows: &[&[&str]]) -> FiniteUltrametricSpace {
        FiniteUltrametricSpace::from_parts(
            labels.iter().map(|s| s.to_string()).collect(),
            rows.iter()
                .map(|r| r.iter().map(|v| v.parse().unwrap()).collect())
                .collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn two_points_are_valid() {
        let s = space(&["a", "b"], &[&["0", "1"], &["1", "0"]]);
        assert!(validate_ultrametric(&s).is_ok());
    }

    #[test]
    fn reports_strong_triangle_witness() {
        let s = space(
            &["a", "b", "c"],
            &[&["0", "1", "3"], &["1", "0", "1"], &["3", "1", "0"]],
        );
        let report = validate_ultrametric(&s);
        assert_eq!(
            report.violations,
            vec![Violation::StrongTriangle { i: 0, j: 2, k: 1 }]
        );
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let err = FiniteUltrametricSpace::from_parts(
            vec!["a".into(), "b".into()],
            vec![vec![Rational::zero(), Rational::one()]],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        let err = FiniteUltrametricSpace::from_parts(
            vec!["a".into(), "b".into()],
            vec![vec![Rational::zero()], vec![Rational::one(), Rational::zero()]],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        let err = FiniteUltrametricSpace::from_parts(
            vec!["a".into(), "a".into()],
            vec![vec![Rational::zero(); 2]; 2],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn other_violations() {
        let s = space(&["a", "b"], &[&["1", "0"], &["2", "0"]]);
        let kinds: Vec<_> = validate_ultrametric(&s)
            .violations
            .iter()
            .map(Violation::kind)
            .collect();
        assert_eq!(kinds, ["nonzero-diagonal", "asymmetric", "zero-off-diagonal"]);

        let s = space(&["a", "b"], &[&["0", "1/2"], &["1/2", "0"]])
            .with_range(Some(RangeSet::from_values([Rational::one()])));
        let report = validate_ultrametric(&s);
        assert_eq!(report.violations, vec![Violation::OutOfRange { i: 0, j: 1 }]);
    }

    #[test]
    fn closed_balls() {
        let s = FiniteUltrametricSpace::equilateral(3, Rational::one());
        assert_eq!(s.closed_ball("p1", &Rational::zero()).unwrap(), ["p1"]);
        assert_eq!(s.closed_ball("p1", &q(1, 2)).unwrap(), ["p1"]);
        assert_eq!(s.closed_ball("p1", &Rational::one()).unwrap(), ["p0", "p1", "p2"]);
        assert_eq!(s.closed_ball("p1", &Rational::integer(5)).unwrap().len(), 3);
        assert!(matches!(
            s.closed_ball("zz", &Rational::one()),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn partitions() {
        let s = FiniteUltrametricSpace::equilateral(3, Rational::one());
        assert_eq!(s.ball_partition(&Rational::one(), true).unwrap().len(), 3);
        assert_eq!(s.ball_partition(&Rational::one(), false).unwrap().len(), 1);
        assert!(matches!(
            s.ball_partition(&Rational::zero(), true),
            Err(Error::InvalidArgument(_))
        ));
        assert_eq!(s.ball_partition(&Rational::zero(), false).unwrap().len(), 3);
    }

    #[test]
    fn partition_detects_non_ultrametric() {
        let s = space(
            &["a", "b", "c"],
            &[&["0", "1", "3"], &["1", "0", "1"], &["3", "1", "0"]],
        );
        assert!(s.ball_partition(&Rational::one(), false).is_err());
    }

    #[test]
    fn distance_sets() {
        let one = FiniteUltrametricSpace::equilateral(1, Rational::one());
        assert_eq!(distance_set(&one).values(), [Rational::zero()]);
        let tri = FiniteUltrametricSpace::equilateral(3, Rational::one());
        assert_eq!(distance_set(&tri).values(), [Rational::zero(), Rational::one()]);
    }

    #[test]
    fn range_set_rules() {
        assert!(RangeSet::new(vec![Rational::one()]).is_err());
        assert!(RangeSet::new(vec![Rational::zero(), Rational::one(), Rational::one()]).is_err());
        assert!(RangeSet::new(vec![]).is_err());
        let r = RangeSet::new(vec![Rational::zero(), q(1, 2), Rational::one()]).unwrap();
        assert!(r.contains(&q(2, 4)));
        assert_eq!(r.nonzero().count(), 2);
        let s = RangeSet::from_values([Rational::one(), q(1, 3)]);
        assert_eq!(r.intersection(&s).values(), [Rational::zero(), Rational::one()]);
        assert_eq!(r.difference(&s).into_iter().collect::<Vec<_>>(), [q(1, 2)]);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"labels":["a","b"],"dist":[["0","2/4"],["1/2","0"]],"range":["0","1/2","1"]}"#;
        let s: FiniteUltrametricSpace = serde_json::from_str(text).unwrap();
        assert_eq!(s.d(0, 1), &q(1, 2));
        assert!(validate_ultrametric(&s).is_ok());
        let back = serde_json::to_string(&s).unwrap();
        assert_eq!(
            back,
            r#"{"labels":["a","b"],"dist":[["0","1/2"],["1/2","0"]],"range":["0","1/2","1"]}"#
        );
        assert!(serde_json::from_str::<FiniteUltrametricSpace>(
            r#"{"labels":["a"],"dist":[["-1"]]}"#
        )
        .is_err());
    }
}
