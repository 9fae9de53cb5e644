//! Products of the model with itself.
//!
//! The max-combined product is again an ultrametric with equidistant
//! families in every ball. For the `p`-combined products (`p` finite, or
//! `p = ∞` over the Archimedean space) a single one-point extension problem
//! has no solution; [`lp_counterexample`] produces the target distances.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{delta, equidistant_family, UrysohnPoint};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ProductPoint {
    pub left: UrysohnPoint,
    pub right: UrysohnPoint,
}

impl ProductPoint {
    pub fn new(left: UrysohnPoint, right: UrysohnPoint) -> Self {
        ProductPoint { left, right }
    }
}

/// `max(delta(a.left, b.left), delta(a.right, b.right))`.
pub fn linf_distance(a: &ProductPoint, b: &ProductPoint) -> Rational {
    delta(&a.left, &b.left).max(delta(&a.right, &b.right))
}

/// The diagonal of two component equidistant families: `n` points pairwise
/// at distance exactly `r`, all within `r` of `center`.
pub fn product_equidistant_family(center: &ProductPoint, r: &Rational, n: usize) -> Result<Vec<ProductPoint>> {
    let left = equidistant_family(&center.left, r, n)?;
    let right = equidistant_family(&center.right, r, n)?;
    Ok(left.into_iter().zip(right).map(|(l, r)| ProductPoint::new(l, r)).collect())
}

/// The exponent of an `ℓp` product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn finite(p: u64) -> Self {
        Exponent::Finite(Rational::integer(p))
    }

    fn check(&self) -> Result<()> {
        match self {
            Exponent::Finite(p) if *p < Rational::one() => {
                Err(Error::InvalidArgument(format!("exponent {p} is below 1")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            _ => Ok(Exponent::Finite(s.parse()?)),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Coefficients of the `p`-th powers `(x, y, z, w)` in the four prescribed
/// distances from `(s_i, s_j)` to the new point, rows ordered
/// `00, 01, 10, 11`.
pub fn system_matrix() -> Matrix {
    Matrix::from_integers(&[&[1, 0, 1, 0], &[1, 0, 0, 1], &[0, 1, 1, 0], &[0, 1, 0, 1]])
}

/// The linear functional whose zero set is the image of [`system_matrix`],
/// found by row reduction and scaled so its first entry is 1.
pub fn solvability_functional() -> [BigRational; 4] {
    let basis = system_matrix().left_kernel();
    assert_eq!(basis.len(), 1, "system matrix has rank 3");
    let v = &basis[0];
    let lead = v.iter().find(|c| !c.is_zero()).expect("nonzero").clone();
    std::array::from_fn(|i| &v[i] / &lead)
}

/// `r^p` for rational `p = a/b`, when it is rational.
fn exact_power(r: &Rational, p: &Rational) -> Result<Rational> {
    let a: u32 = p
        .numer()
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("exponent {p} too large")))?;
    let b: u32 = p
        .denom()
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("exponent {p} too large")))?;
    let root = r.checked_root(b).ok_or_else(|| {
        Error::InvalidArgument(format!("{r}^{p} is irrational; choose components that are exact {b}-th powers"))
    })?;
    Ok(root.pow(a))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpSolvability {
    pub solvable: bool,
    /// `r00^p + r11^p - (r01^p + r10^p)`.
    #[serde(serialize_with = "serialize_signed")]
    pub defect: BigRational,
}

fn serialize_signed<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn check_target(target: &[Rational; 4]) -> Result<()> {
    let half = Rational::new(1, 2);
    if let Some(t) = target.iter().find(|t| **t < half || **t > Rational::one()) {
        return Err(Error::InvalidArgument(format!("target component {t} outside [1/2, 1]")));
    }
    Ok(())
}

/// Whether nonnegative `x, y, z, w` with `x^p + z^p = r00^p`,
/// `x^p + w^p = r01^p`, `y^p + z^p = r10^p`, `y^p + w^p = r11^p` exist.
///
/// Works on the `p`-th powers `v`, so everything stays rational. The image
/// of the system is the hyperplane cut out by [`solvability_functional`];
/// on it the solutions form the line `X = s`, `Z = v00 - s`, `W = v01 - s`,
/// `Y = v10 - v00 + s`, which has a nonnegative point iff
/// `max(0, v00 - v10) <= min(v00, v01)`.
pub fn lp_solvability_condition(p: &Exponent, target: &[Rational; 4]) -> Result<LpSolvability> {
    p.check()?;
    let Exponent::Finite(p) = p else {
        return Err(Error::InvalidArgument("the linear condition needs a finite exponent".into()));
    };
    check_target(target)?;
    let powers: Vec<BigRational> = target
        .iter()
        .map(|t| exact_power(t, p).map(Rational::into_signed))
        .collect::<Result<_>>()?;
    let functional = solvability_functional();
    let defect: BigRational = functional.iter().zip(&powers).map(|(c, v)| c * v).sum();
    let solvable = defect.is_zero() && {
        let zero = BigRational::zero();
        let low = (&powers[0] - &powers[2]).max(zero);
        let high = (&powers[0]).min(&powers[1]).clone();
        low <= high
    };
    Ok(LpSolvability { solvable, defect })
}

/// A target in `[1/2, 1]^4` with no realizing point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpCertificate {
    pub p: Exponent,
    pub target: [Rational; 4],
    /// Set for finite `p`.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt_signed")]
    pub defect: Option<BigRational>,
    pub consistency_defect: String,
}

fn serialize_opt_signed<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

/// Deterministic unsolvable targets.
///
/// * integer `p`: `(1, 3/4, 3/4, 1)`;
/// * `p = a/b` with `b > 1`: `(1, t, t, 1)`, `t = (1 - 1/(2b))^b`, so `t^p`
///   is rational and `t >= 1/2`;
/// * `p = ∞`: `(1/2, 1/2, 1/2, 1)`.
pub fn lp_counterexample(p: &Exponent) -> Result<LpCertificate> {
    p.check()?;
    match p {
        Exponent::Infinite => {
            let half = Rational::new(1, 2);
            let target = [half.clone(), half.clone(), half, Rational::one()];
            Ok(LpCertificate {
                p: p.clone(),
                consistency_defect: format!(
                    "y ∨ z = {}, x ∨ w = {} force y ≤ {} and w ≤ {}, so y ∨ w ≤ {} < {} = r11",
                    target[2], target[1], target[2], target[1], target[1].clone().max(target[2].clone()), target[3]
                ),
                target,
                defect: None,
            })
        }
        Exponent::Finite(exp) => {
            let mid = if exp.is_integer() {
                Rational::new(3, 4)
            } else {
                let b: u64 = exp
                    .denom()
                    .try_into()
                    .map_err(|_| Error::InvalidArgument(format!("exponent {exp} too large")))?;
                let base = Rational::new(2 * b - 1, 2 * b);
                base.pow(b as u32)
            };
            let target = [Rational::one(), mid.clone(), mid, Rational::one()];
            let status = lp_solvability_condition(p, &target)?;
            if status.solvable || status.defect.is_zero() {
                return Err(Error::Postcondition(format!("target {target:?} is solvable for p = {p}")));
            }
            Ok(LpCertificate {
                p: p.clone(),
                consistency_defect: format!(
                    "r00^p + r11^p - (r01^p + r10^p) = {} is nonzero, so the target lies off the image of the rank-3 system",
                    status.defect
                ),
                target,
                defect: Some(status.defect),
            })
        }
    }
}
