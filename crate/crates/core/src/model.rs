//! The map-space model of the Urysohn universal ultrametric space.
//!
//! A point is a finite-support map from positive rationals to nonnegative
//! integers, stored without its zero entries. The distance between two maps
//! is the largest coordinate at which they differ.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A point of the model. Equality, hashing and order all use the sorted
/// coordinate/value pairs, so they are exact and canonical.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UrysohnPoint {
    coords: BTreeMap<Rational, BigUint>,
}

impl UrysohnPoint {
    /// The empty map, i.e. the zero function.
    pub fn origin() -> Self {
        UrysohnPoint::default()
    }

    /// Builds a point from `(coordinate, value)` pairs. Coordinates must be
    /// positive, values nonzero, and coordinates distinct.
    pub fn try_from_pairs<V: Into<BigUint>>(
        pairs: impl IntoIterator<Item = (Rational, V)>,
    ) -> Result<Self> {
        let mut coords = BTreeMap::new();
        for (coord, value) in pairs {
            let value = value.into();
            if !coord.is_positive() {
                return Err(Error::InvalidArgument(format!("coordinate {coord} is not positive")));
            }
            if value.is_zero() {
                return Err(Error::InvalidArgument(format!("zero value stored at {coord}")));
            }
            if coords.insert(coord.clone(), value).is_some() {
                return Err(Error::InvalidArgument(format!("coordinate {coord} repeated")));
            }
        }
        Ok(UrysohnPoint { coords })
    }

    /// Returns a copy with `coord` set to `value`; a zero value clears it.
    pub fn with(mut self, coord: Rational, value: impl Into<BigUint>) -> Self {
        self.set(coord, value.into());
        self
    }

    fn set(&mut self, coord: Rational, value: BigUint) {
        assert!(coord.is_positive(), "coordinates are positive");
        if value.is_zero() {
            self.coords.remove(&coord);
        } else {
            self.coords.insert(coord, value);
        }
    }

    /// The value at `coord` (zero when not stored).
    pub fn get(&self, coord: &Rational) -> BigUint {
        self.coords.get(coord).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl DoubleEndedIterator<Item = &Rational> + '_ {
        self.coords.keys()
    }

    pub fn coords(&self) -> &BTreeMap<Rational, BigUint> {
        &self.coords
    }

    pub fn is_origin(&self) -> bool {
        self.coords.is_empty()
    }

    /// Keeps only the coordinates strictly above `r`.
    pub fn restrict_above(&self, r: &Rational) -> Self {
        UrysohnPoint {
            coords: self
                .coords
                .iter()
                .filter(|(c, _)| *c > r)
                .map(|(c, v)| (c.clone(), v.clone()))
                .collect(),
        }
    }

    /// Keeps only the coordinates accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Rational) -> bool) -> Self {
        UrysohnPoint {
            coords: self
                .coords
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, v)| (c.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn delta(&self, other: &UrysohnPoint) -> Rational {
        delta(self, other)
    }
}

impl fmt::Debug for UrysohnPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (c, v)) in self.coords.iter().rev().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}↦{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for UrysohnPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `max { r : f(r) != g(r) }`, or 0 when `f == g`.
pub fn delta(f: &UrysohnPoint, g: &UrysohnPoint) -> Rational {
    let mut a = f.coords.iter().rev().peekable();
    let mut b = g.coords.iter().rev().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (None, None) => return Rational::zero(),
            (Some((ka, _)), None) => return (*ka).clone(),
            (None, Some((kb, _))) => return (*kb).clone(),
            (Some((ka, va)), Some((kb, vb))) => match ka.cmp(kb) {
                std::cmp::Ordering::Greater => return (*ka).clone(),
                std::cmp::Ordering::Less => return (*kb).clone(),
                std::cmp::Ordering::Equal => {
                    if va != vb {
                        return (*ka).clone();
                    }
                    a.next();
                    b.next();
                }
            },
        }
    }
}

fn require_positive(r: &Rational) -> Result<()> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

/// The `k`-th member of the seed at `(a, r)`: `a` above `r`, the value `k`
/// at `r`, nothing below.
///
/// Distinct indices give points at distance exactly `r`, every member lies
/// in `B(a, r)`, and index `a(r)` lands strictly closer than `r` to `a`.
pub fn seed_point(a: &UrysohnPoint, r: &Rational, k: impl Into<BigUint>) -> Result<UrysohnPoint> {
    require_positive(r)?;
    let mut point = a.restrict_above(r);
    point.set(r.clone(), k.into());
    Ok(point)
}

/// `n` points pairwise at distance exactly `r`, all in `B(a, r)`: seed
/// indices `0..n`.
pub fn equidistant_family(a: &UrysohnPoint, r: &Rational, n: usize) -> Result<Vec<UrysohnPoint>> {
    require_positive(r)?;
    if n == 0 {
        return Err(Error::InvalidArgument("family size must be at least 1".into()));
    }
    (0..n as u64).map(|k| seed_point(a, r, k)).collect()
}

/// A point of `B(a, r)` at distance exactly `r` from every member of
/// `avoid`: the smallest admissible seed index.
///
/// Every member of `avoid` agrees with `a` above `r`, so it rules out at
/// most the single index equal to its own value at `r`; some index in
/// `0..=avoid.len()` always survives.
pub fn avoidant_witness(a: &UrysohnPoint, r: &Rational, avoid: &[UrysohnPoint]) -> Result<UrysohnPoint> {
    require_positive(r)?;
    if let Some(x) = avoid.iter().find(|x| delta(a, x) > *r) {
        return Err(Error::Precondition(format!(
            "{x} lies outside B({a}, {r})"
        )));
    }
    for k in 0..=avoid.len() as u64 {
        let p = seed_point(a, r, k)?;
        if avoid.iter().all(|x| delta(x, &p) >= *r) {
            if delta(a, &p) > *r || avoid.iter().any(|x| delta(x, &p) != *r) {
                return Err(Error::Postcondition(format!(
                    "avoidant witness {p} for B({a}, {r}) failed re-check"
                )));
            }
            return Ok(p);
        }
    }
    Err(Error::Postcondition(format!(
        "no seed index in 0..={} avoids the given set in B({a}, {r})",
        avoid.len()
    )))
}

/// Canonical name for the closed ball `B(a, r)`: the radius together with
/// `a` restricted above `r`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallKey {
    pub radius: Rational,
    pub trace: UrysohnPoint,
}

/// Two points share a key at radius `r` iff their distance is at most `r`.
pub fn ball_key(a: &UrysohnPoint, r: &Rational) -> BallKey {
    BallKey {
        radius: r.clone(),
        trace: a.restrict_above(r),
    }
}

fn serialize_value(v: &BigUint) -> serde_json::Value {
    match u64::try_from(v) {
        Ok(small) => serde_json::Value::from(small),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

impl Serialize for UrysohnPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.coords.len()))?;
        for (c, v) in self.coords.iter().rev() {
            map.serialize_entry(&c.to_string(), &serialize_value(v))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for UrysohnPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = UrysohnPoint;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping rational coordinates to positive integers")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut access: M) -> std::result::Result<Self::Value, M::Error> {
                let mut pairs = Vec::new();
                while let Some((key, value)) = access.next_entry::<String, serde_json::Value>()? {
                    let coord: Rational = key.parse().map_err(de::Error::custom)?;
                    let value = match &value {
                        serde_json::Value::Number(n) => n
                            .as_u64()
                            .map(BigUint::from)
                            .ok_or_else(|| de::Error::custom(format!("value {n} is not a nonnegative integer")))?,
                        serde_json::Value::String(s) if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) => {
                            s.parse::<BigUint>().map_err(de::Error::custom)?
                        }
                        other => return Err(de::Error::custom(format!("value {other} is not a nonnegative integer"))),
                    };
                    pairs.push((coord, value));
                }
                UrysohnPoint::try_from_pairs(pairs).map_err(de::Error::custom)
            }
        }

        d.deserialize_map(PointVisitor)
    }
}
