//! Eventually periodic addresses over `{0,1} x Z`, the entry order, and the
//! `2^-k` metric.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::StripIndex;

/// `preperiod` followed by `period` repeated forever; always canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Address {
    preperiod: Vec<StripIndex>,
    period: Vec<StripIndex>,
}

/// The order on single entries: left-half-plane entries come first, then
/// `(-1)^j k` increases.
pub fn entry_less(e1: StripIndex, e2: StripIndex) -> bool {
    entry_cmp(e1, e2) == Ordering::Less
}

pub fn entry_cmp(e1: StripIndex, e2: StripIndex) -> Ordering {
    fn key(e: StripIndex) -> (bool, i64) {
        (e.j == 0, if e.j == 0 { e.k } else { -e.k })
    }
    key(e1).cmp(&key(e2))
}

fn primitive_root(p: &[StripIndex]) -> &[StripIndex] {
    let n = p.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| p[i] == p[i - d]) {
            return &p[..d];
        }
    }
    p
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Address {
    pub fn new(preperiod: Vec<StripIndex>, period: Vec<StripIndex>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidParameter("address period must be nonempty".into()));
        }
        for e in preperiod.iter().chain(period.iter()) {
            if e.j > 1 {
                return Err(Error::InvalidParameter(format!("entry j = {} is not a bit", e.j)));
            }
        }
        let mut period = primitive_root(&period).to_vec();
        let mut preperiod = preperiod;
        // Absorb preperiod entries that continue the cycle backwards.
        while let Some(&last) = preperiod.last() {
            if last == *period.last().unwrap() {
                preperiod.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Ok(Address { preperiod, period })
    }

    pub fn periodic(period: Vec<StripIndex>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    pub fn preperiod(&self) -> &[StripIndex] {
        &self.preperiod
    }

    pub fn period(&self) -> &[StripIndex] {
        &self.period
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    pub fn entry(&self, n: usize) -> StripIndex {
        if n < self.preperiod.len() {
            self.preperiod[n]
        } else {
            self.period[(n - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn shift(&self) -> Address {
        if let Some((_, rest)) = self.preperiod.split_first() {
            Address {
                preperiod: rest.to_vec(),
                period: self.period.clone(),
            }
        } else {
            let mut period = self.period.clone();
            period.rotate_left(1);
            Address {
                preperiod: Vec::new(),
                period,
            }
        }
    }

    pub fn shift_by(&self, n: usize) -> Address {
        let mut s = self.clone();
        for _ in 0..n {
            s = s.shift();
        }
        s
    }

    pub fn prepend(&self, e: StripIndex) -> Address {
        let mut pre = Vec::with_capacity(self.preperiod.len() + 1);
        pre.push(e);
        pre.extend_from_slice(&self.preperiod);
        Address::new(pre, self.period.clone()).expect("entries already validated")
    }

    /// Entries beyond this index repeat for both addresses in lockstep.
    fn horizon(&self, other: &Address) -> usize {
        let pre = self.preperiod.len().max(other.preperiod.len());
        let (p, q) = (self.period.len(), other.period.len());
        pre + p / gcd(p, q) * q
    }

    /// First index where the two addresses differ.
    pub fn first_difference(&self, other: &Address) -> Option<usize> {
        (0..self.horizon(other)).find(|&n| self.entry(n) != other.entry(n))
    }

    pub fn distance(&self, other: &Address) -> f64 {
        match self.first_difference(other) {
            None => 0.0,
            Some(k) => 0.5f64.powi(k as i32),
        }
    }
}

impl Ord for Address {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.first_difference(other) {
            None => Ordering::Equal,
            Some(n) => entry_cmp(self.entry(n), other.entry(n)),
        }
    }
}

impl PartialOrd for Address {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn addr_compare(s: &Address, t: &Address) -> Ordering {
    s.cmp(t)
}

pub fn addr_distance(s: &Address, t: &Address) -> f64 {
    s.distance(t)
}

fn fmt_entries(f: &mut fmt::Formatter<'_>, es: &[StripIndex]) -> fmt::Result {
    write!(f, "[")?;
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "({},{})", e.j, e.k)?;
    }
    write!(f, "]")
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_entries(f, &self.preperiod)?;
        write!(f, ";")?;
        fmt_entries(f, &self.period)
    }
}

fn parse_entries(s: &str) -> Result<Vec<StripIndex>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..] around entries, got {s:?}")))?;
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let body_start = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
        let close = body_start
            .find(')')
            .ok_or_else(|| Error::Parse("unclosed '('".into()))?;
        let body = &body_start[..close];
        let (js, ks) = body
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("entry {body:?} needs j,k")))?;
        let j: u8 = js
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad j in {body:?}")))?;
        let k: i64 = ks
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad k in {body:?}")))?;
        if j > 1 {
            return Err(Error::Parse(format!("j must be 0 or 1 in {body:?}")));
        }
        out.push(StripIndex::new(j, k));
        rest = body_start[close + 1..].trim_start_matches([' ', ',']).trim();
    }
    Ok(out)
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("address {s:?} needs 'preperiod;period'")))?;
        let pre = parse_entries(pre)?;
        let per = parse_entries(per)?;
        if per.is_empty() {
            return Err(Error::Parse("address period must be nonempty".into()));
        }
        Address::new(pre, per).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for Address {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(j: u8, k: i64) -> StripIndex {
        StripIndex::new(j, k)
    }

    #[test]
    fn shift_examples() {
        let s = Address::periodic(vec![e(0, 0)]).unwrap();
        assert_eq!(s.shift(), s);
        let t = Address::new(vec![e(1, 2)], vec![e(0, 0)]).unwrap();
        assert_eq!(t.shift(), s);
    }

    #[test]
    fn entry_order_examples() {
        assert!(entry_less(e(1, 3), e(0, -7)));
        assert!(entry_less(e(0, 1), e(0, 2)));
        assert!(entry_less(e(1, 1), e(1, 0)));
        assert!(!entry_less(e(0, 0), e(0, 0)));
    }

    #[test]
    fn compare_examples() {
        let l = Address::periodic(vec![e(1, 0)]).unwrap();
        let r = Address::periodic(vec![e(0, 0)]).unwrap();
        assert_eq!(addr_compare(&l, &r), Ordering::Less);
        assert_eq!(addr_compare(&r, &r), Ordering::Equal);
    }

    #[test]
    fn distance_examples() {
        let s: Address = "[(0,1) (0,2) (1,0)];[(0,0)]".parse().unwrap();
        let t: Address = "[(0,1) (0,2) (1,0)];[(0,1)]".parse().unwrap();
        let u: Address = "[(1,1)];[(0,0)]".parse().unwrap();
        assert_eq!(addr_distance(&s, &s), 0.0);
        assert_eq!(addr_distance(&s, &u), 1.0);
        assert_eq!(addr_distance(&s, &t), 0.125);
    }

    #[test]
    fn canonical_form() {
        let a = Address::new(vec![e(0, 1), e(0, 0)], vec![e(0, 1), e(0, 0), e(0, 1), e(0, 0)])
            .unwrap();
        assert!(a.is_periodic());
        assert_eq!(a.period(), &[e(0, 1), e(0, 0)]);
        assert_eq!(a.to_string(), "[];[(0,1) (0,0)]");
    }

    #[test]
    fn text_round_trip() {
        for s in ["[];[(0,0)]", "[(1,2)];[(0,0)]", "[(1,-3) (0,4)];[(0,1) (1,0)]"] {
            let a: Address = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("[(2,0)];[(0,0)]".parse::<Address>().is_err());
        assert!("[];[]".parse::<Address>().is_err());
        assert!("(0,0)".parse::<Address>().is_err());
    }

    #[test]
    fn equality_across_representations() {
        let a = Address::new(vec![e(0, 0)], vec![e(0, 0)]).unwrap();
        let b = Address::periodic(vec![e(0, 0), e(0, 0), e(0, 0)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cmp(&b), Ordering::Equal);
    }

    fn entry_strategy() -> impl Strategy<Value = StripIndex> {
        (0u8..2, -3i64..4).prop_map(|(j, k)| StripIndex::new(j, k))
    }

    fn address_strategy() -> impl Strategy<Value = Address> {
        (
            prop::collection::vec(entry_strategy(), 0..4),
            prop::collection::vec(entry_strategy(), 1..4),
        )
            .prop_map(|(pre, per)| Address::new(pre, per).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn order_axioms(s in address_strategy(), t in address_strategy(), u in address_strategy()) {
            prop_assert_eq!(s.cmp(&t), t.cmp(&s).reverse());
            if s.cmp(&t) == Ordering::Equal {
                prop_assert_eq!(&s, &t);
            }
            if s <= t && t <= u {
                prop_assert!(s <= u);
            }
        }

        #[test]
        fn ultrametric(s in address_strategy(), t in address_strategy(), u in address_strategy()) {
            prop_assert!(s.distance(&u) <= s.distance(&t).max(t.distance(&u)));
            prop_assert_eq!(s.distance(&t) == 0.0, s == t);
        }

        #[test]
        fn prepend_then_shift(s in address_strategy(), x in entry_strategy()) {
            prop_assert_eq!(s.prepend(x).shift(), s);
        }

        #[test]
        fn shift_expands(s in address_strategy(), t in address_strategy()) {
            if s != t && s.entry(0) == t.entry(0) {
                prop_assert_eq!(s.shift().distance(&t.shift()), 2.0 * s.distance(&t));
            }
        }

        #[test]
        fn period_returns(per in prop::collection::vec(entry_strategy(), 1..5)) {
            let s = Address::periodic(per).unwrap();
            prop_assert_eq!(s.shift_by(s.period_len()), s);
        }
    }
}
