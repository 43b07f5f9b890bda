use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    MiddleIndex,
    AlmostExact,
    ClosedForm,
    Branching,
    Duality,
    Injectivity,
    Trace,
    Composition,
    Q1Limit,
    OperatorLaw,
    Special,
}

impl Theorem {
    pub const ALL: [Theorem; 11] = [
        Theorem::MiddleIndex,
        Theorem::AlmostExact,
        Theorem::ClosedForm,
        Theorem::Branching,
        Theorem::Duality,
        Theorem::Injectivity,
        Theorem::Trace,
        Theorem::Composition,
        Theorem::Q1Limit,
        Theorem::OperatorLaw,
        Theorem::Special,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::MiddleIndex => "middle-index",
            Theorem::AlmostExact => "almost-exact",
            Theorem::ClosedForm => "closed-form",
            Theorem::Branching => "branching",
            Theorem::Duality => "duality",
            Theorem::Injectivity => "injectivity",
            Theorem::Trace => "trace",
            Theorem::Composition => "composition",
            Theorem::Q1Limit => "q1-limit",
            Theorem::OperatorLaw => "operator-law",
            Theorem::Special => "special",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown theorem {s:?}; expected one of {}", Self::ids().join(", "))))
    }
}

impl Theorem {
    pub fn ids() -> Vec<&'static str> {
        Theorem::ALL.iter().map(|t| t.id()).collect()
    }
}

pub type Params = BTreeMap<String, i64>;

pub(crate) fn params(pairs: &[(&str, i64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// One checked identity: what was predicted, what was computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub check: String,
    pub params: Params,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
}

impl Instance {
    pub fn new(check: &str, params: Params, expected: impl fmt::Display, computed: impl fmt::Display, passed: bool) -> Self {
        Instance { check: check.to_string(), params, expected: expected.to_string(), computed: computed.to_string(), passed }
    }

    /// An equality check.
    pub fn eq<T: PartialEq + fmt::Display>(check: &str, params: Params, expected: T, computed: T) -> Self {
        let passed = expected == computed;
        Self::new(check, params, expected, computed, passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub params: Params,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub grid: Grid,
    pub instances: Vec<Instance>,
    pub skipped: Vec<Skipped>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn new(theorem: Theorem, grid: Grid, instances: Vec<Instance>, skipped: Vec<Skipped>) -> Self {
        let passed = instances.iter().filter(|i| i.passed).count();
        let failed = instances.len() - passed;
        VerificationReport { theorem, grid, instances, skipped, passed, failed }
    }

    pub fn is_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| !i.passed)
    }
}

/// Parameter ranges: every `(q, p, n)` with `q` in `fields`, `p` in `primes`
/// (those not dividing `q`) and `n` in `dims`, plus explicit extra points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub fields: Vec<u64>,
    pub primes: Vec<u32>,
    pub dims: Vec<i64>,
    #[serde(default)]
    pub extra: Vec<(u64, u32, i64)>,
}

pub fn primes_up_to(bound: u32) -> Vec<u32> {
    (2..=bound).filter(|&p| is_prime(p as u64)).collect()
}

impl Default for Grid {
    fn default() -> Self {
        Grid { fields: vec![2, 3], primes: primes_up_to(13), dims: (0..=5).collect(), extra: vec![(2, 3, 6), (2, 7, 6)] }
    }
}

impl Grid {
    pub fn new(fields: Vec<u64>, primes: Vec<u32>, dims: Vec<i64>) -> Self {
        Grid { fields, primes, dims, extra: Vec::new() }
    }

    /// All `(q, p, n)` points, sorted and without repeats.
    pub fn points(&self) -> Vec<(u64, u32, i64)> {
        let mut pts: Vec<_> = self
            .fields
            .iter()
            .flat_map(|&q| {
                self.primes.iter().filter(move |&&p| q % p as u64 != 0).flat_map(move |&p| self.dims.iter().map(move |&n| (q, p, n)))
            })
            .chain(self.extra.iter().copied())
            .collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    /// Replace the dimension range by `0..=n_max`.
    pub fn with_n_max(mut self, n_max: i64) -> Self {
        self.dims = (0..=n_max).collect();
        self.extra.retain(|&(_, _, n)| n <= n_max);
        self
    }

    /// Parse `q=2,3;p=3,5,7;n=0..5`. Omitted keys keep their defaults; ranges
    /// are inclusive and may be written `a..b` or `a-b`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut grid = Grid { extra: Vec::new(), ..Grid::default() };
        for part in text.split([';', ' ']).map(str::trim).filter(|s| !s.is_empty()) {
            let (key, values) = part.split_once('=').ok_or_else(|| Error::invalid(format!("grid entry {part:?} is not key=values")))?;
            let nums = parse_list(values)?;
            match key.trim() {
                "q" => grid.fields = nums.iter().map(|&x| x as u64).collect(),
                "p" => grid.primes = nums.iter().map(|&x| x as u32).collect(),
                "n" => grid.dims = nums,
                other => return Err(Error::invalid(format!("unknown grid key {other:?}; expected q, p or n"))),
            }
        }
        if let Some(&p) = grid.primes.iter().find(|&&p| !is_prime(p as u64)) {
            return Err(Error::NotPrime(p as u64));
        }
        if grid.fields.iter().any(|&q| q < 2) || grid.dims.iter().any(|&n| n < 0) {
            return Err(Error::invalid("grid needs q >= 2 and n >= 0"));
        }
        Ok(grid)
    }
}

fn parse_list(values: &str) -> Result<Vec<i64>> {
    let bad = || Error::invalid(format!("cannot parse grid values {values:?}"));
    let mut out = Vec::new();
    for item in values.split(',').map(str::trim) {
        let range = item.split_once("..").or_else(|| item.split_once('-'));
        match range {
            Some((a, b)) => {
                let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_ids_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.id()));
        }
        assert!("all".parse::<Theorem>().is_err());
    }

    #[test]
    fn default_grid_points() {
        let pts = Grid::default().points();
        // q=2: five odd primes; q=3: five primes other than 3; n = 0..=5; two extra points
        assert_eq!(pts.len(), (5 + 5) * 6 + 2);
        assert!(pts.contains(&(2, 7, 6)) && !pts.contains(&(3, 3, 1)));
    }

    #[test]
    fn grid_parsing() {
        let g = Grid::parse("q=2;p=3,7;n=1..3").unwrap();
        assert_eq!(g.points(), vec![(2, 3, 1), (2, 3, 2), (2, 3, 3), (2, 7, 1), (2, 7, 2), (2, 7, 3)]);
        assert_eq!(Grid::parse("n=0-2").unwrap().dims, vec![0, 1, 2]);
        assert!(Grid::parse("p=4").is_err());
        assert!(Grid::parse("x=1").is_err());
        assert!(Grid::parse("q").is_err());
    }
}
