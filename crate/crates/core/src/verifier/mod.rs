//! Grid verification of the dimension-level statements about `H^n_{k,i}`:
//! each theorem is checked instance by instance against the homology
//! engine, and the outcome is returned as a [`VerificationReport`].

mod irreducible;
mod report;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache::MatrixCache;
use crate::error::{Error, Result};
use crate::homology::{rank_mod_p, HomologyEngine, InducedKind};
use crate::lattice::{GroupElement, ProjectiveSpace, DEFAULT_LEVEL_CAP};
use crate::poset::RankedPoset;
use crate::qcomb::{betti_special, IndexPair};

pub use irreducible::{IrreducibleDim, IrreducibleDimTable, Provenance};
pub use report::{primes_up_to, Grid, Instance, Params, Skipped, Theorem, VerificationReport};

use report::params;

type PointResult = (Vec<Instance>, Vec<Skipped>);
type EngineAndPairs = (Arc<HomologyEngine>, Vec<(i64, i64)>);

/// Runs theorem checks over parameter grids, sharing homology engines
/// between checks.
pub struct Verifier {
    cap: u64,
    seed: u64,
    trace_samples: usize,
    cache: Option<MatrixCache>,
    engines: Mutex<HashMap<(u64, i64, u32), Arc<HomologyEngine>>>,
    boolean: Mutex<HashMap<(i64, i64, i64, u32), u64>>,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier { cap: DEFAULT_LEVEL_CAP, seed: 0, trace_samples: 20, cache: None, engines: Mutex::default(), boolean: Mutex::default() }
    }
}

impl Verifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Number of random group elements per grid point in trace checks.
    pub fn with_trace_samples(mut self, samples: usize) -> Self {
        self.trace_samples = samples;
        self
    }

    pub fn with_cache(mut self, cache: MatrixCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// The grid a theorem is checked on when none is given.
    pub fn default_grid(theorem: Theorem) -> Grid {
        match theorem {
            Theorem::Trace | Theorem::OperatorLaw => Grid::default().with_n_max(4),
            Theorem::Q1Limit => Grid::new(vec![1], vec![2, 3, 5], (0..=8).collect()),
            _ => Grid::default(),
        }
    }

    pub fn engine(&self, q: u64, n: i64, p: u32) -> Result<Arc<HomologyEngine>> {
        let mut engines = self.engines.lock().unwrap();
        if let Some(e) = engines.get(&(q, n, p)) {
            return Ok(e.clone());
        }
        let space = Arc::new(ProjectiveSpace::with_cap(q, n as usize, self.cap)?);
        let mut engine = HomologyEngine::with_space(space, p)?;
        if let Some(cache) = &self.cache {
            engine = engine.with_cache(cache.clone());
        }
        let engine = Arc::new(engine);
        engines.insert((q, n, p), engine.clone());
        Ok(engine)
    }

    /// `beta^n_{k,i}` from the engine, with the zero conventions outside
    /// `0 <= k <= n`, `0 < i < m`.
    pub fn betti(&self, q: u64, p: u32, n: i64, k: i64, i: i64) -> Result<u64> {
        if n < 0 || k < 0 || k > n {
            return Ok(0);
        }
        let engine = self.engine(q, n, p)?;
        if i <= 0 || i >= engine.m() {
            return Ok(0);
        }
        Ok(engine.homology_dim(k, i)?.betti)
    }

    /// Homology of the Boolean lattice `B_n` over GF(p) with `m = p`.
    pub fn boolean_betti(&self, p: u32, n: i64, k: i64, i: i64) -> Result<u64> {
        let m = p as i64;
        if n < 0 || k < 0 || k > n || i <= 0 || i >= m {
            return Ok(0);
        }
        if let Some(&b) = self.boolean.lock().unwrap().get(&(n, k, i, p)) {
            return Ok(b);
        }
        let poset = RankedPoset::boolean_lattice(n as usize)?;
        let b = poset.homology(k, i, m, p, false)?.betti;
        self.boolean.lock().unwrap().insert((n, k, i, p), b);
        Ok(b)
    }

    pub fn verify_all(&self, grid: Option<&Grid>) -> Vec<VerificationReport> {
        Theorem::ALL.iter().map(|&t| self.verify(t, grid)).collect()
    }

    pub fn verify(&self, theorem: Theorem, grid: Option<&Grid>) -> VerificationReport {
        let grid = grid.cloned().unwrap_or_else(|| Self::default_grid(theorem));
        let mut points = grid.points();
        if theorem == Theorem::Q1Limit {
            points = points.into_iter().map(|(_, p, n)| (1, p, n)).collect();
            points.dedup();
        }
        let results: Vec<PointResult> = points
            .par_iter()
            .map(|&(q, p, n)| {
                let outcome = match theorem {
                    Theorem::MiddleIndex => self.point_middle_index(q, p, n),
                    Theorem::AlmostExact => self.point_almost_exact(q, p, n),
                    Theorem::ClosedForm => self.point_closed_form(q, p, n),
                    Theorem::Branching => self.point_branching(q, p, n),
                    Theorem::Duality => self.point_duality(q, p, n),
                    Theorem::Injectivity => self.point_injectivity(q, p, n),
                    Theorem::Trace => self.point_trace(q, p, n),
                    Theorem::Composition => self.point_composition(q, p, n),
                    Theorem::Q1Limit => self.point_q1_limit(p, n),
                    Theorem::OperatorLaw => self.point_operator_law(q, p, n),
                    Theorem::Special => self.point_special(q, p, n),
                };
                let here = params(&[("q", q as i64), ("p", p as i64), ("n", n)]);
                match outcome {
                    Ok(r) => r,
                    Err(Error::CapExceeded { what, count, cap }) => {
                        (Vec::new(), vec![Skipped { params: here, reason: format!("{what} has {count} elements (cap {cap})") }])
                    }
                    Err(e) => (vec![Instance::new("error", here, "a result", e.to_string(), false)], Vec::new()),
                }
            })
            .collect();
        let (mut instances, mut skipped) = (Vec::new(), Vec::new());
        for (i, s) in results {
            instances.extend(i);
            skipped.extend(s);
        }
        VerificationReport::new(theorem, grid, instances, skipped)
    }

    fn pairs(&self, q: u64, p: u32, n: i64) -> Result<EngineAndPairs> {
        let engine = self.engine(q, n, p)?;
        let m = engine.m();
        let pairs = (0..=n).flat_map(|k| (1..m).map(move |i| (k, i))).collect();
        Ok((engine, pairs))
    }

    fn point_middle_index(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let (engine, pairs) = self.pairs(q, p, n)?;
        let mut out = Vec::new();
        for (k, i) in pairs {
            let middle = engine.pair(k, i)?.is_middle_index();
            let beta = engine.homology_dim(k, i)?.betti;
            let expected = if middle { "non-zero" } else { "zero" };
            let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
            out.push(Instance::new("middle-index", at, expected, beta, (beta > 0) == middle));
        }
        Ok((out, Vec::new()))
    }

    fn point_almost_exact(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let engine = self.engine(q, n, p)?;
        let m = engine.m();
        let mut out = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let (k, i) = (b, b - a);
                let profile = engine.sequence_profile(k, i)?;
                let nonzero: Vec<(i64, i64)> = profile.iter().filter(|e| e.betti > 0).map(|e| (e.level, e.step)).collect();
                let mut middle = Vec::new();
                for e in &profile {
                    if engine.pair(e.level, e.step)?.is_middle_index() {
                        middle.push((e.level, e.step));
                    }
                }
                let passed = nonzero.len() <= 1 && middle.len() <= 1 && nonzero == middle;
                let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
                out.push(Instance::new("almost-exact", at, format!("at most one non-zero, at {middle:?}"), format!("{nonzero:?}"), passed));
            }
        }
        Ok((out, Vec::new()))
    }

    fn point_closed_form(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let (engine, pairs) = self.pairs(q, p, n)?;
        let mut out = Vec::new();
        for (k, i) in pairs {
            let pair = engine.pair(k, i)?;
            let closed = pair.betti_closed_form();
            let rec = pair.betti_recurrence();
            let beta = engine.homology_dim(k, i)?.betti;
            let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
            let passed = closed == beta.into() && closed == rec;
            out.push(Instance::new("closed-form", at, &closed, format!("{beta} (recursion {rec})"), passed));
        }
        Ok((out, Vec::new()))
    }

    fn point_branching(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        if n < 2 {
            return Ok((Vec::new(), Vec::new()));
        }
        let (_, pairs) = self.pairs(q, p, n)?;
        let singer = (q as u128).pow(n as u32 - 1) - 1;
        let mut out = Vec::new();
        for (k, i) in pairs {
            let lhs = self.betti(q, p, n, k, i)? as u128;
            let a = self.betti(q, p, n - 1, k, i + 1)? as u128;
            let b = self.betti(q, p, n - 1, k - 1, i - 1)? as u128;
            let c = self.betti(q, p, n - 2, k - 1, i)? as u128;
            let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
            let rhs = a + b + c * singer;
            out.push(Instance::new("branching", at, format!("{a} + {b} + {c}*{singer} = {rhs}"), lhs, lhs == rhs));
        }
        Ok((out, Vec::new()))
    }

    fn point_duality(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let (engine, pairs) = self.pairs(q, p, n)?;
        let m = engine.m();
        let mut out = Vec::new();
        for (k, i) in pairs {
            let j = 2 * k - n + m - i;
            let orbit = [(k, i), (n - k, m - i), (k, j), (n - k, m - j)];
            let values = orbit.iter().map(|&(a, b)| self.betti(q, p, n, a, b)).collect::<Result<Vec<u64>>>()?;
            let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
            let passed = values.iter().all(|&v| v == values[0]);
            out.push(Instance::new("duality", at, format!("equal on {orbit:?}"), format!("{values:?}"), passed));
        }
        Ok((out, Vec::new()))
    }

    fn point_injectivity(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let engine = self.engine(q, n, p)?;
        let m = engine.m();
        let mut out = Vec::new();
        let mut check = |kind: InducedKind, k: i64, i: i64, t: i64| -> Result<()> {
            let source = engine.homology_dim(k, i)?.betti;
            let rank = if source == 0 { 0 } else { rank_mod_p(&engine.induced_map(kind, k, i, t)?) as u64 };
            let (name, step) = match kind {
                InducedKind::Boundary => ("boundary", "t"),
                InducedKind::Inclusion => ("inclusion", "j"),
            };
            let step_value = if kind == InducedKind::Boundary { t } else { i + t };
            let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i), (step, step_value)]);
            out.push(Instance::eq(name, at, source, rank));
            Ok(())
        };
        for k in 0..=n {
            for i in 1..m {
                for t in 1..i {
                    if 2 * k - t >= n {
                        check(InducedKind::Boundary, k, i, t)?;
                    }
                }
                if i > 1 {
                    for j in i + 1..m {
                        if 2 * k + m - i - j >= n {
                            check(InducedKind::Inclusion, k, i, j - i)?;
                        }
                    }
                }
            }
        }
        Ok((out, Vec::new()))
    }

    /// Identity, non-trivial scalars, a cycle and a transposition of the
    /// coordinates, then seeded random elements.
    pub fn trace_elements(&self, q: u64, p: u32, n: i64) -> Result<Vec<GroupElement>> {
        let engine = self.engine(q, n, p)?;
        let field = engine.space().field();
        let n = n as usize;
        let mut gs = vec![GroupElement::identity(n)];
        if n > 0 {
            gs.extend((2..field.order()).map(|a| GroupElement::scalar(n, a as u16)));
        }
        if n >= 2 {
            gs.push(GroupElement::permutation(&(0..n).map(|c| (c + 1) % n).collect::<Vec<_>>())?);
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            gs.push(GroupElement::permutation(&swap)?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (q << 40) ^ ((p as u64) << 20) ^ n as u64);
        gs.extend((0..self.trace_samples).map(|_| GroupElement::random(field, n, &mut rng)));
        Ok(gs)
    }

    fn point_trace(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let (engine, pairs) = self.pairs(q, p, n)?;
        let elements = self.trace_elements(q, p, n)?;
        let mut out = Vec::new();
        for (k, i) in pairs {
            if !engine.pair(k, i)?.is_middle_index() {
                continue;
            }
            for (s, g) in elements.iter().enumerate() {
                let trace = engine.homology_trace(g, k, i)?;
                let sum = engine.fixed_point_sum(g, k, i)?;
                let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i), ("sample", s as i64)]);
                out.push(Instance::eq("trace", at, sum, trace));
            }
        }
        Ok((out, Vec::new()))
    }

    pub fn irreducible_dims(&self, q: u64, p: u32, n: i64) -> Result<IrreducibleDimTable> {
        IrreducibleDimTable::derive(&*self.engine(q, n, p)?)
    }

    fn point_composition(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let (engine, pairs) = self.pairs(q, p, n)?;
        let m = engine.m();
        let table = self.irreducible_dims(q, p, n)?;
        let (mut out, mut skipped) = (Vec::new(), Vec::new());
        for (k, i) in pairs {
            let pair = engine.pair(k, i)?;
            if !pair.is_middle_index() {
                continue;
            }
            let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
            let interval = pair.t_interval()?;
            let dims: Option<Vec<u64>> = interval.members().map(|t| table.dim(t)).collect();
            let beta = engine.homology_dim(k, i)?.betti;
            match dims {
                Some(dims) => {
                    let sum: u64 = dims.iter().sum();
                    let expected = format!("sum over t in {}..={} of {dims:?} = {sum}", interval.lo, interval.hi);
                    out.push(Instance::new("interval-sum", at.clone(), expected, beta, sum == beta));
                }
                None => skipped.push(Skipped { params: at.clone(), reason: format!("no dimension for some t in {interval:?}") }),
            }
            if pair.is_maximal_middle_index() {
                let a2 = 2 * k - n;
                for j in i + 1..m {
                    if 2 * j > m + a2 {
                        continue;
                    }
                    let lhs = self.betti(q, p, n, k, j)?;
                    let (x, y) = (beta, self.betti(q, p, n, k + 1, j + 1)?);
                    let mut here = at.clone();
                    here.insert("j".into(), j);
                    out.push(Instance::new("sum-rule", here, format!("{x} + {y}"), lhs, lhs == x + y));
                }
            }
        }
        Ok((out, skipped))
    }

    fn point_q1_limit(&self, p: u32, n: i64) -> Result<PointResult> {
        let m = p as i64;
        let mut out = Vec::new();
        for k in 0..=n {
            for i in 1..m {
                let pair = IndexPair::with_m(n, k, i, m, p, 1)?;
                let at = params(&[("q", 1), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
                let beta = self.boolean_betti(p, n, k, i)?;
                let middle = pair.is_middle_index();
                let expected = if middle { "non-zero" } else { "zero" };
                out.push(Instance::new("middle-index", at.clone(), expected, beta, (beta > 0) == middle));
                let closed = pair.betti_closed_form().to_u64().unwrap();
                out.push(Instance::eq("closed-form", at.clone(), closed, beta));
                let j = 2 * k - n + m - i;
                let orbit = [(k, i), (n - k, m - i), (k, j), (n - k, m - j)];
                let values = orbit.iter().map(|&(a, b)| self.boolean_betti(p, n, a, b)).collect::<Result<Vec<u64>>>()?;
                let same = values.iter().all(|&v| v == values[0]);
                out.push(Instance::new("duality", at.clone(), format!("equal on {orbit:?}"), format!("{values:?}"), same));
                if n >= 1 {
                    let a = self.boolean_betti(p, n - 1, k, i + 1)?;
                    let b = self.boolean_betti(p, n - 1, k - 1, i - 1)?;
                    out.push(Instance::new("branching", at, format!("{a} + {b}"), beta, beta == a + b));
                }
            }
        }
        Ok((out, Vec::new()))
    }

    fn point_operator_law(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let engine = self.engine(q, n, p)?;
        let space = engine.space();
        let m = engine.m();
        let mut out = Vec::new();
        for k in 0..=n {
            for i in 0..=m.min(k) {
                let product = engine.boundary_power(k, i as usize)?;
                let closed = space.boundary_power_closed(k, i as usize, p)?;
                let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
                let expected = format!("[{i}]_q! x containment ({} non-zeros)", closed.nnz());
                out.push(Instance::new("power-law", at.clone(), expected, format!("{} non-zeros", product.nnz()), *product == closed));
                if i == m {
                    out.push(Instance::new("nilpotent", at, "zero", format!("{} non-zeros", product.nnz()), product.is_zero()));
                }
            }
        }
        Ok((out, Vec::new()))
    }

    fn point_special(&self, q: u64, p: u32, n: i64) -> Result<PointResult> {
        let (engine, pairs) = self.pairs(q, p, n)?;
        let m = engine.m();
        if m > 3 {
            return Ok((Vec::new(), Vec::new()));
        }
        let expected = betti_special(m as u32, n as u32, p, q)?.to_u64().unwrap();
        let mut out = Vec::new();
        for (k, i) in pairs {
            let beta = engine.homology_dim(k, i)?.betti;
            let at = params(&[("q", q as i64), ("p", p as i64), ("n", n), ("k", k), ("i", i)]);
            if engine.pair(k, i)?.is_middle_index() {
                out.push(Instance::eq("special", at, expected, beta));
            } else {
                out.push(Instance::eq("special-zero", at, 0, beta));
            }
        }
        Ok((out, Vec::new()))
    }
}
