mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qhom_core::lattice::DEFAULT_LEVEL_CAP;
use qhom_core::qcomb::{gauss_binomial, quantum_char};
use qhom_core::verifier::Grid;
use qhom_core::{Error, GroupElement, HomologyEngine, IndexPair, MatrixCache, ProjectiveSpace, RankedPoset, Theorem, Verifier};

use render::{Format, Output};

#[derive(Parser)]
#[command(name = "qhomology", version, about = "Incidence homology of finite projective spaces P(n,q) over GF(p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Order of the field GF(q) the space is defined over (a prime power)
    #[arg(short, global = true)]
    q: Option<u64>,
    /// Characteristic of the coefficient field GF(p)
    #[arg(short, global = true)]
    p: Option<u32>,
    /// Dimension of the ambient space GF(q)^n
    #[arg(short, global = true)]
    n: Option<i64>,
    /// Level: dimension of the subspaces
    #[arg(short, global = true, allow_negative_numbers = true)]
    k: Option<i64>,
    /// Step: the power of the boundary
    #[arg(short, global = true)]
    i: Option<i64>,
    /// Largest level size that may be enumerated
    #[arg(long, global = true, default_value_t = DEFAULT_LEVEL_CAP)]
    cap: u64,
    /// Directory for cached boundary matrices
    #[arg(long, global = true, env = "QHOM_CACHE")]
    cache: Option<PathBuf>,
    /// Seed for sampled group elements
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Table of Betti numbers for all 0 <= k <= n, 0 < i < m
    Betti {
        /// Compute by linear algebra and cross-check against the closed form
        #[arg(long)]
        engine: bool,
    },
    /// Homology at one index pair (k, i)
    Homology {
        /// Emit representatives of a basis as sparse vectors
        #[arg(long)]
        basis: bool,
    },
    /// Check a theorem (or `all`) over a parameter grid
    Verify {
        /// One of the theorem ids, or `all`
        theorem: String,
        /// Check dimensions 0..=NMAX
        #[arg(long)]
        nmax: Option<i64>,
        /// Grid such as `q=2,3;p=3,5,7;n=0..5`
        #[arg(long)]
        grid: Option<String>,
    },
    /// Homology of a ranked poset read from a file or generated
    Poset {
        /// Poset description file
        file: Option<PathBuf>,
        /// Use the Boolean lattice of subsets of an N-set instead of a file
        #[arg(long, value_name = "N", conflicts_with = "file")]
        boolean: Option<usize>,
        /// Exponent m of the homology; defaults to the nilpotency exponent
        #[arg(short)]
        m: Option<i64>,
    },
    /// Trace of a group element on H_{k,i} and its fixed-subspace counts
    Character {
        /// Rows separated by `;`, entries by `,`, as field element codes 0..q
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Rank mod p of the containment incidence between levels k and k - i
    Rank,
}

enum Failure {
    Verification,
    Error(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e.into())
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Io(_) | Error::Integrity(_) | Error::Parse { .. }) => 2,
        Some(_) => 3,
        None if e.downcast_ref::<std::io::Error>().is_some() => 2,
        None => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

impl Common {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Table
        }
    }

    fn need<T: Copy>(value: Option<T>, flag: &str) -> anyhow::Result<T> {
        value.ok_or_else(|| anyhow!(Error::InvalidParameter(format!("missing {flag}"))))
    }

    fn qpn(&self) -> anyhow::Result<(u64, u32, i64)> {
        let (q, p, n) = (Self::need(self.q, "-q")?, Self::need(self.p, "-p")?, Self::need(self.n, "-n")?);
        if n < 0 {
            bail!(Error::InvalidParameter(format!("n = {n} must be non-negative")));
        }
        Ok((q, p, n))
    }

    fn matrix_cache(&self) -> anyhow::Result<Option<MatrixCache>> {
        self.cache.as_ref().map(|d| MatrixCache::new(d).map_err(Into::into)).transpose()
    }

    fn engine(&self) -> anyhow::Result<HomologyEngine> {
        let (q, p, n) = self.qpn()?;
        let space = Arc::new(ProjectiveSpace::with_cap(q, n as usize, self.cap)?);
        let mut engine = HomologyEngine::with_space(space, p)?;
        if let Some(cache) = self.matrix_cache()? {
            engine = engine.with_cache(cache);
        }
        Ok(engine)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    let out = Output::new(c.format());
    match cli.command {
        Command::Betti { engine } => betti(c, &out, engine),
        Command::Homology { basis } => {
            let engine = c.engine()?;
            let (k, i) = (Common::need(c.k, "-k")?, Common::need(c.i, "-i")?);
            let result = engine.homology(k, i, basis)?;
            out.homology(&result).map_err(Into::into)
        }
        Command::Verify { theorem, nmax, grid } => verify(c, &out, &theorem, nmax, grid.as_deref()),
        Command::Poset { file, boolean, m } => poset(c, &out, file, boolean, m),
        Command::Character { matrix } => character(c, &out, matrix.as_deref()),
        Command::Rank => {
            let (q, p, n) = c.qpn()?;
            let (k, i) = (Common::need(c.k, "-k")?, Common::need(c.i, "-i")?);
            if k < 0 || k > n || i < 0 || i > k {
                return Err(anyhow!(Error::InvalidParameter(format!("need 0 <= i <= k <= n, got k = {k}, i = {i}"))).into());
            }
            let engine = c.engine()?;
            let space = engine.space();
            let incidence = space.incidence_rank((k - i) as usize, k as usize, p)?;
            let power = qhom_core::homology::rank_mod_p(&*engine.boundary_power(k, i as usize)?);
            out.rank(q, p, n, k, i, space.level_size(k)?, space.level_size(k - i)?, incidence, power).map_err(Into::into)
        }
    }
}

fn betti(c: &Common, out: &Output, use_engine: bool) -> Result<(), Failure> {
    let (q, p, n) = c.qpn()?;
    let m = quantum_char(p, q)? as i64;
    let widest = gauss_binomial(n, n / 2, q);
    if widest > c.cap.into() {
        let what = format!("level {} of GF({q})^{n}", n / 2);
        return Err(anyhow!(Error::CapExceeded { what, count: widest.to_string(), cap: c.cap }).into());
    }
    let engine = if use_engine { Some(c.engine()?) } else { None };
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for i in 1..m {
        for k in 0..=n {
            let pair = IndexPair::new(n, k, i, p, q)?;
            let closed = pair.betti_closed_form().to_string();
            let value = match &engine {
                Some(e) => {
                    let b = e.homology_dim(k, i)?.betti.to_string();
                    if b != closed {
                        mismatches.push(format!("(k,i)=({k},{i}): engine {b}, closed form {closed}"));
                    }
                    b
                }
                None => closed,
            };
            rows.push(render::BettiCell { k, i, betti: value, middle: pair.is_middle_index() });
        }
    }
    let source = if use_engine { "engine" } else { "closed form" };
    out.betti(q, p, n, m, source, &rows)?;
    if mismatches.is_empty() {
        Ok(())
    } else {
        for msg in mismatches {
            eprintln!("mismatch {msg}");
        }
        Err(Failure::Verification)
    }
}

fn build_grid(c: &Common, theorem: Theorem, nmax: Option<i64>, grid_text: Option<&str>) -> anyhow::Result<Grid> {
    let mut grid = match grid_text {
        Some(s) => Grid::parse(s)?,
        None => Verifier::default_grid(theorem),
    };
    if let Some(q) = c.q {
        if theorem != Theorem::Q1Limit {
            grid.fields = vec![q];
        }
    }
    if let Some(p) = c.p {
        grid.primes = vec![p];
    }
    if let Some(n) = c.n {
        grid.dims = vec![n];
    }
    let (fields, primes, dims) = (grid.fields.clone(), grid.primes.clone(), grid.dims.clone());
    grid.extra.retain(|(q, p, n)| fields.contains(q) && primes.contains(p) && dims.contains(n));
    if let Some(n) = nmax {
        if n < 0 {
            bail!(Error::InvalidParameter(format!("--nmax {n} must be non-negative")));
        }
        grid = grid.with_n_max(n);
    }
    for &q in grid.fields.iter().filter(|_| theorem != Theorem::Q1Limit) {
        qhom_core::FieldTable::from_order(q)?;
    }
    for &p in &grid.primes {
        if !qhom_core::qfield::is_prime(p as u64) {
            bail!(Error::NotPrime(p as u64));
        }
    }
    Ok(grid)
}

fn verify(c: &Common, out: &Output, which: &str, nmax: Option<i64>, grid_text: Option<&str>) -> Result<(), Failure> {
    let theorems = if which == "all" { Theorem::ALL.to_vec() } else { vec![which.parse::<Theorem>()?] };
    let mut verifier = Verifier::new().with_cap(c.cap).with_seed(c.seed);
    if let Some(cache) = c.matrix_cache()? {
        verifier = verifier.with_cache(cache);
    }
    let mut reports = Vec::new();
    for t in theorems {
        let grid = build_grid(c, t, nmax, grid_text)?;
        let report = verifier.verify(t, Some(&grid));
        let integrity =
            report.instances.iter().filter(|i| i.check == "error").find_map(|i| i.computed.strip_prefix("integrity check failed: "));
        if let Some(msg) = integrity {
            return Err(anyhow!(Error::Integrity(msg.to_string())).into());
        }
        reports.push(report);
    }
    out.reports(&reports)?;
    if reports.iter().all(|r| r.is_pass()) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn poset(c: &Common, out: &Output, file: Option<PathBuf>, boolean: Option<usize>, m: Option<i64>) -> Result<(), Failure> {
    let p = Common::need(c.p, "-p")?;
    let poset = match (file, boolean) {
        (Some(path), None) => RankedPoset::load(&path).with_context(|| format!("reading poset file {}", path.display()))?,
        (None, Some(n)) => RankedPoset::boolean_lattice(n)?,
        _ => return Err(anyhow!(Error::InvalidParameter("give a poset file or --boolean N".into())).into()),
    };
    let exponent = poset.nilpotency_exponent(p)?;
    let m = m.unwrap_or(exponent as i64);
    if m < 2 {
        return Err(anyhow!(Error::InvalidParameter(format!("m = {m} must be at least 2"))).into());
    }
    let mut cells = Vec::new();
    for i in 1..m {
        for k in 0..=poset.max_rank() as i64 {
            cells.push(poset.homology(k, i, m, p, false)?);
        }
    }
    out.poset(&poset, p, exponent, m, &cells).map_err(Into::into)
}

fn parse_matrix(text: &str, field: &qhom_core::FieldTable, n: usize) -> anyhow::Result<GroupElement> {
    let entries = text
        .split(';')
        .flat_map(|row| row.split(','))
        .map(|e| {
            let v: u16 = e.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad matrix entry {e:?}")))?;
            if v as u32 >= field.order() {
                return Err(Error::InvalidParameter(format!("entry {v} is not an element of GF({})", field.order())));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(GroupElement::new(field, n, entries)?)
}

fn character(c: &Common, out: &Output, matrix: Option<&str>) -> Result<(), Failure> {
    let engine = c.engine()?;
    let (n, p) = (engine.n(), engine.p());
    let space = engine.space();
    let g = match matrix {
        Some(text) => parse_matrix(text, space.field(), n as usize)?,
        None => GroupElement::random(space.field(), n as usize, &mut ChaCha8Rng::seed_from_u64(c.seed)),
    };
    let fixed = (0..=n).map(|k| space.count_fixed_subspaces(&g, k)).collect::<Result<Vec<_>, _>>()?;
    let (k, i) = (Common::need(c.k, "-k")?, Common::need(c.i, "-i")?);
    let pair = engine.pair(k, i)?;
    let trace = if pair.is_middle_index() { Some(engine.homology_trace(&g, k, i)?) } else { None };
    let sum = engine.fixed_point_sum(&g, k, i)?;
    out.character(&pair, p, &g, &fixed, trace, sum).map_err(Into::into)
}
