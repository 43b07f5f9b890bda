use std::io::{self, Write};

use serde::{Serialize, Serializer};

use qhom_core::homology::HomologyResult;
use qhom_core::poset::PosetHomology;
use qhom_core::{GroupElement, IndexPair, RankedPoset, VerificationReport};

const SHOWN_FAILURES: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Betti numbers can outgrow u64; they are written as JSON numbers when
/// they fit and as strings otherwise.
fn number_or_string<S: Serializer>(v: &str, s: S) -> Result<S::Ok, S::Error> {
    match v.parse::<u64>() {
        Ok(x) => s.serialize_u64(x),
        Err(_) => s.serialize_str(v),
    }
}

#[derive(Serialize)]
pub struct BettiCell {
    pub k: i64,
    pub i: i64,
    #[serde(serialize_with = "number_or_string")]
    pub betti: String,
    pub middle: bool,
}

#[derive(Serialize)]
struct BettiTable<'a> {
    q: u64,
    p: u32,
    n: i64,
    m: i64,
    source: &'a str,
    cells: &'a [BettiCell],
}

#[derive(Serialize)]
struct PosetReport<'a> {
    name: &'a str,
    p: u32,
    level_sizes: Vec<usize>,
    nilpotency_exponent: usize,
    m: i64,
    cells: &'a [PosetHomology],
}

#[derive(Serialize)]
struct CharacterReport<'a> {
    pair: &'a IndexPair,
    matrix: Vec<Vec<u16>>,
    fixed_subspaces: &'a [u64],
    homology_trace: Option<u8>,
    fixed_point_sum: u8,
}

#[derive(Serialize)]
struct RankReport {
    q: u64,
    p: u32,
    n: i64,
    k: i64,
    i: i64,
    source_size: usize,
    target_size: usize,
    incidence_rank: usize,
    boundary_power_rank: usize,
}

pub struct Output {
    format: Format,
}

fn csv_writer() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

fn params_text(params: &qhom_core::verifier::Params) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

impl Output {
    pub fn new(format: Format) -> Self {
        Output { format }
    }

    fn json<T: Serialize + ?Sized>(&self, value: &T) -> anyhow::Result<()> {
        let mut out = io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn betti(&self, q: u64, p: u32, n: i64, m: i64, source: &str, cells: &[BettiCell]) -> anyhow::Result<()> {
        match self.format {
            Format::Json => self.json(&BettiTable { q, p, n, m, source, cells }),
            Format::Csv => {
                let mut w = csv_writer();
                for c in cells {
                    w.serialize(c)?;
                }
                w.flush()?;
                Ok(())
            }
            Format::Table => {
                let shown = |c: &BettiCell| if c.middle { format!("[{}]", c.betti) } else { c.betti.clone() };
                let width = cells.iter().map(|c| shown(c).len()).max().unwrap_or(1).max(3) + 2;
                let mut out = io::stdout().lock();
                writeln!(out, "H-table of P({n},{q}) over GF({p}), m = {m}, {source}; [x] marks a middle index")?;
                write!(out, "{:>5}", "i\\k")?;
                for k in 0..=n {
                    write!(out, "{k:>width$}")?;
                }
                writeln!(out)?;
                for i in 1..m {
                    write!(out, "{i:>5}")?;
                    for c in cells.iter().filter(|c| c.i == i) {
                        write!(out, "{:>width$}", shown(c))?;
                    }
                    writeln!(out)?;
                }
                Ok(())
            }
        }
    }

    pub fn homology(&self, r: &HomologyResult) -> anyhow::Result<()> {
        let pr = &r.pair;
        match self.format {
            Format::Json => self.json(r),
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(["q", "p", "n", "k", "i", "m", "betti", "is_middle", "kernel_dim", "image_dim"])?;
                w.serialize((pr.q, pr.p, pr.n, pr.k, pr.i, pr.m, r.betti, r.is_middle, r.kernel_dim, r.image_dim))?;
                w.flush()?;
                Ok(())
            }
            Format::Table => {
                let mut out = io::stdout().lock();
                writeln!(out, "H_{{{},{}}} of P({},{}) over GF({}), m = {}", pr.k, pr.i, pr.n, pr.q, pr.p, pr.m)?;
                writeln!(out, "middle index: {}", if r.is_middle { "yes" } else { "no" })?;
                writeln!(out, "dim ker d^{}: {}", pr.i, r.kernel_dim)?;
                writeln!(out, "dim im d^{}: {}", pr.m - pr.i, r.image_dim)?;
                writeln!(out, "betti: {}", r.betti)?;
                if let Some(basis) = &r.basis {
                    writeln!(out, "basis ({} vectors, entries index:value):", basis.len())?;
                    for v in basis {
                        let entries: Vec<String> = v.iter().map(|(c, x)| format!("{c}:{x}")).collect();
                        writeln!(out, "  {}", entries.join(" "))?;
                    }
                }
                Ok(())
            }
        }
    }

    pub fn reports(&self, reports: &[VerificationReport]) -> anyhow::Result<()> {
        match self.format {
            Format::Json => self.json(reports),
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(["theorem", "check", "params", "expected", "computed", "passed"])?;
                for r in reports {
                    for inst in &r.instances {
                        let passed = inst.passed.to_string();
                        w.write_record([r.theorem.id(), &inst.check, &params_text(&inst.params), &inst.expected, &inst.computed, &passed])?;
                    }
                }
                w.flush()?;
                Ok(())
            }
            Format::Table => {
                let mut out = io::stdout().lock();
                for r in reports {
                    let verdict = if r.is_pass() { "PASS" } else { "FAIL" };
                    writeln!(
                        out,
                        "{:<14}{verdict}  {} passed, {} failed, {} skipped",
                        r.theorem.id(),
                        r.passed,
                        r.failed,
                        r.skipped.len()
                    )?;
                    for f in r.failures().take(SHOWN_FAILURES) {
                        writeln!(out, "    {} at {}: expected {}, computed {}", f.check, params_text(&f.params), f.expected, f.computed)?;
                    }
                    if r.failed > SHOWN_FAILURES {
                        writeln!(out, "    ... {} more failures", r.failed - SHOWN_FAILURES)?;
                    }
                    for s in r.skipped.iter().take(3) {
                        writeln!(out, "    skipped {}: {}", params_text(&s.params), s.reason)?;
                    }
                }
                Ok(())
            }
        }
    }

    pub fn poset(&self, poset: &RankedPoset, p: u32, exponent: usize, m: i64, cells: &[PosetHomology]) -> anyhow::Result<()> {
        let sizes: Vec<usize> = (0..=poset.max_rank() as i64).map(|k| poset.level_size(k)).collect();
        match self.format {
            Format::Json => self.json(&PosetReport { name: poset.name(), p, level_sizes: sizes, nilpotency_exponent: exponent, m, cells }),
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(["k", "i", "m", "p", "betti", "kernel_dim", "image_dim"])?;
                for c in cells {
                    w.serialize((c.k, c.i, c.m, c.p, c.betti, c.kernel_dim, c.image_dim))?;
                }
                w.flush()?;
                Ok(())
            }
            Format::Table => {
                let mut out = io::stdout().lock();
                let shown: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
                writeln!(out, "poset {}: {} elements, level sizes {}", poset.name(), poset.len(), shown.join(" "))?;
                writeln!(out, "nilpotency exponent of d over GF({p}): {exponent}")?;
                writeln!(out, "homology with m = {m}:")?;
                let width = cells.iter().map(|c| c.betti.to_string().len()).max().unwrap_or(1).max(3) + 2;
                write!(out, "{:>5}", "i\\k")?;
                for k in 0..sizes.len() {
                    write!(out, "{k:>width$}")?;
                }
                writeln!(out)?;
                for i in 1..m {
                    write!(out, "{i:>5}")?;
                    for c in cells.iter().filter(|c| c.i == i) {
                        write!(out, "{:>width$}", c.betti)?;
                    }
                    writeln!(out)?;
                }
                Ok(())
            }
        }
    }

    pub fn character(&self, pair: &IndexPair, p: u32, g: &GroupElement, fixed: &[u64], trace: Option<u8>, sum: u8) -> anyhow::Result<()> {
        let n = g.dim();
        let matrix: Vec<Vec<u16>> = if n == 0 { Vec::new() } else { g.entries().chunks(n).map(<[u16]>::to_vec).collect() };
        match self.format {
            Format::Json => {
                self.json(&CharacterReport { pair, matrix, fixed_subspaces: fixed, homology_trace: trace, fixed_point_sum: sum })
            }
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(["level", "fixed_subspaces"])?;
                for (k, f) in fixed.iter().enumerate() {
                    w.serialize((k, f))?;
                }
                w.flush()?;
                Ok(())
            }
            Format::Table => {
                let mut out = io::stdout().lock();
                writeln!(out, "g in GL({n},{}):", pair.q)?;
                for row in &matrix {
                    let row: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                    writeln!(out, "  {}", row.join(" "))?;
                }
                let counts: Vec<String> = fixed.iter().map(|x| x.to_string()).collect();
                writeln!(out, "fixed subspaces by level: {}", counts.join(" "))?;
                match trace {
                    Some(t) => writeln!(out, "trace on H_{{{},{}}} mod {p}: {t}", pair.k, pair.i)?,
                    None => writeln!(out, "({},{}) is not a middle index; H_{{{},{}}} = 0", pair.k, pair.i, pair.k, pair.i)?,
                }
                writeln!(out, "alternating fixed-point sum mod {p}: {sum}")?;
                Ok(())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn rank(
        &self,
        q: u64,
        p: u32,
        n: i64,
        k: i64,
        i: i64,
        source_size: usize,
        target_size: usize,
        incidence_rank: usize,
        boundary_power_rank: usize,
    ) -> anyhow::Result<()> {
        let r = RankReport { q, p, n, k, i, source_size, target_size, incidence_rank, boundary_power_rank };
        match self.format {
            Format::Json => self.json(&r),
            Format::Csv => {
                let mut w = csv_writer();
                w.serialize(&r)?;
                w.flush()?;
                Ok(())
            }
            Format::Table => {
                let mut out = io::stdout().lock();
                writeln!(out, "P({n},{q}) over GF({p}): levels {k} -> {} ({source_size} x {target_size} subspaces)", k - i)?;
                writeln!(out, "rank of containment incidence: {incidence_rank}")?;
                writeln!(out, "rank of d^{i}: {boundary_power_rank}")?;
                Ok(())
            }
        }
    }
}
