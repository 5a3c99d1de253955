use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, ONE};
use crate::rng;
use crate::tol::DEFAULT;

use super::reward::{RewardFamily, RewardVector};
use super::unitary::Registers;

const INTEGRAL_TOL: f64 = 1e-9;

/// Deterministic reward bits r_i(ω) for arms `1..=n_arms` and ω in `0..n_omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardTable {
    bits: Vec<Vec<bool>>,
}

fn integral_count(p: f64, m: usize) -> Result<usize> {
    let x = p * m as f64;
    let k = x.round();
    if (x - k).abs() > INTEGRAL_TOL {
        return Err(Error::TableSize(format!("mean {p} times {m} = {x} is not an integer")));
    }
    Ok(k as usize)
}

impl RewardTable {
    pub fn new(bits: Vec<Vec<bool>>) -> Result<Self> {
        let m = bits.first().map_or(0, |r| r.len());
        if bits.is_empty() || m == 0 || bits.iter().any(|r| r.len() != m) {
            return Err(Error::TableSize("rows must be nonempty and of equal length".into()));
        }
        Ok(RewardTable { bits })
    }

    /// Table whose first p_i·M entries of row i are ones.
    pub fn from_means(means: &[f64], n_omega: usize) -> Result<Self> {
        let mut bits = Vec::with_capacity(means.len());
        for &p in means {
            let k = integral_count(p, n_omega)?;
            bits.push((0..n_omega).map(|w| w < k).collect());
        }
        Self::new(bits)
    }

    pub fn n_arms(&self) -> usize {
        self.bits.len()
    }

    pub fn n_omega(&self) -> usize {
        self.bits[0].len()
    }

    /// r_arm(ω), arm 1-based.
    pub fn bit(&self, arm: usize, omega: usize) -> bool {
        self.bits[arm - 1][omega]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.bits
    }

    /// Exact column means M⁻¹ Σ_ω r_i(ω).
    pub fn means(&self) -> Vec<f64> {
        let m = self.n_omega() as f64;
        self.bits.iter().map(|r| r.iter().filter(|&&b| b).count() as f64 / m).collect()
    }

    /// Entrywise XOR, the table of O^{a}·O^{b}.
    pub fn xor(&self, other: &RewardTable) -> Result<RewardTable> {
        if self.n_arms() != other.n_arms() || self.n_omega() != other.n_omega() {
            return Err(Error::TableSize("tables differ in shape".into()));
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x ^ y).collect()).collect();
        Ok(RewardTable { bits })
    }

    /// Plain-text `key=value` form: `n_arms=`, `means=`, `eta=` and one
    /// `table=` bitstring line per arm.
    pub fn to_text(&self, eta: f64) -> String {
        let means: Vec<String> = self.means().iter().map(|p| format!("{p}")).collect();
        let mut s = format!("n_arms={}\nmeans={}\neta={}\n", self.n_arms(), means.join(","), eta);
        for row in &self.bits {
            let line: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            s.push_str(&format!("table={line}\n"));
        }
        s
    }

    /// Parses [`RewardTable::to_text`] output; returns the table and η.
    pub fn from_text(text: &str) -> Result<(RewardTable, f64)> {
        let kv = parse_key_values(text)?;
        let rows: Vec<Vec<bool>> = kv
            .iter()
            .filter(|(k, _)| k == "table")
            .map(|(_, v)| {
                v.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Parse(format!("bad table character {c:?}"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<_>>()?;
        let table = RewardTable::new(rows)?;
        let eta = lookup(&kv, "eta").map(|v| parse_f64(&v)).transpose()?.unwrap_or(0.0);
        if let Some(n) = lookup(&kv, "n_arms") {
            let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad n_arms {n:?}")))?;
            if n != table.n_arms() {
                return Err(Error::Parse(format!("n_arms={n} but {} table rows", table.n_arms())));
            }
        }
        if let Some(means) = lookup(&kv, "means") {
            let declared = parse_list(&means)?;
            let exact = table.means();
            if declared.len() != exact.len() || declared.iter().zip(&exact).any(|(a, b)| (a - b).abs() > 1e-12) {
                return Err(Error::TableSize(format!("declared means {declared:?} differ from table means {exact:?}")));
            }
        }
        Ok((table, eta))
    }
}

impl RewardVector {
    /// Plain-text `key=value` form: `n_arms=`, `means=`, `eta=`.
    pub fn to_text(&self) -> String {
        let means: Vec<String> = self.means().iter().map(|p| format!("{p}")).collect();
        format!("n_arms={}\nmeans={}\neta={}\n", self.n_arms(), means.join(","), self.eta())
    }

    pub fn from_text(text: &str) -> Result<RewardVector> {
        let kv = parse_key_values(text)?;
        let means = parse_list(&lookup(&kv, "means").ok_or_else(|| Error::Parse("missing means".into()))?)?;
        let eta = lookup(&kv, "eta").map(|v| parse_f64(&v)).transpose()?.unwrap_or(0.0);
        if let Some(n) = lookup(&kv, "n_arms") {
            if n.parse::<usize>().ok() != Some(means.len()) {
                return Err(Error::Parse(format!("n_arms={n} but {} means", means.len())));
            }
        }
        RewardVector::new(means, eta)
    }
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub(crate) fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn lookup(kv: &[(String, String)], key: &str) -> Option<String> {
    kv.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

/// Registers of the ERM oracle for a table: arm ⊗ omega ⊗ reward qubit.
pub fn erm_registers(table: &RewardTable) -> Registers {
    Registers { n_arms: table.n_arms(), n_omega: table.n_omega(), reward_qubit: true, work_dim: 1 }
}

/// |i, ω, c⟩ → |i, ω, c ⊕ r_i(ω)⟩.
pub fn make_erm_oracle(table: &RewardTable) -> Result<ComplexMatrix> {
    let regs = erm_registers(table);
    if regs.dim() > DEFAULT.dim_cap {
        return Err(Error::DimensionCap(regs.dim(), DEFAULT.dim_cap));
    }
    let mut m = ComplexMatrix::zeros(regs.dim(), regs.dim());
    for arm in 1..=regs.n_arms {
        for omega in 0..regs.n_omega {
            let r = table.bit(arm, omega) as usize;
            for c in 0..2 {
                m[(regs.index(arm, omega, c ^ r, 0), regs.index(arm, omega, c, 0))] = ONE;
            }
        }
    }
    Ok(m)
}

/// Projector onto the (arm, ω) entries where two tables differ, tensored with
/// the identity on the reward qubit.
pub fn difference_projector(a: &RewardTable, b: &RewardTable) -> Result<ComplexMatrix> {
    let diff = a.xor(b)?;
    let regs = erm_registers(&diff);
    let mut m = ComplexMatrix::zeros(regs.dim(), regs.dim());
    for arm in 1..=regs.n_arms {
        for omega in 0..regs.n_omega {
            if diff.bit(arm, omega) {
                for c in 0..2 {
                    let k = regs.index(arm, omega, c, 0);
                    m[(k, k)] = ONE;
                }
            }
        }
    }
    Ok(m)
}

/// Coupled tables (r⁰, rⁱ) with means p⁰ and p^i.
///
/// Each arm's ω labels are ranked by i.i.d. uniforms (a uniformly random
/// permutation); an entry is rewarded when its rank falls below mean·M. Arms
/// other than `arm` therefore have identical rows, and on `arm` the ones of
/// r⁰ are a subset of those of rⁱ.
pub fn sample_coupled_tables(
    family: &RewardFamily,
    arm: usize,
    n_omega: usize,
    seed: u64,
) -> Result<(RewardTable, RewardTable)> {
    if arm == 0 {
        return Err(Error::ArmOutOfRange(0, family.n_arms()));
    }
    let p0: RewardVector = family.member(0)?;
    let pi: RewardVector = family.member(arm)?;
    let counts0: Vec<usize> = p0.means().iter().map(|&p| integral_count(p, n_omega)).collect::<Result<_>>()?;
    let countsi: Vec<usize> = pi.means().iter().map(|&p| integral_count(p, n_omega)).collect::<Result<_>>()?;
    integral_count(family.gap(arm), n_omega)?;
    let mut rng = rng::seeded(seed);
    let mut r0 = Vec::with_capacity(p0.n_arms());
    let mut ri = Vec::with_capacity(p0.n_arms());
    for k in 0..p0.n_arms() {
        let mut rank: Vec<usize> = (0..n_omega).collect();
        rank.shuffle(&mut rng);
        r0.push(rank.iter().map(|&q| q < counts0[k]).collect());
        ri.push(rank.iter().map(|&q| q < countsi[k]).collect());
    }
    Ok((RewardTable::new(r0)?, RewardTable::new(ri)?))
}
