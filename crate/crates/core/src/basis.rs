//! Fixed-magnetization configuration spaces of a spin-J chain.
//!
//! A configuration `{m_α}` is stored through the doubled values `2m_α`. Internally
//! each site carries its number of raising steps above `−J`, `k_α = m_α + J`,
//! which lies in `0..=2J`. Configurations are ordered lexicographically with
//! site 1 most significant.

use crate::error::{domain, Error, Result};

/// A classical configuration in a magnetization sector, as doubled values `2m_α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorConfig {
    values: Vec<i32>,
}

impl SectorConfig {
    pub fn new(values: Vec<i32>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// Twice the total magnetization.
    pub fn two_m(&self) -> i32 {
        self.values.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn validate_sector(two_j: u32, length: usize, two_m: i32) -> Result<usize> {
    if two_j == 0 || two_j > u8::MAX as u32 {
        return domain(format!("two_j must lie in 1..=255, got {two_j}"));
    }
    if length == 0 {
        return domain("chain length must be positive");
    }
    let max = two_j as i64 * length as i64;
    let tm = two_m as i64;
    if tm.abs() > max {
        return domain(format!("|two_m| = {} exceeds two_j·L = {max}", tm.abs()));
    }
    if (tm - max).rem_euclid(2) != 0 {
        return domain(format!(
            "two_m = {two_m} has the wrong parity for two_j·L = {max}"
        ));
    }
    Ok(((tm + max) / 2) as usize)
}

/// Counts `ways[i][s]`: the number of ways sites `i..L` can carry `s` raising steps.
#[derive(Debug, Clone)]
struct SuffixCounts {
    ways: Vec<Vec<u64>>,
}

impl SuffixCounts {
    fn new(two_j: u32, length: usize) -> Result<Self> {
        let tj = two_j as usize;
        let width = tj * length + 1;
        let mut ways = vec![vec![0u64; width]; length + 1];
        ways[length][0] = 1;
        for i in (0..length).rev() {
            let (head, tail) = ways.split_at_mut(i + 1);
            let next = &tail[0];
            let cur = &mut head[i];
            let reach = tj * (length - i);
            for s in 0..=reach {
                let mut total = 0u64;
                for v in 0..=tj.min(s) {
                    total = total.checked_add(next[s - v]).ok_or(Error::Overflow)?;
                }
                cur[s] = total;
            }
        }
        Ok(Self { ways })
    }

    fn get(&self, site: usize, steps: usize) -> u64 {
        self.ways[site].get(steps).copied().unwrap_or(0)
    }
}

/// Number of configurations of a length-`length` spin-J chain with `Σ 2m_α = two_m`.
pub fn sector_dimension(two_j: u32, length: usize, two_m: i32) -> Result<u64> {
    let steps = validate_sector(two_j, length, two_m)?;
    Ok(SuffixCounts::new(two_j, length)?.get(0, steps))
}

/// All configurations of a sector, in lexicographic order.
pub fn enumerate_sector(two_j: u32, length: usize, two_m: i32) -> Result<Vec<SectorConfig>> {
    let basis = SectorBasis::new(two_j, length, two_m)?;
    Ok((0..basis.dim()).map(|i| basis.config(i)).collect())
}

/// Storage cap for the step table of a single sector.
pub const MAX_BASIS_BYTES: usize = 1 << 31;

/// Ranked enumeration of one magnetization sector.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    two_j: u32,
    length: usize,
    two_m: i32,
    total_steps: usize,
    counts: SuffixCounts,
    // row-major, `length` step counts per configuration
    steps: Vec<u8>,
}

impl SectorBasis {
    pub fn new(two_j: u32, length: usize, two_m: i32) -> Result<Self> {
        let total_steps = validate_sector(two_j, length, two_m)?;
        let counts = SuffixCounts::new(two_j, length)?;
        let dim = counts.get(0, total_steps);
        let dim = usize::try_from(dim).map_err(|_| Error::Overflow)?;
        let bytes = dim.checked_mul(length.max(1)).ok_or(Error::Overflow)?;
        if bytes > MAX_BASIS_BYTES {
            return Err(Error::TooLarge {
                what: "sector basis (bytes)",
                size: bytes,
                limit: MAX_BASIS_BYTES,
                hint: "choose a smaller chain or a sector closer to saturation",
            });
        }
        let mut steps = Vec::with_capacity(dim * length);
        let mut current = vec![0u8; length];
        fill(&counts, two_j as usize, 0, total_steps, &mut current, &mut steps);
        debug_assert_eq!(steps.len(), dim * length);
        Ok(Self {
            two_j,
            length,
            two_m,
            total_steps,
            counts,
            steps,
        })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn two_m(&self) -> i32 {
        self.two_m
    }

    pub fn dim(&self) -> usize {
        self.steps.len() / self.length
    }

    /// Raising-step counts `k_α = m_α + J` of configuration `index`.
    pub fn steps(&self, index: usize) -> &[u8] {
        &self.steps[index * self.length..(index + 1) * self.length]
    }

    pub fn config(&self, index: usize) -> SectorConfig {
        let tj = self.two_j as i32;
        SectorConfig::new(
            self.steps(index)
                .iter()
                .map(|&k| 2 * k as i32 - tj)
                .collect(),
        )
    }

    pub fn unrank(&self, index: usize) -> Result<SectorConfig> {
        if index >= self.dim() {
            return domain(format!("index {index} out of range for dimension {}", self.dim()));
        }
        Ok(self.config(index))
    }

    /// Position of `config` in the lexicographic ordering.
    pub fn rank(&self, config: &SectorConfig) -> Result<usize> {
        let tj = self.two_j as i32;
        if config.len() != self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                got: config.len(),
            });
        }
        let mut steps = Vec::with_capacity(self.length);
        for &v in config.values() {
            if v.abs() > tj || (v + tj) % 2 != 0 {
                return domain(format!("value {v} is not a valid 2m for two_j = {tj}"));
            }
            steps.push(((v + tj) / 2) as u8);
        }
        if config.two_m() != self.two_m {
            return domain(format!(
                "configuration has two_m = {}, sector has {}",
                config.two_m(),
                self.two_m
            ));
        }
        Ok(self.rank_steps(&steps))
    }

    /// Rank from step counts; the caller guarantees membership in the sector.
    pub(crate) fn rank_steps(&self, steps: &[u8]) -> usize {
        let mut rank = 0u64;
        let mut remaining = self.total_steps;
        for (site, &k) in steps.iter().enumerate() {
            let k = k as usize;
            for v in 0..k.min(remaining + 1) {
                rank += self.counts.get(site + 1, remaining - v);
            }
            remaining -= k;
        }
        rank as usize
    }
}

fn fill(
    counts: &SuffixCounts,
    two_j: usize,
    site: usize,
    remaining: usize,
    current: &mut [u8],
    out: &mut Vec<u8>,
) {
    if site == current.len() {
        if remaining == 0 {
            out.extend_from_slice(current);
        }
        return;
    }
    for v in 0..=two_j.min(remaining) {
        if counts.get(site + 1, remaining - v) == 0 {
            continue;
        }
        current[site] = v as u8;
        fill(counts, two_j, site + 1, remaining - v, current, out);
    }
}
