use rand::Rng as _;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::rng;

use super::classical::BanditInstance;
use super::RunResult;

/// Finest level tried before giving up (precision 2^-MAX_LEVEL).
const MAX_LEVEL: u32 = 16;
/// Failed searches at the top of the schedule before max-finding stops.
/// Max-finding mistakes are caught later by certification.
const MAX_FIND_ROUNDS: usize = 2;

/// k = ⌈2 ε⁻² ln(n/δ)⌉.
pub fn hoeffding_samples(eps: f64, delta: f64, n: usize) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps {eps} must be positive")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("delta {delta} outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    Ok((2.0 / (eps * eps) * (n as f64 / delta).ln()).ceil() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlagOutcome {
    /// 1 when the empirical sum falls below k(l − 3ε/2).
    pub flag: bool,
    pub sum: u64,
    pub k: u64,
    /// 2k: k calls to accumulate the rewards, k to uncompute them.
    pub queries: u64,
}

/// Threshold flag for arm `arm` from the first k reusable samples
/// (`samples[t][arm − 1]` is X_t for that arm).
pub fn hoeffding_flag(
    arm: usize,
    samples: &[Vec<bool>],
    threshold: f64,
    eps: f64,
    delta: f64,
    n_arms: usize,
) -> Result<FlagOutcome> {
    if arm == 0 || arm > n_arms {
        return Err(Error::ArmOutOfRange(arm, n_arms));
    }
    let k = hoeffding_samples(eps, delta, n_arms)?;
    if (samples.len() as u64) < k {
        return Err(Error::Precondition(format!("flag needs {k} samples, got {}", samples.len())));
    }
    if let Some(row) = samples[..k as usize].iter().find(|x| x.len() != n_arms) {
        return Err(Error::Precondition(format!("sample row has {} arms, expected {n_arms}", row.len())));
    }
    let sum = samples[..k as usize].iter().filter(|x| x[arm - 1]).count() as u64;
    let flag = (sum as f64) < k as f64 * (threshold - 1.5 * eps);
    Ok(FlagOutcome { flag, sum, k, queries: 2 * k })
}

/// Result of amplitude amplification over the arm register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Marked arm found (0-based), if any.
    pub found: Option<usize>,
    /// Grover iterations, one flag-unitary application each.
    pub iterations: u64,
    /// Measure-and-check steps, one flag evaluation each.
    pub checks: u64,
}

/// Probability of each arm after `j` Grover iterations from the uniform
/// state with the given marked set.
fn grover_probabilities(marked: &[bool], j: u64) -> Vec<f64> {
    let n = marked.len();
    let mut amp = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..j {
        for (a, &m) in amp.iter_mut().zip(marked) {
            if m {
                *a = -*a;
            }
        }
        let mean = amp.iter().sum::<f64>() / n as f64;
        for a in amp.iter_mut() {
            *a = 2.0 * mean - *a;
        }
    }
    amp.iter().map(|a| a * a).collect()
}

/// Search with an unknown number of marked arms: rotation counts j drawn
/// uniformly from [0, m) with m = 1, 2, 4, … capped at ⌈√N⌉. After
/// `rounds_at_cap` failures at the cap the search reports nothing found.
/// At the cap every attempt finds a marked arm, when one exists, with
/// probability at least [`cap_success_floor`].
pub fn amplify_search(marked: &[bool], rounds_at_cap: usize, rng: &mut rng::Rng) -> SearchOutcome {
    let cap = (marked.len() as f64).sqrt().ceil() as u64;
    let mut m = 1u64;
    let mut failures_at_cap = 0;
    let mut out = SearchOutcome { found: None, iterations: 0, checks: 0 };
    loop {
        let j = rng.random_range(0..m);
        let probs = grover_probabilities(marked, j);
        let idx = rng::sample_index(&probs, rng);
        out.iterations += j;
        out.checks += 1;
        if marked[idx] {
            out.found = Some(idx);
            return out;
        }
        if m == cap {
            failures_at_cap += 1;
            if failures_at_cap >= rounds_at_cap {
                return out;
            }
        }
        m = (2 * m).min(cap);
    }
}

/// Smallest chance, over every possible number of marked arms t in 1..N, that
/// one attempt at the cap of [`amplify_search`] measures a marked arm:
/// min_t mean_{j < cap} sin²((2j+1)·arcsin √(t/N)). The textbook bound for
/// this schedule is 1/4; the exact minimum is usually much larger.
pub fn cap_success_floor(n: usize) -> f64 {
    let cap = (n as f64).sqrt().ceil() as u64;
    (1..n)
        .map(|t| {
            let theta = (t as f64 / n as f64).sqrt().asin();
            (0..cap).map(|j| ((2 * j + 1) as f64 * theta).sin().powi(2)).sum::<f64>() / cap as f64
        })
        .fold(1.0, f64::min)
}

/// Failures at the cap that push the miss probability below `delta`.
fn certification_rounds(n: usize, delta: f64) -> usize {
    let q = cap_success_floor(n).max(0.25);
    ((1.0 / delta).ln() / -(1.0 - q).ln()).ceil().max(1.0) as usize
}

/// Running state of one reusable-oracle search.
struct Search<'a> {
    instance: &'a BanditInstance,
    rng: rng::Rng,
    sums: Vec<u64>,
    drawn: u64,
    queries: u64,
}

impl Search<'_> {
    /// Extends the reusable sample sequence to k draws.
    fn extend_samples(&mut self, k: u64) -> Result<()> {
        let extra = k - self.drawn;
        for (s, &p) in self.sums.iter_mut().zip(self.instance.rewards.means()) {
            let b = Binomial::new(extra, p).map_err(|e| Error::Precondition(e.to_string()))?;
            *s += b.sample(&mut self.rng);
        }
        self.drawn = k;
        Ok(())
    }

    fn mean(&self, arm: usize) -> f64 {
        self.sums[arm] as f64 / self.drawn as f64
    }

    /// Runs amplitude amplification and books its cost at the current k.
    fn search(&mut self, marked: &[bool], rounds_at_cap: usize) -> Option<usize> {
        let s = amplify_search(marked, rounds_at_cap, &mut self.rng);
        self.queries += 2 * self.drawn * s.iterations + self.drawn * s.checks;
        s.found
    }
}

/// Best arm with reusable oracles.
///
/// Level r works at precision ε_r = 2^-r with k_r = ⌈2 ε_r⁻² ln(4N/δ_r)⌉
/// reusable samples (shared across levels), so every empirical mean is
/// within ε_r/2 of its arm's mean except with probability δ_r/2, where
/// δ_r = δ/(r(r+1)). The flag unitary marks arms by comparing empirical
/// sums with a threshold; each application costs 2k_r oracle calls and
/// each measured check costs k_r.
///
/// Within a level the candidate is first raised by amplitude-amplified
/// maximum finding, then certified by searching for any other arm whose
/// empirical mean is within ε_r of the candidate's. If none is found the
/// candidate is returned; a better arm becomes the new candidate; a close
/// arm sends the search to the next level.
pub fn reusable_best_arm(instance: &BanditInstance, seed: u64) -> Result<RunResult> {
    let n = instance.n_arms();
    let mut s = Search { instance, rng: rng::seeded(seed), sums: vec![0; n], drawn: 0, queries: 0 };
    if n == 1 {
        return Ok(result(&s, 0));
    }
    let mut candidate = s.rng.random_range(0..n);
    for level in 1..=MAX_LEVEL {
        let eps = 0.5f64.powi(level as i32);
        let delta_r = instance.delta / (level as f64 * (level as f64 + 1.0));
        let k = hoeffding_samples(eps, delta_r / 2.0, 2 * n)?;
        s.extend_samples(k.max(s.drawn))?;
        // Evaluating the candidate's flag register on a basis state.
        s.queries += s.drawn;

        loop {
            let marked: Vec<bool> = (0..n).map(|j| s.mean(j) > s.mean(candidate)).collect();
            match s.search(&marked, MAX_FIND_ROUNDS) {
                Some(j) => candidate = j,
                None => break,
            }
        }

        let mut attempt = 1.0;
        loop {
            let floor = s.mean(candidate) - eps;
            let marked: Vec<bool> = (0..n).map(|j| j != candidate && s.mean(j) >= floor).collect();
            let miss = delta_r / (2.0 * attempt * (attempt + 1.0));
            match s.search(&marked, certification_rounds(n, miss)) {
                None => return Ok(result(&s, candidate)),
                Some(j) if s.mean(j) > s.mean(candidate) => candidate = j,
                Some(_) => break,
            }
            attempt += 1.0;
        }
    }
    Err(Error::NoFlaggedArm)
}

fn result(s: &Search, candidate: usize) -> RunResult {
    let arm = candidate + 1;
    RunResult {
        arm,
        queries: s.queries,
        success: arm == s.instance.best_arm(),
        pulls: Vec::new(),
        weights: s.sums.iter().map(|&x| if s.drawn == 0 { 0.0 } else { x as f64 / s.drawn as f64 }).collect(),
    }
}
