use crate::error::{Error, Result};

const GAP_TOL: f64 = 1e-12;

/// Bernoulli mean rewards of arms `1..=n_arms` with optional margin η.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardVector {
    means: Vec<f64>,
    eta: f64,
}

impl RewardVector {
    pub fn new(means: Vec<f64>, eta: f64) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::Precondition("no arms".into()));
        }
        if !(0.0..=0.5).contains(&eta) {
            return Err(Error::Precondition(format!("eta {eta} outside [0, 1/2]")));
        }
        for &p in &means {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::BadProbability(p));
            }
            if eta > 0.0 && (p < eta - GAP_TOL || p > 1.0 - eta + GAP_TOL) {
                return Err(Error::EtaBand(p, eta));
            }
        }
        Ok(RewardVector { means, eta })
    }

    /// Prototypical instance p = (base + gap, base, …, base).
    pub fn prototypical(n_arms: usize, base: f64, gap: f64) -> Result<Self> {
        let mut means = vec![base; n_arms];
        means[0] = base + gap;
        Self::new(means, 0.0)
    }

    pub fn n_arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Mean of arm `arm` (1-based).
    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm - 1]
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// 1-based index of the unique best arm.
    pub fn best_arm(&self) -> Result<usize> {
        let max = self.means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = (0..self.means.len()).filter(|&k| self.means[k] == max).collect();
        if winners.len() != 1 {
            return Err(Error::BestArmNotUnique);
        }
        Ok(winners[0] + 1)
    }

    /// Δ_i = p_best − p_i for every arm.
    pub fn gaps(&self) -> Vec<f64> {
        let max = self.means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.means.iter().map(|p| max - p).collect()
    }

    /// Smallest nonzero gap Δ₂.
    pub fn second_gap(&self) -> Option<f64> {
        self.gaps().into_iter().filter(|&g| g > 0.0).min_by(f64::total_cmp)
    }
}

/// Base vector (p₀, p₁, …, p_N) and its members p⁰, …, p^N, where p^j
/// replaces entry j of (p₁, …, p_N) by p₀.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardFamily {
    base: Vec<f64>,
    eta: f64,
}

impl RewardFamily {
    pub fn new(base: Vec<f64>, eta: f64) -> Result<Self> {
        if base.len() < 3 {
            return Err(Error::Precondition("family needs p0, p1 and p2".into()));
        }
        RewardVector::new(base.clone(), eta)?;
        if !(base[0] > base[1] && base[1] > base[2]) {
            return Err(Error::Precondition("family requires p0 > p1 > p2".into()));
        }
        if base[2..].windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition("family requires p2 >= p3 >= ...".into()));
        }
        if ((base[0] - base[1]) - (base[1] - base[2])).abs() > GAP_TOL {
            return Err(Error::Precondition("family requires p0 - p1 = p1 - p2".into()));
        }
        Ok(RewardFamily { base, eta })
    }

    /// Number of physical arms N (the base has N + 1 entries).
    pub fn n_arms(&self) -> usize {
        self.base.len() - 1
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn p0(&self) -> f64 {
        self.base[0]
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Δ_i = p₀ − p_i for a physical arm i.
    pub fn gap(&self, arm: usize) -> f64 {
        self.base[0] - self.base[arm]
    }

    /// Member p^j (j = 0 gives the unperturbed vector (p₁, …, p_N)).
    pub fn member(&self, j: usize) -> Result<RewardVector> {
        if j > self.n_arms() {
            return Err(Error::ArmOutOfRange(j, self.n_arms()));
        }
        let mut means = self.base[1..].to_vec();
        if j > 0 {
            means[j - 1] = self.base[0];
        }
        RewardVector::new(means, self.eta)
    }
}
