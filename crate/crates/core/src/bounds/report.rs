use serde::Serialize;

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub instances: usize,
    pub min_margin: f64,
    /// Instance seed (stream index) that produced `min_margin`.
    pub worst_seed: u64,
    pub pass: bool,
}

/// Running minimum of signed margins over a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginTracker {
    pub instances: usize,
    pub min_margin: f64,
    pub worst_seed: u64,
}

impl Default for MarginTracker {
    fn default() -> Self {
        MarginTracker { instances: 0, min_margin: f64::INFINITY, worst_seed: 0 }
    }
}

impl MarginTracker {
    pub fn record(&mut self, margin: f64, seed: u64) {
        self.instances += 1;
        // NaN margins count as failures.
        if margin.is_nan() || margin < self.min_margin {
            self.min_margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
            self.worst_seed = seed;
        }
    }

    pub fn merge(mut self, other: MarginTracker) -> MarginTracker {
        self.instances += other.instances;
        if other.min_margin < self.min_margin {
            self.min_margin = other.min_margin;
            self.worst_seed = other.worst_seed;
        }
        self
    }

    /// Passes when every recorded margin is at least −tol.
    pub fn report(&self, check: &str, tol: f64) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            instances: self.instances,
            min_margin: self.min_margin,
            worst_seed: self.worst_seed,
            pass: self.instances > 0 && self.min_margin >= -tol,
        }
    }
}

/// Named trackers in insertion order.
#[derive(Debug, Clone, Default)]
pub struct MarginTable {
    entries: Vec<(String, MarginTracker)>,
}

impl MarginTable {
    pub fn record(&mut self, check: &str, margin: f64, seed: u64) {
        match self.entries.iter_mut().find(|(name, _)| name == check) {
            Some((_, t)) => t.record(margin, seed),
            None => {
                let mut t = MarginTracker::default();
                t.record(margin, seed);
                self.entries.push((check.to_string(), t));
            }
        }
    }

    pub fn merge(mut self, other: MarginTable) -> MarginTable {
        for (name, t) in other.entries {
            match self.entries.iter_mut().find(|(n, _)| *n == name) {
                Some((_, mine)) => *mine = mine.merge(t),
                None => self.entries.push((name, t)),
            }
        }
        self
    }

    pub fn get(&self, check: &str) -> Option<&MarginTracker> {
        self.entries.iter().find(|(n, _)| n == check).map(|(_, t)| t)
    }

    pub fn reports(&self, tol: f64) -> Vec<CheckReport> {
        self.entries.iter().map(|(name, t)| t.report(name, tol)).collect()
    }
}

/// Serialises reports as the JSON array written by `verify`.
pub fn reports_to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialise")
}
