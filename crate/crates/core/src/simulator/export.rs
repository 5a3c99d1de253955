use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::run::Transcript;
use super::trajectories::TrajectorySample;

/// JSON array of `{step, purity, fidelity, queries}` objects.
pub fn transcript_to_json(t: &Transcript) -> Result<String> {
    serde_json::to_string_pretty(&t.records).map_err(|e| Error::Parse(e.to_string()))
}

/// CSV with header `seed,step,history_bits,outcome`: one row per oracle call,
/// `history_bits` holding X_t as a 0/1 string (arm 1 first). A trajectory
/// without oracle calls gets a single row with step 0 and empty bits.
pub fn trajectories_to_csv(samples: &[TrajectorySample]) -> String {
    let mut out = String::from("seed,step,history_bits,outcome\n");
    for s in samples {
        if s.history.is_empty() {
            let _ = writeln!(out, "{},0,,{}", s.seed, s.outcome);
        }
        for (t, x) in s.history.iter().enumerate() {
            let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let _ = writeln!(out, "{},{},{},{}", s.seed, t + 1, bits, s.outcome);
        }
    }
    out
}
