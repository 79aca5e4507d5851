//! Database instances and their diagonal bit operators.
//!
//! A database is the list `(i, v_i)` for `i = 0..2^n`, indexed by position.
//! Values are stored in the strength of diagonal operators rather than in
//! extra qubits: [`bit_operator`] produces `D_j = Σ_i v_ij |i⟩⟨i|`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalOperator;

/// Largest supported index width. A state vector at this width already holds
/// 2^24 complex amplitudes (256 MiB).
pub const MAX_BITS: u32 = 24;

/// Index→value table with `2^n` pairwise distinct `n`-bit values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Database {
    n: u32,
    values: Vec<u32>,
}

#[derive(Deserialize)]
struct RawDatabase {
    n: u32,
    values: Vec<u64>,
}

impl Database {
    pub fn new(n: u32, values: Vec<u32>) -> Result<Self> {
        Self::validate(n, values.iter().map(|&v| u64::from(v)))?;
        Ok(Database { n, values })
    }

    fn validate(n: u32, values: impl ExactSizeIterator<Item = u64>) -> Result<()> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::Validation(format!("n = {n} is outside 1..={MAX_BITS}")));
        }
        let size = 1u64 << n;
        if values.len() as u64 != size {
            return Err(Error::Validation(format!(
                "expected {size} values for n = {n}, found {}",
                values.len()
            )));
        }
        let mut seen: HashMap<u64, usize> = HashMap::with_capacity(size as usize);
        for (i, v) in values.enumerate() {
            if v >= size {
                return Err(Error::Validation(format!(
                    "value {v} at index {i} does not fit in {n} bits"
                )));
            }
            if let Some(first) = seen.insert(v, i) {
                return Err(Error::Validation(format!(
                    "duplicate value {v} at indices {first} and {i}"
                )));
            }
        }
        Ok(())
    }

    /// The identity permutation `v_i = i`.
    pub fn identity(n: u32) -> Result<Self> {
        check_bits(n)?;
        Ok(Database {
            n,
            values: (0..1u32 << n).collect(),
        })
    }

    /// Index bit width.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of entries, `N = 2^n`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, index: usize) -> u32 {
        self.values[index]
    }

    /// Position holding `value`, if present.
    pub fn index_of(&self, value: u32) -> Option<usize> {
        self.values.iter().position(|&v| v == value)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let raw: RawDatabase = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Self::validate(raw.n, raw.values.iter().copied()).map_err(|e| match e {
            Error::Validation(msg) => msg,
            other => other.to_string(),
        })?;
        Ok(Database {
            n: raw.n,
            values: raw.values.into_iter().map(|v| v as u32).collect(),
        })
    }

    /// Renders the on-disk form, e.g. `{"n": 3, "values": [6,3,5,0,4,1,7,2]}`.
    pub fn to_json(&self) -> String {
        let values: Vec<String> = self.values.iter().map(u32::to_string).collect();
        format!("{{\"n\": {}, \"values\": [{}]}}", self.n, values.join(","))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|msg| Error::Validation(format!("{}: {msg}", path.display())))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

fn check_bits(n: u32) -> Result<()> {
    if n == 0 || n > MAX_BITS {
        return Err(Error::bounds("n", n, format!("1..={MAX_BITS}")));
    }
    Ok(())
}

/// The value being searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTarget {
    value: u32,
    n: u32,
}

impl SearchTarget {
    pub fn new(value: u32, n: u32) -> Result<Self> {
        check_bits(n)?;
        if u64::from(value) >= 1u64 << n {
            return Err(Error::bounds("target", value, format!("0..{}", 1u64 << n)));
        }
        Ok(SearchTarget { value, n })
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Bit `j` of the target, `j = 0` least significant.
    pub fn bit(&self, j: u32) -> u32 {
        (self.value >> j) & 1
    }
}

/// A uniformly random permutation of `0..2^n`, deterministic in `seed`.
pub fn random_database(n: u32, seed: u64) -> Result<Database> {
    check_bits(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<u32> = (0..1u32 << n).collect();
    values.shuffle(&mut rng);
    Ok(Database { n, values })
}

/// Seed for instance `k` at width `n` of a sweep, independent of the order in
/// which instances are generated.
pub fn instance_seed(seed_base: u64, n: u32, k: u32) -> u64 {
    let mixed = splitmix64(seed_base ^ splitmix64(u64::from(n) << 32 | u64::from(k)));
    splitmix64(mixed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Bit database operator `D_j`: diagonal entry `i` is bit `j` of `v_i`.
pub fn bit_operator(db: &Database, j: u32) -> Result<DiagonalOperator> {
    if j >= db.n {
        return Err(Error::bounds("bit position", j, format!("0..{}", db.n)));
    }
    let diag = db.values.iter().map(|&v| f64::from((v >> j) & 1)).collect();
    DiagonalOperator::new(diag)
}

/// `I - D` for a binary diagonal operator.
pub fn complement(op: &DiagonalOperator) -> Result<DiagonalOperator> {
    let diag = op
        .diag()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if d == 0.0 || d == 1.0 {
                Ok(1.0 - d)
            } else {
                Err(Error::Domain(format!("entry {i} = {d} is not binary")))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    DiagonalOperator::new(diag)
}
