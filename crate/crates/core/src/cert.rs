//! Shared serialization: run-length encoded bit words and the symbolic
//! point file format (RLE pattern over an enumeration prefix, default bit,
//! guarantee level).

use serde::{Deserialize, Serialize};

use crate::ambient::Ambient;
use crate::error::SetError;
use crate::subshift::SymbolicPoint;

/// Run-length encoded bit sequence: `first` is the value of the first run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleWord {
    pub first: bool,
    pub runs: Vec<u64>,
}

impl RleWord {
    pub fn encode(bits: &[bool]) -> RleWord {
        if bits.is_empty() {
            return RleWord {
                first: false,
                runs: Vec::new(),
            };
        }
        let first = bits[0];
        let mut runs = Vec::new();
        let mut current = bits[0];
        let mut len = 0u64;
        for &b in bits {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        RleWord { first, runs }
    }

    pub fn decode(&self) -> Vec<bool> {
        let mut out = Vec::new();
        let mut value = self.first;
        for &len in &self.runs {
            out.extend(std::iter::repeat(value).take(len as usize));
            value = !value;
        }
        out
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Serialized symbolic point: values on an enumeration prefix plus a
/// default symbol and a guarantee level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFile {
    pub schema: String,
    pub ambient: Ambient,
    pub pattern: RleWord,
    pub default: bool,
    /// None: the point is total (explicit prefix + default).
    pub guarantee: Option<u32>,
    /// Seed recorded for provenance of randomized pipelines (0 when unused).
    pub seed: u64,
}

pub const POINT_SCHEMA: &str = "rl-point-1";

impl PointFile {
    /// Capture a point on the enumeration prefix covering `ball(level)`.
    pub fn capture(z: &SymbolicPoint, level: u32, seed: u64) -> Result<PointFile, SetError> {
        let am = z.ambient;
        let count = am.ball_size(level);
        let mut bits = Vec::with_capacity(count as usize);
        for i in 0..count {
            bits.push(z.eval(&am.enumerate(i))?);
        }
        Ok(PointFile {
            schema: POINT_SCHEMA.into(),
            ambient: am,
            pattern: RleWord::encode(&bits),
            default: false,
            guarantee: Some(level),
            seed,
        })
    }

    /// Reconstruct the symbolic point: explicit values on the prefix,
    /// default beyond, honoring the guarantee.
    pub fn restore(&self) -> SymbolicPoint {
        let am = self.ambient;
        let bits = self.pattern.decode();
        let mut values = std::collections::BTreeMap::new();
        for (i, b) in bits.iter().enumerate() {
            values.insert(am.enumerate(i as u64), *b);
        }
        match self.guarantee {
            Some(level) => SymbolicPoint::committed(am, values, self.default, level),
            None => SymbolicPoint::explicit(am, values, self.default),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setexpr::SetExpr;

    #[test]
    fn rle_round_trip() {
        let cases: Vec<Vec<bool>> = vec![
            vec![],
            vec![true],
            vec![false, false, true, true, true, false],
            (0..100).map(|i| i % 3 == 0).collect(),
        ];
        for bits in cases {
            let enc = RleWord::encode(&bits);
            assert_eq!(enc.decode(), bits);
        }
    }

    #[test]
    fn point_file_round_trip() {
        let am = Ambient::Z;
        let z = SymbolicPoint::indicator(am, SetExpr::ep(0, 3, [0, 1]));
        let file = PointFile::capture(&z, 40, 7).unwrap();
        let back = file.restore();
        for i in 0..am.ball_size(40) {
            let g = am.enumerate(i);
            assert_eq!(z.eval(&g).unwrap(), back.eval(&g).unwrap());
        }
        // Beyond the guarantee the restored point errors.
        assert!(back.eval(&crate::ambient::Element::int(am, 41)).is_err());
        // JSON round trip is byte-stable.
        let j1 = serde_json::to_string(&file).unwrap();
        let file2: PointFile = serde_json::from_str(&j1).unwrap();
        assert_eq!(file, file2);
    }
}
