//! Structured symbol labels.
//!
//! Eve's symbols carry the indices of her guess, so class membership used by
//! the advantage-distillation analysis can be read off the label:
//!
//! * `z{i}{j}`: Werner-table symbol, Eve guesses `X = i`, `Y = j`.
//! * `z~{x1}{y1}{x2}{y2}`: symmetric-table symbol, guess on both trit pairs.
//! * `z{i}{j}|z~{x1}{y1}{x2}{y2}`: the pair `E = [Z, Z̃]` after activation.
//!
//! Honest symbols are single trits (`"0"`) or trit pairs (`"01"`, first
//! digit belongs to the first subsystem).

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub fn trit(i: usize) -> String {
    i.to_string()
}

pub fn trit_pair(a: usize, b: usize) -> String {
    format!("{a}{b}")
}

pub fn werner_eve(i: usize, j: usize) -> String {
    EveSymbol::Werner(i as u8, j as u8).to_string()
}

pub fn symmetric_eve(x1: usize, y1: usize, x2: usize, y2: usize) -> String {
    EveSymbol::Symmetric([x1 as u8, y1 as u8, x2 as u8, y2 as u8]).to_string()
}

pub fn joint_eve(werner: &str, symmetric: &str) -> String {
    format!("{werner}|{symmetric}")
}

/// Parses a string of decimal digits, one per subsystem.
pub fn digits(label: &str) -> Option<Vec<u8>> {
    label
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EveSymbol {
    Werner(u8, u8),
    Symmetric([u8; 4]),
    Joint((u8, u8), [u8; 4]),
}

impl fmt::Display for EveSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EveSymbol::Werner(i, j) => write!(f, "z{i}{j}"),
            EveSymbol::Symmetric([a, b, c, d]) => write!(f, "z~{a}{b}{c}{d}"),
            EveSymbol::Joint((i, j), [a, b, c, d]) => write!(f, "z{i}{j}|z~{a}{b}{c}{d}"),
        }
    }
}

impl FromStr for EveSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Structure(format!("unrecognized Eve symbol {s:?}"));
        if let Some((w, t)) = s.split_once('|') {
            return match (w.parse()?, t.parse()?) {
                (EveSymbol::Werner(i, j), EveSymbol::Symmetric(q)) => {
                    Ok(EveSymbol::Joint((i, j), q))
                }
                _ => Err(bad()),
            };
        }
        if let Some(rest) = s.strip_prefix("z~") {
            let d = digits(rest).ok_or_else(bad)?;
            let q: [u8; 4] = d.try_into().map_err(|_| bad())?;
            return Ok(EveSymbol::Symmetric(q));
        }
        if let Some(rest) = s.strip_prefix('z') {
            return match digits(rest).as_deref() {
                Some(&[i, j]) => Ok(EveSymbol::Werner(i, j)),
                _ => Err(bad()),
            };
        }
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for s in ["z01", "z~0122", "z20|z~1011"] {
            assert_eq!(s.parse::<EveSymbol>().unwrap().to_string(), s);
        }
        assert_eq!(werner_eve(1, 2), "z12");
        assert_eq!(symmetric_eve(0, 1, 0, 0), "z~0100");
        assert_eq!(joint_eve("z00", "z~0001"), "z00|z~0001");
    }

    #[test]
    fn garbage_is_rejected() {
        for s in ["", "x01", "z1", "z~012", "z01|z02", "z~0100|z01"] {
            assert!(s.parse::<EveSymbol>().is_err(), "{s}");
        }
    }
}
