use crate::{Error, Result};

/// The gap symbol used in every gapped row.
pub const GAP: u8 = b'-';

/// Ambiguous residue accepted by every alphabet and scored 0 against everything.
pub const UNKNOWN: u8 = b'X';

const ABSENT: u8 = u8::MAX;

/// Ordered set of residue symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    index: [u8; 256],
}

impl Alphabet {
    pub fn new(symbols: &[u8]) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::InvalidParameter(
                "alphabet needs at least two symbols".into(),
            ));
        }
        if symbols.len() >= ABSENT as usize {
            return Err(Error::InvalidParameter("alphabet too large".into()));
        }
        let mut index = [ABSENT; 256];
        let mut out = Vec::with_capacity(symbols.len());
        for &s in symbols {
            let s = s.to_ascii_uppercase();
            if s == GAP || s.is_ascii_whitespace() || !s.is_ascii_graphic() {
                return Err(Error::InvalidParameter(format!(
                    "`{}` cannot be a residue symbol",
                    s as char
                )));
            }
            if index[s as usize] != ABSENT {
                return Err(Error::InvalidParameter(format!(
                    "duplicate alphabet symbol `{}`",
                    s as char
                )));
            }
            index[s as usize] = out.len() as u8;
            out.push(s);
        }
        Ok(Self { symbols: out, index })
    }

    /// The 20 standard amino acids in BLOSUM order.
    pub fn protein() -> Self {
        Self::new(b"ARNDCQEGHILKMFPSTWYV").expect("static alphabet")
    }

    pub fn nucleotide() -> Self {
        Self::new(b"ACGT").expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: u8) -> Option<usize> {
        match self.index[symbol.to_ascii_uppercase() as usize] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    /// Whether `symbol` may appear in an ungapped sequence.
    pub fn accepts(&self, symbol: u8) -> bool {
        let s = symbol.to_ascii_uppercase();
        s == UNKNOWN || self.index_of(s).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_gap_and_duplicates() {
        assert!(Alphabet::new(b"A-").is_err());
        assert!(Alphabet::new(b"AA").is_err());
        assert!(Alphabet::new(b"A").is_err());
    }

    #[test]
    fn unknown_residue_is_accepted() {
        let a = Alphabet::nucleotide();
        assert!(a.accepts(b'x'));
        assert!(a.accepts(b'g'));
        assert!(!a.accepts(b'U'));
        assert_eq!(a.index_of(b'T'), Some(3));
        assert_eq!(Alphabet::protein().len(), 20);
    }
}
