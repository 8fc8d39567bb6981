//! 256-bit symbol membership vectors.
//!
//! Every STE+ cell holds one of these as its state table: bit `b` is set when
//! the cell matches input byte `b`.

use std::fmt;

/// A set of byte values, stored as four 64-bit words (bit `b` of word `b / 64`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SymbolClass([u64; 4]);

impl SymbolClass {
    pub const EMPTY: SymbolClass = SymbolClass([0; 4]);
    pub const FULL: SymbolClass = SymbolClass([u64::MAX; 4]);

    pub fn single(byte: u8) -> Self {
        let mut class = Self::EMPTY;
        class.insert(byte);
        class
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut class = Self::EMPTY;
        for &b in bytes {
            class.insert(b);
        }
        class
    }

    #[inline]
    pub fn contains(&self, byte: u8) -> bool {
        self.0[(byte >> 6) as usize] >> (byte & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, byte: u8) {
        self.0[(byte >> 6) as usize] |= 1 << (byte & 63);
    }

    pub fn remove(&mut self, byte: u8) {
        self.0[(byte >> 6) as usize] &= !(1 << (byte & 63));
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &SymbolClass) -> SymbolClass {
        let mut words = self.0;
        for (w, o) in words.iter_mut().zip(other.0) {
            *w |= o;
        }
        SymbolClass(words)
    }

    pub fn intersection(&self, other: &SymbolClass) -> SymbolClass {
        let mut words = self.0;
        for (w, o) in words.iter_mut().zip(other.0) {
            *w &= o;
        }
        SymbolClass(words)
    }

    pub fn difference(&self, other: &SymbolClass) -> SymbolClass {
        let mut words = self.0;
        for (w, o) in words.iter_mut().zip(other.0) {
            *w &= !o;
        }
        SymbolClass(words)
    }

    pub fn is_subset(&self, other: &SymbolClass) -> bool {
        self.difference(other).is_empty()
    }

    /// Member bytes in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&b| self.contains(b))
    }

    /// 64 lowercase hex digits. Byte pair `k` (digits `2k..2k+2`) encodes
    /// symbols `8k..8k+8`, least significant bit = symbol `8k`.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(64);
        for k in 0..32 {
            let byte = (self.0[k / 8] >> ((k % 8) * 8)) as u8;
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(hex: &str) -> Option<Self> {
        if hex.len() != 64 || !hex.is_ascii() {
            return None;
        }
        let mut words = [0u64; 4];
        for k in 0..32 {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16).ok()?;
            words[k / 8] |= (byte as u64) << ((k % 8) * 8);
        }
        Some(SymbolClass(words))
    }
}

impl fmt::Debug for SymbolClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for b in self.iter() {
            if b.is_ascii_graphic() {
                write!(f, "{}", b as char)?;
            } else {
                write!(f, "\\x{b:02x}")?;
            }
        }
        write!(f, "}}")
    }
}

impl FromIterator<u8> for SymbolClass {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut class = Self::EMPTY;
        for b in iter {
            class.insert(b);
        }
        class
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn membership() {
        let class = SymbolClass::from_bytes(b"ACGT");
        assert!(class.contains(b'A') && class.contains(b'T'));
        assert!(!class.contains(b'a'));
        assert_eq!(class.len(), 4);
        assert_eq!(class.iter().collect::<Vec<_>>(), b"ACGT".to_vec());
        assert!(SymbolClass::FULL.contains(255) && SymbolClass::FULL.contains(0));
    }

    #[test]
    fn hex_layout() {
        assert_eq!(
            SymbolClass::single(0).to_hex(),
            format!("01{}", "0".repeat(62))
        );
        assert_eq!(
            SymbolClass::single(255).to_hex(),
            format!("{}80", "0".repeat(62))
        );
        // 'A' = 65 = 8 * 8 + 1
        let hex = SymbolClass::single(b'A').to_hex();
        assert_eq!(&hex[16..18], "02");
        assert_eq!(SymbolClass::from_hex("zz"), None);
    }

    proptest! {
        #[test]
        fn hex_round_trip(bytes in proptest::collection::vec(any::<u8>(), 0..40)) {
            let class = SymbolClass::from_bytes(&bytes);
            prop_assert_eq!(SymbolClass::from_hex(&class.to_hex()), Some(class));
        }
    }
}
