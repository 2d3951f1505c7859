//! Subset keys and the memo table holding `g` on a subset lattice.

use std::fmt::{self, Write as _};

use crate::database::{IndividualId, Record};
use crate::error::{Error, Result};

/// Largest root database a memo table will be allocated for.
pub const MAX_MEMO_RECORDS: usize = 40;

/// A subset of a root database, as a bitmask over its canonical record order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    /// The subset containing all of the first `n` records.
    pub fn full(n: usize) -> Self {
        debug_assert!(n < 64);
        Subset((1u64 << n) - 1)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Subset(indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1u64 << i))
    }

    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | (1u64 << i))
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Indices of the members, ascending.
    pub fn members(self) -> Members {
        Members(self.0)
    }

    /// Every subset of `self`, including `∅` and `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(Subset(cur))
        })
    }
}

impl fmt::LowerHex for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// `g` values keyed by subsets of a root database.
///
/// The records are held in the key order: bit `i` of a [`Subset`] refers to
/// `records()[i]`.
#[derive(Debug, Clone)]
pub struct MemoTable<V = f64, G = f64> {
    records: Vec<Record<V>>,
    values: Vec<G>,
    present: Vec<bool>,
}

impl<V, G: Copy + Default> MemoTable<V, G> {
    pub(crate) fn allocate(records: Vec<Record<V>>) -> Result<Self> {
        let n = records.len();
        if n > MAX_MEMO_RECORDS {
            return Err(Error::SizeLimit {
                n,
                limit: MAX_MEMO_RECORDS,
            });
        }
        let size = 1usize << n;
        Ok(MemoTable {
            records,
            values: vec![G::default(); size],
            present: vec![false; size],
        })
    }

    /// Builds a table from explicit entries, for hand-constructed lattices.
    pub fn from_entries(records: Vec<Record<V>>, entries: impl IntoIterator<Item = (Subset, G)>) -> Result<Self> {
        let mut memo = Self::allocate(records)?;
        let root = memo.root();
        for (s, g) in entries {
            if !s.is_subset_of(root) {
                return Err(Error::invalid(format!(
                    "subset {s:#x} outside a root of {} records",
                    memo.records.len()
                )));
            }
            memo.insert(s, g);
        }
        Ok(memo)
    }

    pub(crate) fn insert(&mut self, s: Subset, g: G) {
        let k = s.bits() as usize;
        self.values[k] = g;
        self.present[k] = true;
    }

    pub fn get(&self, s: Subset) -> Option<G> {
        let k = usize::try_from(s.bits()).ok()?;
        match self.present.get(k) {
            Some(true) => Some(self.values[k]),
            _ => None,
        }
    }

    pub fn require(&self, s: Subset) -> Result<G> {
        self.get(s).ok_or(Error::MissingEntry { subset: s.bits() })
    }

    /// `g` at the root database, if computed.
    pub fn value(&self) -> Option<G> {
        self.get(self.root())
    }

    pub fn root(&self) -> Subset {
        Subset::full(self.records.len())
    }

    pub fn records(&self) -> &[Record<V>] {
        &self.records
    }

    pub fn entry_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    /// Stored entries in increasing bitmask order.
    pub fn entries(&self) -> impl Iterator<Item = (Subset, G)> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(k, _)| (Subset(k as u64), self.values[k]))
    }

    /// Every stored subset has all of its own subsets stored.
    pub fn is_downward_closed(&self) -> bool {
        self.entries()
            .all(|(s, _)| s.members().all(|i| self.get(s.without(i)).is_some()))
    }

    pub fn subset_records(&self, s: Subset) -> Vec<&Record<V>> {
        s.members().map(|i| &self.records[i]).collect()
    }

    /// Key of the subset made of the given ids, if all belong to the root.
    pub fn subset_of<'a>(&self, ids: impl IntoIterator<Item = &'a IndividualId>) -> Option<Subset> {
        let mut s = Subset::EMPTY;
        for id in ids {
            let i = self.records.iter().position(|r| &r.id == id)?;
            s = s.with(i);
        }
        Some(s)
    }

    pub fn index_of(&self, id: &IndividualId) -> Option<usize> {
        self.records.iter().position(|r| &r.id == id)
    }
}

impl<V: fmt::Display> MemoTable<V, f64> {
    /// Line-oriented dump: `#` header lines naming the records, then one
    /// `<subset hex> <g>` line per entry with `g` at 17 significant digits.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# memo n={}", self.records.len());
        for (i, r) in self.records.iter().enumerate() {
            let _ = writeln!(out, "# record {i} {} {}", r.id, r.value);
        }
        for (s, g) in self.entries() {
            let _ = writeln!(out, "{s:x} {g:.16e}");
        }
        out
    }
}

/// Reads the entry lines of a [`MemoTable::to_dump`] output.
pub fn parse_dump(text: &str) -> Result<Vec<(Subset, f64)>> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::invalid(format!("memo dump line {}: `{line}`", lineno + 1));
        let (mask, value) = line.split_once(' ').ok_or_else(bad)?;
        let mask = u64::from_str_radix(mask, 16).map_err(|_| bad())?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        entries.push((Subset(mask), value));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subsets_enumerates_all() {
        let s = Subset::from_bits(0b1011);
        let all: Vec<u64> = s.subsets().map(Subset::bits).collect();
        assert_eq!(all, [0, 1, 2, 3, 8, 9, 10, 11]);
        assert_eq!(Subset::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn members_and_edits() {
        let s = Subset::from_indices([0, 3, 5]);
        assert_eq!(s.members().collect::<Vec<_>>(), [0, 3, 5]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(1));
        assert_eq!(s.without(3), Subset::from_indices([0, 5]));
        assert_eq!(Subset::full(3).bits(), 7);
    }

    #[test]
    fn missing_entry_reported() {
        let recs = vec![Record::new("a", 0.0)];
        let memo = MemoTable::<f64, f64>::from_entries(recs, [(Subset::EMPTY, 0.0)]).unwrap();
        assert!(matches!(
            memo.require(Subset::full(1)),
            Err(Error::MissingEntry { subset: 1 })
        ));
        assert!(memo.is_downward_closed());
    }

    #[test]
    fn out_of_root_subset_rejected() {
        let recs = vec![Record::new("a", 0.0)];
        assert!(MemoTable::<f64, f64>::from_entries(recs, [(Subset::from_bits(2), 0.0)]).is_err());
    }

    proptest! {
        #[test]
        fn dump_round_trips(values in proptest::collection::vec(-1e6f64..1e6, 8)) {
            let recs: Vec<_> = (0..3).map(|i| Record::new(i, i as f64)).collect();
            let entries: Vec<_> = values.iter().enumerate()
                .map(|(k, &g)| (Subset::from_bits(k as u64), g)).collect();
            let memo = MemoTable::from_entries(recs, entries.clone()).unwrap();
            let parsed = parse_dump(&memo.to_dump()).unwrap();
            prop_assert_eq!(parsed, entries);
        }
    }
}
