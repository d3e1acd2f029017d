//! State partitions: what a source is trusted to tell apart.
//!
//! States sharing a cell are ones the receiving agent does not trust the
//! source to distinguish. A report is widened to every cell it touches.

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::logic::{dnf_of_stateset, models, Signature, State, StateSet};
use crate::metric::strip_comment;

/// A validated partition of all states of a signature.
///
/// Cells are kept sorted by their least member index, so two partitions
/// with the same cells compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StatePartition {
    sig: Signature,
    cells: Vec<StateSet>,
    cell_of_index: Vec<u32>,
}

impl StatePartition {
    pub fn new(sig: &Signature, cells: Vec<StateSet>) -> Result<Self> {
        let mut owner: Vec<Option<usize>> = vec![None; sig.state_count()];
        for (c, cell) in cells.iter().enumerate() {
            sig.check_same(cell.signature())?;
            if cell.is_empty() {
                return Err(Error::EmptyCell { cell: c });
            }
            for i in cell.indices() {
                if let Some(prev) = owner[i] {
                    return Err(Error::OverlappingCells {
                        first: prev,
                        second: c,
                        witness: sig.state(i).to_string(),
                    });
                }
                owner[i] = Some(c);
            }
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::NotExhaustive {
                witness: sig.state(i).to_string(),
            });
        }
        Ok(Self::from_valid_cells(sig, cells))
    }

    fn from_valid_cells(sig: &Signature, mut cells: Vec<StateSet>) -> Self {
        cells.sort_by_key(|c| c.first_index());
        let mut cell_of_index = vec![0u32; sig.state_count()];
        for (c, cell) in cells.iter().enumerate() {
            for i in cell.indices() {
                cell_of_index[i] = c as u32;
            }
        }
        StatePartition {
            sig: sig.clone(),
            cells,
            cell_of_index,
        }
    }

    /// Builds a partition from a cell label per state index.
    pub(crate) fn from_labels(sig: &Signature, labels: &[usize]) -> Self {
        debug_assert_eq!(labels.len(), sig.state_count());
        let mut by_label: Vec<(usize, StateSet)> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match by_label.iter_mut().find(|(k, _)| *k == l) {
                Some((_, set)) => set.insert_index(i),
                None => by_label.push((l, StateSet::from_indices(sig, [i]))),
            }
        }
        Self::from_valid_cells(sig, by_label.into_iter().map(|(_, s)| s).collect())
    }

    /// Parses cells written as state literals separated by `|`, for
    /// example `{sick,diam} {sick} | {diam} {}`.
    pub fn parse(text: &str, sig: &Signature) -> Result<Self> {
        let mut cells = Vec::new();
        for chunk in text.split('|') {
            let states = sig.parse_state_list(chunk)?;
            cells.push(StateSet::from_states(sig, &states)?);
        }
        Self::new(sig, cells)
    }

    /// Parses a partition file: an optional `signature` line, then the
    /// cells (possibly over several lines); `#` starts a comment. A
    /// signature in the file must agree with `sig` when both are given.
    pub fn parse_file(text: &str, sig: Option<&Signature>, atom_cap: usize) -> Result<Self> {
        let mut declared = None;
        let mut body = String::new();
        for (no, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if let Some(rest) = line.strip_prefix("signature") {
                let s = Signature::parse(rest, atom_cap).map_err(|e| e.at_line(no + 1))?;
                if let Some(given) = sig {
                    given.check_same(&s).map_err(|e| e.at_line(no + 1))?;
                }
                declared = Some(s);
            } else if !line.is_empty() {
                body.push(' ');
                body.push_str(line);
            }
        }
        let sig = declared.as_ref().or(sig).ok_or_else(|| {
            Error::Directive("partition file has no `signature` line and none was given".into())
        })?;
        Self::parse(&body, sig)
    }

    /// The one-cell partition: no distinction is trusted.
    pub fn trivial(sig: &Signature) -> Self {
        Self::from_valid_cells(sig, vec![StateSet::full(sig)])
    }

    /// The all-singletons partition: every distinction is trusted.
    pub fn unit(sig: &Signature) -> Self {
        Self::from_valid_cells(
            sig,
            (0..sig.state_count())
                .map(|i| StateSet::from_indices(sig, [i]))
                .collect(),
        )
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn cells(&self) -> &[StateSet] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.cells.len() == 1
    }

    pub fn is_unit(&self) -> bool {
        self.cells.len() == self.sig.state_count()
    }

    /// The cell containing `s`.
    pub fn cell_of(&self, s: &State) -> &StateSet {
        debug_assert_eq!(s.signature(), &self.sig);
        self.cell_of_index(s.index())
    }

    pub fn cell_of_index(&self, index: usize) -> &StateSet {
        &self.cells[self.cell_position(index)]
    }

    pub fn cell_position(&self, index: usize) -> usize {
        self.cell_of_index[index] as usize
    }

    /// Union of the cells meeting `set`.
    pub fn expand_set(&self, set: &StateSet) -> StateSet {
        let mut hit = vec![false; self.cells.len()];
        for i in set.indices() {
            hit[self.cell_position(i)] = true;
        }
        let mut out = StateSet::empty(&self.sig);
        for (cell, _) in self.cells.iter().zip(&hit).filter(|(_, h)| **h) {
            out.union_with(cell);
        }
        out
    }

    /// Cells in display order: ordered by their first member in truth-table order.
    pub fn display_cells(&self) -> Vec<&StateSet> {
        let mut v: Vec<&StateSet> = self.cells.iter().collect();
        v.sort_by_key(|c| {
            c.indices()
                .map(|i| self.sig.display_key(i))
                .min()
                .unwrap_or(usize::MAX)
        });
        v
    }
}

impl fmt::Display for StatePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, cell) in self.display_cells().into_iter().enumerate() {
            if k > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{cell}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for StatePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StatePartition[{self}]")
    }
}

/// Whether every cell of `finer` lies inside some cell of `coarser`.
pub fn is_refinement(finer: &StatePartition, coarser: &StatePartition) -> bool {
    debug_assert_eq!(finer.sig, coarser.sig);
    finer.cells.iter().all(|cell| {
        let mut idx = cell.indices();
        let first = idx.next().expect("cells are nonempty");
        let target = coarser.cell_position(first);
        idx.all(|i| coarser.cell_position(i) == target)
    })
}

/// Union of all cells of `partition` that contain a model of `f`.
pub fn expand(partition: &StatePartition, f: &Formula) -> StateSet {
    partition.expand_set(&models(&partition.sig, f))
}

/// A DNF formula whose models are exactly `expand(partition, f)`.
///
/// Each touched cell contributes its disjunction once, however many models
/// of `f` it holds.
pub fn trust_expansion(partition: &StatePartition, f: &Formula) -> Formula {
    let touched = models(&partition.sig, f);
    partition
        .display_cells()
        .into_iter()
        .filter(|cell| !cell.is_disjoint(&touched))
        .map(dnf_of_stateset)
        .reduce(Formula::or)
        .unwrap_or(Formula::Bottom)
}
