//! Signatures, states and sets of states.
//!
//! A state over a signature of `n` atoms is identified by its index
//! `Σ 2^position` over the atoms it makes true. Sets are bitsets over the
//! `2^n` indices. For display, states are listed in truth-table order: the
//! state making every atom true first, the first atom varying slowest.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::formula::Formula;

/// Default maximum number of atoms in a signature.
pub const DEFAULT_ATOM_CAP: usize = 16;

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered list of distinct atom names. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    atoms: Arc<[String]>,
}

impl Signature {
    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_cap(atoms, DEFAULT_ATOM_CAP)
    }

    pub fn with_cap<I, S>(atoms: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::InvalidSignature("no atoms".into()));
        }
        if atoms.len() > cap {
            return Err(Error::SignatureTooLarge {
                atoms: atoms.len(),
                cap,
            });
        }
        // Indices are u32 and bitsets are allocated eagerly.
        if atoms.len() > 30 {
            return Err(Error::SignatureTooLarge {
                atoms: atoms.len(),
                cap: 30,
            });
        }
        for (i, a) in atoms.iter().enumerate() {
            if !is_identifier(a) || a == "true" || a == "false" {
                return Err(Error::InvalidSignature(format!(
                    "`{a}` is not a valid atom name"
                )));
            }
            if atoms[..i].contains(a) {
                return Err(Error::InvalidSignature(format!("atom `{a}` listed twice")));
            }
        }
        Ok(Signature {
            atoms: atoms.into(),
        })
    }

    /// Parses a whitespace- or comma-separated atom list.
    pub fn parse(text: &str, cap: usize) -> Result<Self> {
        Self::with_cap(
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty()),
            cap,
        )
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn position(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    /// Number of states, `2^len`.
    pub fn state_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    pub fn state(&self, index: usize) -> State {
        assert!(index < self.state_count(), "state index out of range");
        State {
            sig: self.clone(),
            index: index as u32,
        }
    }

    /// Builds a state from the names of its true atoms.
    pub fn state_of<'a, I>(&self, true_atoms: I) -> Result<State>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut index = 0usize;
        for a in true_atoms {
            let p = self
                .position(a)
                .ok_or_else(|| Error::UnknownAtom(a.to_string()))?;
            index |= 1 << p;
        }
        Ok(self.state(index))
    }

    /// Parses a state literal such as `{a,b}` or `{}`.
    pub fn parse_state(&self, text: &str) -> Result<State> {
        let (state, rest) = self.parse_state_prefix(text.trim())?;
        if !rest.trim().is_empty() {
            return Err(Error::Syntax {
                column: text.len() - rest.len() + 1,
                expected: "end of state literal".into(),
                found: rest.trim().to_string(),
            });
        }
        Ok(state)
    }

    /// Parses a sequence of state literals separated by whitespace or commas.
    pub fn parse_state_list(&self, text: &str) -> Result<Vec<State>> {
        let mut out = Vec::new();
        let mut rest = text;
        loop {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
            if rest.is_empty() {
                return Ok(out);
            }
            let (state, tail) = self.parse_state_prefix(rest).map_err(|e| match e {
                Error::Syntax {
                    column,
                    expected,
                    found,
                } => Error::Syntax {
                    column: column + text.len() - rest.len(),
                    expected,
                    found,
                },
                e => e,
            })?;
            out.push(state);
            rest = tail;
        }
    }

    fn parse_state_prefix<'a>(&self, text: &'a str) -> Result<(State, &'a str)> {
        let body = text.strip_prefix('{').ok_or_else(|| Error::Syntax {
            column: 1,
            expected: "`{`".into(),
            found: first_token(text),
        })?;
        let close = body.find('}').ok_or_else(|| Error::Syntax {
            column: text.len() + 1,
            expected: "`}`".into(),
            found: "end of input".into(),
        })?;
        let inner = &body[..close];
        let mut index = 0usize;
        for name in inner.split(',').map(str::trim) {
            if name.is_empty() {
                if inner.trim().is_empty() {
                    continue;
                }
                return Err(Error::Syntax {
                    column: 2,
                    expected: "atom name".into(),
                    found: format!("`{inner}`"),
                });
            }
            let p = self
                .position(name)
                .ok_or_else(|| Error::UnknownAtom(name.to_string()))?;
            index |= 1 << p;
        }
        Ok((self.state(index), &body[close + 1..]))
    }

    pub(crate) fn literal(&self, index: usize) -> String {
        let mut s = String::from("{");
        let mut first = true;
        for (p, a) in self.atoms.iter().enumerate() {
            if index & (1 << p) != 0 {
                if !first {
                    s.push(',');
                }
                s.push_str(a);
                first = false;
            }
        }
        s.push('}');
        s
    }

    /// Sort key giving truth-table order.
    pub(crate) fn display_key(&self, index: usize) -> usize {
        let n = self.len();
        (0..n)
            .filter(|p| index & (1 << p) == 0)
            .map(|p| 1usize << (n - 1 - p))
            .sum()
    }

    pub fn check_same(&self, other: &Signature) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                expected: self.atoms.join(" "),
                found: other.atoms.join(" "),
            })
        }
    }
}

fn first_token(text: &str) -> String {
    match text.split_whitespace().next() {
        Some(t) => format!("`{t}`"),
        None => "end of input".into(),
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.atoms.iter()).finish()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.atoms.join(" "))
    }
}

/// A propositional interpretation: the set of atoms it makes true.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct State {
    sig: Signature,
    index: u32,
}

impl State {
    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn is_true(&self, position: usize) -> bool {
        self.index & (1 << position) != 0
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = &str> + '_ {
        self.sig
            .atoms
            .iter()
            .enumerate()
            .filter(|(p, _)| self.is_true(*p))
            .map(|(_, a)| a.as_str())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sig.literal(self.index()))
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State({self})")
    }
}

/// A set of states over one signature.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    sig: Signature,
    bits: FixedBitSet,
}

impl StateSet {
    pub fn empty(sig: &Signature) -> Self {
        StateSet {
            sig: sig.clone(),
            bits: FixedBitSet::with_capacity(sig.state_count()),
        }
    }

    pub fn full(sig: &Signature) -> Self {
        let mut set = Self::empty(sig);
        set.bits.insert_range(..);
        set
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(sig: &Signature, indices: I) -> Self {
        let mut set = Self::empty(sig);
        for i in indices {
            set.insert_index(i);
        }
        set
    }

    pub fn from_states<'a, I: IntoIterator<Item = &'a State>>(
        sig: &Signature,
        states: I,
    ) -> Result<Self> {
        let mut set = Self::empty(sig);
        for s in states {
            sig.check_same(s.signature())?;
            set.insert_index(s.index());
        }
        Ok(set)
    }

    /// All states satisfying `pred`.
    pub fn filter(sig: &Signature, mut pred: impl FnMut(usize) -> bool) -> Self {
        Self::from_indices(sig, (0..sig.state_count()).filter(|&i| pred(i)))
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn insert_index(&mut self, index: usize) {
        assert!(index < self.sig.state_count(), "state index out of range");
        self.bits.insert(index);
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn contains(&self, state: &State) -> bool {
        state.sig == self.sig && self.contains_index(state.index())
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.sig.state_count()
    }

    /// Member indices in ascending index order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn first_index(&self) -> Option<usize> {
        self.bits.minimum()
    }

    /// Member states in ascending index order.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.indices().map(|i| self.sig.state(i))
    }

    /// Member indices in truth-table order.
    pub fn display_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.indices().collect();
        v.sort_by_key(|&i| self.sig.display_key(i));
        v
    }

    /// State literals in truth-table order.
    pub fn literals(&self) -> Vec<String> {
        self.display_indices()
            .into_iter()
            .map(|i| self.sig.literal(i))
            .collect()
    }

    pub fn union_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.sig, other.sig);
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.sig, other.sig);
        self.bits.intersect_with(&other.bits);
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.sig == other.sig && self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literals().join(" "))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSet[{self}]")
    }
}

/// The states an agent considers possible. Never empty.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BeliefState(StateSet);

impl BeliefState {
    pub fn new(states: StateSet) -> Result<Self> {
        if states.is_empty() {
            Err(Error::InconsistentBeliefs)
        } else {
            Ok(BeliefState(states))
        }
    }

    pub fn from_formula(sig: &Signature, f: &Formula) -> Result<Self> {
        Self::new(models(sig, f))
    }

    pub fn states(&self) -> &StateSet {
        &self.0
    }

    pub fn signature(&self) -> &Signature {
        self.0.signature()
    }

    pub fn into_states(self) -> StateSet {
        self.0
    }

    /// Canonical DNF describing the belief state.
    pub fn to_formula(&self) -> Formula {
        dnf_of_stateset(&self.0)
    }
}

impl fmt::Display for BeliefState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Every state of `sig`.
pub fn all_states(sig: &Signature) -> StateSet {
    StateSet::full(sig)
}

/// Whether `f` is true in `s`.
pub fn holds(s: &State, f: &Formula) -> bool {
    f.eval(s.index())
}

/// The model set of `f`.
pub fn models(sig: &Signature, f: &Formula) -> StateSet {
    debug_assert!(f.max_atom().is_none_or(|a| a < sig.len()));
    StateSet::filter(sig, |i| f.eval(i))
}

/// The conjunction of literals, in signature order, true exactly in `s`.
pub fn prop_of_state(s: &State) -> Formula {
    conjunction_of_index(s.signature().len(), s.index())
}

pub(crate) fn conjunction_of_index(n: usize, index: usize) -> Formula {
    (0..n)
        .map(|p| {
            if index & (1 << p) != 0 {
                Formula::Atom(p)
            } else {
                Formula::not(Formula::Atom(p))
            }
        })
        .reduce(Formula::and)
        .expect("signature is nonempty")
}

/// Disjunction of `prop_of_state` over the members of `set`, listed in
/// truth-table order; `⊥` for the empty set.
pub fn dnf_of_stateset(set: &StateSet) -> Formula {
    let n = set.signature().len();
    set.display_indices()
        .into_iter()
        .map(|i| conjunction_of_index(n, i))
        .reduce(Formula::or)
        .unwrap_or(Formula::Bottom)
}
