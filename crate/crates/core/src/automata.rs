//! Producer and transducer automata, their step semantics and the structural
//! checks every generated automaton has to pass.
//!
//! States are addressed by [`StateId`], an index into the automaton's state
//! list. Names are kept alongside for serialization and diagnostics.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Outgoing transitions of one state, keyed by label.
pub type Outgoing = BTreeMap<Symbol, StateId>;

/// A named transition, the exchange form used by constructors and documents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub symbol: Symbol,
    pub to: String,
}

impl Transition {
    pub fn new(from: impl Into<String>, symbol: Symbol, to: impl Into<String>) -> Self {
        Transition {
            from: from.into(),
            symbol,
            to: to.into(),
        }
    }
}

/// Class of a transducer state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// Reads one symbol of the upstream sequence.
    Input,
    /// Emits one symbol.
    Output,
}

/// A single structural defect. Validators return these as data.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    #[error("state {state:?} is declared twice")]
    DuplicateState { state: String },
    #[error("unknown state {state:?}")]
    UnknownState { state: String },
    #[error("state {state:?} is both an input and an output state")]
    StateClassOverlap { state: String },
    #[error("state {state:?} is neither an input nor an output state")]
    UnclassifiedState { state: String },
    #[error("more than one transition from {state:?} on {symbol}")]
    DuplicateTransition { state: String, symbol: Symbol },
    #[error("transition from {state:?} uses {symbol}, which is not in the alphabet")]
    UnknownSymbol { state: String, symbol: Symbol },
    #[error("transition from {state:?} on {symbol} has the wrong label class for the state")]
    MislabeledTransition { state: String, symbol: Symbol },
    #[error("state {state:?} has no outgoing transition")]
    DeadEnd { state: String },
    #[error("state {state:?} is unreachable from the initial state")]
    Unreachable { state: String },
    #[error("input state {state:?} cannot read {symbol}")]
    NotReceptive { state: String, symbol: Symbol },
    #[error("input-only cycle through {states:?}")]
    InputOnlyCycle { states: Vec<String> },
    #[error("input and output alphabets share {symbols:?}")]
    AlphabetOverlap { symbols: Vec<Symbol> },
    #[error("deterministic transducer has several transitions at output state {state:?}")]
    NondeterministicOutput { state: String },
    #[error("transducer has no output state")]
    NoOutputState,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("no transition from {state} on {symbol}")]
    NoTransition { state: StateId, symbol: Symbol },
    #[error("state {0} does not exist")]
    UnknownState(StateId),
}

/// Read access shared by producers and transducers.
pub trait Automaton {
    fn state_names(&self) -> &[String];
    fn initial(&self) -> StateId;
    fn outgoing(&self, state: StateId) -> &Outgoing;

    fn state_count(&self) -> usize {
        self.state_names().len()
    }

    fn state_name(&self, state: StateId) -> &str {
        &self.state_names()[state.0]
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_names()
            .iter()
            .position(|n| n == name)
            .map(StateId)
    }

    fn states(&self) -> std::iter::Map<std::ops::Range<usize>, fn(usize) -> StateId> {
        (0..self.state_count()).map(StateId as fn(usize) -> StateId)
    }

    /// All transitions in canonical order: by source index, then symbol.
    fn transitions(&self) -> Vec<Transition> {
        self.states()
            .flat_map(|s| {
                self.outgoing(s).iter().map(move |(sym, &to)| {
                    Transition::new(self.state_name(s), sym.clone(), self.state_name(to))
                })
            })
            .collect()
    }
}

/// A DFA without accepting states that emits symbols by walking its
/// transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Producer {
    states: Vec<String>,
    alphabet: BTreeSet<Symbol>,
    transitions: Vec<Outgoing>,
    initial: StateId,
}

impl Producer {
    /// Assembles a producer from named parts.
    ///
    /// Only reference errors (unknown or duplicate states, conflicting
    /// transitions) are rejected here. Run [`validate_producer`] for the
    /// remaining invariants.
    pub fn from_parts(
        states: Vec<String>,
        alphabet: BTreeSet<Symbol>,
        transitions: &[Transition],
        initial: &str,
    ) -> Result<Self, Vec<Violation>> {
        let (index, table, initial) = link(&states, transitions, initial)?;
        debug_assert_eq!(index.len(), states.len());
        Ok(Producer {
            states,
            alphabet,
            transitions: table,
            initial,
        })
    }

    pub(crate) fn from_table(
        states: Vec<String>,
        alphabet: BTreeSet<Symbol>,
        transitions: Vec<Outgoing>,
        initial: StateId,
    ) -> Self {
        debug_assert_eq!(states.len(), transitions.len());
        Producer {
            states,
            alphabet,
            transitions,
            initial,
        }
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub(crate) fn table_mut(&mut self) -> &mut Vec<Outgoing> {
        &mut self.transitions
    }
}

impl Automaton for Producer {
    fn state_names(&self) -> &[String] {
        &self.states
    }

    fn initial(&self) -> StateId {
        self.initial
    }

    fn outgoing(&self, state: StateId) -> &Outgoing {
        &self.transitions[state.0]
    }
}

/// A DFA whose states are split into input and output states over disjoint
/// input and output alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    states: Vec<String>,
    kinds: Vec<StateKind>,
    input_alphabet: BTreeSet<Symbol>,
    output_alphabet: BTreeSet<Symbol>,
    transitions: Vec<Outgoing>,
    initial: StateId,
    deterministic: bool,
}

impl Transducer {
    /// Assembles a transducer from named, classified states.
    ///
    /// `deterministic` flags the transducer as deterministic: the validator
    /// then requires every output state to have exactly one transition.
    pub fn from_parts(
        states: Vec<(String, StateKind)>,
        input_alphabet: BTreeSet<Symbol>,
        output_alphabet: BTreeSet<Symbol>,
        transitions: &[Transition],
        initial: &str,
        deterministic: bool,
    ) -> Result<Self, Vec<Violation>> {
        let (names, kinds): (Vec<String>, Vec<StateKind>) = states.into_iter().unzip();
        let (_, table, initial) = link(&names, transitions, initial)?;
        Ok(Transducer {
            states: names,
            kinds,
            input_alphabet,
            output_alphabet,
            transitions: table,
            initial,
            deterministic,
        })
    }

    pub(crate) fn from_table(
        states: Vec<String>,
        kinds: Vec<StateKind>,
        input_alphabet: BTreeSet<Symbol>,
        output_alphabet: BTreeSet<Symbol>,
        transitions: Vec<Outgoing>,
        initial: StateId,
        deterministic: bool,
    ) -> Self {
        debug_assert_eq!(states.len(), kinds.len());
        debug_assert_eq!(states.len(), transitions.len());
        Transducer {
            states,
            kinds,
            input_alphabet,
            output_alphabet,
            transitions,
            initial,
            deterministic,
        }
    }

    pub fn input_alphabet(&self) -> &BTreeSet<Symbol> {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &BTreeSet<Symbol> {
        &self.output_alphabet
    }

    pub fn kind(&self, state: StateId) -> StateKind {
        self.kinds[state.0]
    }

    pub fn is_input(&self, state: StateId) -> bool {
        self.kinds[state.0] == StateKind::Input
    }

    pub fn input_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&s| self.is_input(s))
    }

    pub fn output_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&s| !self.is_input(s))
    }

    /// Whether the transducer was generated (or declared) deterministic.
    pub fn is_flagged_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Every output state has exactly one outgoing transition.
    pub fn is_deterministic(&self) -> bool {
        self.output_states()
            .all(|s| self.transitions[s.0].len() == 1)
    }

    pub(crate) fn table_mut(&mut self) -> &mut Vec<Outgoing> {
        &mut self.transitions
    }
}

impl Automaton for Transducer {
    fn state_names(&self) -> &[String] {
        &self.states
    }

    fn initial(&self) -> StateId {
        self.initial
    }

    fn outgoing(&self, state: StateId) -> &Outgoing {
        &self.transitions[state.0]
    }
}

/// One read or emission of a transducer run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// `Input` for a read, `Output` for an emission.
    pub kind: StateKind,
    pub symbol: Symbol,
    pub state_before: StateId,
    pub state_after: StateId,
}

/// The run word of a transducer: reads and emissions in the order they
/// happened.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interleaving {
    pub events: Vec<Event>,
}

impl Interleaving {
    pub fn symbols(&self) -> Vec<Symbol> {
        self.events.iter().map(|e| e.symbol.clone()).collect()
    }

    /// Events chain state to state, and each kind matches its source state.
    pub fn is_consistent(&self, t: &Transducer) -> bool {
        self.events.windows(2).all(|w| w[0].state_after == w[1].state_before)
            && self.events.iter().all(|e| {
                e.kind == t.kind(e.state_before) && step(t, e.state_before, &e.symbol) == Ok(e.state_after)
            })
    }
}

type Linked = (HashMap<String, StateId>, Vec<Outgoing>, StateId);

fn link(states: &[String], transitions: &[Transition], initial: &str) -> Result<Linked, Vec<Violation>> {
    let mut violations = Vec::new();
    let mut index = HashMap::with_capacity(states.len());
    for (i, name) in states.iter().enumerate() {
        if index.insert(name.clone(), StateId(i)).is_some() {
            violations.push(Violation::DuplicateState { state: name.clone() });
        }
    }
    let mut table = vec![Outgoing::new(); states.len()];
    for t in transitions {
        let from = index.get(&t.from);
        let to = index.get(&t.to);
        for (name, id) in [(&t.from, from), (&t.to, to)] {
            if id.is_none() {
                violations.push(Violation::UnknownState { state: name.clone() });
            }
        }
        if let (Some(&from), Some(&to)) = (from, to) {
            if table[from.0].insert(t.symbol.clone(), to).is_some() {
                violations.push(Violation::DuplicateTransition {
                    state: t.from.clone(),
                    symbol: t.symbol.clone(),
                });
            }
        }
    }
    let initial = match index.get(initial) {
        Some(&id) => Some(id),
        None => {
            violations.push(Violation::UnknownState {
                state: initial.to_owned(),
            });
            None
        }
    };
    match initial {
        Some(initial) if violations.is_empty() => Ok((index, table, initial)),
        _ => Err(violations),
    }
}

/// Follows the unique transition labeled `symbol` out of `state`.
pub fn step<A: Automaton + ?Sized>(automaton: &A, state: StateId, symbol: &Symbol) -> Result<StateId, StepError> {
    if state.0 >= automaton.state_count() {
        return Err(StepError::UnknownState(state));
    }
    automaton
        .outgoing(state)
        .get(symbol)
        .copied()
        .ok_or_else(|| StepError::NoTransition {
            state,
            symbol: symbol.clone(),
        })
}

/// Keeps the symbols of `word` that belong to `alphabet`, in order.
pub fn projection(word: &[Symbol], alphabet: &BTreeSet<Symbol>) -> Vec<Symbol> {
    word.iter()
        .filter(|s| alphabet.contains(*s))
        .cloned()
        .collect()
}

/// States reachable from the initial state, by breadth-first search.
pub fn reachable_states<A: Automaton + ?Sized>(automaton: &A) -> BTreeSet<StateId> {
    let mut seen = BTreeSet::new();
    if automaton.state_count() == 0 {
        return seen;
    }
    let mut queue = VecDeque::from([automaton.initial()]);
    seen.insert(automaton.initial());
    while let Some(s) = queue.pop_front() {
        for &t in automaton.outgoing(s).values() {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Returns one cycle made only of input states, if the transducer has one.
///
/// Depth-first search over the subgraph induced by the input states. The
/// cycle is reported in traversal order, starting from the state the back
/// edge points to.
pub fn find_input_only_cycle(t: &Transducer) -> Option<Vec<StateId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let n = t.state_count();
    let mut mark = vec![Mark::White; n];
    for root in t.input_states() {
        if mark[root.0] != Mark::White {
            continue;
        }
        // (state, input successors, next successor to visit)
        let mut stack: Vec<(StateId, Vec<StateId>, usize)> = Vec::new();
        let succ = |s: StateId| -> Vec<StateId> {
            t.outgoing(s)
                .values()
                .copied()
                .filter(|&x| t.is_input(x))
                .collect()
        };
        mark[root.0] = Mark::Grey;
        stack.push((root, succ(root), 0));
        while let Some(frame) = stack.last_mut() {
            if frame.2 == frame.1.len() {
                mark[frame.0 .0] = Mark::Black;
                stack.pop();
                continue;
            }
            let next = frame.1[frame.2];
            frame.2 += 1;
            match mark[next.0] {
                Mark::White => {
                    mark[next.0] = Mark::Grey;
                    let s = succ(next);
                    stack.push((next, s, 0));
                }
                Mark::Grey => {
                    let start = stack
                        .iter()
                        .position(|f| f.0 == next)
                        .expect("grey state is on the stack");
                    return Some(stack[start..].iter().map(|f| f.0).collect());
                }
                Mark::Black => {}
            }
        }
    }
    None
}

fn unreachable_violations<A: Automaton + ?Sized>(a: &A, out: &mut Vec<Violation>) {
    let reach = reachable_states(a);
    for s in a.states() {
        if !reach.contains(&s) {
            out.push(Violation::Unreachable {
                state: a.state_name(s).to_owned(),
            });
        }
    }
}

/// Checks every producer invariant. Empty means valid.
pub fn validate_producer(p: &Producer) -> Vec<Violation> {
    let mut out = Vec::new();
    for s in p.states() {
        let name = p.state_name(s);
        let edges = p.outgoing(s);
        if edges.is_empty() {
            out.push(Violation::DeadEnd { state: name.to_owned() });
        }
        for sym in edges.keys() {
            if !p.alphabet.contains(sym) {
                out.push(Violation::UnknownSymbol {
                    state: name.to_owned(),
                    symbol: sym.clone(),
                });
            }
        }
    }
    unreachable_violations(p, &mut out);
    out
}

/// Checks every transducer invariant. Empty means valid.
pub fn validate_transducer(t: &Transducer) -> Vec<Violation> {
    let mut out = Vec::new();
    let overlap: Vec<Symbol> = t
        .input_alphabet
        .intersection(&t.output_alphabet)
        .cloned()
        .collect();
    if !overlap.is_empty() {
        out.push(Violation::AlphabetOverlap { symbols: overlap });
    }
    for s in t.states() {
        let name = t.state_name(s);
        let edges = t.outgoing(s);
        match t.kind(s) {
            StateKind::Input => {
                for sym in &t.input_alphabet {
                    if !edges.contains_key(sym) {
                        out.push(Violation::NotReceptive {
                            state: name.to_owned(),
                            symbol: sym.clone(),
                        });
                    }
                }
                for sym in edges.keys() {
                    if !t.input_alphabet.contains(sym) {
                        out.push(Violation::MislabeledTransition {
                            state: name.to_owned(),
                            symbol: sym.clone(),
                        });
                    }
                }
                if edges.is_empty() && t.input_alphabet.is_empty() {
                    out.push(Violation::DeadEnd { state: name.to_owned() });
                }
            }
            StateKind::Output => {
                if edges.is_empty() {
                    out.push(Violation::DeadEnd { state: name.to_owned() });
                }
                for sym in edges.keys() {
                    if !t.output_alphabet.contains(sym) {
                        out.push(Violation::MislabeledTransition {
                            state: name.to_owned(),
                            symbol: sym.clone(),
                        });
                    }
                }
                if t.deterministic && edges.len() > 1 {
                    out.push(Violation::NondeterministicOutput { state: name.to_owned() });
                }
            }
        }
    }
    if t.output_states().next().is_none() {
        out.push(Violation::NoOutputState);
    }
    if let Some(cycle) = find_input_only_cycle(t) {
        out.push(Violation::InputOnlyCycle {
            states: cycle.iter().map(|&s| t.state_name(s).to_owned()).collect(),
        });
    }
    unreachable_violations(t, &mut out);
    out
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::symbol::latin;

    fn self_loop() -> Producer {
        producer(&["q0"], "a", &[("q0", 'a', "q0")], "q0")
    }

    #[test]
    fn step_follows_unique_transition() {
        let p = self_loop();
        assert_eq!(step(&p, StateId(0), &sym('a')), Ok(StateId(0)));
        assert_eq!(
            step(&p, StateId(0), &sym('b')),
            Err(StepError::NoTransition {
                state: StateId(0),
                symbol: sym('b')
            })
        );
        assert_eq!(step(&p, StateId(3), &sym('a')), Err(StepError::UnknownState(StateId(3))));

        let t = transducer(&["o0", "i0"], "a", "z", &[("o0", 'z', "i0"), ("i0", 'a', "o0")], "o0");
        let i0 = t.state_id("i0").unwrap();
        assert_eq!(step(&t, i0, &sym('a')), Ok(t.state_id("o0").unwrap()));
    }

    #[test]
    fn projection_examples() {
        let w = latin("azbz");
        assert_eq!(projection(&w, &set("ab")), latin("ab"));
        assert_eq!(projection(&w, &BTreeSet::new()), vec![]);
        assert_eq!(projection(&w, &set("abz")), w);
    }

    #[test]
    fn producer_validation_examples() {
        assert!(validate_producer(&self_loop()).is_empty());

        let disconnected = producer(&["q0", "q1"], "a", &[("q0", 'a', "q0"), ("q1", 'a', "q1")], "q0");
        assert_eq!(
            validate_producer(&disconnected),
            vec![Violation::Unreachable { state: "q1".into() }]
        );

        let dead = producer(&["q0", "q1"], "a", &[("q0", 'a', "q1")], "q0");
        assert_eq!(validate_producer(&dead), vec![Violation::DeadEnd { state: "q1".into() }]);

        let foreign = producer(&["q0"], "a", &[("q0", 'a', "q0"), ("q0", 'x', "q0")], "q0");
        assert_eq!(
            validate_producer(&foreign),
            vec![Violation::UnknownSymbol {
                state: "q0".into(),
                symbol: sym('x')
            }]
        );
    }

    #[test]
    fn construction_rejects_reference_errors() {
        let err = Producer::from_parts(
            vec!["q0".into()],
            set("a"),
            &[Transition::new("q0", sym('a'), "q9")],
            "q0",
        )
        .unwrap_err();
        assert_eq!(err, vec![Violation::UnknownState { state: "q9".into() }]);

        let err = Producer::from_parts(
            vec!["q0".into(), "q0".into()],
            set("a"),
            &[
                Transition::new("q0", sym('a'), "q0"),
                Transition::new("q0", sym('a'), "q0"),
            ],
            "q1",
        )
        .unwrap_err();
        assert!(err.contains(&Violation::DuplicateState { state: "q0".into() }));
        assert!(err.contains(&Violation::UnknownState { state: "q1".into() }));
        assert!(err.iter().any(|v| matches!(v, Violation::DuplicateTransition { .. })));
    }

    #[test]
    fn transducer_validation_examples() {
        assert!(validate_transducer(&two_state()).is_empty());

        let missing_b = transducer(&["o0", "i0"], "ab", "z", &[("o0", 'z', "i0"), ("i0", 'a', "o0")], "o0");
        assert_eq!(
            validate_transducer(&missing_b),
            vec![Violation::NotReceptive {
                state: "i0".into(),
                symbol: sym('b')
            }]
        );

        let cyclic = transducer(
            &["o0", "i0", "i1"],
            "a",
            "z",
            &[("o0", 'z', "i0"), ("i0", 'a', "i1"), ("i1", 'a', "i0")],
            "o0",
        );
        let v = validate_transducer(&cyclic);
        assert!(v.iter().any(|v| matches!(
            v,
            Violation::InputOnlyCycle { states } if {
                let mut s = states.clone();
                s.sort();
                s == ["i0", "i1"]
            }
        )));
    }

    #[test]
    fn transducer_validation_reports_class_breaches() {
        let t = transducer(
            &["o0", "i0"],
            "a",
            "az",
            &[("o0", 'z', "i0"), ("o0", 'a', "i0"), ("i0", 'a', "o0"), ("i0", 'z', "o0")],
            "o0",
        );
        let v = validate_transducer(&t);
        assert!(v.contains(&Violation::AlphabetOverlap { symbols: vec![sym('a')] }));
        assert!(v.contains(&Violation::MislabeledTransition {
            state: "i0".into(),
            symbol: sym('z')
        }));
        assert!(v.contains(&Violation::NondeterministicOutput { state: "o0".into() }));

        let no_output = transducer(&["i0"], "a", "z", &[("i0", 'a', "i0")], "i0");
        let v = validate_transducer(&no_output);
        assert!(v.contains(&Violation::NoOutputState));
        assert!(v.iter().any(|v| matches!(v, Violation::InputOnlyCycle { .. })));
    }

    #[test]
    fn reachability_examples() {
        assert_eq!(reachable_states(&self_loop()), BTreeSet::from([StateId(0)]));
        let p = producer(
            &["q0", "q1", "q2"],
            "ab",
            &[("q0", 'a', "q1"), ("q1", 'b', "q0"), ("q2", 'a', "q2")],
            "q0",
        );
        assert_eq!(reachable_states(&p), BTreeSet::from([StateId(0), StateId(1)]));
    }

    #[test]
    fn input_cycles() {
        assert_eq!(find_input_only_cycle(&two_state()), None);

        let t = transducer(&["i0", "o0"], "a", "z", &[("i0", 'a', "i0"), ("o0", 'z', "i0")], "o0");
        assert_eq!(find_input_only_cycle(&t), Some(vec![StateId(0)]));

        let t = transducer(
            &["i0", "i1", "i2", "o0"],
            "ab",
            "z",
            &[
                ("i0", 'a', "i1"),
                ("i0", 'b', "o0"),
                ("i1", 'b', "i2"),
                ("i1", 'a', "o0"),
                ("i2", 'a', "i0"),
                ("i2", 'b', "o0"),
                ("o0", 'z', "i0"),
            ],
            "o0",
        );
        let mut cycle = find_input_only_cycle(&t).unwrap();
        assert_eq!(cycle.len(), 3);
        let start = cycle.iter().position(|&s| s == StateId(0)).unwrap();
        cycle.rotate_left(start);
        assert_eq!(cycle, vec![StateId(0), StateId(1), StateId(2)]);
    }

    #[test]
    fn transitions_are_canonical() {
        let t = two_state();
        let names: Vec<_> = t
            .transitions()
            .iter()
            .map(|t| format!("{}{}{}", t.from, t.symbol, t.to))
            .collect();
        assert_eq!(names, ["o0zi0", "i0ao0", "i0bo0"]);
    }
}
