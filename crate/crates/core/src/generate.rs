//! Random producers and transducers.
//!
//! Generation samples the structural counts, wires labels and targets
//! uniformly at random, then repairs reachability and input-only cycles by
//! retargeting transitions. Labels and out-degrees are never touched by the
//! repairs, so determinism and receptiveness survive them. An attempt that
//! still fails validation is thrown away; after [`MAX_ATTEMPTS`] the
//! generator gives up.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{
    find_input_only_cycle, validate_producer, validate_transducer, Automaton, Outgoing, Producer, StateId,
    StateKind, Transducer, Violation,
};
use crate::sampling::{sample_count, SamplerSpec};
use crate::symbol::Symbol;

pub const MAX_ATTEMPTS: usize = 100;

/// Legal ranges for the count parameters.
pub const MIN_STATES_RANGE: (usize, usize) = (1, 30);
pub const MAX_STATES_LIMIT: usize = 50;
pub const MIN_ALPHABET_RANGE: (usize, usize) = (1, 26);
pub const MAX_ALPHABET_LIMIT: usize = 26;

const LOWERCASE: &str = "abcdefghijklmnopqrstuvwxyz";
const UPPERCASE: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("invalid parameter {param}: {reason}")]
    InvalidParams { param: String, reason: String },
    #[error("cannot pick {requested} output symbols disjoint from the input alphabet; only {available} available")]
    AlphabetExhausted { requested: usize, available: usize },
    #[error("no transition can be retargeted to repair reachability")]
    RepairFailed,
    #[error("no valid automaton after {attempts} attempts; last violations: {violations:?}")]
    GenerationFailed {
        attempts: usize,
        violations: Vec<Violation>,
    },
}

fn invalid(param: &str, reason: impl Into<String>) -> GenerationError {
    GenerationError::InvalidParams {
        param: param.to_owned(),
        reason: reason.into(),
    }
}

/// Structural parameters of a random producer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProducerParams {
    pub states: SamplerSpec,
    pub alphabet: SamplerSpec,
    /// Out-degree of each state, drawn independently per state.
    pub transitions: SamplerSpec,
    /// State names are `{symbol_prefix}{index}`.
    pub symbol_prefix: String,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub verbose: bool,
}

impl Default for ProducerParams {
    fn default() -> Self {
        ProducerParams {
            states: SamplerSpec::new(1, 6),
            alphabet: SamplerSpec::new(1, 8),
            transitions: SamplerSpec::new(1, 4),
            symbol_prefix: "q_".to_owned(),
            verbose: false,
        }
    }
}

impl ProducerParams {
    pub fn validate(&self) -> Result<(), GenerationError> {
        check_counts(&self.states, &self.alphabet, &self.transitions)
    }
}

/// Structural parameters of a random transducer.
///
/// `alphabet` sizes the output alphabet; the input alphabet is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransducerParams {
    pub states: SamplerSpec,
    pub alphabet: SamplerSpec,
    /// Out-degree of each output state. Input states always read the whole
    /// input alphabet.
    pub transitions: SamplerSpec,
    /// Probability that a state becomes an input state.
    pub ratio_i_o: f64,
    /// Left empty in chain templates; filled from the upstream node.
    #[serde(skip_serializing_if = "BTreeSet::is_empty")]
    pub read_input_alphabet: BTreeSet<Symbol>,
    /// When set, states are named `{prefix}{index}` instead of `i_k`/`o_k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol_prefix: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub verbose: bool,
}

impl Default for TransducerParams {
    fn default() -> Self {
        TransducerParams {
            states: SamplerSpec::new(1, 6),
            alphabet: SamplerSpec::new(1, 8),
            transitions: SamplerSpec::new(1, 1),
            ratio_i_o: 0.3,
            read_input_alphabet: BTreeSet::new(),
            symbol_prefix: None,
            verbose: false,
        }
    }
}

impl TransducerParams {
    pub fn with_input_alphabet(mut self, alphabet: BTreeSet<Symbol>) -> Self {
        self.read_input_alphabet = alphabet;
        self
    }

    /// Checks everything except the input alphabet, which templates leave
    /// empty.
    pub fn validate_template(&self) -> Result<(), GenerationError> {
        check_counts(&self.states, &self.alphabet, &self.transitions)?;
        if !(0.0..=1.0).contains(&self.ratio_i_o) {
            return Err(invalid("ratio_i_o", format!("{} is outside [0, 1]", self.ratio_i_o)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), GenerationError> {
        self.validate_template()?;
        if self.read_input_alphabet.is_empty() {
            return Err(invalid("read_input_alphabet", "must not be empty"));
        }
        Ok(())
    }
}

fn check_range(param: &str, value: usize, lo: usize, hi: usize) -> Result<(), GenerationError> {
    if value < lo || value > hi {
        return Err(invalid(param, format!("{value} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_skew(param: &str, spec: &SamplerSpec) -> Result<(), GenerationError> {
    if spec.custom_sampler.is_none() && !spec.skewness.is_finite() {
        return Err(invalid(param, format!("{} is not finite", spec.skewness)));
    }
    spec.check().map_err(|e| invalid(param, e.to_string()))
}

fn check_counts(states: &SamplerSpec, alphabet: &SamplerSpec, transitions: &SamplerSpec) -> Result<(), GenerationError> {
    check_range("min_states", states.min, MIN_STATES_RANGE.0, MIN_STATES_RANGE.1)?;
    check_range("max_states", states.max, states.min, MAX_STATES_LIMIT)?;
    check_range("min_alphabet", alphabet.min, MIN_ALPHABET_RANGE.0, MIN_ALPHABET_RANGE.1)?;
    check_range("max_alphabet", alphabet.max, alphabet.min, MAX_ALPHABET_LIMIT)?;
    check_range("min_transitions", transitions.min, 1, alphabet.max)?;
    check_range("max_transitions", transitions.max, 1, alphabet.max)?;
    if transitions.min > transitions.max {
        return Err(invalid(
            "min_transitions",
            format!("{} exceeds max_transitions {}", transitions.min, transitions.max),
        ));
    }
    check_skew("skw_states", states)?;
    check_skew("skw_alphabet", alphabet)?;
    check_skew("skw_transitions", transitions)?;
    Ok(())
}

fn sample<R: Rng + ?Sized>(param: &str, spec: &SamplerSpec, rng: &mut R) -> Result<usize, GenerationError> {
    sample_count(spec, rng).map_err(|e| invalid(param, e.to_string()))
}

/// The out-degree spec with both bounds capped by the drawn alphabet size.
fn degree_spec(spec: &SamplerSpec, alphabet_size: usize) -> SamplerSpec {
    SamplerSpec {
        min: spec.min.min(alphabet_size),
        max: spec.max.min(alphabet_size),
        ..spec.clone()
    }
}

/// `count` distinct entries of `pool`, in pool order.
fn choose_sorted<T: Clone, R: Rng + ?Sized>(pool: &[T], count: usize, rng: &mut R) -> Vec<T> {
    let mut picked = index::sample(rng, pool.len(), count).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| pool[i].clone()).collect()
}

fn letters(set: &str) -> Vec<Symbol> {
    set.chars()
        .map(|c| Symbol::try_from(c).expect("ascii letter"))
        .collect()
}

/// Generates a random producer that passes [`validate_producer`].
///
/// State `0` is initial. Each state draws its own out-degree, picks that
/// many distinct labels and sends each to a uniformly chosen state.
pub fn generate_random_producer<R: Rng + ?Sized>(params: &ProducerParams, rng: &mut R) -> Result<Producer, GenerationError> {
    params.validate()?;
    let pool = letters(LOWERCASE);
    let mut last = Vec::new();
    for attempt in 1..=MAX_ATTEMPTS {
        let n = sample("states", &params.states, rng)?;
        let k = sample("alphabet", &params.alphabet, rng)?;
        let alphabet = choose_sorted(&pool, k, rng);
        let degrees = degree_spec(&params.transitions, k);
        let mut table = Vec::with_capacity(n);
        for _ in 0..n {
            let d = sample("transitions", &degrees, rng)?;
            let labels = choose_sorted(&alphabet, d, rng);
            let out: Outgoing = labels
                .into_iter()
                .map(|sym| (sym, StateId(rng.random_range(0..n))))
                .collect();
            table.push(out);
        }
        let names = (0..n).map(|i| format!("{}{}", params.symbol_prefix, i)).collect();
        let producer = Producer::from_table(names, alphabet.into_iter().collect(), table, StateId(0));
        if params.verbose {
            eprintln!(
                "generate producer: attempt={attempt} states={n} alphabet={k} transitions={}",
                producer.transitions().len()
            );
        }
        let producer = match repair_reachability(producer, rng) {
            Ok(p) => p,
            Err(_) => continue,
        };
        last = validate_producer(&producer);
        if last.is_empty() {
            return Ok(producer);
        }
        if params.verbose {
            eprintln!("generate producer: attempt={attempt} rejected violations={}", last.len());
        }
    }
    Err(GenerationError::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        violations: last,
    })
}

/// Picks the output alphabet: lowercase letters not used as input, falling
/// back to upper and lower case together when lowercase runs out.
fn output_alphabet<R: Rng + ?Sized>(
    input: &BTreeSet<Symbol>,
    size: usize,
    rng: &mut R,
) -> Result<Vec<Symbol>, GenerationError> {
    let lower: Vec<Symbol> = letters(LOWERCASE).into_iter().filter(|s| !input.contains(s)).collect();
    if size <= lower.len() {
        return Ok(choose_sorted(&lower, size, rng));
    }
    let mut pool = letters(UPPERCASE);
    pool.retain(|s| !input.contains(s));
    pool.extend(lower);
    if size > pool.len() {
        return Err(GenerationError::AlphabetExhausted {
            requested: size,
            available: pool.len(),
        });
    }
    Ok(choose_sorted(&pool, size, rng))
}

/// Each state is an input state with probability `ratio`. At least one
/// output state is kept, and at least one input state when `ratio > 0` and
/// there are two or more states.
fn assign_classes<R: Rng + ?Sized>(n: usize, ratio: f64, rng: &mut R) -> Vec<StateKind> {
    let mut kinds: Vec<StateKind> = (0..n)
        .map(|_| {
            if rng.random_bool(ratio) {
                StateKind::Input
            } else {
                StateKind::Output
            }
        })
        .collect();
    let flip = |kinds: &mut Vec<StateKind>, from: StateKind, to: StateKind, rng: &mut R| {
        let candidates: Vec<usize> = (0..n).filter(|&i| kinds[i] == from).collect();
        if !candidates.is_empty() {
            let i = candidates[rng.random_range(0..candidates.len())];
            kinds[i] = to;
        }
    };
    if !kinds.contains(&StateKind::Output) {
        flip(&mut kinds, StateKind::Input, StateKind::Output, rng);
    }
    if ratio > 0.0 && n >= 2 && !kinds.contains(&StateKind::Input) {
        flip(&mut kinds, StateKind::Output, StateKind::Input, rng);
    }
    kinds
}

fn class_names(kinds: &[StateKind], prefix: Option<&str>) -> Vec<String> {
    if let Some(prefix) = prefix {
        return (0..kinds.len()).map(|i| format!("{prefix}{i}")).collect();
    }
    let (mut inputs, mut outputs) = (0, 0);
    kinds
        .iter()
        .map(|k| match k {
            StateKind::Input => {
                inputs += 1;
                format!("i_{}", inputs - 1)
            }
            StateKind::Output => {
                outputs += 1;
                format!("o_{}", outputs - 1)
            }
        })
        .collect()
}

/// Generates a random transducer reading `params.read_input_alphabet` that
/// passes [`validate_transducer`].
///
/// The initial state is uniform over all states. The result is flagged
/// deterministic when output states are capped at one transition.
pub fn generate_random_transducer<R: Rng + ?Sized>(
    params: &TransducerParams,
    rng: &mut R,
) -> Result<Transducer, GenerationError> {
    params.validate()?;
    let input = &params.read_input_alphabet;
    let mut last = Vec::new();
    for attempt in 1..=MAX_ATTEMPTS {
        let n = sample("states", &params.states, rng)?;
        let k = sample("alphabet", &params.alphabet, rng)?;
        let outputs = output_alphabet(input, k, rng)?;
        let degrees = degree_spec(&params.transitions, k);
        let kinds = assign_classes(n, params.ratio_i_o, rng);
        let mut table = Vec::with_capacity(n);
        for kind in &kinds {
            let labels = match kind {
                StateKind::Input => input.iter().cloned().collect(),
                StateKind::Output => {
                    let d = sample("transitions", &degrees, rng)?;
                    choose_sorted(&outputs, d, rng)
                }
            };
            let out: Outgoing = labels
                .into_iter()
                .map(|sym| (sym, StateId(rng.random_range(0..n))))
                .collect();
            table.push(out);
        }
        let initial = StateId(rng.random_range(0..n));
        let names = class_names(&kinds, params.symbol_prefix.as_deref());
        let mut t = Transducer::from_table(
            names,
            kinds,
            input.clone(),
            outputs.into_iter().collect(),
            table,
            initial,
            degrees.max == 1,
        );
        if params.verbose {
            eprintln!(
                "generate transducer: attempt={attempt} states={n} inputs={} outputs={} output_alphabet={k}",
                t.input_states().count(),
                t.output_states().count()
            );
        }
        // Each repair can undo the other's work; a few rounds settle it.
        for _ in 0..=n {
            if repair_in_place(&mut t, rng).is_err() {
                break;
            }
            t = break_input_only_cycles(t, rng);
            if reachable_count(&t) == n {
                break;
            }
        }
        last = validate_transducer(&t);
        if last.is_empty() {
            return Ok(t);
        }
        if params.verbose {
            eprintln!("generate transducer: attempt={attempt} rejected violations={}", last.len());
        }
    }
    Err(GenerationError::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        violations: last,
    })
}

fn reachable_count<A: Automaton>(a: &A) -> usize {
    crate::automata::reachable_states(a).len()
}

mod sealed {
    use crate::automata::{Outgoing, Producer, Transducer};

    pub trait Table {
        fn table(&mut self) -> &mut Vec<Outgoing>;
    }

    impl Table for Producer {
        fn table(&mut self) -> &mut Vec<Outgoing> {
            self.table_mut()
        }
    }

    impl Table for Transducer {
        fn table(&mut self) -> &mut Vec<Outgoing> {
            self.table_mut()
        }
    }
}

/// Automata whose transition targets the repair passes may rewrite.
pub trait Repairable: Automaton + sealed::Table {}

impl Repairable for Producer {}
impl Repairable for Transducer {}

/// Makes every state reachable by retargeting transitions.
///
/// A breadth-first tree over the reachable part is kept intact; one
/// transition outside that tree is pointed at an unreachable state, which
/// grows the reachable set by at least one each round.
pub fn repair_reachability<A: Repairable, R: Rng + ?Sized>(mut automaton: A, rng: &mut R) -> Result<A, GenerationError> {
    repair_in_place(&mut automaton, rng)?;
    Ok(automaton)
}

fn repair_in_place<A: Repairable, R: Rng + ?Sized>(automaton: &mut A, rng: &mut R) -> Result<(), GenerationError> {
    let n = automaton.state_count();
    loop {
        let mut seen = vec![false; n];
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([automaton.initial()]);
        seen[automaton.initial().0] = true;
        while let Some(s) = queue.pop_front() {
            for (sym, &t) in automaton.outgoing(s) {
                if !seen[t.0] {
                    seen[t.0] = true;
                    tree.insert((s, sym.clone()));
                    queue.push_back(t);
                }
            }
        }
        let unreachable: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
        if unreachable.is_empty() {
            return Ok(());
        }
        let spare: Vec<(StateId, Symbol)> = automaton
            .states()
            .filter(|s| seen[s.0])
            .flat_map(|s| automaton.outgoing(s).keys().map(move |sym| (s, sym.clone())))
            .filter(|edge| !tree.contains(edge))
            .collect();
        if spare.is_empty() {
            return Err(GenerationError::RepairFailed);
        }
        let (from, sym) = spare[rng.random_range(0..spare.len())].clone();
        let to = StateId(unreachable[rng.random_range(0..unreachable.len())]);
        automaton.table()[from.0].insert(sym, to);
    }
}

/// Removes input-only cycles by pointing one transition of each cycle at a
/// uniformly chosen output state.
///
/// Every round turns an input-to-input transition into an input-to-output
/// one, so the loop terminates. Labels are untouched.
pub fn break_input_only_cycles<R: Rng + ?Sized>(mut t: Transducer, rng: &mut R) -> Transducer {
    let outputs: Vec<StateId> = t.output_states().collect();
    if outputs.is_empty() {
        return t;
    }
    while let Some(cycle) = find_input_only_cycle(&t) {
        let at = rng.random_range(0..cycle.len());
        let (from, next) = (cycle[at], cycle[(at + 1) % cycle.len()]);
        let labels: Vec<Symbol> = t
            .outgoing(from)
            .iter()
            .filter(|(_, &to)| to == next)
            .map(|(sym, _)| sym.clone())
            .collect();
        let sym = labels[rng.random_range(0..labels.len())].clone();
        let target = outputs[rng.random_range(0..outputs.len())];
        t.table_mut()[from.0].insert(sym, target);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::fixtures::{producer, set, sym, transducer};
    use crate::automata::{reachable_states, step};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn forced_one_state_producer() {
        let params = ProducerParams {
            states: SamplerSpec::new(1, 1),
            alphabet: SamplerSpec::new(1, 1),
            transitions: SamplerSpec::new(1, 1),
            ..Default::default()
        };
        let p = generate_random_producer(&params, &mut rng(3)).unwrap();
        assert_eq!(p.state_count(), 1);
        assert_eq!(p.alphabet().len(), 1);
        let sym = p.alphabet().iter().next().unwrap();
        assert_eq!(step(&p, StateId(0), sym), Ok(StateId(0)));
        assert_eq!(p.state_name(StateId(0)), "q_0");
    }

    #[test]
    fn figure_one_parameters() {
        let params = ProducerParams {
            states: SamplerSpec::new(4, 6),
            alphabet: SamplerSpec::new(3, 10),
            transitions: SamplerSpec::new(1, 4),
            ..Default::default()
        };
        for seed in 0..200 {
            let p = generate_random_producer(&params, &mut rng(seed)).unwrap();
            assert!((4..=6).contains(&p.state_count()));
            assert!((3..=10).contains(&p.alphabet().len()));
            for s in p.states() {
                let d = p.outgoing(s).len();
                assert!(d >= 1 && d <= 4.min(p.alphabet().len()));
            }
            assert!(validate_producer(&p).is_empty());
            assert!(p.alphabet().iter().all(|s| s.as_str().chars().all(|c| c.is_ascii_lowercase())));
        }
    }

    #[test]
    fn forced_one_state_transducer() {
        let params = TransducerParams {
            states: SamplerSpec::new(1, 1),
            alphabet: SamplerSpec::new(1, 1),
            ratio_i_o: 0.0,
            ..Default::default()
        }
        .with_input_alphabet(set("a"));
        let t = generate_random_transducer(&params, &mut rng(0)).unwrap();
        assert_eq!(t.state_count(), 1);
        assert_eq!(t.kind(StateId(0)), StateKind::Output);
        let out = t.output_alphabet().iter().next().unwrap();
        assert_ne!(out, &sym('a'));
        assert_eq!(step(&t, StateId(0), out), Ok(StateId(0)));
        assert_eq!(t.state_name(StateId(0)), "o_0");
    }

    #[test]
    fn figure_two_parameters() {
        let params = TransducerParams {
            states: SamplerSpec::new(4, 10),
            alphabet: SamplerSpec::new(3, 10),
            transitions: SamplerSpec::new(1, 1),
            ratio_i_o: 0.3,
            ..Default::default()
        }
        .with_input_alphabet(set("bdef"));
        for seed in 0..200 {
            let t = generate_random_transducer(&params, &mut rng(seed)).unwrap();
            assert!(validate_transducer(&t).is_empty(), "seed {seed}");
            assert!(t.is_flagged_deterministic() && t.is_deterministic());
            assert!(t.output_alphabet().is_disjoint(t.input_alphabet()));
            assert!((3..=10).contains(&t.output_alphabet().len()));
        }
    }

    #[test]
    fn uppercase_fallback_and_exhaustion() {
        let all_lower: BTreeSet<Symbol> = letters(LOWERCASE).into_iter().collect();
        let params = TransducerParams {
            alphabet: SamplerSpec::new(3, 3),
            ..Default::default()
        }
        .with_input_alphabet(all_lower.clone());
        let t = generate_random_transducer(&params, &mut rng(1)).unwrap();
        assert!(t.output_alphabet().iter().all(|s| s.as_str().chars().all(|c| c.is_ascii_uppercase())));

        let mut everything = all_lower;
        everything.extend(letters(UPPERCASE));
        let params = params.with_input_alphabet(everything);
        assert_eq!(
            generate_random_transducer(&params, &mut rng(1)),
            Err(GenerationError::AlphabetExhausted {
                requested: 3,
                available: 0
            })
        );
    }

    #[test]
    fn class_assignment_guarantees() {
        let mut r = rng(9);
        for n in 1..8 {
            for _ in 0..200 {
                let kinds = assign_classes(n, 1.0, &mut r);
                assert!(kinds.contains(&StateKind::Output));
                let kinds = assign_classes(n, 0.01, &mut r);
                assert!(kinds.contains(&StateKind::Output));
                if n >= 2 {
                    assert!(kinds.contains(&StateKind::Input));
                }
                let kinds = assign_classes(n, 0.0, &mut r);
                assert!(!kinds.contains(&StateKind::Input));
            }
        }
        let kinds = [StateKind::Output, StateKind::Input, StateKind::Output];
        assert_eq!(class_names(&kinds, None), ["o_0", "i_0", "o_1"]);
        assert_eq!(class_names(&kinds, Some("s")), ["s0", "s1", "s2"]);
    }

    #[test]
    fn reachability_repair_examples() {
        let p = producer(&["q0", "q1"], "ab", &[("q0", 'a', "q1"), ("q1", 'b', "q0")], "q0");
        assert_eq!(repair_reachability(p.clone(), &mut rng(0)).unwrap(), p);

        let p = producer(&["q0", "q1"], "a", &[("q0", 'a', "q0"), ("q1", 'a', "q1")], "q0");
        let fixed = repair_reachability(p, &mut rng(0)).unwrap();
        assert_eq!(fixed.outgoing(StateId(0)).get(&sym('a')), Some(&StateId(1)));
        assert_eq!(fixed.outgoing(StateId(1)).get(&sym('a')), Some(&StateId(1)));

        // q0 only has its tree edge to q1 and q1 is a dead end.
        let p = producer(&["q0", "q1", "q2"], "a", &[("q0", 'a', "q1"), ("q2", 'a', "q2")], "q0");
        assert_eq!(repair_reachability(p, &mut rng(0)), Err(GenerationError::RepairFailed));
    }

    #[test]
    fn cycle_breaking_examples() {
        let t = transducer(
            &["o0", "i0"],
            "ab",
            "z",
            &[("o0", 'z', "i0"), ("i0", 'a', "o0"), ("i0", 'b', "o0")],
            "o0",
        );
        assert_eq!(break_input_only_cycles(t.clone(), &mut rng(0)), t);

        let t = transducer(&["o0", "i0"], "a", "z", &[("o0", 'z', "i0"), ("i0", 'a', "i0")], "o0");
        let fixed = break_input_only_cycles(t, &mut rng(0));
        assert_eq!(fixed.outgoing(StateId(1)).get(&sym('a')), Some(&StateId(0)));
        assert!(validate_transducer(&fixed).is_empty());
    }

    #[test]
    fn repairs_preserve_labels() {
        let params = ProducerParams::default();
        for seed in 0..300 {
            let mut r = rng(seed);
            let p = generate_random_producer(&params, &mut r).unwrap();
            let labels: Vec<Vec<Symbol>> = p.states().map(|s| p.outgoing(s).keys().cloned().collect()).collect();
            // Scramble targets, then repair.
            let mut scrambled = p.clone();
            let n = p.state_count();
            for out in scrambled.table_mut().iter_mut() {
                for target in out.values_mut() {
                    *target = StateId(r.random_range(0..n));
                }
            }
            if let Ok(fixed) = repair_reachability(scrambled, &mut r) {
                assert_eq!(reachable_states(&fixed).len(), n);
                let after: Vec<Vec<Symbol>> = fixed.states().map(|s| fixed.outgoing(s).keys().cloned().collect()).collect();
                assert_eq!(labels, after);
            }
        }
    }

    #[test]
    fn seed_stability() {
        let p1 = generate_random_producer(&ProducerParams::default(), &mut rng(42)).unwrap();
        let p2 = generate_random_producer(&ProducerParams::default(), &mut rng(42)).unwrap();
        assert_eq!(p1, p2);
        let params = TransducerParams::default().with_input_alphabet(set("abc"));
        let t1 = generate_random_transducer(&params, &mut rng(42)).unwrap();
        let t2 = generate_random_transducer(&params, &mut rng(42)).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn parameter_brackets() {
        let bad = |f: fn(&mut ProducerParams)| {
            let mut p = ProducerParams::default();
            f(&mut p);
            match p.validate() {
                Err(GenerationError::InvalidParams { param, .. }) => param,
                other => panic!("expected InvalidParams, got {other:?}"),
            }
        };
        assert_eq!(bad(|p| p.states.min = 0), "min_states");
        assert_eq!(bad(|p| p.states = SamplerSpec::new(31, 40)), "min_states");
        assert_eq!(bad(|p| p.states.max = 51), "max_states");
        assert_eq!(bad(|p| p.states = SamplerSpec::new(5, 4)), "max_states");
        assert_eq!(bad(|p| p.alphabet.min = 0), "min_alphabet");
        assert_eq!(bad(|p| p.alphabet = SamplerSpec::new(27, 27)), "min_alphabet");
        assert_eq!(bad(|p| p.alphabet.max = 27), "max_alphabet");
        assert_eq!(bad(|p| p.transitions.min = 0), "min_transitions");
        assert_eq!(bad(|p| p.transitions.max = 9), "max_transitions");
        assert_eq!(bad(|p| p.transitions = SamplerSpec::new(3, 2)), "min_transitions");
        assert_eq!(bad(|p| p.states.skewness = f64::INFINITY), "skw_states");

        let mut t = TransducerParams::default().with_input_alphabet(set("a"));
        t.ratio_i_o = 1.5;
        assert!(matches!(t.validate(), Err(GenerationError::InvalidParams { param, .. }) if param == "ratio_i_o"));
        let t = TransducerParams::default();
        assert!(matches!(t.validate(), Err(GenerationError::InvalidParams { param, .. }) if param == "read_input_alphabet"));
    }
}
