//! Random words from producers, output words from transducers.

use rand::Rng;
use thiserror::Error;

use crate::automata::{
    step, validate_producer, validate_transducer, Automaton, Event, Interleaving, Outgoing, Producer, StateId,
    StateKind, StepError, Transducer, Violation,
};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("output length must be at least 1, got {0}")]
    InvalidLength(usize),
    #[error("automaton is invalid: {0:?}")]
    InvalidAutomaton(Vec<Violation>),
    #[error("input symbol {symbol} at position {position} is not in the input alphabet")]
    InvalidSymbol { symbol: Symbol, position: usize },
    #[error("input exhausted after reading {consumed} symbols; produced {} output symbols", partial.len())]
    InputExhausted { partial: Vec<Symbol>, consumed: usize },
}

/// Picks one outgoing transition uniformly. A single transition is taken
/// without touching the rng.
fn pick<'a, R: Rng + ?Sized>(out: &'a Outgoing, rng: &mut R) -> (&'a Symbol, StateId) {
    let i = if out.len() == 1 { 0 } else { rng.random_range(0..out.len()) };
    let (sym, &to) = out.iter().nth(i).expect("state has an outgoing transition");
    (sym, to)
}

/// An unbounded random walk over a producer, recording what it emitted.
#[derive(Debug)]
pub struct ProducerStream<'a, R> {
    producer: &'a Producer,
    state: StateId,
    rng: R,
    transcript: Vec<Symbol>,
}

impl<'a, R: Rng> ProducerStream<'a, R> {
    /// The producer must be valid; a dead end panics when reached.
    pub fn new(producer: &'a Producer, rng: R) -> Self {
        ProducerStream {
            producer,
            state: producer.initial(),
            rng,
            transcript: Vec::new(),
        }
    }

    pub fn next_symbol(&mut self) -> Symbol {
        let (sym, to) = pick(self.producer.outgoing(self.state), &mut self.rng);
        self.state = to;
        self.transcript.push(sym.clone());
        sym.clone()
    }

    /// Emits `n` more symbols and returns them.
    pub fn pull(&mut self, n: usize) -> &[Symbol] {
        let start = self.transcript.len();
        for _ in 0..n {
            self.next_symbol();
        }
        &self.transcript[start..]
    }

    /// Everything emitted so far.
    pub fn transcript(&self) -> &[Symbol] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<Symbol> {
        self.transcript
    }

    pub fn state(&self) -> StateId {
        self.state
    }
}

impl<R: Rng> Iterator for ProducerStream<'_, R> {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        Some(self.next_symbol())
    }
}

/// Random word of `output_length` symbols from a walk starting at the
/// initial state.
pub fn random_word_from_producer<R: Rng + ?Sized>(
    producer: &Producer,
    output_length: usize,
    rng: &mut R,
) -> Result<Vec<Symbol>, WordError> {
    if output_length == 0 {
        return Err(WordError::InvalidLength(0));
    }
    let violations = validate_producer(producer);
    if !violations.is_empty() {
        return Err(WordError::InvalidAutomaton(violations));
    }
    let mut stream = ProducerStream::new(producer, rng);
    stream.pull(output_length);
    Ok(stream.into_transcript())
}

/// Incremental run of a transducer. The caller supplies input symbols one
/// at a time whenever the run sits in an input state.
#[derive(Debug)]
pub struct TransducerRun<'a, R> {
    transducer: &'a Transducer,
    state: StateId,
    rng: R,
    output: Vec<Symbol>,
    consumed: usize,
    events: Option<Vec<Event>>,
}

impl<'a, R: Rng> TransducerRun<'a, R> {
    pub fn new(transducer: &'a Transducer, rng: R, record_order: bool) -> Self {
        TransducerRun {
            transducer,
            state: transducer.initial(),
            rng,
            output: Vec::new(),
            consumed: 0,
            events: record_order.then(Vec::new),
        }
    }

    /// True when the next step reads input.
    pub fn needs_input(&self) -> bool {
        self.transducer.is_input(self.state)
    }

    /// Reads one input symbol. Only valid while [`Self::needs_input`].
    pub fn feed(&mut self, symbol: &Symbol) -> Result<(), StepError> {
        debug_assert!(self.needs_input());
        let before = self.state;
        self.state = step(self.transducer, before, symbol)?;
        self.consumed += 1;
        self.record(StateKind::Input, symbol.clone(), before);
        Ok(())
    }

    /// Emits one output symbol. Only valid at an output state.
    pub fn emit(&mut self) -> Symbol {
        debug_assert!(!self.needs_input());
        let before = self.state;
        let (sym, to) = pick(self.transducer.outgoing(before), &mut self.rng);
        let sym = sym.clone();
        self.state = to;
        self.output.push(sym.clone());
        self.record(StateKind::Output, sym.clone(), before);
        sym
    }

    fn record(&mut self, kind: StateKind, symbol: Symbol, before: StateId) {
        if let Some(events) = &mut self.events {
            events.push(Event {
                kind,
                symbol,
                state_before: before,
                state_after: self.state,
            });
        }
    }

    pub fn output(&self) -> &[Symbol] {
        &self.output
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn state(&self) -> StateId {
        self.state
    }

    pub fn finish(self) -> TransductionResult {
        TransductionResult {
            output: self.output,
            consumed: self.consumed,
            interleaving: self.events.map(|events| Interleaving { events }),
            final_state: self.state,
        }
    }
}

/// Outcome of a successful transduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransductionResult {
    pub output: Vec<Symbol>,
    /// Number of input symbols read.
    pub consumed: usize,
    /// Present when the run order was requested.
    pub interleaving: Option<Interleaving>,
    pub final_state: StateId,
}

/// Runs `transducer` on `input_word` until it has emitted `output_length`
/// symbols.
///
/// Output states pick uniformly among their transitions; input states read
/// the next input symbol. Fails with [`WordError::InputExhausted`] if the
/// input runs out first.
pub fn random_word_from_transducer<R: Rng + ?Sized>(
    transducer: &Transducer,
    input_word: &[Symbol],
    output_length: usize,
    return_order: bool,
    rng: &mut R,
) -> Result<TransductionResult, WordError> {
    if output_length == 0 {
        return Err(WordError::InvalidLength(0));
    }
    let violations = validate_transducer(transducer);
    if !violations.is_empty() {
        return Err(WordError::InvalidAutomaton(violations));
    }
    if let Some((position, symbol)) = input_word
        .iter()
        .enumerate()
        .find(|(_, s)| !transducer.input_alphabet().contains(*s))
    {
        return Err(WordError::InvalidSymbol {
            symbol: symbol.clone(),
            position,
        });
    }
    let mut run = TransducerRun::new(transducer, rng, return_order);
    while run.output().len() < output_length {
        if run.needs_input() {
            match input_word.get(run.consumed()) {
                Some(sym) => run.feed(sym).expect("receptive input state"),
                None => {
                    let result = run.finish();
                    return Err(WordError::InputExhausted {
                        partial: result.output,
                        consumed: result.consumed,
                    });
                }
            }
        } else {
            run.emit();
        }
    }
    Ok(run.finish())
}
