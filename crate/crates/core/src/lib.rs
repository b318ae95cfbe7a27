//! Random producer and transducer automata, and the dependent event
//! sequences they generate.
//!
//! A producer is a DFA that emits symbols by walking its transitions. A
//! transducer alternates between reading symbols of an upstream sequence
//! (input states) and emitting its own (output states), so its output
//! causally depends on its input. Chaining one producer with transducers
//! yields sequences `X1 -> X2 -> ... -> Xn` whose causal graph is known.

pub mod automata;
pub mod chain;
pub mod dot;
pub mod generate;
pub mod io;
pub mod noise;
pub mod sampling;
pub mod seed;
pub mod symbol;
pub mod word;

pub use automata::{
    find_input_only_cycle, projection, reachable_states, step, validate_producer, validate_transducer, Automaton,
    Event, Interleaving, Producer, StateId, StateKind, StepError, Transducer, Transition, Violation,
};
pub use chain::{
    build_chain, export_ground_truth, generate_batch, generate_chain_dataset, generate_dataset, Chain, ChainDataset,
    ChainError, ChainSpec, NodeRecord, Regime,
};
pub use dot::{to_dot, DotOptions};
pub use generate::{
    break_input_only_cycles, generate_random_producer, generate_random_transducer, repair_reachability,
    GenerationError, ProducerParams, TransducerParams,
};
pub use io::{parse_automaton, read_dataset, serialize_automaton, write_dataset, AnyAutomaton, IoError};
pub use noise::{
    apply_noise, introduce_insert_or_delete_noise, introduce_replacement_noise, NoiseError, NoiseKind, NoiseRecord,
    NoiseSettings, NoiseSpec,
};
pub use sampling::{sample_count, CountSampler, SamplerSpec, SamplingError};
pub use symbol::{format_word, parse_word, Symbol};
pub use word::{
    random_word_from_producer, random_word_from_transducer, ProducerStream, TransducerRun, TransductionResult,
    WordError,
};
