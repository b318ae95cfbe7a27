//! JSON documents for automata and datasets, plus a flat CSV export.
//!
//! Output is canonical: fixed key order, states in declaration order and
//! transitions sorted by source state then symbol, so the same automaton
//! always serializes to the same bytes.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{
    validate_producer, validate_transducer, Automaton, Producer, StateKind, Transducer, Transition, Violation,
};
use crate::chain::{ChainDataset, FORMAT_VERSION};
use crate::symbol::Symbol;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse { line: usize, column: usize, reason: String },
    #[error("unsupported format_version {0}")]
    UnsupportedVersion(u32),
    #[error("document describes an invalid automaton: {0:?}")]
    Validation(Vec<Violation>),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            return IoError::Io(e.into());
        }
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            reason: e.to_string(),
        }
    }
}

/// Either kind of automaton, as read from a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyAutomaton {
    Producer(Producer),
    Transducer(Transducer),
}

impl From<Producer> for AnyAutomaton {
    fn from(p: Producer) -> Self {
        AnyAutomaton::Producer(p)
    }
}

impl From<Transducer> for AnyAutomaton {
    fn from(t: Transducer) -> Self {
        AnyAutomaton::Transducer(t)
    }
}

/// On-disk form of an automaton.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomatonDocument {
    pub format_version: u32,
    #[serde(flatten)]
    pub body: DocumentBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DocumentBody {
    Producer {
        states: Vec<String>,
        initial: String,
        alphabet: BTreeSet<Symbol>,
        transitions: Vec<Transition>,
    },
    Transducer {
        states: Vec<String>,
        initial: String,
        input_alphabet: BTreeSet<Symbol>,
        output_alphabet: BTreeSet<Symbol>,
        input_states: Vec<String>,
        output_states: Vec<String>,
        #[serde(default)]
        deterministic: bool,
        transitions: Vec<Transition>,
    },
}

impl AutomatonDocument {
    pub fn from_automaton(a: &AnyAutomaton) -> Self {
        let body = match a {
            AnyAutomaton::Producer(p) => DocumentBody::Producer {
                states: p.state_names().to_vec(),
                initial: p.state_name(p.initial()).to_owned(),
                alphabet: p.alphabet().clone(),
                transitions: p.transitions(),
            },
            AnyAutomaton::Transducer(t) => DocumentBody::Transducer {
                states: t.state_names().to_vec(),
                initial: t.state_name(t.initial()).to_owned(),
                input_alphabet: t.input_alphabet().clone(),
                output_alphabet: t.output_alphabet().clone(),
                input_states: t.input_states().map(|s| t.state_name(s).to_owned()).collect(),
                output_states: t.output_states().map(|s| t.state_name(s).to_owned()).collect(),
                deterministic: t.is_flagged_deterministic(),
                transitions: t.transitions(),
            },
        };
        AutomatonDocument {
            format_version: FORMAT_VERSION,
            body,
        }
    }

    /// Builds the automaton and runs its validator.
    pub fn into_automaton(self) -> Result<AnyAutomaton, IoError> {
        if self.format_version != FORMAT_VERSION {
            return Err(IoError::UnsupportedVersion(self.format_version));
        }
        match self.body {
            DocumentBody::Producer {
                states,
                initial,
                alphabet,
                transitions,
            } => {
                let p = Producer::from_parts(states, alphabet, &transitions, &initial).map_err(IoError::Validation)?;
                let violations = validate_producer(&p);
                if !violations.is_empty() {
                    return Err(IoError::Validation(violations));
                }
                Ok(AnyAutomaton::Producer(p))
            }
            DocumentBody::Transducer {
                states,
                initial,
                input_alphabet,
                output_alphabet,
                input_states,
                output_states,
                deterministic,
                transitions,
            } => {
                let classified = classify(states, &input_states, &output_states)?;
                let t = Transducer::from_parts(
                    classified,
                    input_alphabet,
                    output_alphabet,
                    &transitions,
                    &initial,
                    deterministic,
                )
                .map_err(IoError::Validation)?;
                let violations = validate_transducer(&t);
                if !violations.is_empty() {
                    return Err(IoError::Validation(violations));
                }
                Ok(AnyAutomaton::Transducer(t))
            }
        }
    }
}

fn classify(states: Vec<String>, inputs: &[String], outputs: &[String]) -> Result<Vec<(String, StateKind)>, IoError> {
    let mut violations = Vec::new();
    let known: BTreeSet<&String> = states.iter().collect();
    for name in inputs.iter().chain(outputs) {
        if !known.contains(name) {
            violations.push(Violation::UnknownState { state: name.clone() });
        }
    }
    let mut out = Vec::with_capacity(states.len());
    for name in states {
        let (is_in, is_out) = (inputs.contains(&name), outputs.contains(&name));
        match (is_in, is_out) {
            (true, true) => violations.push(Violation::StateClassOverlap { state: name }),
            (false, false) => violations.push(Violation::UnclassifiedState { state: name }),
            (true, false) => out.push((name, StateKind::Input)),
            (false, true) => out.push((name, StateKind::Output)),
        }
    }
    if violations.is_empty() {
        Ok(out)
    } else {
        Err(IoError::Validation(violations))
    }
}

pub fn serialize_automaton(a: &AnyAutomaton) -> String {
    let mut text = serde_json::to_string_pretty(&AutomatonDocument::from_automaton(a)).expect("documents serialize");
    text.push('\n');
    text
}

/// Parses and validates an automaton document.
pub fn parse_automaton(text: &str) -> Result<AnyAutomaton, IoError> {
    let doc: AutomatonDocument = serde_json::from_str(text)?;
    doc.into_automaton()
}

pub fn read_automaton(path: impl AsRef<Path>) -> Result<AnyAutomaton, IoError> {
    parse_automaton(&fs::read_to_string(path)?)
}

pub fn dataset_to_json(d: &ChainDataset) -> String {
    let mut text = serde_json::to_string_pretty(d).expect("datasets serialize");
    text.push('\n');
    text
}

pub fn dataset_from_json(text: &str) -> Result<ChainDataset, IoError> {
    let d: ChainDataset = serde_json::from_str(text)?;
    if d.meta.format_version != FORMAT_VERSION {
        return Err(IoError::UnsupportedVersion(d.meta.format_version));
    }
    Ok(d)
}

pub fn write_dataset(d: &ChainDataset, path: impl AsRef<Path>) -> Result<(), IoError> {
    fs::write(path, dataset_to_json(d))?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<ChainDataset, IoError> {
    dataset_from_json(&fs::read_to_string(path)?)
}

/// One row per observed symbol: `node_id,position,symbol`.
pub fn write_dataset_csv<W: Write>(d: &ChainDataset, out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "position", "symbol"])?;
    for node in &d.nodes {
        for (i, sym) in node.sequence.iter().enumerate() {
            w.write_record([node.id.as_str(), &i.to_string(), sym.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::fixtures::{producer, two_state};
    use crate::chain::{generate_chain_dataset, ChainSpec, Regime};
    use crate::generate::{generate_random_producer, generate_random_transducer, ProducerParams, TransducerParams};
    use crate::noise::NoiseSettings;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn self_loop_round_trip() {
        let p: AnyAutomaton = producer(&["q0"], "a", &[("q0", 'a', "q0")], "q0").into();
        let text = serialize_automaton(&p);
        assert_eq!(parse_automaton(&text).unwrap(), p);
        assert!(text.starts_with("{\n  \"format_version\": 1,\n  \"kind\": \"producer\""), "{text}");
    }

    #[test]
    fn missing_state_is_a_validation_error() {
        let text = r#"{"format_version":1,"kind":"producer","states":["q0"],"initial":"q0",
            "alphabet":["a"],"transitions":[{"from":"q0","symbol":"a","to":"q7"}]}"#;
        match parse_automaton(text) {
            Err(IoError::Validation(v)) => assert_eq!(v, vec![Violation::UnknownState { state: "q7".into() }]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariant_breach_is_a_validation_error() {
        let text = r#"{"format_version":1,"kind":"producer","states":["q0","q1"],"initial":"q0",
            "alphabet":["a"],"transitions":[{"from":"q0","symbol":"a","to":"q0"},{"from":"q1","symbol":"a","to":"q1"}]}"#;
        assert!(matches!(parse_automaton(text), Err(IoError::Validation(_))));
    }

    #[test]
    fn rejects_version_and_syntax() {
        let text = r#"{"format_version":2,"kind":"producer","states":["q0"],"initial":"q0","alphabet":["a"],"transitions":[]}"#;
        assert!(matches!(parse_automaton(text), Err(IoError::UnsupportedVersion(2))));
        match parse_automaton("{\n  \"format_version\": 1,\n  oops") {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transducer_class_errors() {
        let t: AnyAutomaton = two_state().into();
        let mut doc = AutomatonDocument::from_automaton(&t);
        if let DocumentBody::Transducer { input_states, .. } = &mut doc.body {
            input_states.push("o0".into());
        }
        match doc.into_automaton() {
            Err(IoError::Validation(v)) => assert_eq!(v, vec![Violation::StateClassOverlap { state: "o0".into() }]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generated_automata_round_trip_byte_stably() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..200 {
            let p: AnyAutomaton = generate_random_producer(&ProducerParams::default(), &mut rng).unwrap().into();
            let text = serialize_automaton(&p);
            let back = parse_automaton(&text).unwrap();
            assert_eq!(back, p);
            assert_eq!(serialize_automaton(&back), text);
            let AnyAutomaton::Producer(prod) = &p else { unreachable!() };
            let params = TransducerParams {
                transitions: crate::sampling::SamplerSpec::new(1, 1 + i % 3),
                ..Default::default()
            }
            .with_input_alphabet(prod.alphabet().clone());
            let t: AnyAutomaton = generate_random_transducer(&params, &mut rng).unwrap().into();
            let text = serialize_automaton(&t);
            let back = parse_automaton(&text).unwrap();
            assert_eq!(back, t);
            assert_eq!(serialize_automaton(&back), text);
        }
    }

    #[test]
    fn dataset_round_trip_and_csv() {
        let spec = ChainSpec::new(vec![15, 10], 3).with_uniform_noise(Regime::Observational, NoiseSettings::default());
        let (_, d) = generate_chain_dataset(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        write_dataset(&d, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.edges, vec![("X1".to_string(), "X2".to_string())]);

        let mut buf = Vec::new();
        write_dataset_csv(&d, &mut buf).unwrap();
        let rows = String::from_utf8(buf).unwrap().lines().count() - 1;
        assert_eq!(rows, d.nodes.iter().map(|n| n.sequence.len()).sum::<usize>());
    }
}
