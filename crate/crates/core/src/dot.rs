//! Graphviz rendering.

use std::fmt::Write;

use crate::automata::{Automaton, StateKind};
use crate::io::AnyAutomaton;

#[derive(Debug, Clone)]
pub struct DotOptions {
    /// Graph name; defaults to the automaton kind.
    pub name: Option<String>,
    pub rankdir: String,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            name: None,
            rankdir: "LR".to_owned(),
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders a digraph. Producer states and transducer output states are
/// circles, transducer input states are boxes; an invisible node points at
/// the initial state.
pub fn to_dot(a: &AnyAutomaton, options: &DotOptions) -> String {
    let (default_name, automaton): (&str, &dyn Automaton) = match a {
        AnyAutomaton::Producer(p) => ("producer", p),
        AnyAutomaton::Transducer(t) => ("transducer", t),
    };
    let shape = |s| match a {
        AnyAutomaton::Transducer(t) if t.kind(s) == StateKind::Input => "box",
        _ => "circle",
    };
    let mut out = String::new();
    let name = options.name.as_deref().unwrap_or(default_name);
    let _ = writeln!(out, "digraph {} {{", quote(name));
    let _ = writeln!(out, "  rankdir={};", options.rankdir);
    let _ = writeln!(out, "  __start [shape=point, style=invis];");
    for s in automaton.states() {
        let _ = writeln!(out, "  {} [shape={}];", quote(automaton.state_name(s)), shape(s));
    }
    let _ = writeln!(out, "  __start -> {};", quote(automaton.state_name(automaton.initial())));
    for t in automaton.transitions() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&t.from),
            quote(&t.to),
            quote(t.symbol.as_str())
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::fixtures::{producer, two_state};

    #[test]
    fn self_loop_producer() {
        let p = producer(&["q0"], "a", &[("q0", 'a', "q0")], "q0").into();
        let dot = to_dot(&p, &DotOptions::default());
        assert!(dot.contains("\"q0\" [shape=circle];"));
        assert!(dot.contains("\"q0\" -> \"q0\" [label=\"a\"];"));
        assert_eq!(dot.matches("->").count(), 2);
        assert_eq!(dot, to_dot(&p, &DotOptions::default()));
    }

    #[test]
    fn two_state_transducer_golden() {
        let dot = to_dot(&two_state().into(), &DotOptions::default());
        assert_eq!(dot, include_str!("../tests/golden/two_state.dot"));
    }
}
