use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use depseq::sampling::SamplerSpec;
use depseq::{ProducerParams, TransducerParams};

#[derive(Debug, Parser)]
#[command(name = "depseq", version, about = "Random automata and dependent event sequences with known causal ground truth")]
pub struct Cli {
    /// Seed for every random draw. Drawn from system entropy (and printed to
    /// stderr) when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random automaton.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Random word from a producer.
    Word(WordArgs),
    /// Run a transducer on an input word.
    Transduce(TransduceArgs),
    /// Add noise to a word.
    #[command(subcommand)]
    Noise(NoiseCommand),
    /// Generate a chain X1 -> ... -> Xn and its dataset.
    Chain(ChainArgs),
    /// Render an automaton.
    Render(RenderArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    Producer(ProducerArgs),
    Transducer(TransducerArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProducerArgs {
    #[arg(long, default_value_t = 1)]
    pub min_states: usize,
    #[arg(long, default_value_t = 6)]
    pub max_states: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub skw_states: f64,
    #[arg(long, default_value_t = 1)]
    pub min_alphabet: usize,
    #[arg(long, default_value_t = 8)]
    pub max_alphabet: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub skw_alphabet: f64,
    #[arg(long, default_value_t = 1)]
    pub min_transitions: usize,
    #[arg(long, default_value_t = 4)]
    pub max_transitions: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub skw_transitions: f64,
    /// Prefix of state names.
    #[arg(long, default_value = "q_")]
    pub symbol_prefix: String,
    /// Log generation steps to stderr.
    #[arg(long)]
    pub verbose: bool,
}

impl From<&ProducerArgs> for ProducerParams {
    fn from(a: &ProducerArgs) -> Self {
        ProducerParams {
            states: SamplerSpec::skewed(a.min_states, a.max_states, a.skw_states),
            alphabet: SamplerSpec::skewed(a.min_alphabet, a.max_alphabet, a.skw_alphabet),
            transitions: SamplerSpec::skewed(a.min_transitions, a.max_transitions, a.skw_transitions),
            symbol_prefix: a.symbol_prefix.clone(),
            verbose: a.verbose,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TransducerArgs {
    /// Input symbols, e.g. `abc` or `a,b,c`.
    #[arg(long, conflicts_with = "input_from", required_unless_present = "input_from")]
    pub input_alphabet: Option<String>,
    /// Read the input alphabet from a producer (or a transducer's output
    /// alphabet) document.
    #[arg(long)]
    pub input_from: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    pub ratio_i_o: f64,
    #[arg(long, default_value_t = 1)]
    pub min_states: usize,
    #[arg(long, default_value_t = 6)]
    pub max_states: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub skw_states: f64,
    #[arg(long, default_value_t = 1)]
    pub min_alphabet: usize,
    #[arg(long, default_value_t = 8)]
    pub max_alphabet: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub skw_alphabet: f64,
    #[arg(long, default_value_t = 1)]
    pub min_transitions: usize,
    #[arg(long, default_value_t = 1)]
    pub max_transitions: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub skw_transitions: f64,
    /// Name states `{prefix}{index}` instead of `i_k`/`o_k`.
    #[arg(long)]
    pub symbol_prefix: Option<String>,
    #[arg(long)]
    pub verbose: bool,
}

impl From<&TransducerArgs> for TransducerParams {
    fn from(a: &TransducerArgs) -> Self {
        TransducerParams {
            states: SamplerSpec::skewed(a.min_states, a.max_states, a.skw_states),
            alphabet: SamplerSpec::skewed(a.min_alphabet, a.max_alphabet, a.skw_alphabet),
            transitions: SamplerSpec::skewed(a.min_transitions, a.max_transitions, a.skw_transitions),
            ratio_i_o: a.ratio_i_o,
            read_input_alphabet: Default::default(),
            symbol_prefix: a.symbol_prefix.clone(),
            verbose: a.verbose,
        }
    }
}

#[derive(Debug, Args)]
pub struct WordArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub length: usize,
}

#[derive(Debug, Args)]
pub struct TransduceArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long, conflicts_with = "input_file", required_unless_present = "input_file", allow_hyphen_values = true)]
    pub input: Option<String>,
    #[arg(long)]
    pub input_file: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub length: usize,
    /// Also print the interleaving of reads and emissions.
    #[arg(long)]
    pub return_order: bool,
}

#[derive(Debug, Subcommand)]
pub enum NoiseCommand {
    /// Random insertions and deletions.
    Insdel(InsDelArgs),
    /// Random substitutions; the length is preserved.
    Replace(ReplaceArgs),
}

#[derive(Debug, Args)]
pub struct WordSource {
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub word: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Symbols noise may use. Defaults to the distinct symbols of the word.
    #[arg(long)]
    pub alphabet: Option<String>,
}

#[derive(Debug, Args)]
pub struct InsDelArgs {
    #[command(flatten)]
    pub source: WordSource,
    #[arg(long, default_value_t = 0.1)]
    pub noise_level: f64,
    /// Exact number of operations; overrides --noise-level.
    #[arg(long)]
    pub n_change: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub prob_insert: f64,
}

#[derive(Debug, Args)]
pub struct ReplaceArgs {
    #[command(flatten)]
    pub source: WordSource,
    #[arg(long, default_value_t = 0.1)]
    pub noise_level: f64,
    #[arg(long)]
    pub n_change: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegimeArg {
    Clean,
    Observational,
    Propagated,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NoiseKindArg {
    Insdel,
    Replace,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Number of nodes. Defaults to the number of --lengths, or 2.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Target length per node, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    /// JSON chain spec; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Apply this noise kind to every node.
    #[arg(long, value_enum)]
    pub noise_kind: Option<NoiseKindArg>,
    #[arg(long)]
    pub noise_level: Option<f64>,
    #[arg(long)]
    pub prob_insert: Option<f64>,
    /// Also write the observed sequences as CSV (node_id,position,symbol).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write every node's automaton as `<dir>/<node>.json`.
    #[arg(long)]
    pub automata_dir: Option<PathBuf>,
    /// Generate this many chains with derived seeds; --out is then a
    /// directory receiving `chain_<i>.json`.
    #[arg(long)]
    pub batch: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RenderFormat {
    Dot,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long, value_enum, default_value_t = RenderFormat::Dot)]
    pub format: RenderFormat,
}

#[cfg(test)]
mod tests {
    use super::*;
    use depseq::noise::NoiseSettings;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn producer_defaults_match_library() {
        let Command::Gen(GenCommand::Producer(a)) = parse(&["depseq", "gen", "producer"]).command else {
            panic!()
        };
        assert_eq!(ProducerParams::from(&a), ProducerParams::default());
    }

    #[test]
    fn transducer_defaults_match_library() {
        let Command::Gen(GenCommand::Transducer(a)) =
            parse(&["depseq", "gen", "transducer", "--input-alphabet", "ab"]).command
        else {
            panic!()
        };
        assert_eq!(TransducerParams::from(&a), TransducerParams::default());
    }

    #[test]
    fn word_and_noise_defaults() {
        // (command line, expected length / level / prob_insert)
        let Command::Word(w) = parse(&["depseq", "word", "--automaton", "p.json"]).command else { panic!() };
        assert_eq!(w.length, 10);
        let Command::Transduce(t) = parse(&["depseq", "transduce", "--automaton", "t.json", "--input", "ab"]).command
        else {
            panic!()
        };
        assert_eq!(t.length, 10);
        assert!(!t.return_order);
        let lib = NoiseSettings::default();
        let Command::Noise(NoiseCommand::Insdel(n)) = parse(&["depseq", "noise", "insdel", "--word", "ab"]).command
        else {
            panic!()
        };
        assert_eq!((n.noise_level, n.prob_insert, n.n_change), (lib.noise_level, lib.prob_insert, None));
        let Command::Noise(NoiseCommand::Replace(n)) = parse(&["depseq", "noise", "replace", "--word", "ab"]).command
        else {
            panic!()
        };
        assert_eq!((n.noise_level, n.n_change), (lib.noise_level, None));
    }

    #[test]
    fn negative_skew_parses() {
        let Command::Gen(GenCommand::Producer(a)) = parse(&["depseq", "gen", "producer", "--skw-states", "-4"]).command
        else {
            panic!()
        };
        assert_eq!(a.skw_states, -4.0);
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = parse(&["depseq", "gen", "producer", "--seed", "5", "--out", "x.json"]);
        assert_eq!(cli.seed, Some(5));
        assert_eq!(cli.out.unwrap().to_str(), Some("x.json"));
    }
}
