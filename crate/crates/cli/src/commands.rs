use std::fs;
use std::path::{Path, PathBuf};

use depseq::chain::{generate_batch, generate_chain_dataset, node_id, ChainError, ChainSpec, Regime};
use depseq::io::{dataset_to_json, read_automaton, serialize_automaton, write_dataset_csv, AnyAutomaton, IoError};
use depseq::noise::{apply_noise, NoiseError, NoiseKind, NoiseSettings, NoiseSpec};
use depseq::seed::entropy_seed;
use depseq::symbol::{format_word, parse_word, Symbol, SymbolError};
use depseq::{
    generate_random_producer, generate_random_transducer, random_word_from_producer, random_word_from_transducer,
    to_dot, DotOptions, GenerationError, ProducerParams, TransducerParams, WordError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::{
    ChainArgs, Cli, Command, GenCommand, NoiseCommand, NoiseKindArg, RegimeArg, RenderArgs, TransduceArgs, WordArgs,
    WordSource,
};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID_ARGS: u8 = 2;
pub const EXIT_GENERATION: u8 = 3;
pub const EXIT_INPUT_EXHAUSTED: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        CliError::new(EXIT_INVALID_ARGS, message)
    }
}

impl From<GenerationError> for CliError {
    fn from(e: GenerationError) -> Self {
        let code = match e {
            GenerationError::InvalidParams { .. } => EXIT_INVALID_ARGS,
            _ => EXIT_GENERATION,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        let code = match e {
            WordError::InvalidLength(_) | WordError::InvalidSymbol { .. } => EXIT_INVALID_ARGS,
            WordError::InvalidAutomaton(_) => EXIT_GENERATION,
            WordError::InputExhausted { .. } => EXIT_INPUT_EXHAUSTED,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<NoiseError> for CliError {
    fn from(e: NoiseError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::Validation(_) => EXIT_GENERATION,
            IoError::Parse { .. } | IoError::UnsupportedVersion(_) => EXIT_INVALID_ARGS,
            IoError::Io(_) | IoError::Csv(_) => EXIT_FAILURE,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(EXIT_FAILURE, e.to_string())
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        let code = match &e {
            ChainError::InvalidSpec(_) => EXIT_INVALID_ARGS,
            ChainError::Generation { source, .. } => CliError::from(source.clone()).code,
            ChainError::Noise { .. } => EXIT_INVALID_ARGS,
            ChainError::InputExhausted { .. } => EXIT_INPUT_EXHAUSTED,
        };
        CliError::new(code, e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let seed = entropy_seed();
        eprintln!("seed: {seed}");
        seed
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gen(GenCommand::Producer(args)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(cli.seed));
            let p = generate_random_producer(&ProducerParams::from(&args), &mut rng)?;
            emit(out, &serialize_automaton(&p.into()))
        }
        Command::Gen(GenCommand::Transducer(args)) => {
            let input = match (&args.input_alphabet, &args.input_from) {
                (Some(text), _) => parse_word(text)?.into_iter().collect(),
                (None, Some(path)) => match read_automaton(path)? {
                    AnyAutomaton::Producer(p) => p.alphabet().clone(),
                    AnyAutomaton::Transducer(t) => t.output_alphabet().clone(),
                },
                (None, None) => unreachable!("clap requires one input alphabet source"),
            };
            let params = TransducerParams::from(&args).with_input_alphabet(input);
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(cli.seed));
            let t = generate_random_transducer(&params, &mut rng)?;
            emit(out, &serialize_automaton(&t.into()))
        }
        Command::Word(args) => word(args, cli.seed, out),
        Command::Transduce(args) => transduce(args, cli.seed, out),
        Command::Noise(cmd) => noise(cmd, cli.seed, out),
        Command::Chain(args) => chain(args, cli.seed, out),
        Command::Render(args) => render(args, out),
    }
}

fn word(args: WordArgs, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let AnyAutomaton::Producer(p) = read_automaton(&args.automaton)? else {
        return Err(CliError::invalid(format!("{} is not a producer", args.automaton.display())));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed));
    let w = random_word_from_producer(&p, args.length, &mut rng)?;
    emit(out, &format!("{}\n", format_word(&w)))
}

fn read_word(inline: &Option<String>, file: &Option<PathBuf>) -> Result<Vec<Symbol>> {
    let text = match (inline, file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => fs::read_to_string(path)?,
        (None, None) => unreachable!("clap requires a word source"),
    };
    Ok(parse_word(&text)?)
}

fn transduce(args: TransduceArgs, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let AnyAutomaton::Transducer(t) = read_automaton(&args.automaton)? else {
        return Err(CliError::invalid(format!("{} is not a transducer", args.automaton.display())));
    };
    let input = read_word(&args.input, &args.input_file)?;
    let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed));
    match random_word_from_transducer(&t, &input, args.length, args.return_order, &mut rng) {
        Ok(r) => {
            let mut text = format!("{}\n", format_word(&r.output));
            if let Some(w) = r.interleaving {
                text.push_str(&format_word(&w.symbols()));
                text.push('\n');
            }
            emit(out, &text)
        }
        Err(WordError::InputExhausted { partial, consumed }) => Err(CliError::new(
            EXIT_INPUT_EXHAUSTED,
            format!(
                "input exhausted after {consumed} symbols: produced {} of {} output symbols (shortfall {})",
                partial.len(),
                args.length,
                args.length - partial.len()
            ),
        )),
        Err(e) => Err(e.into()),
    }
}

fn noise(cmd: NoiseCommand, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let (source, settings): (&WordSource, NoiseSettings) = match &cmd {
        NoiseCommand::Insdel(a) => (
            &a.source,
            NoiseSettings {
                kind: NoiseKind::InsertOrDelete,
                n_symbols_change: a.n_change,
                noise_level: a.noise_level,
                prob_insert: a.prob_insert,
            },
        ),
        NoiseCommand::Replace(a) => (
            &a.source,
            NoiseSettings {
                kind: NoiseKind::Replacement,
                n_symbols_change: a.n_change,
                noise_level: a.noise_level,
                ..Default::default()
            },
        ),
    };
    let word = read_word(&source.word, &source.file)?;
    let spec = match &source.alphabet {
        Some(text) => settings.over(parse_word(text)?.into_iter().collect()),
        None => NoiseSpec::inferred(settings, &word),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed));
    let (noisy, _) = apply_noise(&word, &spec, &mut rng)?;
    emit(out, &format!("{}\n", format_word(&noisy)))
}

fn load_spec(args: &ChainArgs, seed: Option<u64>) -> Result<ChainSpec> {
    let (mut spec, config_seed) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            let has_seed = value.get("seed").is_some();
            let spec: ChainSpec =
                serde_json::from_value(value).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            let seed = has_seed.then_some(spec.seed);
            (spec, seed)
        }
        None => (ChainSpec::default(), None),
    };
    match (&args.lengths, args.nodes) {
        (Some(lengths), Some(n)) if lengths.len() != n => {
            return Err(CliError::invalid(format!("--nodes {n} but {} lengths", lengths.len())));
        }
        (Some(lengths), _) => {
            spec.n_nodes = lengths.len();
            spec.lengths = lengths.clone();
        }
        (None, Some(n)) => {
            spec.n_nodes = n;
            spec.lengths = vec![10; n];
        }
        (None, None) => {}
    }
    if let Some(regime) = args.regime {
        spec.regime = match regime {
            RegimeArg::Clean => Regime::Clean,
            RegimeArg::Observational => Regime::Observational,
            RegimeArg::Propagated => Regime::Propagated,
        };
    }
    if args.noise_kind.is_some() || args.noise_level.is_some() || args.prob_insert.is_some() {
        let mut settings = NoiseSettings::default();
        if let Some(kind) = args.noise_kind {
            settings.kind = match kind {
                NoiseKindArg::Insdel => NoiseKind::InsertOrDelete,
                NoiseKindArg::Replace => NoiseKind::Replacement,
            };
        }
        if let Some(level) = args.noise_level {
            settings.noise_level = level;
        }
        if let Some(p) = args.prob_insert {
            settings.prob_insert = p;
        }
        spec.noise = vec![Some(settings); spec.n_nodes];
    }
    spec.seed = match (seed, config_seed) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => resolve_seed(None),
    };
    Ok(spec)
}

fn chain(args: ChainArgs, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let spec = load_spec(&args, seed)?;
    if let Some(count) = args.batch {
        let dir = out.ok_or_else(|| CliError::invalid("--batch needs --out <dir>"))?;
        fs::create_dir_all(dir)?;
        for (i, result) in generate_batch(&spec, count).into_iter().enumerate() {
            fs::write(dir.join(format!("chain_{i}.json")), dataset_to_json(&result?))?;
        }
        return Ok(());
    }
    let (chain, dataset) = generate_chain_dataset(&spec)?;
    if let Some(dir) = &args.automata_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{}.json", node_id(0))), serialize_automaton(&chain.producer.clone().into()))?;
        for (k, t) in chain.transducers.iter().enumerate() {
            fs::write(dir.join(format!("{}.json", node_id(k + 1))), serialize_automaton(&t.clone().into()))?;
        }
    }
    if let Some(path) = &args.csv {
        write_dataset_csv(&dataset, fs::File::create(path)?)?;
    }
    match out {
        Some(path) => {
            fs::write(path, dataset_to_json(&dataset))?;
            for (from, to) in &dataset.edges {
                println!("{from} -> {to}");
            }
        }
        None => print!("{}", dataset_to_json(&dataset)),
    }
    Ok(())
}

fn render(args: RenderArgs, out: Option<&Path>) -> Result<()> {
    let a = read_automaton(&args.automaton)?;
    match args.format {
        crate::args::RenderFormat::Dot => emit(out, &to_dot(&a, &DotOptions::default())),
    }
}
