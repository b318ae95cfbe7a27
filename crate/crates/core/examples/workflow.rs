//! X -> Y end to end: producer, transducer, clean words, observational noise
//! and propagated noise.
//!
//! cargo run -p depseq --example workflow [seed]

use depseq::{
    format_word, generate_random_producer, generate_random_transducer, introduce_insert_or_delete_noise,
    introduce_replacement_noise, random_word_from_producer, random_word_from_transducer, validate_producer,
    validate_transducer, NoiseSettings, ProducerParams, SamplerSpec, TransducerParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let producer = generate_random_producer(
        &ProducerParams {
            states: SamplerSpec::skewed(3, 6, 4.0),
            alphabet: SamplerSpec::new(3, 8),
            transitions: SamplerSpec::new(1, 4),
            ..Default::default()
        },
        &mut rng,
    )?;
    assert!(validate_producer(&producer).is_empty());

    let transducer = generate_random_transducer(
        &TransducerParams {
            states: SamplerSpec::skewed(3, 6, 4.0),
            alphabet: SamplerSpec::new(3, 8),
            transitions: SamplerSpec::new(1, 4),
            ratio_i_o: 0.3,
            ..Default::default()
        }
        .with_input_alphabet(producer.alphabet().clone()),
        &mut rng,
    )?;
    assert!(validate_transducer(&transducer).is_empty());

    // x is longer than y so the noisy copy still has enough symbols to read.
    let x = random_word_from_producer(&producer, 40, &mut rng)?;
    let y = random_word_from_transducer(&transducer, &x, 10, false, &mut rng)?.output;
    println!("x        = {}", format_word(&x));
    println!("y        = {}", format_word(&y));

    let insdel = NoiseSettings::default().with_level(0.2).with_prob_insert(0.5);
    let noisy_x = introduce_insert_or_delete_noise(&x, &insdel.over(producer.alphabet().clone()), &mut rng)?;
    let replace = NoiseSettings::replacement().with_level(0.2);
    let noisy_y = introduce_replacement_noise(&y, &replace.over(transducer.output_alphabet().clone()), &mut rng)?;
    println!("noisy x  = {}", format_word(&noisy_x));
    println!("noisy y  = {}", format_word(&noisy_y));

    let propagated = random_word_from_transducer(&transducer, &noisy_x, 10, false, &mut rng)?.output;
    println!("y from noisy x = {}", format_word(&propagated));
    Ok(())
}
