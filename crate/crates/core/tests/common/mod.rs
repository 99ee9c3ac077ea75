#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::PI;

use flyby::{BeamSource, Element, ModeLabel, Network, RotatingBody};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A generated network plus the body/beam its rotor elements share.
pub struct Fuzzed {
    pub network: Network,
    pub body: RotatingBody,
    pub beam: BeamSource,
}

fn label(k: usize) -> ModeLabel {
    ModeLabel::new(format!("m{k}")).unwrap()
}

/// Random valid network: routing elements only ever write modes that are
/// free at that point, so the single-assignment check passes by construction.
pub fn random_network(seed: u64) -> Fuzzed {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_modes = rng.random_range(2..=8);
    let modes: Vec<ModeLabel> = (0..n_modes).map(label).collect();
    let body = RotatingBody::new(rng.random_range(0.0..1000.0), rng.random_range(0.01..1.0)).unwrap();
    let beam = BeamSource::new(rng.random_range(0.0..1.0e7)).unwrap();

    let mut live: HashSet<usize> = HashSet::from([0]);
    let mut elements = Vec::new();
    let n_elements = rng.random_range(0..=24);
    for k in 0..n_elements {
        let name = format!("E{k}");
        match rng.random_range(0..10) {
            0..=3 => {
                let two = n_modes >= 3 && rng.random_bool(0.5);
                let mut pool: Vec<usize> = (0..n_modes).collect();
                pool.shuffle(&mut rng);
                let inputs: Vec<usize> = pool[..if two { 2 } else { 1 }].to_vec();
                let free: Vec<usize> = (0..n_modes)
                    .filter(|m| !live.contains(m) || inputs.contains(m))
                    .collect();
                if free.len() < 2 {
                    continue;
                }
                let outs: Vec<usize> = free.choose_multiple(&mut rng, 2).copied().collect();
                for i in &inputs {
                    live.remove(i);
                }
                live.extend(outs.iter().copied());
                elements.push(Element::BeamSplitter {
                    name,
                    input: label(inputs[0]),
                    second_input: inputs.get(1).map(|&m| label(m)),
                    transmit_out: label(outs[0]),
                    reflect_out: label(outs[1]),
                });
            }
            4..=5 => {
                let input = rng.random_range(0..n_modes);
                let free: Vec<usize> = (0..n_modes)
                    .filter(|m| !live.contains(m) || *m == input)
                    .collect();
                let output = *free.choose(&mut rng).unwrap();
                live.remove(&input);
                live.insert(output);
                elements.push(Element::Mirror {
                    name,
                    input: label(input),
                    output: label(output),
                });
            }
            6..=8 => elements.push(Element::PhaseShifter {
                name,
                mode: label(rng.random_range(0..n_modes)),
                phase: rng.random_range(-4.0 * PI..4.0 * PI),
            }),
            _ => elements.push(Element::RotatingObjectSegment {
                name,
                mode: label(rng.random_range(0..n_modes)),
                body,
                beam,
            }),
        }
    }

    // Detectors: either every mode (no leakage possible) or a random subset.
    let watched: Vec<usize> = if rng.random_bool(0.5) {
        (0..n_modes).collect()
    } else {
        (0..n_modes).filter(|_| rng.random_bool(0.5)).collect()
    };
    let detectors = watched
        .iter()
        .map(|&m| (format!("D{m}"), label(m)))
        .collect();

    let network = Network::new(modes, label(0), elements, detectors).expect("generator is valid");
    Fuzzed {
        network,
        body,
        beam,
    }
}
