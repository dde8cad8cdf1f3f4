//! Regenerates `data/synthetic_vertebrae.tsv`: two groups of 23
//! hexagonal six-landmark outlines with isotropic landmark noise and a
//! genuine (non-scale) mean-shape difference between groups.
//!
//! The file is checked in; rerun this only when the recipe changes:
//!
//! ```text
//! cargo run -p pwshape-cli --example make_synthetic_fixture
//! ```

use nalgebra::DMatrix;
use pwshape::dataset::{write_landmarks, Dataset, Specimen};
use pwshape::sim::sample_preshape;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const SIGMA2: f64 = 50.0;
const PER_GROUP: usize = 23;
const SEED: u64 = 20_240_816;

fn hexagon(radii: &[f64; 6]) -> DMatrix<f64> {
    DMatrix::from_fn(6, 2, |i, j| {
        let angle = std::f64::consts::PI / 3.0 * i as f64;
        radii[i] * if j == 0 { angle.cos() } else { angle.sin() }
    })
}

fn main() {
    // Shapes differ beyond scale: the third vertex is pushed out in the
    // second group, so the pure-shape test has something to detect.
    let small = hexagon(&[15.2, 14.1, 16.3, 13.8, 15.9, 14.6]);
    let large = hexagon(&[17.5, 16.2, 22.4, 15.9, 18.3, 16.8]);
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let mut groups = Vec::new();
    for (label, mean, prefix) in [("small", &small, "s"), ("large", &large, "l")] {
        let mut specimens = Vec::with_capacity(PER_GROUP);
        for i in 1..=PER_GROUP {
            specimens.push(Specimen {
                id: format!("{prefix}{i:02}"),
                config: sample_preshape(mean, SIGMA2, &mut rng),
            });
        }
        groups.push((label.to_string(), specimens));
    }
    let ds = Dataset::from_groups(groups).expect("fixture construction is well-formed");
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/synthetic_vertebrae.tsv");
    write_landmarks(path, &ds).expect("write fixture");
    println!("wrote {path}");
}
