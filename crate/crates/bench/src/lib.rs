//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rocmar::simulation::{apply_missingness, generate_population, GeneratorSpec, MissingMechanism, Model};
use rocmar::{Label, PopulationData};

/// One-covariate populations of size `n` with the biomarker erased under
/// the M1 mechanism. Seeded, so every run measures the same data.
pub fn populations(n: usize, seed: u64) -> (PopulationData, PopulationData) {
    let spec = GeneratorSpec::new(Model::Dim1, n).expect("n is large enough");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |label| {
        let pop = generate_population(&spec, label, &mut rng).expect("generator");
        apply_missingness(pop, MissingMechanism::M1, &mut rng).expect("mechanism fits dim1")
    };
    let d = draw(Label::Diseased);
    let h = draw(Label::Healthy);
    (d, h)
}
