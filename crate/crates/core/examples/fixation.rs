//! Fixation in a Moran population versus its absence in the doubling family.

use lookdown::experiments::fixation_experiment;
use lookdown::model::{BirthRule, FamilySpec};
use lookdown::rng::SeedSpec;

fn main() {
    let moran = FamilySpec::moran(6, 360).expand().expect("valid family");
    let f = fixation_experiment(&moran, 0, 500, SeedSpec::new(5));
    println!(
        "moran(6): fixed in {}/{} replicates, base path {} times, mean generation {:.1}",
        f.fixed,
        f.replicates(),
        f.base_path_fixed,
        f.mean_fixation_generation.unwrap_or(f64::NAN)
    );
    let doubling = FamilySpec::asynchronous(1, BirthRule::Doubling, 14).expand().expect("valid family");
    let f = fixation_experiment(&doubling, 1, 200, SeedSpec::new(5));
    println!("doubling: fixed in {}/{} replicates", f.fixed, f.replicates());
}
