//! Monte Carlo estimate of the probability that the base path is the most
//! frequent line at a finite horizon, across a grid of generations.

use lookdown::experiments::dichotomy_experiment;
use lookdown::model::FamilySpec;
use lookdown::rng::SeedSpec;

fn main() {
    let family = FamilySpec::moran(6, 201);
    let rows = dichotomy_experiment(&family, &[0, 2, 5, 10], 200, 1000, SeedSpec::new(1)).expect("valid experiment");
    println!("{:>3}  {:>8}  {:>8}  {:>6}", "n", "t_n", "rho", "se");
    for r in rows {
        println!("{:>3}  {:>8.4}  {:>8.4}  {:>6.4}", r.n, r.t_n, r.rho.estimate, r.rho.se);
    }
}
