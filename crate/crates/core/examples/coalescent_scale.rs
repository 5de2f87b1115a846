//! Coalescent time scale `t_n` for a few families, printed as CSV.

use lookdown::model::{BirthRule, FamilySpec};
use lookdown::stats::coalescent_scale;

fn main() {
    let families = [
        ("moran(10)", FamilySpec::moran(10, 30)),
        ("asynchronous b=2", FamilySpec::asynchronous(2, BirthRule::Constant(2), 30)),
        ("doubling", FamilySpec::asynchronous(1, BirthRule::Doubling, 21)),
    ];
    for (name, family) in families {
        let spec = family.expand().expect("valid family");
        let scale = coalescent_scale(&spec);
        let t = scale.t_f64();
        println!("{name}: t_last = {:.6}", t.last().unwrap());
        if name == "doubling" {
            scale.write_csv(std::io::stdout()).expect("stdout");
        }
    }
}
