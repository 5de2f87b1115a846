//! Runs a JSON config through the batch front-end, writing into a temporary
//! directory.

use lookdown::cli::{parse_config, run};

fn main() {
    let out = std::env::temp_dir().join("lookdown-example");
    let doc = format!(
        r#"{{"command": "coalescent", "family": {{"kind": "moran", "N": 10}}, "cap": 20, "out": {:?}}}"#,
        out.display().to_string()
    );
    let config = parse_config(&doc).expect("valid config");
    let outcome = run(&config).expect("run succeeds");
    println!("exit status {}", outcome.status);
    print!("{}", std::fs::read_to_string(out.join("scale.csv")).expect("scale.csv written"));
}
