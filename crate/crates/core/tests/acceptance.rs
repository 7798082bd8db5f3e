//! Runs the ten acceptance criteria and prints one line per criterion.
//! `DIAGFLOW_SEED` overrides the default seed 0.

use diagflow::acceptance::run_all;

fn main() {
    let seed = std::env::var("DIAGFLOW_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut failed = 0;
    for r in run_all(seed) {
        println!("{r}");
        failed += usize::from(!r.passed);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
