//! Runs every acceptance criterion and prints one line per criterion.

use flgauge::acceptance::{run_all, CRITERIA};

fn main() {
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let outcomes: Vec<_> = if filter.is_empty() {
        run_all()
    } else {
        CRITERIA.iter().filter(|c| filter.contains(&c.0)).filter_map(|c| flgauge::acceptance::run_one(c.0)).collect()
    };
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
