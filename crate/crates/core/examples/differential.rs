//! Random window-closed systems and formulas, checked symbolically and by
//! explicit enumeration of the window. Usage: `differential [seed] [cases]`.

use gapcheck::oracle::differential_run;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let cases = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let report = differential_run(seed, cases);
    println!(
        "seed {seed}: {} cases, {} states compared, {} mismatches, {} engine errors",
        report.cases,
        report.metrics.states_checked,
        report.mismatches.len(),
        report.errors.len()
    );
    println!(
        "{} pre* runs, {} graphs, largest pool {}, largest norm {}",
        report.metrics.prestar_runs, report.metrics.graphs_created, report.metrics.max_pool_size, report.metrics.max_norm
    );
    for m in &report.mismatches {
        println!("mismatch in case {}: {} at {}\n{}", m.case, m.formula, m.valuation, m.system);
    }
    std::process::exit(if report.passed() { 0 } else { 1 });
}
