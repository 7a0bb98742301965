//! Evaluating EF formulas symbolically, and the rejection of EG / EU.

use gapcheck::frontend::{parse_formula, parse_gcs, parse_valuation, SetText};
use gapcheck::Checker;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_gcs(include_str!("data/countdown.gcs"))?;
    let mut checker = Checker::new(&g);
    let v = parse_valuation("x=3, y=1", &g)?;
    for text in [
        "EF (x = 0 & y = 0)",
        "<a> true",
        "AG x >= 0",
        "EF[a] (x = 0 & y = 1)",
        "EF{x' >= x} x = 0",
        "!EF (y = 0 & <b> true)",
    ] {
        let f = parse_formula(text, &g)?;
        let set = checker.denote_set(&f)?;
        println!("{text:<26} at {v}: {}", checker.check(&v, &f)?);
        print!("{}", SetText(&set));
    }
    let eg = parse_formula("EG x >= 0", &g)?;
    println!("EG x >= 0: {}", checker.check(&v, &eg).unwrap_err());
    println!("{} graphs composed", checker.metrics().graphs_created);
    Ok(())
}
