//! A QBF becomes a reachability question on a generated system.

use gapcheck::check;
use gapcheck::frontend::{gcs_to_text, parse_qbf};
use gapcheck::oracle::qbf_eval;
use gapcheck::reductions::qbf_to_gcs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in [
        "forall x. exists y. x <-> y",
        "exists y. forall x. x <-> y",
        "forall a. forall b. exists c. (a | b) -> c & !(a & b & c)",
    ] {
        let q = parse_qbf(text)?;
        let inst = qbf_to_gcs(&q);
        let reachable = check(&inst.gcs, &inst.initial, &inst.target)?;
        println!(
            "{q}\n  {} rules, reachability {reachable}, brute force {}",
            inst.gcs.rules().len(),
            qbf_eval(&q)?
        );
    }
    let inst = qbf_to_gcs(&parse_qbf("exists x. x")?);
    println!("\n{}start: {}\ngoal: {}", gcs_to_text(&inst.gcs), inst.initial, inst.target);
    Ok(())
}
