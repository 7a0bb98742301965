//! Is a system state bisimilar to a finite LTS state? The answer is decided
//! by the characteristic formula of the LTS state.

use gapcheck::bisim::{characteristic_formula, equiv_check, equivalence_class, Mode, TAU};
use gapcheck::frontend::{parse_gcs, parse_lts, parse_valuation, SetText};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_gcs(include_str!("data/countdown.gcs"))?;
    let l = parse_lts(include_str!("data/chain.lts"))?;
    for (val, state) in [("x=0, y=0", "r"), ("x=1, y=0", "q"), ("x=1, y=0", "r"), ("x=2, y=0", "q")] {
        let v = parse_valuation(val, &g)?;
        for mode in [Mode::Strong, Mode::Weak] {
            let b = equiv_check(&g, &v, &l, state, mode, TAU)?;
            println!("{val} ~ {state} ({mode}): {b}");
        }
    }
    let r = l.state_index("r").unwrap();
    println!("formula for r: {}", characteristic_formula(&l, r, Mode::Strong, TAU));
    let class = equivalence_class(&g, &l, "r", Mode::Strong, TAU)?;
    print!("states equivalent to r:\n{}", SetText(&class));
    Ok(())
}
