//! Complementing a set can raise its degree: `not (x - y >= 5)` is
//! `y - x >= -4`.

use gapcheck::frontend::{parse_gcs, parse_set, set_to_json_string};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_gcs("gcs { vars: x, y; consts: ; }")?;
    let s = parse_set("x - y >= 5", &g)?;
    let c = s.complement();
    println!("set        : {}  (degree {})", s.members()[0], s.degree());
    println!("complement : {}  (degree {})", c.members()[0], c.degree());
    println!("double complement is the same set: {}", c.complement().same_set(&s));
    println!("{}", set_to_json_string(&c));
    Ok(())
}
