//! Backward reachability on the lossy countdown: which valuations can reach
//! `x = 0, y = 0`?

use gapcheck::frontend::{parse_gcs, parse_set, SetText};
use gapcheck::{Metrics, PreStar};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_gcs(include_str!("data/countdown.gcs"))?;
    let target = parse_set("x = 0 & y = 0", &g)?;
    let mut metrics = Metrics::for_system(&g);
    let pre = PreStar::new(&g).run(&target, &mut metrics)?;
    println!("Pre*(x = 0 & y = 0):\n{}", SetText(&pre));

    let only_a = PreStar::new(&g)
        .actions(Some(vec!["a".into()]))
        .run(&target, &mut metrics)?;
    println!("using only `a`:\n{}", SetText(&only_a));

    for run in &metrics.prestar_runs {
        println!(
            "run: pool {} graphs, {} compositions, max norm {}",
            run.pool_size, run.graphs_created, run.max_norm
        );
    }
    Ok(())
}
