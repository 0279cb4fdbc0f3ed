//! Separated-set counts for the suspended full shift; the headline rate
//! should sit near log 2.

use expflow::entropy::entropy_estimate;
use expflow::systems::flow_fixture;
use expflow::with_flow;

fn main() -> expflow::error::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "suspended-full-shift".into());
    let f = flow_fixture(&name)?;
    let table = with_flow!(&f, f => entropy_estimate(f, &[0.5, 0.25], &[4.0, 6.0, 8.0], 0.25)?);
    print!("{}", table.to_csv());
    println!(
        "headline {:.4} at eps {} between t = {:?} (log 2 = {:.4})",
        table.headline,
        table.headline_eps,
        table.headline_times,
        std::f64::consts::LN_2
    );
    Ok(())
}
