//! Builds a random pseudo-orbit on the suspended cat map and finds a point
//! shadowing it.

use expflow::flow::FlowSystem;
use expflow::shadowing::{max_jump, random_pseudo_orbit, search_shadow, verify_shadow};
use expflow::systems::{self, AnyFlow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> expflow::error::Result<()> {
    let AnyFlow::Cat(f) = systems::flow_fixture("suspended-cat-map")? else {
        unreachable!()
    };
    let p = f.net(0.5)[3].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let chain = random_pseudo_orbit(&f, &p, 0.02, 1.0, 4, &mut rng)?;
    let (jump, _) = max_jump(&chain, &f);
    println!("{} entries, largest jump {jump:.4}", chain.len());

    match search_shadow(&chain, 0.15, &f, false, 64) {
        Some(w) => {
            println!("shadow found, residual {:.4}", w.residual);
            println!("re-verified: {}", verify_shadow(&chain, &w, &f, 0.01)?);
        }
        None => println!("no shadow within the budget"),
    }
    Ok(())
}
