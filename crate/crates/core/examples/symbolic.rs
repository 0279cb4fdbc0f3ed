//! Sequence metric, shift action and word-count entropy of two subshifts.

use expflow::symbolic::{distance, periodic_family, Subshift, SymbolSequence};

fn main() -> expflow::error::Result<()> {
    let zeros = SymbolSequence::constant(2, 0)?;
    let ones = SymbolSequence::constant(2, 1)?;
    println!("d(0..., 1...) = {}", distance(&zeros, &ones, 1e-12)?);

    let s = SymbolSequence::periodic(2, &[0, 1, 1])?;
    println!("d(s, shift^3 s) = {}", distance(&s, &s.shift(3), 1e-12)?);

    for n in 1..=4 {
        println!("periodic family n = {n}: {} sequences", periodic_family(n)?.len());
    }

    for (name, x) in [("full 2-shift", Subshift::full(2)?), ("golden mean", Subshift::golden_mean())] {
        let counts: Vec<u128> = (1..=8).map(|n| x.word_count(n)).collect::<Result<_, _>>()?;
        println!(
            "{name}: words {counts:?}, entropy(12) {:.4}, spectral {:.4}",
            x.entropy(12)?,
            x.spectral_entropy()?
        );
    }
    Ok(())
}
