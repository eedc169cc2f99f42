//! `[H₀, iA]` for the dilation-type conjugate operator, and the elimination
//! showing that without the `x₁p₁` term no quadratic `A` gives a positive
//! commutator.
use channel_spectra::commutator::{commutator_ia, gen_nogo_scan, QuadraticObservable};

fn main() -> channel_spectra::Result<()> {
    let (b, w) = (3.0, 4.0);
    let c = commutator_ia(&QuadraticObservable::h0(b, w), &QuadraticObservable::conjugate_operator(b, w));
    println!("[H0, iA] = {c}");
    print!("{}", gen_nogo_scan(b, (b * b + w * w).sqrt(), false)?.text());
    Ok(())
}
