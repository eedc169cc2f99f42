//! Full-operator gaps approach those of `H_{0,0}` as the confinement grows.
use channel_spectra::bands::gap_persistence_sweep;
use channel_spectra::PotentialSpec;

fn main() -> channel_spectra::Result<()> {
    let table = gap_persistence_sweep(3.0, &[4.0, 10.0, 40.0], &PotentialSpec::cosine_x(2.0, 1), 1)?;
    for row in &table.rows {
        let full = row.full.gaps.first().map(|g| ((g.lo - row.alpha) / row.alpha, (g.hi - row.alpha) / row.alpha));
        println!("omega {:>5}: first gap relative to alpha {full:?}, edge discrepancy {:?}", row.omega, row.edge_discrepancy[0]);
    }
    println!("shrinking: {:?}", table.shrinking);
    Ok(())
}
