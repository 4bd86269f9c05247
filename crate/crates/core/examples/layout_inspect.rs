//! Qubit counts of the three patch embeddings, plus one layout as JSON.
//!
//! ```text
//! cargo run --example layout_inspect -- compact 5
//! ```

use vqubits::layout::{build_layout, Basis, Scheme};

fn main() -> vqubits::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let scheme: Scheme = args.first().map_or("compact", String::as_str).parse()?;
    let d: usize = args.get(1).map_or(Ok(5), |s| s.parse()).map_err(|_| vqubits::Error::Usage("distance must be an integer".into()))?;

    println!("{:<10} {:>3} {:>9} {:>8}", "scheme", "d", "transmons", "cavities");
    for s in [Scheme::Baseline2D, Scheme::Natural, Scheme::Compact] {
        for dd in [3, 5, 7] {
            let l = build_layout(s, dd, 0)?;
            println!("{:<10} {:>3} {:>9} {:>8}", s.name(), dd, l.transmon_count, l.cavity_count);
        }
    }

    let l = build_layout(scheme, d, 0)?;
    let hosted = l.plaquettes.iter().filter(|p| p.host.is_some()).count();
    eprintln!(
        "{} d={d}: {} X and {} Z checks, {hosted} hosted on data transmons",
        scheme.name(),
        l.plaquettes_of(Basis::X).len(),
        l.plaquettes_of(Basis::Z).len()
    );
    println!("{}", l.to_json()?);
    Ok(())
}
