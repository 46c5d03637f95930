// Colorings of K_N with no monochromatic triangle: a 2-coloring of K_5 and a
// 3-coloring of K_5 built on the 5-cycle, written out and re-verified.

use ramsey_geo::coloring::{certify_ramsey_lower, reverify_certificate, write_certificate};
use ramsey_geo::graph::Graph;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out = certify_ramsey_lower(5, 3, 2, &Graph::empty(1), "", 1000, 7)?;
    let text = write_certificate(out.certificate());
    println!("2 colors, N = 5: certified = {}\n{text}", out.is_certified());

    let out = certify_ramsey_lower(5, 3, 3, &Graph::cycle(5), "cycle5", 1000, 1)?;
    let text = write_certificate(out.certificate());
    let re = reverify_certificate(&text)?;
    println!("3 colors via C5, N = 5: certified = {}, re-verified = {}\n{text}", out.is_certified(), re.accepted());

    let out = certify_ramsey_lower(6, 3, 2, &Graph::empty(1), "", 500, 0)?;
    let s = out.stats();
    println!("2 colors, N = 6: certified = {} after {} attempts, mean violations {:.3}", out.is_certified(), s.attempts, s.mean_violations);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("certify_coloring example failed");
}
