// The bracket h(p) whose sign decides whether the geometric base graph
// beats G(n, p) at first order in 1/D.

use ramsey_geo::exponent::{find_gamma_root, gamma_bracket};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for i in 0..=10 {
        let p = 0.30 + 0.02 * i as f64;
        let h = gamma_bracket(p)?;
        let bar = "#".repeat((h.max(0.0) * 10.0) as usize);
        println!("p = {p:.2}  h = {h:+9.4}  {bar}");
    }
    println!("h(0.5) = {}", gamma_bracket(0.5)?);
    println!("root   = {:.6}", find_gamma_root(0.40, 0.43)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("gamma_curve example failed");
}
