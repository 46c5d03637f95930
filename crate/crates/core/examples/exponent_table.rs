// alpha_formal and the expansion terms across a few (p, D) pairs.

use ramsey_geo::exponent::{DimScale, ExponentReport};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>6} {:>10} {:>10} {:>10} {:>10}", "p", "D", "alpha", "theta*", "h", "beta(3)");
    for p in [0.43, 0.455, 0.49] {
        for scale in [DimScale::Finite(50.0), DimScale::Finite(500.0), DimScale::Infinite] {
            let r = ExponentReport::compute(p, scale, 0.0, 0.0, &[3])?;
            println!(
                "{:>6} {:>6} {:>10.6} {:>10.6} {:>10.5} {:>10.6}",
                p,
                scale.to_string(),
                r.alpha_formal,
                r.theta_star,
                r.gamma_bracket,
                r.ramsey_base2_coeff[0].1
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("exponent_table example failed");
}
