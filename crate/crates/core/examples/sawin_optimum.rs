// The Erdős–Rényi exponent g(p) and the p that minimises it.

use ramsey_geo::exponent::{optimize_sawin_p, ramsey_base2_coeff, sawin_exponent};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opt = optimize_sawin_p();
    println!("p*            = {:.7}", opt.p_star);
    println!("g(p*)         = {:.7}", opt.g);
    println!("-g(p*)/ln 2   = {:.7}", opt.base2_coeff);
    println!("beta(3)       = {:.6}", ramsey_base2_coeff(3, -opt.g)?);
    for p in [0.30, 0.40, 0.45, 0.50] {
        println!("g({p:.2})       = {:+.6}", sawin_exponent(p)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("sawin_optimum example failed");
}
