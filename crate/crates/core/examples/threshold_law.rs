// tau(d, p) and its Gaussian limit: sqrt(d) tau(d, p) -> Phi^{-1}(p).

use ramsey_geo::numerics::{solve_tau, sphere_ip_cdf, std_normal_quantile};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 0.3;
    let z = std_normal_quantile(p)?;
    println!("Phi^-1({p}) = {z:.8}");
    let mut d = 3u64;
    while d <= 3_000_000 {
        let tau = solve_tau(d, p)?;
        let back = sphere_ip_cdf(tau, d)?.get();
        println!("d = {d:>8}  tau = {tau:+.8}  sqrt(d) tau = {:+.8}  F(tau) = {back:.12}", (d as f64).sqrt() * tau);
        d *= 10;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("threshold_law example failed");
}
