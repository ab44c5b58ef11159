//! Gauss hypergeometric function against the integral oracle.

use riemann_mhd::specfun::{hyp2f1, hyp2f1_oracle};

fn main() -> riemann_mhd::Result<()> {
    let cases = [(0.5, 1.0, 1.5, 0.25), (-0.3, 0.7, 2.2, -3.0), (1.0, 1.0, 2.0, 0.9), (0.25, 0.75, 1.5, -40.0)];
    for (a, b, c, z) in cases {
        let f = hyp2f1(a, b, c, z)?;
        let g = hyp2f1_oracle(a, b, c, z)?;
        println!("2F1({a}, {b}; {c}; {z}) = {f:.16e}  oracle diff {:.2e}", (f - g).abs());
    }
    Ok(())
}
