//! Characteristic speeds and eigenvector residuals of a magnetized state.

use riemann_mhd::cli::cmd_eigen;
use riemann_mhd::config::EigenInput;
use riemann_mhd::mhd::{State, Vec3};

fn main() -> riemann_mhd::Result<()> {
    let input = EigenInput {
        state: State::new(1.0, 0.6, Vec3::new(0.1, 0.0, -0.2), Vec3::new(0.5, 0.3, 0.1)),
        kappa: 5.0 / 3.0,
        a0: None,
        lvec: Vec3::new(1.0, 0.5, 0.0),
    };
    println!("{}", serde_json::to_string_pretty(&cmd_eigen(&input)?)?);
    Ok(())
}
