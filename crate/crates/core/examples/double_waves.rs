//! Build each double wave fixture and report its validity window and diagnostics.

use riemann_mhd::cli::cmd_construct;
use riemann_mhd::fixtures;

fn main() {
    for fx in fixtures::double() {
        match fx.solution.build() {
            Ok(b) => {
                let m = cmd_construct(&b);
                println!("{:<16} {}", fx.name, m["diagnostics"]);
            }
            Err(e) => println!("{:<16} {e}", fx.name),
        }
    }
}
