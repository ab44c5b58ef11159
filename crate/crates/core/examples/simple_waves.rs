//! Build each simple wave fixture and print its state at a few points.

use riemann_mhd::fixtures;
use riemann_mhd::mhd::Vec3;

fn main() -> riemann_mhd::Result<()> {
    for fx in fixtures::simple() {
        let built = match fx.solution.build() {
            Ok(b) => b,
            Err(e) => {
                println!("{:<16} {e}", fx.name);
                continue;
            }
        };
        println!("{:<16} {}", fx.name, fx.about);
        for x in [-0.5, 0.0, 0.5] {
            let u = built.solution().evaluate(0.1, &Vec3::new(x, 0.1, 0.0))?;
            println!("  x={x:5.2} rho={:.6} p={:.6} v={:.4?} H={:.4?}", u.rho, u.p, u.v.as_slice(), u.h.as_slice());
        }
    }
    Ok(())
}
