//! Compatibility residuals and Jacobian rank of the double wave fixtures.

use riemann_mhd::fixtures;
use riemann_mhd::gmc::{gmc_commutator_residual, gmc_span_residual, jacobian_rank};

fn main() -> riemann_mhd::Result<()> {
    for fx in fixtures::double() {
        let Ok(built) = fx.solution.build() else { continue };
        let d = built.as_double().expect("double fixture");
        let comm = gmc_commutator_residual(d, 16)?;
        let span = gmc_span_residual(d, 16)?;
        let mid = |a: &riemann_mhd::verify::Axis| {
            let n = a.nodes();
            n[n.len() / 2]
        };
        let p = riemann_mhd::mhd::Vec3::new(mid(&fx.grid.x), mid(&fx.grid.y), mid(&fx.grid.z));
        let rank = jacobian_rank(built.solution(), 0.0, &p).map(|r| r.to_string()).unwrap_or_else(|e| e.to_string());
        println!("{:<16} commutator {comm:.2e} span {span:.2e} rank {rank}", fx.name);
    }
    Ok(())
}
