//! Shared inputs for the benchmarks.

use tropmoduli::complex::RayLabel;
use tropmoduli::plmap::ModuliPair;
use tropmoduli::pwpoly::{phi_ray, PiecewisePoly};
use tropmoduli::rational::frac;

/// Cases small enough to time repeatedly.
pub const ENUMERATION_CASES: [(u32, usize); 4] = [(1, 3), (1, 4), (2, 2), (2, 3)];

/// `(φ₀^ps)² / 6` on the pseudostable side of `pair`.
pub fn cusp_input(pair: &ModuliPair) -> PiecewisePoly {
    let rho0 = pair.ps.ray(&RayLabel::Irreducible).expect("irreducible ray");
    phi_ray(pair.ps.clone(), rho0).expect("ray function").pow(2).scale(&frac(1, 6))
}
