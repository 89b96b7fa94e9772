//! Weyl calculus on configuration space: symbols, kernels, quantization,
//! Heisenberg–Weyl translations, the symplectic Fourier transform and the
//! Moyal product.

mod kernel;
mod poly;
mod star;
mod symbol;

pub use kernel::{
    config_matrix_with, kernel_to_symbol, kernel_to_symbol_with, quantize_config, quantize_config_with,
    symbol_to_kernel, Kernel,
};
pub use poly::{DiffTerm, Polynomial};
pub(crate) use star::{apply_diff_terms, refine_rows, twisted_product};
pub use star::{moyal_product, moyal_product_with, sampled_only, ALIAS_TOL};
pub use symbol::{NamedSymbol, Symbol, BAND_LIMIT_TOL};

use crate::error::Result;
use crate::exec::Execution;
use crate::fourier;
use crate::grid::{transform_columns, transform_rows};
use crate::states::ConfigState;
use crate::C64;

/// T̂(x₀, ξ₀)ψ(x) = e^{i(ξ₀x − ξ₀x₀/2)} ψ(x − x₀). Non-lattice displacements
/// use a band-limited shift.
pub fn heisenberg_weyl(z0: (f64, f64), psi: &ConfigState) -> ConfigState {
    let (x0, xi0) = z0;
    let g = psi.grid();
    let mut v: Vec<C64> = psi.values().iter().copied().collect();
    if x0 != 0.0 {
        fourier::shift_in_place(&mut v, -x0 / g.spacing());
    }
    for (k, s) in v.iter_mut().enumerate() {
        let x = g.point(k);
        *s *= C64::from_polar(1.0, xi0 * x - 0.5 * xi0 * x0);
    }
    ConfigState::from_vec_unchecked(*g, v)
}

/// F_σa(x₀, ξ₀) = (2π)^{-1} ∫∫ a(x, ξ) e^{i(x₀ξ − ξ₀x)} dx dξ, on the same lattice.
pub fn symplectic_ft(a: &Symbol) -> Result<Symbol> {
    let g = a.grid();
    g.ensure_dual_pair("symplectic Fourier transform")?;
    let exec = Execution::default();
    // Forward transform over x puts ξ₀ on the rows, inverse over ξ puts x₀ on the columns.
    let t = transform_columns(&a.values(), g.x(), -1.0, exec);
    let t = transform_rows(&t, g.p(), 1.0, exec);
    Symbol::from_samples_with(g, t.transpose(), exec)
}
