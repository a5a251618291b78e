//! Hamiltonian vector fields, Poisson brackets and sphere integrals of the
//! symplectic form `ϖ`.

mod bracket;
mod hamiltonian;
mod quadrature;

pub use bracket::{bracket, bracket_table, jacobi_defect, PoissonBracket};
pub use hamiltonian::{
    form_matrix, hamiltonian_field, solve_hamiltonian_at, test_functions, verify_hamiltonians,
    HamiltonianField,
};
pub use quadrature::{
    convergence_table, decays_geometrically, gauss_legendre, integral_checks, surface_integral,
    IntegralResult, QuadratureSpec, ROUNDING_FLOOR,
};
pub(crate) use quadrature::Neumaier;
