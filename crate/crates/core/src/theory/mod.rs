//! Analytic limits: Malthusian parameter, degree and fringe laws, CLT and
//! root-degree constants.

mod constants;
mod fringe;
mod malthus;

pub use constants::{clt_constants, root_degree_constants, RootDegreeConstants, RootRegime};
pub use fringe::{
    degree_law, extended_fringe_law, fringe_bruteforce, fringe_recursion, survival_product,
    tree_weight, FringeTable,
};
pub use malthus::{closed_form_malthusian, rho_hat, solve_malthusian, MalthusianResult, RhoHat};
