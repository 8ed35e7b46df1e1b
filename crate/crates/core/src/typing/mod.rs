//! Formulas, duality, principal types and the size and depth of nets.

mod formula;
mod infer;

pub use formula::{
    alpha_normalize, boolean_instance, dual, formula_depth, parse_var_name, var_name, Formula,
    FormulaParseError,
};
pub use infer::{
    infer_principal_type, net_depth, net_size, Sequent, TypeAssignment, TypeError, TypeGraph,
};
