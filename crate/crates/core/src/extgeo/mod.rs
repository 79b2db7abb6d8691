//! Exterior calculus on `R^D` charts.
//!
//! Forms carry one coefficient per strictly increasing index tuple. A
//! coefficient is either an exact [`Polynomial`] (derivatives, products and
//! pullbacks along polynomial maps stay exact) or an opaque callable
//! differentiated by central differences with step `1e-5·(1+|x_i|)`.

mod chain;
mod form;
mod map;
mod poly;
mod tensor;
mod vector;

pub use chain::{
    gauss_legendre, integrate, integrate_box, Chain, ChainPiece, Integral, DEFAULT_QUADRATURE_ORDER,
};
pub use form::{central_difference, fd_step, sort_sign, Coefficient, Form, ScalarFn};
pub use map::{increasing_tuples, pullback, JacobianFn, SmoothMap, VectorFn};
pub use poly::Polynomial;
pub use tensor::{
    antisymmetrize, form_tensor, permutations, slater_form, CoefficientTensor, ComplexForm,
};
pub use vector::{
    commutator, lie_form, lie_form_cartan, lie_function, lie_function_flow, VectorField,
    DEFAULT_LIE_TIME, FLOW_STEPS,
};

/// Dimension of the full chart.
pub const DEFAULT_DIM: usize = crate::grading::CHART_DIM;
