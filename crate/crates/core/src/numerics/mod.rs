//! Dense linear algebra and reverse-mode gradients.
//!
//! Vectors are rows: an affine map is `x·W + b` with `W` shaped
//! `[inputs × outputs]`.

mod tape;
mod tensor;

pub use tape::{reverse_grad, GradTape, Gradients, Var};
pub use tensor::{affine, relu, Tensor2, Vector};

pub(crate) use tensor::add_vec;
