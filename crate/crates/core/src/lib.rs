// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod gate;
pub mod linalg;
pub mod pauli;
pub mod stabilizer;
pub mod state;
pub mod code;
pub mod noise;
pub mod readout;
pub mod recompiler;
pub mod tomography;

/// Guide chapters, compiled so their listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/stabilizers.md")]
    mod stabilizers {}
    #[doc = include_str!("../../../book/src/encoding.md")]
    mod encoding {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/readout.md")]
    mod readout {}
    #[doc = include_str!("../../../book/src/compiling.md")]
    mod compiling {}
}
