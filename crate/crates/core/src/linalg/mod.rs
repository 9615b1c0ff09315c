//! Exact sparse linear algebra over the rationals: echelon spans, membership
//! certificates, quotient coordinates and intersections.

mod dense;
mod span;
mod sparse;

pub use dense::Matrix;
pub use span::{
    intersect_spans, membership_certificate, quotient_coordinates, reduce_span, Certificate,
    ComplementBasis, SpanBasis,
};
pub use sparse::SparseVec;
