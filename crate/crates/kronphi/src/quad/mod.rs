//! Quadrature construction and the (s, q) selection machinery.
//!
//! The remainder of a q-point rule applied to the phi-function integrand is
//! estimated through its contour representation: a kernel integrated over an
//! ellipse with foci `{0, 1}`, paired with the spectral-set constant of the
//! numerical range and a rectangle enclosing it. Scanning scalings `s` and
//! node counts `q` against that estimate, and stopping when the predicted
//! Tucker-operator count starts to grow, yields the execution plan.

mod bound;
mod gll;
mod kernel;
mod plan;

pub use bound::{remainder_bound, Ellipse, RangeRectangle};
pub use gll::{gll_rule, GllRule};
pub use kernel::kernel_eval;
pub use plan::{select_plan, tucker_count, PhiMode, QuadraturePlan, SelectOptions};

pub(crate) use bound::BoundContext;

const FACTORIALS: [f64; 21] = {
    let mut f = [1.0f64; 21];
    let mut k = 1;
    while k < 21 {
        f[k] = f[k - 1] * k as f64;
        k += 1;
    }
    f
};

#[inline]
pub(crate) fn factorial(k: usize) -> f64 {
    FACTORIALS[k]
}
