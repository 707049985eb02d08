//! The preset pattern catalogue.
//!
//! Each constant is pattern-DSL text; parse with
//! [`crate::pattern::parse_pattern`].

/// Additive Schur triple `{a, b, a+b}`.
pub const SCHUR: &str = "a, b, a+b";

/// Multiplicative Schur triple `{a, b, ab}`.
pub const MULT_SCHUR: &str = "a, b, a*b";

/// Sum-product triple `{a, ab, a+b}`.
pub const SUM_PRODUCT: &str = "a, a*b, a+b";

/// Asymmetric product triple `{a, b, b(a+1)}`.
pub const SHIFTED_PRODUCT: &str = "a, b, b*(a+1)";

/// Product quadruple `{a, b, ab, (a+1)b}`.
pub const PRODUCT_QUAD: &str = "a, b, a*b, (a+1)*b";

/// Every preset with a short identifier, in catalogue order.
pub fn all() -> [(&'static str, &'static str); 5] {
    [
        ("schur", SCHUR),
        ("mult-schur", MULT_SCHUR),
        ("sum-product", SUM_PRODUCT),
        ("shifted-product", SHIFTED_PRODUCT),
        ("product-quad", PRODUCT_QUAD),
    ]
}
