//! The guide under `book/` compiled as doc comments, one module per
//! chapter, so `cargo test` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/convex-bodies.md")]
pub mod convex_bodies {}
#[doc = include_str!("../../../book/src/cosine-products.md")]
pub mod cosine_products {}
#[doc = include_str!("../../../book/src/nodal-sets.md")]
pub mod nodal_sets {}
#[doc = include_str!("../../../book/src/construction.md")]
pub mod construction {}
#[doc = include_str!("../../../book/src/sampling.md")]
pub mod sampling {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
