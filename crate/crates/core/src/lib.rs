//! Modal lambda terms for the constructive modal logic CK.

pub mod arena;
pub mod cli;
pub mod corpus;
pub mod correspond;
pub mod fck;
pub mod games;
pub mod rewrite;
pub mod sck;
pub mod surface;
pub mod syntax;
pub mod typing;

// The guide's code blocks run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/terms.md")]
    pub mod terms {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    pub mod reduction {}
    #[doc = include_str!("../../../book/src/focused.md")]
    pub mod focused {}
    #[doc = include_str!("../../../book/src/arenas.md")]
    pub mod arenas {}
    #[doc = include_str!("../../../book/src/strategies.md")]
    pub mod strategies {}
    #[doc = include_str!("../../../book/src/correspondence.md")]
    pub mod correspondence {}
    #[doc = include_str!("../../../book/src/search.md")]
    pub mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/testing.md")]
    pub mod testing {}
}
