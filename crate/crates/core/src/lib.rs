//! Cost-optimal STRIPS planning and online explanation generation by model
//! reconciliation. The guide in `book/` walks through each module.

pub mod bench;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod pddl;
pub mod planner;
pub mod reconcile;

// Book chapters are compiled as doc-tests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/planning.md")]
    mod planning {}
    #[doc = include_str!("../../../book/src/offline.md")]
    mod offline {}
    #[doc = include_str!("../../../book/src/online.md")]
    mod online {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
