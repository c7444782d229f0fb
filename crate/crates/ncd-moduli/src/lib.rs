//! Combinatorial and exact-algebraic model of relatively stable maps into
//! level buildings over a normal-crossings divisor.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: exact rationals, nonzero coefficients with rational
//!   powers, rational linear algebra, Smith form, strict cone feasibility.
//! * [`divisor`]: finite presentations of normal-crossings divisors.
//! * [`building`]: level-m buildings, their pieces and divisor strata.
//! * [`maptype`]: decorated map types and their matching validators.
//! * [`levelsys`]: the level linear system and gluing-parameter counts.
//! * [`dimension`]: expected dimension and codimension bookkeeping.
//! * [`fixtures`]: named worked configurations.

pub mod building;
pub mod dimension;
pub mod divisor;
pub mod exactnum;
pub mod fixtures;
pub mod levelsys;
pub mod maptype;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/divisors.md")]
    mod divisors {}
    #[doc = include_str!("../../../book/src/buildings.md")]
    mod buildings {}
    #[doc = include_str!("../../../book/src/map-types.md")]
    mod map_types {}
    #[doc = include_str!("../../../book/src/level-system.md")]
    mod level_system {}
    #[doc = include_str!("../../../book/src/dimension.md")]
    mod dimension {}
}
