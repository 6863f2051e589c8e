//! Exact algebra for torsion exponents of toric Lagrangian fibers.
//!
//! The crate is layered bottom-up:
//!
//! * [`rational`]: exact rationals, the extended line `Q ∪ {+∞}`, and their text forms.
//! * [`novikov`]: truncated elements of the universal Novikov ring.
//! * [`valmat`]: Smith normal form over the valuation ring `Λ_{0,nov}` and
//!   cohomology decompositions of finite chain complexes.
//! * [`toric`]: moment polytopes, Maslov-2 disk classes and the Koszul model
//!   of the Floer differential at the zero bounding cochain.
//! * [`polydisk`]: displacement-energy lower bounds for polydisks and
//!   disk-ball products inside cylinders.

pub mod novikov;
pub mod polydisk;
pub mod rational;
pub mod toric;
pub mod valmat;

pub use novikov::{NovikovElement, NovikovError, Term};
pub use rational::{Extended, Q};
pub use valmat::{ChainComplex, ModuleDecomposition, NovikovMatrix, ValmatError};
