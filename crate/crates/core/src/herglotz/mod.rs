//! Rational-function machinery: Cauchy transforms as rationals, finite
//! Blaschke products and their level sets, the secular equation and the
//! half-plane/disk transfer.

pub mod blaschke;
pub mod cayley;
pub mod poly;
pub mod rational;
pub mod secular;

pub use blaschke::BlaschkeProduct;
pub use cayley::{cayley_inverse, cayley_transfer, omega, omega_inv, relabel, HalfPlaneInner};
pub use poly::Poly;
pub use rational::HerglotzRational;
pub use secular::{residue_masses_line, secular_roots_line};
