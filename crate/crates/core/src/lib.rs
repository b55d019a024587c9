//! Discrete laboratory for finite-time blow-up of abstract wave equations
//! `P u_tt + A u = F(u)`.
//!
//! The crate provides grid realizations of the operators, gradient
//! nonlinearities with their structural constants, the growth and blow-up
//! criteria of the concavity method, a constructive builder for initial data
//! of prescribed positive energy, model factories, a leapfrog integrator with
//! a blow-up verdict, and trajectory monitors for the concavity inequalities.

pub mod algebra;
pub mod criteria;
pub mod data_builder;
pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod models;
pub mod nonlinearity;

pub use error::{Error, Result};
