//! Exact algebra for pointed morphisms from the Jouanolou device of the
//! projective line to the projective line.

pub mod acceptance;
pub mod artifact;
pub mod bundle;
pub mod corpus;
pub mod exec;
pub mod field;
pub mod groebner;
pub mod homgrp;
pub mod homotopy;
pub mod jring;
pub mod morphism;
pub mod mwk;
pub mod poly;
pub mod realize;
pub mod sl2;
pub mod text;
