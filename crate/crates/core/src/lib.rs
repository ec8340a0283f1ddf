//! Error analysis for FDDI: 4B/5B and NRZI line coding, the single noise
//! event model, the 32-bit FCS, frame validity and station repeat rules,
//! closed-form error rates, residue searches for undetected error
//! combinations, and a seeded Monte Carlo ring simulator.

pub mod analytics;
pub mod fcs;
pub mod frame;
pub mod gf2;
pub mod noise;
pub mod phy;
pub mod search;
pub mod sim;
pub mod tables;
