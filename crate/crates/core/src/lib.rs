//! Verification of polynomial dynamical systems against LTL specifications
//! without the next operator, using automata, set disjointness and
//! sum-of-squares barrier certificates.

pub mod automaton;
pub mod formula;
pub mod poly;
pub mod problem;
pub mod region;
pub mod sdp;
pub mod sim;
pub mod sos;
pub mod verifier;
