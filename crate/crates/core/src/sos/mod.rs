//! Sum-of-squares programs: Gram-matrix compilation to SDP, barrier
//! certificate synthesis and posterior validation.

mod builder;

pub use builder::{GramPoly, LinExpr, LinPoly, SosBuilder};
mod barrier;

pub use barrier::{
    build_barrier_program, compile_to_sdp, extract_certificate, synthesize, unit_ball_scaling,
    synthesize_with, validate_certificate, Attempt, BarrierCertificate, BarrierOptions, Check, IdentityKind,
    Scaling, SosError, SosIdentity, SosProgram, Synthesis, ValidationReport,
};
