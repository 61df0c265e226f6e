pub mod airy;
pub mod edge;
pub mod harness;
pub mod kernel;
pub mod measures;
pub mod numerics;
pub mod saddle;
pub mod sampler;
