//! Linear algebra, states, Bloch vectors, information quantities and sampling.

pub mod bloch;
pub mod info;
pub mod linalg;
pub mod sample;
pub mod state;

pub use bloch::{bloch_of, qubit_of, BlochVector};
pub use info::{fidelity, relative_entropy, relative_entropy_with, shannon_entropy, von_neumann_entropy};
pub use linalg::{spectral, ComplexMatrix, ComplexVector, SpectralDecomposition};
pub use sample::Sampler;
pub use state::{validate_density, DensityMatrix, ProductBasis, PureState, Tolerances};
