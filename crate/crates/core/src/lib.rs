pub mod dense;
pub mod eig;
pub mod error;
pub mod expm;
pub mod spectral;

pub use dense::{frobenius_distance, AntisymMatrix, ComplexDense, C64};
pub use eig::{hermitian_eig, nearest_unitary, HermitianEig};
pub use error::{Error, Result};
pub use expm::expm_pade;
pub use spectral::{build_g, g_spectrum, verify_spectrum, GSpectrum};
pub mod circuit;
pub mod rng;

pub use circuit::{assemble_u, reconstruct_generator, warm_start, ParamVector};
pub use rng::Rng;
pub mod optimizer;
pub use optimizer::{
    finite_diff_grad, loss_antisym, loss_unitary, minimize, AntisymLoss, LossMode, OptConfig, OptTrace,
    UnitaryLoss,
};
pub mod matgen;
pub use matgen::{
    apply_signed_perm, find_canonical_perm, is_transitive, random_antisym, sign_matrix, MatrixFamily,
    SignedPermutation,
};
