//! Surface models, the discriminant pencil and the order-4 certificate.

pub mod collapse;
pub mod linalg;
pub mod pencil;
pub mod surface;

pub use collapse::collapse_triple;
pub use pencil::{
    bad_primes, degenerate_members, discriminant_quintic, epsilon_T, rational_roots, to_matrices, vav_order4_test,
    BinaryForm, DegenerateMember, GeneralSurface, PencilPoint, VavCertificate, VavReport,
};
pub use surface::{
    check_normal_form, check_subfamily, NormalFormReport, NormalFormSurface, QuadForm, QuadricPair, RationalPoint,
    SubfamilyReport, SubfamilySurface,
};
