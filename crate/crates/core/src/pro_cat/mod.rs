mod checks;
mod lazy;
mod limits;
mod literal;
mod morphism;
mod product;
mod reindex;
mod telescope;
mod tower;

pub use checks::{coreflector_check, matrix_map, product_check, CoreflectorCheck, Factor, FactorizationCheck, ProductCheck};
pub use lazy::LazySeq;
pub use limits::{
    coreflect_strict, coreflect_via_embedding, cokernel_pro, is_admissible_ses, is_pro_zero, kernel_pro, kernel_strict,
    strictify, Certificate, EmbeddingPath, Strictified,
};
pub use literal::{scaled_tower, TowerLiteral, TowerRule};
pub use morphism::ProMorphism;
pub use product::{factor_through_finite_subproduct, product, product_of, Factorization, Family, Product};
pub use reindex::Reindex;
pub use telescope::{limit_module, projective_cover_cohpro, telescope_ses, LimitModule, ProjectiveCover, TelescopeSes};
pub use tower::{constant_tower, explicit_tower, integer_adic_tower, ring_tower, zero_tower, Strictness, Tower};
