//! Finitely presented discrete modules and their homomorphisms.

mod module;
mod morphism;
mod ops;

pub use module::{FPModule, Invariants, ModuleLiteral};
pub use morphism::{block_morphism, direct_sum, minimize, submodule, sum_map, ModMorphism, MorphismLiteral};
pub use ops::{
    cyclic, free_cover, hom_module, in_image, is_exact, is_short_exact, random_diagonal_module, random_matrix,
    random_module, random_morphism, random_scalar, tensor, tensor_map, HomModule,
};
