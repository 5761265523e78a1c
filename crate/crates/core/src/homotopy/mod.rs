//! Bounded complexes, homotopies and the contraderived comparison.

mod acyclic;
mod bicomplex;
mod complex;
mod contraderived;
mod free;
mod hom;
mod resolve;
mod telescope;

pub use acyclic::{
    cocycle_tower, contratensor_complex, elementary_contractible, elementary_nonacyclic, null_homotopy_to_depth,
    periodicity_check_projective_cocycles, pure_acyclicity_test, random_chain_map, random_contractible,
    random_free_complex, random_module_complex, random_nonacyclic, random_unimodular, CocycleCertificate,
    CocycleDegree, PureAcyclicity, PureBattery, PureWitness,
};
pub use bicomplex::{tot_product, Bicomplex, Bounds};
pub use complex::{
    canonical_projection, canonical_truncate_ge, cone, cone_with_maps, induced_map, silly_inclusion, silly_truncate,
    ChainMap, Cohomology, Complex, ComplexLiteral, Cone,
};
pub use contraderived::{
    contratensor_h0, db_coh_hom_oracle, db_coh_hom_oracle_shifted, group_report, h0_tower, hom_contraderived,
    ContraderivedHom, ContraderivedReport,
};
pub use free::{
    free_cone, free_null_homotopy, free_tensor, ContraComplex, FreeChainMap, FreeComplex, FreeComplexLiteral, FreeHom, FreeHomotopy,
    TowerComplex,
};
pub use hom::{homotopy_equivalence, is_contractible, is_null_homotopic, Equivalence, HomComplex, Homotopy};
pub use resolve::{
    cone_resolution, dual_cone_iso, kernel_resolution, lift_along, lift_chain_map, resolve_cohpro, xi, xi_cone_shadow,
    xi_map, Resolution,
};
pub use telescope::{canonical_diagram, hocolim_telescope, holim_telescope, silly_diagram, Diagram, Telescope};
