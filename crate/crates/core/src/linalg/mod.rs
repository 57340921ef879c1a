pub mod expm;
pub mod group;
pub mod metric;
pub mod projective;
pub mod subalgebra;

pub use expm::expm;
pub use group::{algebra_residual, group_inverse, group_residual, mat_exp, project_to_algebra, AlgebraElement, GroupElement};
pub use metric::{change_basis_coords, change_basis_matrix, inner, BasisTag, Coords, Mat, Metric, Space, Vector};
pub use projective::ProjectivePoint;
pub use subalgebra::{closure_residual, lstsq, null_space, subalgebra_from_constraints, LinearFunctional, MatrixAlgebra, SubalgebraBasis};
