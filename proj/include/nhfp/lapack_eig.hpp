#pragma once
#include "nhfp/types.hpp"

namespace nhfp {

/// Eigenvalues of a general complex matrix (LAPACK zgeev, values only).
VectorXcd eig_values(const MatrixXcd& a);

/// Full general eigendecomposition. Columns of vr are right eigenvectors,
/// columns of vl satisfy a^H vl_j = conj(w_j) vl_j (LAPACK convention);
/// both are returned with unit Euclidean norm.
void eig_general(const MatrixXcd& a, VectorXcd& w, MatrixXcd& vr, MatrixXcd& vl);

}  // namespace nhfp
