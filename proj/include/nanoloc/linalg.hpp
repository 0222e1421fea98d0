#pragma once

#include <Eigen/Dense>

namespace nanoloc {

struct EigPair {
  Eigen::VectorXd values;    // descending
  Eigen::MatrixXcd vectors;  // unitary, column i pairs with values(i)
};

struct JacobiPolicy {
  double tolerance = 1e-12;  // off-diagonal Frobenius norm relative to ||R||_F
  int max_sweeps = 100;
};

/// Full spectral decomposition of a Hermitian matrix by cyclic complex
/// Jacobi rotations. Each eigenvector is phase-normalized (first entry with
/// modulus above 1e-6 made real positive); ties in eigenvalue are ordered
/// lexicographically on the normalized vectors, so the result is fully
/// deterministic. Throws ContractError if ||R - R^H||_F > 1e-8 ||R||_F.
EigPair hermitian_eig(const Eigen::MatrixXcd& r, JacobiPolicy policy = {});

}  // namespace nanoloc
