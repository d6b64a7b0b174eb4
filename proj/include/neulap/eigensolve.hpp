#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "neulap/assembly.hpp"

namespace neulap::eigs {

struct EigenRequest {
  int k = 1;
  double tol = 1e-8;      // relative residual tolerance
  int max_iter = 500;
  int block_size = 0;     // 0: k + max(2, k/2)
  std::uint64_t seed = 12345;
};

struct EigenResult {
  std::vector<double> values;    // ascending
  Eigen::MatrixXd vectors;       // n x k, M-orthonormal
  std::vector<double> residuals; // ||Kx - l Mx|| / (||Kx|| + |l| ||Mx||)
  int iterations = 0;
  bool converged = false;
};

// Block Rayleigh-Ritz iteration (LOBPCG) preconditioned by a sparse LDL^t of
// K + sigma*M (Jacobi fallback if the factorization fails); sigma = 1e-3
// trace(K)/n when the pair is pure Neumann (K singular), else 0.
// Deterministic for a fixed seed.
EigenResult lobpcg(const fem::AssembledForms& forms, const EigenRequest& req);

// Full dense solve of the generalized symmetric pencil, n <= 2000.
EigenResult dense_oracle(const fem::AssembledForms& forms);

double rayleigh_quotient(const fem::AssembledForms& forms, const Eigen::VectorXd& x);

}  // namespace neulap::eigs
