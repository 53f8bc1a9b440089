#pragma once
// Dense symmetric eigensolves (LAPACK dsyev) and the least-squares /
// nullspace helpers built on top of them.

#include "svp/vec.hpp"

namespace svp {

// Ascending eigenvalues; eigvecs[k] is the unit eigenvector of eigvals[k].
struct EigResult {
  Vec eigvals;
  Mat eigvecs;
};

EigResult sym_eig(const Mat& a);

// Minimum-norm least-squares solution of A x = b with diagnostics.
struct LstsqResult {
  Vec x;            // min-norm minimizer of |A x - b|
  double residual;  // max_i |(A x - b)_i|
  int nullity;      // dim null(A) (A^T A eigenvalues below rank_tol * lam_max)
  Mat null_basis;   // orthonormal basis of null(A), one vector per row
};

LstsqResult lstsq_min_norm(const Mat& a, const Vec& b, double rank_tol = 1e-11);

// Lowest eigenpairs of the pencil (A, B) with B symmetric positive definite,
// via Cholesky-free reduction: eigendecompose B, form B^{-1/2} A B^{-1/2}.
// Directions of B with eigenvalue below b_floor are discarded (treated as a
// degenerate subspace, e.g. the kernel of a squared operator).
struct GenEigResult {
  Vec eigvals;
  Mat eigvecs;   // in the original coordinates, B-orthonormal
  int discarded; // number of near-null B directions removed
};

GenEigResult sym_geneig(const Mat& a, const Mat& b, double b_floor = 1e-12);

} // namespace svp
