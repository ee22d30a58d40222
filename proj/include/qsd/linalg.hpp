// Hermitian-matrix helpers: symmetrization, spectral utilities, and the real
// orthonormal coordinate map used by the SDP engine.
#pragma once

#include "qsd/types.hpp"

namespace qsd {

// (A + A*)/2
Mat hermitian_part(const Mat& a);

bool is_hermitian(const Mat& a, double tol);

// Eigenvalues of a Hermitian matrix, ascending (Eigen's order).
RVec hermitian_eigenvalues(const Mat& h);

double min_eigenvalue(const Mat& h);
double max_eigenvalue(const Mat& h);

// Spectral (operator 2-) norm of an arbitrary matrix.
double spectral_norm(const Mat& a);

// Count of eigenvalues with |lambda| > threshold (absolute threshold).
int numerical_rank(const Mat& h, double threshold);

// f(H) for Hermitian H via eigendecomposition; eigenvalues below `floor`
// are treated as exactly `floor` before applying f.
Mat psd_inverse(const Mat& h);
Mat psd_sqrt(const Mat& h);
Mat psd_inv_sqrt(const Mat& h);

// Real coordinates of a Hermitian matrix in the orthonormal basis
//   E_kk (k = 0..n-1),
//   (e_i e_j* + e_j e_i*)/sqrt2          for i < j,
//   i(e_i e_j* - e_j e_i*)/sqrt2         for i < j,
// ordered: diagonals first, then (i,j) pairs lexicographically with the
// symmetric and antisymmetric coordinates interleaved. The map is a linear
// isometry: Tr(AB) = coords(A).dot(coords(B)) for Hermitian A, B.
RVec herm_to_coords(const Mat& h);
Mat coords_to_herm(const RVec& x, int n);

// Real trace inner product Tr(AB) of two Hermitian matrices.
double herm_inner(const Mat& a, const Mat& b);

}  // namespace qsd
