#pragma once

#include <vector>

#include "frolicher/types.hpp"

namespace frolicher::lin {

/// Numerical rank: singular values above tol_rel * sigma_max.
int rank(const Mat& a, double tol_rel = tolerances().rank);

/// Orthonormal basis of the column space (columns of the result).
Mat column_space(const Mat& a, double tol_rel = tolerances().rank);

/// Orthonormal basis of the (right) null space.
Mat kernel(const Mat& a, double tol_rel = tolerances().rank);

/// Orthonormal basis of the span of the concatenated column blocks.
Mat span_union(const std::vector<Mat>& blocks, double tol_rel = tolerances().rank);

/// Orthogonal projector onto the span of an orthonormal basis.
Mat projector(const Mat& basis);

/// Frobenius distance between the projectors of two subspaces.
double subspace_distance(const Mat& basis_a, const Mat& basis_b);

/// Largest norm of a component of span(sub) outside span(ambient);
/// zero iff span(sub) is contained in span(ambient).
double containment_defect(const Mat& sub, const Mat& ambient);

/// Minimal-norm least-squares solution of a x = b.
Vec min_norm_solve(const Mat& a, const Vec& b, double tol_rel = tolerances().rank);

/// Moore-Penrose pseudo-inverse.
Mat pseudo_inverse(const Mat& a, double tol_rel = tolerances().rank);

/// Hermitian PSD spectral data of one operator.
struct HermitianSpectrum {
    RealVec eigenvalues;  // ascending
    Mat eigenvectors;     // unitary, columns match eigenvalues
    int kernel_dim = 0;   // eigenvalues below the kernel cutoff
    double cutoff = 0.0;
};

/// Eigendecomposition of a Hermitian PSD matrix with the kernel counted at
/// cutoff = tol_rel * (1 + lambda_max).
HermitianSpectrum hermitian_spectrum(const Mat& h, double tol_rel = tolerances().rank);

/// Orthonormal basis of the numerical kernel of a Hermitian PSD matrix.
Mat hermitian_kernel(const Mat& h, double tol_rel = tolerances().rank);

/// Green operator: inverse on the orthogonal complement of the kernel,
/// zero on the kernel.
Mat green_inverse(const Mat& h, double tol_rel = tolerances().rank);

/// max |a_ij| (zero for empty matrices).
double max_abs(const Mat& a);

}  // namespace frolicher::lin
