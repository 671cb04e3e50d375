#include "frolicher/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace frolicher::lin {

namespace {

Eigen::JacobiSVD<Mat> svd_thin(const Mat& a) {
    return Eigen::JacobiSVD<Mat>(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
}

int svd_rank(const Eigen::JacobiSVD<Mat>& svd, double tol_rel) {
    if (svd.singularValues().size() == 0) return 0;
    // absolute floor keeps numerically-zero matrices at rank zero (data is
    // O(1)-normalised, so sigma below tol_rel is rounding noise)
    const double cut = tol_rel * std::max(svd.singularValues()[0], 1.0);
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > cut) ++r;
    return r;
}

}  // namespace

int rank(const Mat& a, double tol_rel) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd_rank(svd, tol_rel);
}

Mat column_space(const Mat& a, double tol_rel) {
    if (a.rows() == 0 || a.cols() == 0) return Mat(a.rows(), 0);
    auto svd = svd_thin(a);
    const int r = svd_rank(svd, tol_rel);
    return svd.matrixU().leftCols(r);
}

Mat kernel(const Mat& a, double tol_rel) {
    if (a.cols() == 0) return Mat(0, 0);
    if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const int r = svd_rank(svd, tol_rel);
    return svd.matrixV().rightCols(a.cols() - r);
}

Mat span_union(const std::vector<Mat>& blocks, double tol_rel) {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    for (const auto& b : blocks) {
        if (b.rows() > 0) rows = b.rows();
        cols += b.cols();
    }
    Mat all(rows, cols);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        if (b.cols() == 0) continue;
        all.middleCols(at, b.cols()) = b;
        at += b.cols();
    }
    return column_space(all, tol_rel);
}

Mat projector(const Mat& basis) {
    if (basis.cols() == 0) return Mat::Zero(basis.rows(), basis.rows());
    return basis * basis.adjoint();
}

double subspace_distance(const Mat& basis_a, const Mat& basis_b) {
    return (projector(basis_a) - projector(basis_b)).norm();
}

double containment_defect(const Mat& sub, const Mat& ambient) {
    if (sub.cols() == 0) return 0.0;
    const Mat residual = sub - projector(ambient) * sub;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < residual.cols(); ++j)
        worst = std::max(worst, residual.col(j).norm());
    return worst;
}

Vec min_norm_solve(const Mat& a, const Vec& b, double tol_rel) {
    if (a.cols() == 0) return Vec(0);
    if (a.rows() == 0) return Vec::Zero(a.cols());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol_rel);
    return svd.solve(b);
}

Mat pseudo_inverse(const Mat& a, double tol_rel) {
    if (a.rows() == 0 || a.cols() == 0) return Mat(a.cols(), a.rows());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int r = svd_rank(svd, tol_rel);
    Mat result = Mat::Zero(a.cols(), a.rows());
    for (int i = 0; i < r; ++i)
        result += (Cplx(1.0 / svd.singularValues()[i], 0.0)) * svd.matrixV().col(i) *
                  svd.matrixU().col(i).adjoint();
    return result;
}

HermitianSpectrum hermitian_spectrum(const Mat& h, double tol_rel) {
    HermitianSpectrum out;
    if (h.rows() == 0) {
        out.eigenvalues = RealVec(0);
        out.eigenvectors = Mat(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors();
    const double lambda_max = out.eigenvalues.size() ? out.eigenvalues[out.eigenvalues.size() - 1] : 0.0;
    out.cutoff = tol_rel * (1.0 + std::abs(lambda_max));
    out.kernel_dim = 0;
    for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i)
        if (out.eigenvalues[i] < out.cutoff) ++out.kernel_dim;
    return out;
}

Mat hermitian_kernel(const Mat& h, double tol_rel) {
    auto spec = hermitian_spectrum(h, tol_rel);
    return spec.eigenvectors.leftCols(spec.kernel_dim);
}

Mat green_inverse(const Mat& h, double tol_rel) {
    auto spec = hermitian_spectrum(h, tol_rel);
    Mat g = Mat::Zero(h.rows(), h.cols());
    for (Eigen::Index i = spec.kernel_dim; i < spec.eigenvalues.size(); ++i)
        g += (Cplx(1.0 / spec.eigenvalues[i], 0.0)) * spec.eigenvectors.col(i) *
             spec.eigenvectors.col(i).adjoint();
    return g;
}

double max_abs(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

}  // namespace frolicher::lin
