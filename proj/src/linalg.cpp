#include "qsd/linalg.hpp"

#include <cmath>

namespace qsd {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonHermitian: return "NonHermitian";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::TraceNotOne: return "TraceNotOne";
        case ErrorCode::PriorsInvalid: return "PriorsInvalid";
        case ErrorCode::DeltaSingular: return "DeltaSingular";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidPOVM: return "InvalidPOVM";
        case ErrorCode::BetaBelowMin: return "BetaBelowMin";
        case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
        case ErrorCode::ConditionFails: return "ConditionFails";
        case ErrorCode::QNotCoisometry: return "QNotCoisometry";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::NotClosed: return "NotClosed";
        case ErrorCode::DuplicateElements: return "DuplicateElements";
        case ErrorCode::GeneratorGroupMissing: return "GeneratorGroupMissing";
        case ErrorCode::RecoveryInfeasible: return "RecoveryInfeasible";
        case ErrorCode::UnsupportedSize: return "UnsupportedSize";
        case ErrorCode::NoStrictlyFeasibleStart: return "NoStrictlyFeasibleStart";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::InfeasibleInput: return "InfeasibleInput";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "UnknownError";
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

bool is_hermitian(const Mat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint().eval()).cwiseAbs().maxCoeff() <= tol;
}

RVec hermitian_eigenvalues(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double min_eigenvalue(const Mat& h) { return hermitian_eigenvalues(h).minCoeff(); }

double max_eigenvalue(const Mat& h) { return hermitian_eigenvalues(h).maxCoeff(); }

double spectral_norm(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

int numerical_rank(const Mat& h, double threshold) {
    RVec ev = hermitian_eigenvalues(h);
    int r = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > threshold) ++r;
    return r;
}

namespace {

// Apply a spectral function to a Hermitian matrix.
template <typename F>
Mat spectral_apply(const Mat& h, F f) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    RVec ev = es.eigenvalues();
    Vec fv(ev.size());
    for (int i = 0; i < ev.size(); ++i) fv(i) = cxd(f(ev(i)), 0.0);
    return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

Mat psd_inverse(const Mat& h) {
    return spectral_apply(h, [](double x) { return 1.0 / x; });
}

Mat psd_sqrt(const Mat& h) {
    return spectral_apply(h, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Mat psd_inv_sqrt(const Mat& h) {
    return spectral_apply(h, [](double x) { return 1.0 / std::sqrt(std::max(x, 0.0)); });
}

RVec herm_to_coords(const Mat& h) {
    const int n = static_cast<int>(h.rows());
    RVec x(n * n);
    int k = 0;
    for (int i = 0; i < n; ++i) x(k++) = h(i, i).real();
    const double s = std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            x(k++) = s * h(i, j).real();
            x(k++) = s * h(i, j).imag();
        }
    }
    return x;
}

Mat coords_to_herm(const RVec& x, int n) {
    Mat h = Mat::Zero(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i) h(i, i) = cxd(x(k++), 0.0);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double re = x(k++) * s;
            double im = x(k++) * s;
            h(i, j) = cxd(re, im);
            h(j, i) = cxd(re, -im);
        }
    }
    return h;
}

double herm_inner(const Mat& a, const Mat& b) { return (a * b).trace().real(); }

}  // namespace qsd
