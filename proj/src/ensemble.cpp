#include "qsd/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "qsd/linalg.hpp"

namespace qsd {

namespace {

// Factor of a PSD matrix: eigenvector columns scaled by sqrt eigenvalues,
// truncated at tol_rank. Columns ordered by descending eigenvalue.
Mat factor_from_density(const Mat& rho, double tol_rank) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    RVec ev = es.eigenvalues();
    int keep = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > tol_rank) ++keep;
    // trace-1 input guarantees keep >= 1
    Mat phi(rho.rows(), keep);
    int c = 0;
    for (int i = static_cast<int>(ev.size()) - 1; i >= 0 && c < keep; --i) {
        if (ev(i) > tol_rank) phi.col(c++) = es.eigenvectors().col(i) * std::sqrt(ev(i));
    }
    return phi;
}

}  // namespace

StateEnsemble build_ensemble(const std::vector<StateInput>& specs, const Tolerances& tol) {
    if (specs.empty()) throw Error(ErrorCode::PriorsInvalid, "ensemble needs at least one state");

    double psum = 0.0;
    for (const auto& s : specs) {
        if (!(s.prior > 0.0)) throw Error(ErrorCode::PriorsInvalid, "priors must be positive");
        psum += s.prior;
    }
    if (std::abs(psum - 1.0) > tol.prob)
        throw Error(ErrorCode::PriorsInvalid,
                    "priors sum to " + std::to_string(psum) + ", expected 1");

    StateEnsemble ens;
    ens.m = static_cast<int>(specs.size());
    ens.n = static_cast<int>(specs[0].matrix.rows());
    if (ens.n < 1) throw Error(ErrorCode::DimensionMismatch, "empty state matrix");

    long total_cols = 0;
    for (const auto& s : specs) {
        if (static_cast<int>(s.matrix.rows()) != ens.n)
            throw Error(ErrorCode::DimensionMismatch, "states have differing dimensions");

        State st;
        st.prior = s.prior / psum;
        if (s.kind == StateInput::Kind::Density) {
            if (s.matrix.cols() != s.matrix.rows())
                throw Error(ErrorCode::DimensionMismatch, "density operator must be square");
            if (!is_hermitian(s.matrix, tol.herm))
                throw Error(ErrorCode::NonHermitian, "density operator is not Hermitian");
            Mat rho = hermitian_part(s.matrix);
            if (min_eigenvalue(rho) < -tol.psd)
                throw Error(ErrorCode::NotPSD, "density operator has a negative eigenvalue");
            if (std::abs(rho.trace().real() - 1.0) > tol.trace)
                throw Error(ErrorCode::TraceNotOne,
                            "density trace " + std::to_string(rho.trace().real()));
            st.rho = rho;
            st.factor = factor_from_density(rho, tol.rank);
        } else {
            const int r = static_cast<int>(s.matrix.cols());
            if (r < 1 || r > ens.n)
                throw Error(ErrorCode::DimensionMismatch, "factor must be n x r with 1 <= r <= n");
            st.factor = s.matrix;
            st.rho = s.matrix * s.matrix.adjoint();
            if (std::abs(st.rho.trace().real() - 1.0) > tol.trace)
                throw Error(ErrorCode::TraceNotOne,
                            "factor gives trace " + std::to_string(st.rho.trace().real()));
        }
        st.psi = std::sqrt(st.prior) * st.factor;
        total_cols += st.factor.cols();
        ens.states.push_back(std::move(st));
    }

    ens.Delta = Mat::Zero(ens.n, ens.n);
    for (const auto& st : ens.states) ens.Delta += st.prior * st.rho;
    ens.Delta = hermitian_part(ens.Delta);

    ens.Psi = Mat(ens.n, total_cols);
    long c = 0;
    for (const auto& st : ens.states) {
        ens.Psi.middleCols(c, st.factor.cols()) = st.psi;
        c += st.factor.cols();
    }

    Eigen::SelfAdjointEigenSolver<Mat> es(ens.Delta);
    RVec ev = es.eigenvalues();  // ascending
    if (ev(0) <= tol.rank) {
        int deficient = 0;
        for (int i = 0; i < ev.size(); ++i)
            if (ev(i) <= tol.rank) ++deficient;
        throw Error(ErrorCode::DeltaSingular,
                    "ensemble average is singular; states span only " +
                        std::to_string(ens.n - deficient) + " of " + std::to_string(ens.n) +
                        " dimensions");
    }

    ens.spectral.eigenvalues = ev.reverse();
    ens.spectral.lambda_min = ev(0);
    ens.spectral.beta_min = 1.0 - ens.n * ev(0);
    if (ens.spectral.beta_min < 0.0) ens.spectral.beta_min = 0.0;  // guard rounding

    Vec inv = ev.cast<cxd>();
    Vec invs = ev.cast<cxd>();
    for (int i = 0; i < ev.size(); ++i) {
        inv(i) = cxd(1.0 / ev(i), 0.0);
        invs(i) = cxd(1.0 / std::sqrt(ev(i)), 0.0);
    }
    ens.delta_inv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    ens.delta_inv_sqrt = es.eigenvectors() * invs.asDiagonal() * es.eigenvectors().adjoint();

    // Internal consistency: Delta must equal Psi Psi* up to factor tolerance.
    double dev = (ens.Delta - ens.Psi * ens.Psi.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol.factor)
        throw Error(ErrorCode::NumericalFailure,
                    "Delta - Psi Psi* deviation " + std::to_string(dev));
    return ens;
}

Mat ensemble_average(const StateEnsemble& ens) { return ens.Delta; }

double beta_min(const StateEnsemble& ens) { return ens.spectral.beta_min; }

bool refactor_check(const StateEnsemble& ens, int index, const Mat& q, const Tolerances& tol) {
    if (index < 0 || index >= ens.m) throw Error(ErrorCode::DimensionMismatch, "state index");
    const State& st = ens.states[static_cast<size_t>(index)];
    if (q.rows() != st.factor.cols())
        throw Error(ErrorCode::DimensionMismatch, "Q row count must match factor columns");
    Mat qq = q * q.adjoint();
    if ((qq - Mat::Identity(q.rows(), q.rows())).cwiseAbs().maxCoeff() > tol.factor)
        throw Error(ErrorCode::QNotCoisometry, "Q Q* != I");

    Mat phi2 = st.factor * q;
    if ((phi2 * phi2.adjoint() - st.rho).cwiseAbs().maxCoeff() > tol.factor) return false;

    // psi* Delta^-1 psi must transform as Q* M Q, so the alpha-I property is
    // invariant: check M2 = Q* M Q directly.
    Mat m1 = st.psi.adjoint() * ens.delta_inv * st.psi;
    Mat psi2 = std::sqrt(st.prior) * phi2;
    Mat m2 = psi2.adjoint() * ens.delta_inv * psi2;
    return (m2 - q.adjoint() * m1 * q).cwiseAbs().maxCoeff() <= tol.factor;
}

}  // namespace qsd
