#include "qsd/sim.hpp"

#include <cmath>

#include "qsd/linalg.hpp"

namespace qsd {

SimParameters sim_parameters(const StateEnsemble& ens, double beta, const Tolerances& tol) {
    SimParameters p;
    p.beta = beta;
    p.beta_min = ens.spectral.beta_min;
    p.gamma = std::sqrt((1.0 - beta) / ens.n);
    Theorem1Result t1 = theorem1_check(ens, tol);
    if (t1.holds) p.alpha = t1.alpha;
    return p;
}

RejectingMeasurement sim_measurement(const StateEnsemble& ens, double beta, const Tolerances&) {
    if (!(beta >= 0.0) || !(beta < 1.0))
        throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0, 1)");
    if (beta < ens.spectral.beta_min - 1e-12)
        throw Error(ErrorCode::BetaBelowMin,
                    "beta " + std::to_string(beta) + " below beta_min " +
                        std::to_string(ens.spectral.beta_min) + "; Sigma_0 would be indefinite");
    const double gamma2 = (1.0 - beta) / ens.n;
    const double gamma = std::sqrt(gamma2);

    RejectingMeasurement meas;
    meas.n = ens.n;
    meas.m = ens.m;
    meas.ops.push_back(hermitian_part(Mat::Identity(ens.n, ens.n) - gamma2 * ens.delta_inv));
    for (const auto& st : ens.states) {
        Mat mu = gamma * ens.delta_inv * st.psi;
        meas.ops.push_back(mu * mu.adjoint());
    }
    return meas;
}

Mat sim_factor(const StateEnsemble& ens, double beta, int index) {
    if (index < 0 || index >= ens.m) throw Error(ErrorCode::DimensionMismatch, "state index");
    const double gamma = std::sqrt((1.0 - beta) / ens.n);
    return gamma * ens.delta_inv * ens.states[static_cast<size_t>(index)].psi;
}

Theorem1Result theorem1_check(const StateEnsemble& ens, const Tolerances& tol) {
    Theorem1Result res;
    std::vector<Mat> ms;
    double diag_sum = 0.0;
    long diag_count = 0;
    for (const auto& st : ens.states) {
        Mat m = st.psi.adjoint() * ens.delta_inv * st.psi;
        diag_sum += m.diagonal().real().sum();
        diag_count += m.rows();
        ms.push_back(std::move(m));
    }
    const double alpha = diag_sum / static_cast<double>(diag_count);
    double dev = 0.0;
    for (const Mat& m : ms)
        dev = std::max(dev, spectral_norm(m - alpha * Mat::Identity(m.rows(), m.cols())));
    res.deviation = dev;
    res.holds = dev <= tol.cond * (1.0 + std::abs(alpha));
    if (res.holds) res.alpha = alpha;
    return res;
}

OptimalityCertificate sim_certificate(const StateEnsemble& ens, double beta, const Tolerances& tol) {
    if (beta < ens.spectral.beta_min - 1e-12)
        throw Error(ErrorCode::BetaBelowMin, "beta below beta_min");
    Theorem1Result t1 = theorem1_check(ens, tol);
    if (!t1.holds)
        throw Error(ErrorCode::ConditionFails,
                    "psi_i* Delta^-1 psi_i deviates from a common alpha I by " +
                        std::to_string(t1.deviation));
    OptimalityCertificate cert;
    cert.X = *t1.alpha * ens.Delta;
    cert.delta = *t1.alpha;
    cert.beta = beta;
    return cert;
}

std::vector<double> per_state_detection(const StateEnsemble& ens, const RejectingMeasurement& meas) {
    if (meas.n != ens.n || meas.m != ens.m)
        throw Error(ErrorCode::DimensionMismatch, "ensemble and measurement sizes differ");
    std::vector<double> out;
    for (int i = 0; i < ens.m; ++i)
        out.push_back(herm_inner(ens.states[static_cast<size_t>(i)].rho,
                                 hermitian_part(meas.ops[static_cast<size_t>(i) + 1])));
    return out;
}

}  // namespace qsd
