#include "qsd/certificate.hpp"

#include <cmath>

#include "qsd/linalg.hpp"

namespace qsd {

ResidualReport check_optimality(const StateEnsemble& ens, const RejectingMeasurement& meas,
                                const OptimalityCertificate& cert, double beta,
                                const Tolerances& tol) {
    if (meas.n != ens.n || meas.m != ens.m || cert.X.rows() != ens.n || cert.X.cols() != ens.n)
        throw Error(ErrorCode::DimensionMismatch, "certificate/measurement/ensemble sizes differ");

    ResidualReport rep;
    Mat x = hermitian_part(cert.X);
    const double scale = 1.0 + spectral_norm(x);

    // Order everywhere: states 1..m first, inconclusive pair last.
    std::vector<Mat> slacks;
    for (const auto& st : ens.states) slacks.push_back(x - st.prior * st.rho);
    slacks.push_back(x - cert.delta * ens.Delta);

    bool dual_ok = true;
    for (const Mat& s : slacks) {
        double mn = min_eigenvalue(s);
        rep.dual_feasibility_min_eigs.push_back(mn);
        if (mn < -tol.kkt * scale) dual_ok = false;
    }

    bool slack_ok = true;
    for (size_t i = 0; i < slacks.size(); ++i) {
        size_t op = i + 1 < slacks.size() ? i + 1 : 0;  // pair last slack with Pi_0
        Mat prod = slacks[i] * hermitian_part(meas.ops[op]);
        double raw = spectral_norm(prod);
        double sym = spectral_norm(hermitian_part(prod));
        rep.slackness_raw.push_back(raw);
        rep.slackness_sym.push_back(sym);
        if (raw > tol.kkt * scale) slack_ok = false;
    }

    PovmReport povm = validate_povm(meas, tol);
    double p_i = herm_inner(ens.Delta, hermitian_part(meas.ops[0]));
    rep.p_i_deviation = std::abs(p_i - beta);
    rep.feasible = povm.pass && rep.p_i_deviation <= tol.triple;

    double p_d = 0.0;
    for (int i = 0; i < ens.m; ++i)
        p_d += ens.states[static_cast<size_t>(i)].prior *
               herm_inner(ens.states[static_cast<size_t>(i)].rho,
                          hermitian_part(meas.ops[static_cast<size_t>(i) + 1]));
    rep.gap = cert.X.trace().real() - cert.delta * beta - p_d;

    rep.optimal = dual_ok && slack_ok && rep.feasible && std::abs(rep.gap) <= tol.gap;
    return rep;
}

double duality_gap(const StateEnsemble& ens, const RejectingMeasurement& meas,
                   const OptimalityCertificate& cert, double beta, const Tolerances& tol) {
    if (meas.n != ens.n || meas.m != ens.m || cert.X.rows() != ens.n)
        throw Error(ErrorCode::DimensionMismatch, "certificate/measurement/ensemble sizes differ");
    Mat x = hermitian_part(cert.X);
    const double scale = 1.0 + spectral_norm(x);
    for (const auto& st : ens.states)
        if (min_eigenvalue(x - st.prior * st.rho) < -tol.kkt * scale)
            throw Error(ErrorCode::InfeasibleInput, "certificate violates X >= p_i rho_i");
    if (min_eigenvalue(x - cert.delta * ens.Delta) < -tol.kkt * scale)
        throw Error(ErrorCode::InfeasibleInput, "certificate violates X >= delta Delta");
    PovmReport povm = validate_povm(meas, tol);
    if (!povm.pass) throw Error(ErrorCode::InfeasibleInput, "measurement fails POVM validation");

    double p_d = 0.0;
    for (int i = 0; i < ens.m; ++i)
        p_d += ens.states[static_cast<size_t>(i)].prior *
               herm_inner(ens.states[static_cast<size_t>(i)].rho,
                          hermitian_part(meas.ops[static_cast<size_t>(i) + 1]));
    return cert.X.trace().real() - cert.delta * beta - p_d;
}

}  // namespace qsd
