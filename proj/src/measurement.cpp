#include "qsd/measurement.hpp"

#include "qsd/linalg.hpp"

namespace qsd {

ProbabilityTriple evaluate(const StateEnsemble& ens, const RejectingMeasurement& meas,
                           const Tolerances& tol) {
    if (meas.n != ens.n || meas.m != ens.m)
        throw Error(ErrorCode::DimensionMismatch, "ensemble and measurement sizes differ");
    PovmReport rep = validate_povm(meas, tol);
    if (!rep.pass) throw Error(ErrorCode::InvalidPOVM, "measurement fails POVM validation");

    ProbabilityTriple t;
    for (int i = 0; i < ens.m; ++i) {
        const State& st = ens.states[static_cast<size_t>(i)];
        for (int j = 0; j < ens.m; ++j) {
            double v = st.prior * herm_inner(st.rho, meas.ops[static_cast<size_t>(j + 1)]);
            if (i == j)
                t.p_d += v;
            else
                t.p_e += v;
        }
    }
    t.p_i = herm_inner(ens.Delta, meas.ops[0]);
    return t;
}

PovmReport validate_povm(const RejectingMeasurement& meas, const Tolerances& tol) {
    PovmReport rep;
    if (meas.n < 1 || static_cast<int>(meas.ops.size()) != meas.m + 1) {
        rep.pass = false;
        return rep;
    }
    Mat sum = Mat::Zero(meas.n, meas.n);
    bool ok = true;
    for (const Mat& op : meas.ops) {
        if (op.rows() != meas.n || op.cols() != meas.n) {
            rep.pass = false;
            return rep;
        }
        double asym = (op - op.adjoint().eval()).cwiseAbs().maxCoeff();
        rep.hermiticity_residual = std::max(rep.hermiticity_residual, asym);
        if (asym > tol.herm) ok = false;
        Mat h = hermitian_part(op);
        double mineig = min_eigenvalue(h);
        rep.min_eigenvalues.push_back(mineig);
        if (mineig < -tol.psd) ok = false;
        sum += h;
    }
    rep.resolution_residual = (sum - Mat::Identity(meas.n, meas.n)).cwiseAbs().maxCoeff();
    if (rep.resolution_residual > tol.resolve) ok = false;
    rep.pass = ok;
    return rep;
}

std::vector<RankEntry> rank_profile(const StateEnsemble& ens, const RejectingMeasurement& meas,
                                    double threshold) {
    if (meas.n != ens.n || meas.m != ens.m)
        throw Error(ErrorCode::DimensionMismatch, "ensemble and measurement sizes differ");
    std::vector<RankEntry> out;
    for (int i = 0; i < ens.m; ++i) {
        RankEntry e;
        e.state_rank = numerical_rank(ens.states[static_cast<size_t>(i)].rho, threshold);
        e.op_rank = numerical_rank(hermitian_part(meas.ops[static_cast<size_t>(i + 1)]), threshold);
        e.flagged = e.op_rank > e.state_rank;
        out.push_back(e);
    }
    return out;
}

RejectingMeasurement symmetrized(const RejectingMeasurement& meas) {
    RejectingMeasurement out = meas;
    for (Mat& op : out.ops) op = hermitian_part(op);
    return out;
}

}  // namespace qsd
