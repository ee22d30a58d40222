#include "qsd/detection.hpp"

#include <cmath>

#include "qsd/linalg.hpp"

namespace qsd {

namespace {

// Below this the inconclusive rate is treated as exactly zero: the feasible
// set has no strict interior at beta = 0 (Delta > 0 forces Pi_0 = 0), so the
// block and its rate row are eliminated instead of perturbed.
constexpr double kBetaZero = 1e-12;

void require_beta(double beta) {
    if (!(beta >= 0.0) || !(beta < 1.0))
        throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0, 1), got " + std::to_string(beta));
}

double direct_p_d(const StateEnsemble& ens, const RejectingMeasurement& meas) {
    double p_d = 0.0;
    for (int i = 0; i < ens.m; ++i)
        p_d += ens.states[static_cast<size_t>(i)].prior *
               herm_inner(ens.states[static_cast<size_t>(i)].rho, meas.ops[static_cast<size_t>(i) + 1]);
    return p_d;
}

}  // namespace

sdp::SdpProblem build_primal(const StateEnsemble& ens, double beta) {
    require_beta(beta);
    const int n = ens.n;
    const int m = ens.m;
    const bool keep_pi0 = beta >= kBetaZero;

    sdp::SdpProblem p;
    p.sense = sdp::Sense::Maximize;
    int pi0 = -1;
    if (keep_pi0) pi0 = p.add_block("Pi0", n);
    std::vector<int> pi(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) pi[static_cast<size_t>(i)] = p.add_block("Pi" + std::to_string(i + 1), n);

    for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b) {
        sdp::PsdConstraint c;
        c.name = p.blocks[static_cast<size_t>(b)].name;
        c.dim = n;
        c.block_terms.push_back({b, 1.0, {}});
        p.psd.push_back(std::move(c));
    }

    std::vector<sdp::BlockTerm> resolution;
    for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b) resolution.push_back({b, 1.0, {}});
    p.add_operator_equality(resolution, {}, Mat::Identity(n, n));

    if (keep_pi0) {
        sdp::LinearFunc rate;
        rate.matrix_terms.emplace_back(pi0, ens.Delta);
        rate.rhs = beta;
        p.equalities.push_back(std::move(rate));
    }

    for (int i = 0; i < m; ++i)
        p.objective.matrix_terms.emplace_back(
            pi[static_cast<size_t>(i)],
            (ens.states[static_cast<size_t>(i)].prior * ens.states[static_cast<size_t>(i)].rho).eval());

    p.start = RVec::Zero(p.num_coords());
    if (keep_pi0) p.set_block(p.start, pi0, (beta * Mat::Identity(n, n)).eval());
    for (int i = 0; i < m; ++i)
        p.set_block(p.start, pi[static_cast<size_t>(i)], (((1.0 - beta) / m) * Mat::Identity(n, n)).eval());
    return p;
}

sdp::SdpProblem build_dual(const StateEnsemble& ens, double beta) {
    require_beta(beta);
    const int n = ens.n;
    const bool keep_delta = beta >= kBetaZero;

    sdp::SdpProblem p;
    p.sense = sdp::Sense::Minimize;
    int xb = p.add_block("X", n);
    int ds = keep_delta ? p.add_scalar("delta") : -1;

    for (int i = 0; i < ens.m; ++i) {
        sdp::PsdConstraint c;
        c.name = "S" + std::to_string(i + 1);
        c.dim = n;
        c.constant = -ens.states[static_cast<size_t>(i)].prior * ens.states[static_cast<size_t>(i)].rho;
        c.block_terms.push_back({xb, 1.0, {}});
        p.psd.push_back(std::move(c));
    }
    if (keep_delta) {
        sdp::PsdConstraint c;
        c.name = "S0";
        c.dim = n;
        c.block_terms.push_back({xb, 1.0, {}});
        c.scalar_terms.push_back({ds, (-ens.Delta).eval()});
        p.psd.push_back(std::move(c));
    }

    p.objective.matrix_terms.emplace_back(xb, Mat::Identity(n, n));
    if (keep_delta) p.objective.scalar_terms.emplace_back(ds, -beta);

    double pmax = 0.0;
    for (const auto& st : ens.states) pmax = std::max(pmax, st.prior);
    p.start = RVec::Zero(p.num_coords());
    p.set_block(p.start, xb, ((1.0 + pmax) * Mat::Identity(n, n)).eval());
    if (keep_delta) p.set_scalar(p.start, ds, 0.0);
    return p;
}

PrimalSolution solve_primal(const StateEnsemble& ens, double beta, const sdp::SolveOptions& options) {
    sdp::SdpProblem prob = build_primal(ens, beta);
    sdp::SdpSolution sol = sdp::solve(prob, options);

    PrimalSolution out;
    out.status = sol.status;
    out.iterations = sol.newton_iterations;
    out.objective = sol.objective;

    const bool keep_pi0 = beta >= kBetaZero;
    out.measurement.n = ens.n;
    out.measurement.m = ens.m;
    out.measurement.ops.push_back(keep_pi0 ? sol.block_values[0] : Mat::Zero(ens.n, ens.n));
    const int first = keep_pi0 ? 1 : 0;
    for (int i = 0; i < ens.m; ++i)
        out.measurement.ops.push_back(sol.block_values[static_cast<size_t>(first + i)]);

    if (sol.status == sdp::SolveStatus::Optimal) out.triple = evaluate(ens, out.measurement);
    return out;
}

DualSolution solve_dual(const StateEnsemble& ens, double beta, const sdp::SolveOptions& options) {
    sdp::SdpProblem prob = build_dual(ens, beta);
    sdp::SdpSolution sol = sdp::solve(prob, options);

    DualSolution out;
    out.status = sol.status;
    out.iterations = sol.newton_iterations;
    out.objective = sol.objective;
    out.certificate.X = hermitian_part(sol.block_values[0]);
    out.certificate.beta = beta;
    if (beta >= kBetaZero) {
        out.certificate.delta = sol.scalar_values[0];
    } else {
        // Largest delta keeping X >= delta*Delta; leaves the dual value unchanged.
        out.certificate.delta =
            min_eigenvalue(ens.delta_inv_sqrt * out.certificate.X * ens.delta_inv_sqrt);
    }
    return out;
}

RecoveryResult recover_primal(const StateEnsemble& ens, const Mat& X, double delta, double beta,
                              const sdp::SolveOptions& options, const Tolerances& tol) {
    require_beta(beta);
    const int n = ens.n;
    const int m = ens.m;
    const bool keep_pi0 = beta >= kBetaZero;
    Mat x = hermitian_part(X);
    const double threshold = 1e-4 * (1.0 + spectral_norm(x));
    const double dual_value = x.trace().real() - delta * beta;

    // Null-space bases: index 0..m-1 for the states, index m for Pi_0.
    std::vector<Mat> supports(static_cast<size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        Mat slack;
        if (i < m)
            slack = x - ens.states[static_cast<size_t>(i)].prior * ens.states[static_cast<size_t>(i)].rho;
        else if (keep_pi0)
            slack = x - delta * ens.Delta;
        else
            continue;  // Pi_0 fixed to zero
        Eigen::SelfAdjointEigenSolver<Mat> es(slack);
        int d = 0;
        for (int k = 0; k < n; ++k)
            if (es.eigenvalues()(k) <= threshold) ++d;
        Mat v(n, d);
        int c = 0;
        for (int k = 0; k < n; ++k)
            if (es.eigenvalues()(k) <= threshold) v.col(c++) = es.eigenvectors().col(k);
        supports[static_cast<size_t>(i)] = std::move(v);
    }

    bool ok = true;
    std::vector<int> offsets(static_cast<size_t>(m) + 1, -1);
    int total = 0;
    for (int i = 0; i <= m; ++i) {
        int d = static_cast<int>(supports[static_cast<size_t>(i)].cols());
        if (d > 0) {
            offsets[static_cast<size_t>(i)] = total;
            total += d * d;
        }
    }
    if (total == 0) ok = false;

    RejectingMeasurement meas;
    if (ok) {
        const int rows = n * n + (keep_pi0 ? 1 : 0);
        RMat sys = RMat::Zero(rows, total);
        RVec rhs(rows);
        rhs.head(n * n) = herm_to_coords(Mat::Identity(n, n));
        for (int i = 0; i <= m; ++i) {
            const Mat& v = supports[static_cast<size_t>(i)];
            const int d = static_cast<int>(v.cols());
            if (d == 0) continue;
            for (int q = 0; q < d * d; ++q) {
                RVec e = RVec::Zero(d * d);
                e(q) = 1.0;
                Mat bq = coords_to_herm(e, d);
                sys.col(offsets[static_cast<size_t>(i)] + q).head(n * n) =
                    herm_to_coords(v * bq * v.adjoint());
            }
            if (keep_pi0 && i == m)
                sys.row(n * n).segment(offsets[static_cast<size_t>(i)], d * d) =
                    herm_to_coords(v.adjoint() * ens.Delta * v).transpose();
        }
        if (keep_pi0) rhs(n * n) = beta;

        RVec coef = sys.completeOrthogonalDecomposition().solve(rhs);
        if ((sys * coef - rhs).cwiseAbs().maxCoeff() > 1e-6) ok = false;

        if (ok) {
            meas.n = n;
            meas.m = m;
            meas.ops.assign(static_cast<size_t>(m) + 1, Mat::Zero(n, n));
            for (int i = 0; i <= m; ++i) {
                const Mat& v = supports[static_cast<size_t>(i)];
                const int d = static_cast<int>(v.cols());
                if (d == 0) continue;
                Mat c = coords_to_herm(coef.segment(offsets[static_cast<size_t>(i)], d * d), d);
                // PSD enforcement: clip small negative eigenvalues.
                Eigen::SelfAdjointEigenSolver<Mat> es(c);
                if (es.eigenvalues().minCoeff() < -1e-6) {
                    ok = false;
                    break;
                }
                Vec clipped(d);
                for (int k = 0; k < d; ++k)
                    clipped(k) = cxd(std::max(es.eigenvalues()(k), 0.0), 0.0);
                Mat cpsd = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
                size_t slot = i < m ? static_cast<size_t>(i) + 1 : 0;
                meas.ops[slot] = v * cpsd * v.adjoint();
            }
        }
        if (ok) {
            PovmReport rep = validate_povm(meas, tol);
            if (!rep.pass) ok = false;
        }
        if (ok && std::abs(direct_p_d(ens, meas) - dual_value) > tol.gap) ok = false;
    }

    RecoveryResult out;
    if (ok) {
        out.measurement = std::move(meas);
        out.used_fallback = false;
        return out;
    }
    PrimalSolution fallback = solve_primal(ens, beta, options);
    if (fallback.status != sdp::SolveStatus::Optimal)
        throw Error(ErrorCode::RecoveryInfeasible, "support recovery and direct solve both failed");
    out.measurement = std::move(fallback.measurement);
    out.used_fallback = true;
    return out;
}

}  // namespace qsd
