// The two detection SDPs (primal over measurements, dual over (X, delta))
// expressed in the engine's standard form, plus solution wrappers and
// complementary-slackness primal recovery.
#pragma once

#include "qsd/certificate.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/measurement.hpp"
#include "qsd/sdp/solver.hpp"

namespace qsd {

// Primal: maximize sum p_i Tr(rho_i Pi_i), blocks Pi_0..Pi_m, equalities
// sum Pi = I and Tr(Delta Pi_0) = beta. When beta < 1e-12 the inconclusive
// block is eliminated exactly (it is forced to zero by Delta > 0).
sdp::SdpProblem build_primal(const StateEnsemble& ens, double beta);

// Dual: minimize Tr(X) - delta*beta over free Hermitian X and free delta,
// PSD constraints X - p_i rho_i >= 0 and X - delta*Delta >= 0. When
// beta < 1e-12 delta is eliminated (the barrier is unbounded in it) and
// reported as lambda_min of Delta^-1/2 X Delta^-1/2.
sdp::SdpProblem build_dual(const StateEnsemble& ens, double beta);

struct PrimalSolution {
    RejectingMeasurement measurement;
    ProbabilityTriple triple;
    double objective = 0.0;      // optimal P_D
    int iterations = 0;
    sdp::SolveStatus status = sdp::SolveStatus::NumericalFailure;
};

struct DualSolution {
    OptimalityCertificate certificate;
    double objective = 0.0;      // optimal dual value
    int iterations = 0;
    sdp::SolveStatus status = sdp::SolveStatus::NumericalFailure;
};

PrimalSolution solve_primal(const StateEnsemble& ens, double beta,
                            const sdp::SolveOptions& options = {});

DualSolution solve_dual(const StateEnsemble& ens, double beta,
                        const sdp::SolveOptions& options = {});

struct RecoveryResult {
    RejectingMeasurement measurement;
    bool used_fallback = false;   // direct primal solve was needed
};

// Builds each Pi_i on the null space of (X - p_i rho_i) (Pi_0 on that of
// X - delta*Delta), solving the resolution + rate equations restricted to
// those supports by min-norm least squares with PSD enforcement; falls back
// to a direct primal solve when that system is not solvable.
RecoveryResult recover_primal(const StateEnsemble& ens, const Mat& X, double delta, double beta,
                              const sdp::SolveOptions& options = {}, const Tolerances& tol = {});

}  // namespace qsd
