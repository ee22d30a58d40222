// Rejecting measurements (POVMs with an inconclusive outcome) and the
// detection / error / inconclusive probability triple.
#pragma once

#include <vector>

#include "qsd/ensemble.hpp"
#include "qsd/types.hpp"

namespace qsd {

struct RejectingMeasurement {
    int n = 0;
    int m = 0;                 // conclusive outcomes
    std::vector<Mat> ops;      // ops[0] = Pi_0 (inconclusive), ops[1..m]
};

struct ProbabilityTriple {
    double p_d = 0.0;
    double p_e = 0.0;
    double p_i = 0.0;
};

struct PovmReport {
    std::vector<double> min_eigenvalues;   // per operator, index 0 = Pi_0
    double resolution_residual = 0.0;      // max-abs entry of sum Pi - I
    double hermiticity_residual = 0.0;
    bool pass = false;
};

struct RankEntry {
    int state_rank = 0;
    int op_rank = 0;
    bool flagged = false;      // op rank exceeds state rank (informational, not an error)
};

ProbabilityTriple evaluate(const StateEnsemble& ens, const RejectingMeasurement& meas,
                           const Tolerances& tol = {});

PovmReport validate_povm(const RejectingMeasurement& meas, const Tolerances& tol = {});

// Ranks of (rho_i, Pi_i) pairs for i = 1..m at the given threshold.
std::vector<RankEntry> rank_profile(const StateEnsemble& ens, const RejectingMeasurement& meas,
                                    double threshold = 1e-10);

// Hermitian part of every operator (barrier iterates accumulate eps-scale
// asymmetry); used before validation of solver outputs.
RejectingMeasurement symmetrized(const RejectingMeasurement& meas);

}  // namespace qsd
