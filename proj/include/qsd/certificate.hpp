// Dual certificates (X, delta) and verification of the necessary-and-
// sufficient optimality conditions with residual reporting.
#pragma once

#include <vector>

#include "qsd/measurement.hpp"

namespace qsd {

struct OptimalityCertificate {
    Mat X;               // Hermitian, n x n
    double delta = 0.0;
    double beta = 0.0;
    double dual_value() const { return X.trace().real() - delta * beta; }
};

struct ResidualReport {
    // Per constraint, states i = 1..m first, then the inconclusive pair:
    // min eigenvalue of X - p_i rho_i, last entry X - delta Delta.
    std::vector<double> dual_feasibility_min_eigs;
    // ||.||_2 of the complementary-slackness products in the same order,
    // symmetrized and raw; last entry pairs (X - delta Delta) with Pi_0.
    std::vector<double> slackness_sym;
    std::vector<double> slackness_raw;
    double gap = 0.0;              // dual value - P_D
    bool feasible = false;         // measurement passes validate_povm and P_I = beta
    double p_i_deviation = 0.0;
    bool optimal = false;
};

ResidualReport check_optimality(const StateEnsemble& ens, const RejectingMeasurement& meas,
                                const OptimalityCertificate& cert, double beta,
                                const Tolerances& tol = {});

// Tr(X) - delta*beta - P_D; throws InfeasibleInput when either side is
// infeasible beyond tolerances.
double duality_gap(const StateEnsemble& ens, const RejectingMeasurement& meas,
                   const OptimalityCertificate& cert, double beta, const Tolerances& tol = {});

}  // namespace qsd
