// Scaled inverse measurement: closed-form construction, the Theorem-1
// sufficient optimality condition, and the analytic dual certificate.
#pragma once

#include <optional>
#include <vector>

#include "qsd/certificate.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/measurement.hpp"

namespace qsd {

struct SimParameters {
    double beta = 0.0;
    double gamma = 0.0;              // sqrt((1 - beta)/n)
    double beta_min = 0.0;
    std::optional<double> alpha;     // present when the Theorem-1 condition holds
};

struct Theorem1Result {
    bool holds = false;
    std::optional<double> alpha;
    double deviation = 0.0;          // max_i || psi_i* Delta^-1 psi_i - alpha I ||_2
};

SimParameters sim_parameters(const StateEnsemble& ens, double beta, const Tolerances& tol = {});

// Factors mu_i = gamma Delta^-1 psi_i, operators mu_i mu_i*, inconclusive
// operator I - gamma^2 Delta^-1. Throws BetaBelowMin below beta_min.
RejectingMeasurement sim_measurement(const StateEnsemble& ens, double beta,
                                     const Tolerances& tol = {});

// The i-th SIM factor (n x r_i), for symmetry-module cross-checks.
Mat sim_factor(const StateEnsemble& ens, double beta, int index);

Theorem1Result theorem1_check(const StateEnsemble& ens, const Tolerances& tol = {});

// X = alpha Delta, delta = alpha; requires theorem1_check to hold.
OptimalityCertificate sim_certificate(const StateEnsemble& ens, double beta,
                                      const Tolerances& tol = {});

// Conditional detection probabilities Tr(rho_i Pi_i), i = 1..m.
std::vector<double> per_state_detection(const StateEnsemble& ens, const RejectingMeasurement& meas);

}  // namespace qsd
