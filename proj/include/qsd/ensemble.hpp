// State-side data: density operators, priors, factors, weighted factors, and
// the ensemble average Delta with its spectral summary.
#pragma once

#include <vector>

#include "qsd/types.hpp"

namespace qsd {

struct StateInput {
    enum class Kind { Density, Factor };
    double prior = 0.0;
    Mat matrix;          // n x n density, or n x r factor
    Kind kind = Kind::Density;
};

struct State {
    double prior;        // p_i, positive, renormalized to sum 1
    Mat rho;             // n x n Hermitian PSD unit trace
    Mat factor;          // phi_i, n x r_i with phi phi* = rho
    Mat psi;             // sqrt(p_i) phi_i
};

struct SpectralSummary {
    RVec eigenvalues;    // eigenvalues of Delta, descending
    double lambda_min = 0.0;
    double beta_min = 0.0;   // 1 - n * lambda_min
};

struct StateEnsemble {
    int n = 0;
    int m = 0;
    std::vector<State> states;
    Mat Psi;             // n x (sum r_i), block columns psi_i
    Mat Delta;           // sum p_i rho_i
    SpectralSummary spectral;
    Mat delta_inv;       // Delta^-1
    Mat delta_inv_sqrt;  // Delta^-1/2
};

// Validates inputs, derives factors (eigendecomposition when a density is
// given, eigenvalues truncated at tol.rank), weighted factors, Psi, Delta,
// and the spectral summary. Priors are renormalized when their sum is within
// tol.prob of 1, otherwise PriorsInvalid.
StateEnsemble build_ensemble(const std::vector<StateInput>& specs, const Tolerances& tol = {});

Mat ensemble_average(const StateEnsemble& ens);

double beta_min(const StateEnsemble& ens);

// Checks that replacing factor phi_i by phi_i Q (Q a coisometry, Q Q* = I)
// reproduces rho_i and leaves psi_i* Delta^-1 psi_i invariant.
bool refactor_check(const StateEnsemble& ens, int index, const Mat& q, const Tolerances& tol = {});

}  // namespace qsd
