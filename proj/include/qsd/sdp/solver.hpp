// Logarithmic-barrier path-following solver for SdpProblem: damped Newton
// with equality constraints handled by KKT bordering from a strictly
// feasible start.
#pragma once

#include <iosfwd>

#include "qsd/sdp/problem.hpp"

namespace qsd::sdp {

struct SolveOptions {
    double tol_gap = 1e-6;
    double tol_newton = 1e-10;   // stop inner loop at lambda^2/2 <= tol_newton
    double tol_eq = 1e-8;
    double tol_psd = 1e-9;
    int max_outer = 60;
    int max_inner = 50;
    double mu_init = 1.0;
    double mu_factor = 10.0;     // outer reduction
    double armijo = 0.01;        // sufficient decrease
    double backtrack = 0.5;
    bool verbose = false;
    std::ostream* log = nullptr; // used when verbose
};

enum class SolveStatus { Optimal, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus s);

struct SdpSolution {
    std::vector<Mat> block_values;
    std::vector<double> scalar_values;
    double objective = 0.0;        // in the problem's sense
    int newton_iterations = 0;     // total inner steps
    int outer_iterations = 0;
    double mu_final = 0.0;
    double primal_residual = 0.0;  // max equality residual after correction
    double min_psd_eigenvalue = 0.0;
    SolveStatus status = SolveStatus::NumericalFailure;
    RVec v;                        // packed coordinates
};

// Throws Error(NoStrictlyFeasibleStart) when problem.start is missing, the
// wrong size, far from the equality manifold, or not strictly inside the
// PSD constraints. Other failures are reported through status.
SdpSolution solve(const SdpProblem& problem, const SolveOptions& options = {});

}  // namespace qsd::sdp
