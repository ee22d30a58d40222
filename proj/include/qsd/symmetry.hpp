// Finite unitary-group machinery, GU/CGU ensemble generation, SIM
// generators, symmetry-reduced SDPs, and measurement symmetrization.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsd/detection.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/measurement.hpp"
#include "qsd/sdp/solver.hpp"

namespace qsd {

struct UnitaryGroup {
    int order = 0;
    std::vector<Mat> elements;   // elements[0] = I
    Eigen::MatrixXi table;       // r(j,i): U_j^* U_i = U_{table(j,i)}
};

// Verifies unitarity, distinctness, and closure; builds the multiplication
// table by nearest-element matching under Frobenius distance. The identity
// is moved to the front if it is listed elsewhere.
UnitaryGroup close_group(const std::vector<Mat>& elements, const Tolerances& tol = {});

// "cyclic-shift:<m>" (requires n == m), "diagonal-phase:<m>" (Fourier
// characters diag(omega^{jk})), "dihedral:<K>" (order 2K on the real plane).
UnitaryGroup builtin_group(const std::string& name, int n, const Tolerances& tol = {});

struct GuSpec {
    UnitaryGroup group;
    Mat generator;               // factor phi, n x r
};

struct CguSpec {
    UnitaryGroup group;                          // order l
    std::vector<Mat> generators;                 // phi_1..phi_r
    std::optional<std::vector<Mat>> generator_group;  // V_1..V_r, V_1 = I
};

struct ConditionResult {
    bool holds = false;
    std::optional<double> alpha;
    double deviation = 0.0;
};

StateEnsemble generate_gu(const GuSpec& spec, const Tolerances& tol = {});

// States ordered (i, k) -> index i*r + k: group element outer, generator inner.
StateEnsemble generate_cgu(const CguSpec& spec, const Tolerances& tol = {});

// mu = (gamma/sqrt(m)) Delta^-1 phi; lifted factors U_i mu match the
// ensemble's SIM factors.
Mat gu_sim_generator(const GuSpec& spec, double beta, const Tolerances& tol = {});

std::vector<Mat> cgu_sim_generators(const CguSpec& spec, double beta, const Tolerances& tol = {});

// phi*(Phi Phi*)^-1 phi = alpha I test (equals the Theorem-1 condition on
// the generated ensemble).
ConditionResult gu_condition_check(const GuSpec& spec, const Tolerances& tol = {});

ConditionResult cgu_condition_check(const CguSpec& spec, const Tolerances& tol = {});

struct CommutingCheck {
    bool commutes_up_to_phase = false;
    RMat theta;                  // l x r phase table, valid when commuting
    std::optional<Mat> mu_bar;   // unit-gamma single generator (1/sqrt(lr)) Delta^-1 phi_1
};

CommutingCheck commuting_generators_check(const CguSpec& spec, const Tolerances& tol = {});

// Reduced problems: one n-dim block Pi (GU) or r blocks Pi_k (CGU), the
// operator-inequality slack as an affine PSD constraint, and the rate row.
// At beta = 0 the slack becomes the operator equality sum U Pi U* = I.
sdp::SdpProblem build_gu_reduced(const GuSpec& spec, double beta, const Tolerances& tol = {});
sdp::SdpProblem build_cgu_reduced(const CguSpec& spec, double beta, const Tolerances& tol = {});

struct ReducedSolution {
    std::vector<Mat> generators;       // optimal reduced blocks (1 for GU, r for CGU)
    RejectingMeasurement measurement;  // lifted covariant measurement
    ProbabilityTriple triple;
    double p_d = 0.0;
    int iterations = 0;
    sdp::SolveStatus status = sdp::SolveStatus::NumericalFailure;
};

ReducedSolution solve_gu_reduced(const GuSpec& spec, double beta,
                                 const sdp::SolveOptions& options = {},
                                 const Tolerances& tol = {});

ReducedSolution solve_cgu_reduced(const CguSpec& spec, double beta,
                                  const sdp::SolveOptions& options = {},
                                  const Tolerances& tol = {});

// Group-averages a feasible measurement for the GU ensemble of `group`:
// Pi_bar_i = (1/m) sum_j U_j Pi_{r(j,i)} U_j*, preserving P_D and P_I and
// returning a covariant measurement.
RejectingMeasurement symmetrize(const UnitaryGroup& group, const RejectingMeasurement& meas,
                                const Tolerances& tol = {});

}  // namespace qsd
