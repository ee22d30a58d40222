// Core aliases, tolerance configuration, and the error taxonomy shared by
// every module of the detection library.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qsd {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;   // dense complex matrices (Hermitian by convention where noted)
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// All tolerances are overridable; the defaults are the contract values used
// throughout the test suite.
struct Tolerances {
    double herm = 1e-9;      // Hermiticity deviation
    double trace = 1e-9;     // unit-trace deviation
    double prob = 1e-9;      // prior normalization
    double psd = 1e-9;       // admissible negative eigenvalue
    double factor = 1e-8;    // factor reconstruction  phi phi* vs rho
    double rank = 1e-10;     // numerical-rank threshold
    double resolve = 1e-8;   // resolution-of-identity residual
    double triple = 1e-9;    // P_D + P_E + P_I = 1
    double cond = 1e-8;      // Theorem-1 alpha-I test
    double kkt = 1e-6;       // dual feasibility / complementary slackness
    double gap = 1e-6;       // duality gap
    double group = 1e-8;     // group closure / unitarity
    double eq = 1e-8;        // SDP equality residual
    double newton = 1e-10;   // Newton decrement stop (lambda^2 / 2)
};

enum class ErrorCode {
    NonHermitian,
    NotPSD,
    TraceNotOne,
    PriorsInvalid,
    DeltaSingular,
    DimensionMismatch,
    InvalidPOVM,
    BetaBelowMin,
    BetaOutOfRange,
    ConditionFails,
    QNotCoisometry,
    NotUnitary,
    NotClosed,
    DuplicateElements,
    GeneratorGroupMissing,
    RecoveryInfeasible,
    UnsupportedSize,
    NoStrictlyFeasibleStart,
    MaxIterations,
    NumericalFailure,
    InfeasibleInput,
    ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qsd
