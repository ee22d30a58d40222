// Shared fixtures for the unit and acceptance suites.
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "qsd/ensemble.hpp"
#include "qsd/measurement.hpp"
#include "qsd/symmetry.hpp"

namespace qsd::testing {

inline Mat column(std::initializer_list<cxd> entries) {
    Mat v(static_cast<Eigen::Index>(entries.size()), 1);
    Eigen::Index r = 0;
    for (cxd e : entries) v(r++, 0) = e;
    return v;
}

// Three equiprobable real qubit states 60 degrees apart.
inline StateEnsemble trine(const Tolerances& tol = {}) {
    const double s = std::sqrt(3.0) / 2.0;
    std::vector<StateInput> in;
    in.push_back({1.0 / 3.0, column({1.0, 0.0}), StateInput::Kind::Factor});
    in.push_back({1.0 / 3.0, column({0.5, s}), StateInput::Kind::Factor});
    in.push_back({1.0 / 3.0, column({-0.5, s}), StateInput::Kind::Factor});
    return build_ensemble(in, tol);
}

// Equiprobable pure qubit pair with overlap c = cos(theta).
inline StateEnsemble pair(double c, const Tolerances& tol = {}) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    std::vector<StateInput> in;
    in.push_back({0.5, column({1.0, 0.0}), StateInput::Kind::Factor});
    in.push_back({0.5, column({c, s}), StateInput::Kind::Factor});
    return build_ensemble(in, tol);
}

inline StateEnsemble orthonormal_pair(const Tolerances& tol = {}) { return pair(0.0, tol); }

// C_3 rotation group on the real plane; its orbit of |0> is the trine up to
// state relabeling and sign.
inline GuSpec trine_gu(const Tolerances& tol = {}) {
    std::vector<Mat> els;
    for (int k = 0; k < 3; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 3.0;
        Mat r(2, 2);
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        els.push_back(r);
    }
    GuSpec spec;
    spec.group = close_group(els, tol);
    spec.generator = column({1.0, 0.0});
    return spec;
}

// Order-4 Fourier (diagonal-phase) GU ensemble on a qubit.
inline GuSpec fourier_gu(const Tolerances& tol = {}) {
    GuSpec spec;
    spec.group = builtin_group("diagonal-phase:4", 2, tol);
    spec.generator = column({std::sqrt(0.7), std::sqrt(0.3)});
    return spec;
}

// CGU over {I, X} with generators phi and Z phi, generator group {I, Z}.
inline CguSpec cgu_pair(const Tolerances& tol = {}) {
    Mat x(2, 2), z(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    z << 1.0, 0.0, 0.0, -1.0;
    CguSpec spec;
    spec.group = close_group({Mat::Identity(2, 2), x}, tol);
    const double a = std::sqrt(0.8), b = std::sqrt(0.2);
    spec.generators = {column({a, b}), column({a, -b})};
    spec.generator_group = std::vector<Mat>{Mat::Identity(2, 2), z};
    return spec;
}

inline Mat random_gaussian(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) a(r, c) = cxd(g(rng), g(rng));
    return a;
}

inline StateEnsemble random_ensemble(std::mt19937_64& rng, int n, int m, bool pure,
                                     const Tolerances& tol = {}) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::uniform_int_distribution<int> rank(1, n);
    std::vector<StateInput> in;
    std::vector<double> priors(static_cast<size_t>(m));
    double total = 0.0;
    for (double& p : priors) total += (p = u(rng));
    for (int i = 0; i < m; ++i) {
        const int r = pure ? 1 : rank(rng);
        Mat phi = random_gaussian(rng, n, r);
        phi /= std::sqrt((phi.adjoint() * phi).trace().real());
        in.push_back({priors[static_cast<size_t>(i)] / total, phi, StateInput::Kind::Factor});
    }
    return build_ensemble(in, tol);
}

// Random valid POVM: S^-1/2-normalized random PSD operators.
inline RejectingMeasurement random_measurement(std::mt19937_64& rng, int n, int m) {
    std::vector<Mat> raw;
    Mat s = Mat::Zero(n, n);
    for (int i = 0; i <= m; ++i) {
        Mat g = random_gaussian(rng, n, n);
        raw.push_back(g * g.adjoint());
        s += raw.back();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    Mat isq = es.eigenvectors() *
              es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal() *
              es.eigenvectors().adjoint();
    RejectingMeasurement meas;
    meas.n = n;
    meas.m = m;
    for (const Mat& a : raw) meas.ops.push_back(0.5 * (isq * a * isq + (isq * a * isq).adjoint()));
    return meas;
}

template <class F>
std::optional<ErrorCode> thrown_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace qsd::testing
