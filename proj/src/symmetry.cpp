#include "qsd/symmetry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "qsd/linalg.hpp"
#include "qsd/sim.hpp"

namespace qsd {

namespace {

constexpr double kBetaZero = 1e-12;  // matches detection.cpp

void require_beta(double beta) {
    if (!(beta >= 0.0) || !(beta < 1.0))
        throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0, 1), got " + std::to_string(beta));
}

int nearest_element(const std::vector<Mat>& elements, const Mat& p, double& distance) {
    int best = -1;
    distance = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(elements.size()); ++k) {
        double d = (p - elements[static_cast<size_t>(k)]).norm();
        if (d < distance) {
            distance = d;
            best = k;
        }
    }
    return best;
}

void require_group(const UnitaryGroup& g) {
    if (g.order < 1 || static_cast<int>(g.elements.size()) != g.order ||
        g.table.rows() != g.order || g.table.cols() != g.order)
        throw Error(ErrorCode::NotClosed, "group is empty or lacks a multiplication table; run close_group first");
}

// Generator validation shared by GU and CGU: n x r factor with unit-trace
// Gram (build_ensemble re-checks the trace on the assembled density).
void require_factor_shape(const Mat& phi, int n, const std::string& what) {
    if (phi.rows() != n || phi.cols() < 1 || phi.cols() > n)
        throw Error(ErrorCode::DimensionMismatch,
                    what + " must be n x r with 1 <= r <= n, got " + std::to_string(phi.rows()) + " x " +
                        std::to_string(phi.cols()) + " for n = " + std::to_string(n));
}

// Exact lifted-rate coefficient sum_i U_i* Delta U_i. Equals m * Delta when
// Delta is exactly group invariant; using the sum keeps Tr(Delta Pi_0) = beta
// for the lifted measurement even when closure only holds to tol.group.
Mat averaged_rate_coeff(const UnitaryGroup& g, const Mat& delta) {
    Mat r = Mat::Zero(delta.rows(), delta.cols());
    for (const Mat& u : g.elements) r += u.adjoint() * delta * u;
    return hermitian_part(r);
}

}  // namespace

UnitaryGroup close_group(const std::vector<Mat>& elements, const Tolerances& tol) {
    if (elements.empty())
        throw Error(ErrorCode::NotClosed, "a group needs at least one element");
    const int n = static_cast<int>(elements[0].rows());
    for (const Mat& u : elements) {
        if (u.rows() != n || u.cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "group elements must share one square dimension");
        if ((u * u.adjoint() - Mat::Identity(n, n)).norm() > tol.group)
            throw Error(ErrorCode::NotUnitary, "group element fails the unitarity check");
    }
    const int m = static_cast<int>(elements.size());
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if ((elements[static_cast<size_t>(i)] - elements[static_cast<size_t>(j)]).norm() < 2.0 * tol.group)
                throw Error(ErrorCode::DuplicateElements,
                            "elements " + std::to_string(i) + " and " + std::to_string(j) +
                                " coincide within 2 * tol_group");

    UnitaryGroup g;
    g.order = m;
    g.elements = elements;
    double d = 0.0;
    int id = nearest_element(g.elements, Mat::Identity(n, n), d);
    if (d > tol.group)
        throw Error(ErrorCode::NotClosed, "the identity is not among the elements");
    if (id != 0) std::swap(g.elements[0], g.elements[static_cast<size_t>(id)]);

    g.table.resize(m, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            Mat p = g.elements[static_cast<size_t>(j)].adjoint() * g.elements[static_cast<size_t>(i)];
            int k = nearest_element(g.elements, p, d);
            if (d > tol.group)
                throw Error(ErrorCode::NotClosed, "product U_" + std::to_string(j) + "^* U_" +
                                                      std::to_string(i) + " is not in the set");
            g.table(j, i) = k;
        }
    }
    // Latin-square guard; distinct elements make collisions impossible unless
    // the matching tolerance was borderline.
    for (int j = 0; j < m; ++j) {
        std::vector<bool> row(static_cast<size_t>(m), false), col(static_cast<size_t>(m), false);
        for (int i = 0; i < m; ++i) {
            if (row[static_cast<size_t>(g.table(j, i))] || col[static_cast<size_t>(g.table(i, j))])
                throw Error(ErrorCode::NotClosed, "multiplication table is not a Latin square");
            row[static_cast<size_t>(g.table(j, i))] = true;
            col[static_cast<size_t>(g.table(i, j))] = true;
        }
    }
    return g;
}

UnitaryGroup builtin_group(const std::string& name, int n, const Tolerances& tol) {
    const auto colon = name.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorCode::ParseError, "builtin group must be <name>:<param>, got \"" + name + "\"");
    const std::string kind = name.substr(0, colon);
    const std::string param_str = name.substr(colon + 1);
    int param = 0;
    try {
        size_t pos = 0;
        param = std::stoi(param_str, &pos);
        if (pos != param_str.size()) throw std::invalid_argument(param_str);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "builtin group parameter must be an integer, got \"" + param_str + "\"");
    }
    if (param < 1)
        throw Error(ErrorCode::ParseError, "builtin group parameter must be >= 1, got " + param_str);

    std::vector<Mat> els;
    if (kind == "cyclic-shift") {
        if (n != param)
            throw Error(ErrorCode::DimensionMismatch,
                        "cyclic-shift:" + param_str + " acts on n = " + param_str + ", got n = " + std::to_string(n));
        Mat shift = Mat::Zero(n, n);
        for (int j = 0; j < n; ++j) shift((j + 1) % n, j) = 1.0;
        Mat u = Mat::Identity(n, n);
        for (int k = 0; k < param; ++k) {
            els.push_back(u);
            u = shift * u;
        }
    } else if (kind == "diagonal-phase") {
        if (param >= 2 && n < 2)
            throw Error(ErrorCode::DimensionMismatch, "diagonal-phase characters coincide at n = 1");
        for (int k = 0; k < param; ++k) {
            Mat u = Mat::Zero(n, n);
            for (int j = 0; j < n; ++j)
                u(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j * k / param);
            els.push_back(u);
        }
    } else if (kind == "dihedral") {
        if (n != 2)
            throw Error(ErrorCode::DimensionMismatch, "dihedral groups act on n = 2, got n = " + std::to_string(n));
        for (int k = 0; k < param; ++k) {
            const double t = 2.0 * std::numbers::pi * k / param;
            Mat rot(2, 2), ref(2, 2);
            rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
            ref << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
            els.push_back(rot);
            els.push_back(ref);
        }
    } else {
        throw Error(ErrorCode::ParseError, "unknown builtin group \"" + kind + "\"");
    }
    return close_group(els, tol);
}

StateEnsemble generate_gu(const GuSpec& spec, const Tolerances& tol) {
    require_group(spec.group);
    const int n = static_cast<int>(spec.group.elements[0].rows());
    require_factor_shape(spec.generator, n, "GU generator");
    std::vector<StateInput> inputs;
    inputs.reserve(static_cast<size_t>(spec.group.order));
    for (const Mat& u : spec.group.elements)
        inputs.push_back({1.0 / spec.group.order, u * spec.generator, StateInput::Kind::Factor});
    return build_ensemble(inputs, tol);
}

StateEnsemble generate_cgu(const CguSpec& spec, const Tolerances& tol) {
    require_group(spec.group);
    const int n = static_cast<int>(spec.group.elements[0].rows());
    if (spec.generators.empty())
        throw Error(ErrorCode::DimensionMismatch, "CGU spec needs at least one generator");
    for (const Mat& phi : spec.generators) require_factor_shape(phi, n, "CGU generator");
    const int l = spec.group.order;
    const int r = static_cast<int>(spec.generators.size());
    std::vector<StateInput> inputs;
    inputs.reserve(static_cast<size_t>(l * r));
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < r; ++k)
            inputs.push_back({1.0 / (l * r),
                              spec.group.elements[static_cast<size_t>(i)] * spec.generators[static_cast<size_t>(k)],
                              StateInput::Kind::Factor});
    return build_ensemble(inputs, tol);
}

Mat gu_sim_generator(const GuSpec& spec, double beta, const Tolerances& tol) {
    StateEnsemble ens = generate_gu(spec, tol);
    require_beta(beta);
    if (beta < ens.spectral.beta_min - 1e-12)
        throw Error(ErrorCode::BetaBelowMin, "beta " + std::to_string(beta) + " lies below beta_min " +
                                                 std::to_string(ens.spectral.beta_min));
    return sim_factor(ens, beta, 0);
}

std::vector<Mat> cgu_sim_generators(const CguSpec& spec, double beta, const Tolerances& tol) {
    StateEnsemble ens = generate_cgu(spec, tol);
    require_beta(beta);
    if (beta < ens.spectral.beta_min - 1e-12)
        throw Error(ErrorCode::BetaBelowMin, "beta " + std::to_string(beta) + " lies below beta_min " +
                                                 std::to_string(ens.spectral.beta_min));
    std::vector<Mat> mus;
    const int r = static_cast<int>(spec.generators.size());
    mus.reserve(static_cast<size_t>(r));
    for (int k = 0; k < r; ++k) mus.push_back(sim_factor(ens, beta, k));
    return mus;
}

ConditionResult gu_condition_check(const GuSpec& spec, const Tolerances& tol) {
    Theorem1Result t = theorem1_check(generate_gu(spec, tol), tol);
    return {t.holds, t.alpha, t.deviation};
}

ConditionResult cgu_condition_check(const CguSpec& spec, const Tolerances& tol) {
    Theorem1Result t = theorem1_check(generate_cgu(spec, tol), tol);
    return {t.holds, t.alpha, t.deviation};
}

CommutingCheck commuting_generators_check(const CguSpec& spec, const Tolerances& tol) {
    if (!spec.generator_group)
        throw Error(ErrorCode::GeneratorGroupMissing, "CGU spec carries no generator group V_k");
    require_group(spec.group);
    const int n = static_cast<int>(spec.group.elements[0].rows());
    const int l = spec.group.order;
    const int r = static_cast<int>(spec.generators.size());
    const std::vector<Mat>& v = *spec.generator_group;
    if (static_cast<int>(v.size()) != r)
        throw Error(ErrorCode::DimensionMismatch, "generator group has " + std::to_string(v.size()) +
                                                      " elements for " + std::to_string(r) + " generators");
    // close_group validates unitarity, distinctness, and closure; the
    // identity must already lead so that V_k stays paired with phi_k.
    if ((v[0] - Mat::Identity(n, n)).norm() > tol.group)
        throw Error(ErrorCode::NotClosed, "generator group must list the identity first");
    close_group(v, tol);

    CommutingCheck out;
    out.commutes_up_to_phase = true;
    out.theta = RMat::Zero(l, r);
    for (int i = 0; i < l; ++i) {
        for (int k = 0; k < r; ++k) {
            const Mat& u = spec.group.elements[static_cast<size_t>(i)];
            Mat q = v[static_cast<size_t>(k)] * u;
            Eigen::Index a = 0, b = 0;
            if (q.cwiseAbs().maxCoeff(&a, &b) < 1e-6) {
                out.commutes_up_to_phase = false;
                continue;
            }
            Mat p = u * v[static_cast<size_t>(k)];
            const double theta = std::arg(p(a, b) / q(a, b));
            out.theta(i, k) = theta;
            if ((p - std::polar(1.0, theta) * q).norm() > tol.group) out.commutes_up_to_phase = false;
        }
    }
    if (out.commutes_up_to_phase) {
        // Unit-gamma single generator; scale by gamma(beta) to reproduce the
        // SIM factors mu_ik = U_i V_k mu_bar.
        StateEnsemble ens = generate_cgu(spec, tol);
        out.mu_bar = (ens.delta_inv * spec.generators[0] / std::sqrt(static_cast<double>(l) * r)).eval();
    }
    return out;
}

sdp::SdpProblem build_gu_reduced(const GuSpec& spec, double beta, const Tolerances& tol) {
    require_beta(beta);
    StateEnsemble ens = generate_gu(spec, tol);
    const int n = ens.n;
    const int m = spec.group.order;

    sdp::SdpProblem p;
    p.sense = sdp::Sense::Maximize;
    const int pi = p.add_block("Pi", n);
    {
        sdp::PsdConstraint c;
        c.name = "Pi";
        c.dim = n;
        c.block_terms.push_back({pi, 1.0, {}});
        p.psd.push_back(std::move(c));
    }
    if (beta >= kBetaZero) {
        sdp::PsdConstraint s;
        s.name = "S";
        s.dim = n;
        s.constant = Mat::Identity(n, n);
        s.block_terms.push_back({pi, -1.0, spec.group.elements});
        s.is_slack = true;
        p.psd.push_back(std::move(s));

        sdp::LinearFunc rate;
        rate.matrix_terms.emplace_back(pi, averaged_rate_coeff(spec.group, ens.Delta));
        rate.rhs = 1.0 - beta;
        p.equalities.push_back(std::move(rate));
    } else {
        // No interior at beta = 0: the slack is the zero operator, so the
        // inequality becomes the resolution equality and the rate row is
        // implied (pairing the equality with Delta reproduces it).
        p.add_operator_equality({{pi, 1.0, spec.group.elements}}, {}, Mat::Identity(n, n));
    }

    // Exact lifted detection probability sum_i p_i Tr(rho_i U_i Pi U_i*).
    Mat obj = Mat::Zero(n, n);
    for (int i = 0; i < m; ++i) {
        const Mat& u = spec.group.elements[static_cast<size_t>(i)];
        obj += ens.states[static_cast<size_t>(i)].prior *
               (u.adjoint() * ens.states[static_cast<size_t>(i)].rho * u);
    }
    p.objective.matrix_terms.emplace_back(pi, hermitian_part(obj));

    p.start = RVec::Zero(p.num_coords());
    p.set_block(p.start, pi, (((1.0 - beta) / m) * Mat::Identity(n, n)).eval());
    return p;
}

sdp::SdpProblem build_cgu_reduced(const CguSpec& spec, double beta, const Tolerances& tol) {
    require_beta(beta);
    StateEnsemble ens = generate_cgu(spec, tol);
    const int n = ens.n;
    const int l = spec.group.order;
    const int r = static_cast<int>(spec.generators.size());

    sdp::SdpProblem p;
    p.sense = sdp::Sense::Maximize;
    std::vector<int> pik(static_cast<size_t>(r));
    for (int k = 0; k < r; ++k) pik[static_cast<size_t>(k)] = p.add_block("Pi" + std::to_string(k + 1), n);
    for (int k = 0; k < r; ++k) {
        sdp::PsdConstraint c;
        c.name = p.blocks[static_cast<size_t>(k)].name;
        c.dim = n;
        c.block_terms.push_back({pik[static_cast<size_t>(k)], 1.0, {}});
        p.psd.push_back(std::move(c));
    }
    if (beta >= kBetaZero) {
        sdp::PsdConstraint s;
        s.name = "S";
        s.dim = n;
        s.constant = Mat::Identity(n, n);
        for (int k = 0; k < r; ++k)
            s.block_terms.push_back({pik[static_cast<size_t>(k)], -1.0, spec.group.elements});
        s.is_slack = true;
        p.psd.push_back(std::move(s));

        sdp::LinearFunc rate;
        const Mat coeff = averaged_rate_coeff(spec.group, ens.Delta);
        for (int k = 0; k < r; ++k) rate.matrix_terms.emplace_back(pik[static_cast<size_t>(k)], coeff);
        rate.rhs = 1.0 - beta;
        p.equalities.push_back(std::move(rate));
    } else {
        std::vector<sdp::BlockTerm> terms;
        for (int k = 0; k < r; ++k) terms.push_back({pik[static_cast<size_t>(k)], 1.0, spec.group.elements});
        p.add_operator_equality(terms, {}, Mat::Identity(n, n));
    }

    for (int k = 0; k < r; ++k) {
        Mat obj = Mat::Zero(n, n);
        for (int i = 0; i < l; ++i) {
            const State& st = ens.states[static_cast<size_t>(i * r + k)];
            const Mat& u = spec.group.elements[static_cast<size_t>(i)];
            obj += st.prior * (u.adjoint() * st.rho * u);
        }
        p.objective.matrix_terms.emplace_back(pik[static_cast<size_t>(k)], hermitian_part(obj));
    }

    p.start = RVec::Zero(p.num_coords());
    for (int k = 0; k < r; ++k)
        p.set_block(p.start, pik[static_cast<size_t>(k)],
                    (((1.0 - beta) / (l * r)) * Mat::Identity(n, n)).eval());
    return p;
}

namespace {

ReducedSolution lift_covariant(const StateEnsemble& ens, const UnitaryGroup& g,
                               const std::vector<Mat>& gens, const sdp::SdpSolution& sol,
                               const Tolerances& tol) {
    const int n = ens.n;
    const int r = static_cast<int>(gens.size());
    ReducedSolution out;
    out.status = sol.status;
    out.iterations = sol.newton_iterations;
    out.generators = gens;

    out.measurement.n = n;
    out.measurement.m = ens.m;
    out.measurement.ops.assign(static_cast<size_t>(ens.m) + 1, Mat());
    Mat acc = Mat::Zero(n, n);
    for (int i = 0; i < g.order; ++i) {
        const Mat& u = g.elements[static_cast<size_t>(i)];
        for (int k = 0; k < r; ++k) {
            Mat op = hermitian_part(u * gens[static_cast<size_t>(k)] * u.adjoint());
            acc += op;
            out.measurement.ops[static_cast<size_t>(i * r + k) + 1] = std::move(op);
        }
    }
    out.measurement.ops[0] = hermitian_part(Mat::Identity(n, n) - acc);

    if (sol.status == sdp::SolveStatus::Optimal) {
        out.triple = evaluate(ens, out.measurement, tol);
        out.p_d = out.triple.p_d;
    }
    return out;
}

}  // namespace

ReducedSolution solve_gu_reduced(const GuSpec& spec, double beta, const sdp::SolveOptions& options,
                                 const Tolerances& tol) {
    sdp::SdpProblem prob = build_gu_reduced(spec, beta, tol);
    sdp::SdpSolution sol = sdp::solve(prob, options);
    StateEnsemble ens = generate_gu(spec, tol);
    return lift_covariant(ens, spec.group, {hermitian_part(sol.block_values[0])}, sol, tol);
}

ReducedSolution solve_cgu_reduced(const CguSpec& spec, double beta, const sdp::SolveOptions& options,
                                  const Tolerances& tol) {
    sdp::SdpProblem prob = build_cgu_reduced(spec, beta, tol);
    sdp::SdpSolution sol = sdp::solve(prob, options);
    StateEnsemble ens = generate_cgu(spec, tol);
    std::vector<Mat> gens;
    gens.reserve(sol.block_values.size());
    for (const Mat& b : sol.block_values) gens.push_back(hermitian_part(b));
    return lift_covariant(ens, spec.group, gens, sol, tol);
}

RejectingMeasurement symmetrize(const UnitaryGroup& g, const RejectingMeasurement& meas,
                                const Tolerances& tol) {
    require_group(g);
    const int n = static_cast<int>(g.elements[0].rows());
    if (meas.n != n || meas.m != g.order)
        throw Error(ErrorCode::DimensionMismatch,
                    "measurement shape (" + std::to_string(meas.n) + ", " + std::to_string(meas.m) +
                        ") does not match the group (n = " + std::to_string(n) +
                        ", order = " + std::to_string(g.order) + ")");
    if (!validate_povm(meas, tol).pass)
        throw Error(ErrorCode::InvalidPOVM, "symmetrize needs a valid rejecting measurement");

    const int m = g.order;
    RejectingMeasurement out;
    out.n = n;
    out.m = m;
    out.ops.assign(static_cast<size_t>(m) + 1, Mat::Zero(n, n));
    for (int j = 0; j < m; ++j) {
        const Mat& u = g.elements[static_cast<size_t>(j)];
        out.ops[0] += u * meas.ops[0] * u.adjoint();
        for (int i = 0; i < m; ++i)
            out.ops[static_cast<size_t>(i) + 1] +=
                u * meas.ops[static_cast<size_t>(g.table(j, i)) + 1] * u.adjoint();
    }
    for (Mat& op : out.ops) op = hermitian_part(op / m);
    return out;
}

}  // namespace qsd
