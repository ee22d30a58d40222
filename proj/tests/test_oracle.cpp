#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "qsd/detection.hpp"
#include "qsd/oracle.hpp"

using namespace qsd;
using namespace qsd::testing;

TEST_CASE("grid search nails the orthonormal pair at beta = 0") {
    StateEnsemble ens = orthonormal_pair();
    OracleResult res = grid_search(ens, 0.0, 16);
    CHECK(res.best_pd == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.resolution == 16);
    CHECK(res.evaluations > 0);
    // The witness itself is a (near) valid measurement.
    CHECK(res.best.ops.size() == 3);
    Mat sum = Mat::Zero(2, 2);
    for (const Mat& op : res.best.ops) sum += op;
    CHECK((sum - Mat::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("grid search brackets the overlap pair at its beta_min") {
    StateEnsemble ens = pair(0.5);
    OracleResult res = grid_search(ens, 0.5, 48);
    CHECK(res.best_pd > 0.5 - 2e-2);
    CHECK(res.best_pd < 0.5 + 1e-6);
}

TEST_CASE("grid search brackets the trine") {
    StateEnsemble ens = trine();
    OracleResult zero = grid_search(ens, 0.0, 64);
    CHECK(zero.best_pd > 2.0 / 3.0 - 2e-2);
    CHECK(zero.best_pd < 2.0 / 3.0 + 1e-6);

    OracleResult mid = grid_search(ens, 0.3, 32);
    CHECK(mid.best_pd > (2.0 / 3.0) * 0.7 - 2e-2);
    CHECK(mid.best_pd < (2.0 / 3.0) * 0.7 + 1e-6);
}

TEST_CASE("grid search preconditions") {
    std::mt19937_64 rng(3);
    StateEnsemble big = random_ensemble(rng, 3, 3, true);
    CHECK(thrown_code([&] { grid_search(big, 0.2, 16); }) == ErrorCode::UnsupportedSize);

    StateEnsemble many = generate_gu(fourier_gu());  // m = 4
    CHECK(thrown_code([&] { grid_search(many, 0.5, 16); }) == ErrorCode::UnsupportedSize);

    CHECK(thrown_code([&] { grid_search(trine(), 0.2, 1); }) == ErrorCode::UnsupportedSize);
    CHECK(thrown_code([&] { grid_search(trine(), -0.1, 16); }) == ErrorCode::BetaOutOfRange);

    std::vector<StateInput> mixed;
    mixed.push_back({0.5, 0.5 * Mat::Identity(2, 2), StateInput::Kind::Density});
    mixed.push_back({0.5, 0.5 * Mat::Identity(2, 2), StateInput::Kind::Density});
    CHECK(thrown_code([&] { grid_search(build_ensemble(mixed), 0.2, 16); }) ==
          ErrorCode::UnsupportedSize);

    // Complex three-state ensembles are out of scope for the real m = 3 grid.
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<StateInput> cplx;
    cplx.push_back({1.0 / 3.0, column({1.0, 0.0}), StateInput::Kind::Factor});
    cplx.push_back({1.0 / 3.0, column({r, cxd(0.0, r)}), StateInput::Kind::Factor});
    cplx.push_back({1.0 / 3.0, column({0.0, 1.0}), StateInput::Kind::Factor});
    CHECK(thrown_code([&] { grid_search(build_ensemble(cplx), 0.2, 16); }) ==
          ErrorCode::UnsupportedSize);
}

TEST_CASE("ascent recovers the interpolation-regime pair optimum") {
    StateEnsemble ens = pair(0.5);
    double beta = 0.3;
    double opt = 0.5 * std::pow(std::sqrt(0.75 - beta) + 0.5, 2);
    OracleResult res = random_restart_ascent(ens, beta, 8, 1);
    CHECK(res.best_pd > opt - 1e-4);
    CHECK(res.best_pd < opt + 1e-5);
    CHECK(res.resolution == 0);
    CHECK(res.evaluations == 8 * 8 * 40);
}

TEST_CASE("ascent reaches the trine optimum at beta = 0") {
    StateEnsemble ens = trine();
    OracleResult res = random_restart_ascent(ens, 0.0, 12, 7);
    CHECK(res.best_pd > 2.0 / 3.0 - 1e-4);
    CHECK(res.best_pd < 2.0 / 3.0 + 1e-5);
}

TEST_CASE("ascent is deterministic in the seed") {
    StateEnsemble ens = trine();
    OracleResult a = random_restart_ascent(ens, 0.2, 3, 5);
    OracleResult b = random_restart_ascent(ens, 0.2, 3, 5);
    CHECK(a.best_pd == b.best_pd);
    for (size_t k = 0; k < a.best.ops.size(); ++k)
        CHECK((a.best.ops[k] - b.best.ops[k]).norm() == 0.0);
}

TEST_CASE("ascent stays within solver tolerance of the SDP optimum") {
    std::mt19937_64 rng(17);
    StateEnsemble ens = random_ensemble(rng, 3, 3, true);
    // Random pure triples in C^3 have beta_min near one, so compare at a
    // fixed rate; the SDP is feasible at every beta in [0, 1).
    double beta = 0.35;
    PrimalSolution ps = solve_primal(ens, beta);
    REQUIRE(ps.status == sdp::SolveStatus::Optimal);
    // The fixed step schedule bottoms out near 1e-3 on 3x3 instances; the
    // oracle is a bracket, not a high-accuracy solver.
    OracleResult res = random_restart_ascent(ens, beta, 12, 2);
    CHECK(res.best_pd < ps.objective + 1e-5);
    CHECK(res.best_pd > ps.objective - 2e-3);
}

TEST_CASE("ascent preconditions") {
    std::mt19937_64 rng(9);
    StateEnsemble big = random_ensemble(rng, 4, 4, true);
    CHECK(thrown_code([&] { random_restart_ascent(big, 0.2, 2, 0); }) ==
          ErrorCode::UnsupportedSize);
    StateEnsemble many = random_ensemble(rng, 2, 5, true);
    CHECK(thrown_code([&] { random_restart_ascent(many, 0.2, 2, 0); }) ==
          ErrorCode::UnsupportedSize);
    CHECK(thrown_code([&] { random_restart_ascent(trine(), 1.0, 2, 0); }) ==
          ErrorCode::BetaOutOfRange);
}
