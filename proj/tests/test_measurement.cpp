#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qsd/measurement.hpp"

using namespace qsd;
using namespace qsd::testing;

namespace {

// Projective measurement onto the standard basis plus empty reject.
RejectingMeasurement basis_measurement(int n) {
    RejectingMeasurement meas;
    meas.n = n;
    meas.m = n;
    meas.ops.push_back(Mat::Zero(n, n));
    for (int i = 0; i < n; ++i) {
        Mat p = Mat::Zero(n, n);
        p(i, i) = 1.0;
        meas.ops.push_back(p);
    }
    return meas;
}

}  // namespace

TEST_CASE("evaluate on the orthonormal pair with a projective measurement") {
    StateEnsemble ens = orthonormal_pair();
    ProbabilityTriple t = evaluate(ens, basis_measurement(2));
    CHECK(t.p_d == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.p_e == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t.p_i == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("all-inconclusive measurement has p_i = 1") {
    StateEnsemble ens = trine();
    RejectingMeasurement meas;
    meas.n = 2;
    meas.m = 3;
    meas.ops.push_back(Mat::Identity(2, 2));
    for (int i = 0; i < 3; ++i) meas.ops.push_back(Mat::Zero(2, 2));
    ProbabilityTriple t = evaluate(ens, meas);
    CHECK(t.p_i == doctest::Approx(1.0));
    CHECK(t.p_d == doctest::Approx(0.0));
    CHECK(t.p_d + t.p_e + t.p_i == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random valid measurements sum to one") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        StateEnsemble ens = random_ensemble(rng, 3, 4, rep % 2 == 0);
        RejectingMeasurement meas = random_measurement(rng, 3, 4);
        CHECK(validate_povm(meas).pass);
        ProbabilityTriple t = evaluate(ens, meas);
        CHECK(std::abs(t.p_d + t.p_e + t.p_i - 1.0) < 1e-9);
        CHECK(t.p_d >= -1e-12);
        CHECK(t.p_e >= -1e-12);
        CHECK(t.p_i >= -1e-12);
    }
}

TEST_CASE("validate_povm flags negative operators and bad resolutions") {
    RejectingMeasurement meas = basis_measurement(2);
    CHECK(validate_povm(meas).pass);

    RejectingMeasurement neg = meas;
    neg.ops[1](0, 0) = -0.1;
    PovmReport r1 = validate_povm(neg);
    CHECK(!r1.pass);
    CHECK(r1.min_eigenvalues[1] < -1e-3);

    RejectingMeasurement unresolved = meas;
    unresolved.ops[2] *= 0.5;
    PovmReport r2 = validate_povm(unresolved);
    CHECK(!r2.pass);
    CHECK(r2.resolution_residual > 0.4);

    RejectingMeasurement skew = meas;
    skew.ops[1](0, 1) = cxd(0.0, 0.2);
    CHECK(!validate_povm(skew).pass);
}

TEST_CASE("evaluate rejects invalid inputs") {
    StateEnsemble ens = orthonormal_pair();
    RejectingMeasurement meas = basis_measurement(2);
    meas.ops[1] *= 2.0;
    CHECK(thrown_code([&] { evaluate(ens, meas); }) == ErrorCode::InvalidPOVM);

    RejectingMeasurement wrong = basis_measurement(3);
    CHECK(thrown_code([&] { evaluate(ens, wrong); }) == ErrorCode::DimensionMismatch);

    RejectingMeasurement missing = basis_measurement(2);
    missing.ops.pop_back();
    CHECK(thrown_code([&] { evaluate(ens, missing); }) == ErrorCode::InvalidPOVM);
}

TEST_CASE("rank profile compares operator and state ranks") {
    StateEnsemble ens = orthonormal_pair();
    std::vector<RankEntry> prof = rank_profile(ens, basis_measurement(2));
    REQUIRE(prof.size() == 2);
    CHECK(prof[0].state_rank == 1);
    CHECK(prof[0].op_rank == 1);
    CHECK(!prof[0].flagged);

    // Full-rank operator against a pure state gets flagged.
    RejectingMeasurement meas;
    meas.n = 2;
    meas.m = 2;
    meas.ops.push_back(Mat::Zero(2, 2));
    meas.ops.push_back(0.5 * Mat::Identity(2, 2));
    meas.ops.push_back(0.5 * Mat::Identity(2, 2));
    std::vector<RankEntry> prof2 = rank_profile(ens, meas);
    CHECK(prof2[0].op_rank == 2);
    CHECK(prof2[0].flagged);
}

TEST_CASE("symmetrized returns Hermitian operators") {
    RejectingMeasurement meas = basis_measurement(2);
    meas.ops[1](0, 1) = cxd(1e-13, 1e-13);
    RejectingMeasurement sym = symmetrized(meas);
    for (const Mat& op : sym.ops) CHECK((op - op.adjoint()).norm() == 0.0);
}
