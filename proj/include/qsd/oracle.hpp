// Test-only brute force for tiny instances: a rank-one grid search on the
// qubit Bloch sphere and a projected-ascent refiner from random starts.
// Excluded from the library's stability guarantees.
#pragma once

#include <cstdint>

#include "qsd/ensemble.hpp"
#include "qsd/measurement.hpp"

namespace qsd {

struct OracleResult {
    double best_pd = 0.0;
    RejectingMeasurement best;
    int resolution = 0;             // grid points per axis, 0 for the ascent oracle
    std::uint64_t evaluations = 0;
};

// Exhausts rank-one conclusive operators Pi_i = t_i |v_i><v_i| over direction
// grids, solving the weight subproblem at fixed directions exactly (linear
// objective over the segment / planar region cut out by Pi_0 >= 0, t >= 0 and
// Tr(Delta Pi_0) = beta, so only constraint-boundary candidates matter).
// Needs n = 2, m <= 3, pure states; m = 3 additionally needs a real ensemble
// (the grid drops the azimuthal angles there to stay tractable).
OracleResult grid_search(const StateEnsemble& ens, double beta, int resolution = 64);

// Projected gradient ascent with Dykstra projections onto the feasible set,
// shrinking step phases, deterministic under fixed seed. Restart 0 starts
// from the scaled identity, the rest from random PSD tuples. Lower-bound
// witness only; needs n <= 3, m <= 4.
OracleResult random_restart_ascent(const StateEnsemble& ens, double beta, int restarts = 50,
                                   std::uint64_t seed = 0);

}  // namespace qsd
