#pragma once

#include <cstdint>
#include <memory>

#include "mfopt/config.hpp"
#include "mfopt/problem.hpp"
#include "mfopt/solver.hpp"

namespace mfopt {

/// Baseline simplex search on the level-0 oracle. Every point is estimated
/// with a fixed replication count using common random numbers (the same
/// replication indices at every point), so simplex comparisons are paired.
/// Standard coefficients: reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5. Emits no iteration events.
RunResult nelder_mead_run(std::shared_ptr<const MultiFidelityProblem> problem,
                          const SolverConfig& config, std::uint64_t master_seed, const Point& x0,
                          double budget);

}  // namespace mfopt
