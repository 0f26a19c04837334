#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "psdb/rng.hpp"

namespace psdb {

// Worker count: PSDB_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Evaluates f(trial, rng) for trial = 0..trials-1, each with its own
// substream Rng(seed, trial). Output order is by trial index, independent of
// how trials are scheduled across workers.
std::vector<double> run_trials(std::int64_t trials, Seed seed,
                               const std::function<double(std::int64_t, Rng&)>& f);

// Pairwise summation.
double pairwise_sum(std::span<const double> xs);

}  // namespace psdb
