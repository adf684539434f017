#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsvdtd/learner.hpp"
#include "tsvdtd/mdp.hpp"

namespace tsvdtd {

enum class Algorithm { tsvd, td, feature_td };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// Per-iteration metrics of a (trial-averaged) run. mse and misalignment are
/// normalized by states * tasks; noise_norm_sq is the squared Frobenius norm
/// of the sampling-noise term of the step taken at this iteration (0 at the
/// final recorded iteration, where no step follows).
struct RunRecord {
  int iteration = 0;
  double mse = 0.0;
  double misalignment = 0.0;
  double noise_norm_sq = 0.0;
  double step = 0.0;
};

/// One row of the rank sweep: the normalized squared Frobenius gap between
/// the trial-averaged final iterates of the truncated-SVD and vanilla TD
/// chains.
struct RankSweepRecord {
  int rank = 0;
  double gap_mse = 0.0;
};

/// Empirical check of the convergence theorems over trial means.
struct BoundReport {
  double theorem1_envelope_ratio = 0.0;  // max_t mean_mis(t) * (t + a0) / (c1 a0^2), t >= 1
  double theorem2_envelope_ratio = 0.0;  // max_t mean_err(t) / displayed bound(t), t >= 1
  double lemma1_residual = 0.0;          // relative reward row-space residual
  long lemma2_violations = 0;            // iterations (over all trials) with ||w||^2 > c1
  double fitted_slope = 0.0;             // log-log slope of mean misalignment, last decade
  double c1 = 0.0;
  double alpha0 = 0.0;
  int trials = 0;
  int iters = 0;
};

struct RunConfig {
  int states = 200;
  int tasks = 40;
  int rank = 8;
  int trunc_k = 9;
  double discount = 0.95;
  int iters = 5000;
  int trials = 5;
  std::uint64_t seed = 1;
  ScheduleKind schedule = ScheduleKind::simple;
  double noise_halfwidth = 0.0;
  std::vector<Algorithm> algorithms = {Algorithm::tsvd, Algorithm::td, Algorithm::feature_td};
};

/// Throws std::invalid_argument naming the violated bound.
void validate_config(const RunConfig& config);

/// The schedule a config runs under: theory uses alpha0 = 1 / (1 - gamma).
StepSchedule config_schedule(const RunConfig& config);

/// Raised when an iterate exceeds 1e6 * ||V_*||_F or turns non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(Algorithm algorithm, int trial, int iteration)
      : std::runtime_error("divergence at algorithm=" + std::string(algorithm_name(algorithm)) +
                           " trial=" + std::to_string(trial) +
                           " iteration=" + std::to_string(iteration)),
        algorithm(algorithm),
        trial(trial),
        iteration(iteration) {}

  Algorithm algorithm;
  int trial;
  int iteration;
};

/// Runs each configured algorithm for `trials` independent chains on paired
/// sample streams (batches and initial values depend only on (seed, trial,
/// iteration), never on the algorithm) and returns trial-averaged records
/// for iterations 0..iters. Trials run in parallel; aggregation is in trial
/// index order, so results are bit-deterministic.
std::vector<std::pair<Algorithm, std::vector<RunRecord>>> run_convergence(const RunConfig& config);

/// For each requested rank r: a fresh MDP from (seed, r), paired
/// truncated-SVD (k = min(r+1, tasks)) and vanilla TD chains, trial-averaged
/// final iterates, and their normalized squared gap. Output is sorted by
/// rank ascending with duplicates removed.
std::vector<RankSweepRecord> run_rank_sweep(const RunConfig& base, std::vector<int> ranks);

/// Runs the truncated-SVD chain for max(trials, 20) trials under the theory
/// schedule (required) and compares trial means against the two theorem
/// envelopes; also fits the log-log misalignment slope over the last decade
/// of iterations, reports the reward row-space residual, and counts noise
/// bound violations (recorded, never asserted).
BoundReport verify_bounds(const RunConfig& config);

}  // namespace tsvdtd
