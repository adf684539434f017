#pragma once

#include <cstdint>
#include <vector>

#include "tsvdtd/linalg.hpp"
#include "tsvdtd/rng.hpp"
#include "tsvdtd/types.hpp"

namespace tsvdtd {

/// A family of policy-evaluation tasks sharing one transition chain: a d x d
/// row-stochastic transition matrix, a d x N expected-reward matrix of exact
/// rank `rank` (normalized so its largest entry is 1), and a common discount.
/// The generative factors are kept so snapshots are self-describing.
struct MultiTaskMdp {
  Matrix transition;       // d x d, rows sum to 1
  Matrix expected_reward;  // d x N = state_factor * task_factor / max entry
  double discount = 0.95;
  int rank = 0;
  Matrix state_factor;  // d x rank
  Matrix task_factor;   // rank x N

  int states() const { return static_cast<int>(transition.rows()); }
  int tasks() const { return static_cast<int>(expected_reward.cols()); }
};

/// Exact stacked value function of an MDP together with the spectral data
/// the diagnostics need: rank-r factors, the row-space complement and the
/// top singular value.
struct GroundTruth {
  Matrix value;  // d x N, solves (I - discount * transition) value = reward
  TruncatedSvd svd;
  SubspaceComplement complement;
  double top_singular_value = 0.0;
};

/// One synchronous sweep of samples: a successor state per state (shared by
/// all tasks) and a realized reward matrix.
struct SampleBatch {
  std::vector<int> next_state;  // length d, next_state[s] ~ transition row s
  Matrix reward;                // d x N
};

/// Draws a random MDP: state/task factors with standard normal entries,
/// rewards normalized by their maximum entry, transition rows from
/// entrywise |normal| draws normalized to sum 1. Fully determined by seed.
/// Requires 1 <= rank <= min(states, tasks) and discount in [0, 1).
MultiTaskMdp generate_mdp(int states, int tasks, int rank, double discount, std::uint64_t seed);

/// Throws std::invalid_argument naming the violated bound; shared by
/// generate_mdp and the CLI validation path.
void validate_mdp_config(int states, int tasks, int rank, double discount);

/// Solves the Bellman system for all tasks and attaches rank-r spectral
/// data. Throws if the linear solve leaves a relative residual above 1e-8.
GroundTruth exact_value(const MultiTaskMdp& mdp);

/// Samples one batch: for each state an inverse-CDF draw over its transition
/// row, then (if noise_halfwidth > 0) an independent Uniform(-b, b) per
/// reward entry, drawn row-major. noise_halfwidth == 0 copies the expected
/// rewards exactly and consumes no reward draws.
SampleBatch sample_batch(const MultiTaskMdp& mdp, double noise_halfwidth, Rng& rng);

/// ||R H_perp H_perp^T||_F / ||R||_F — the relative reward mass outside the
/// value row space; analytically zero because rewards and values share a row
/// space.
double reward_rowspace_residual(const MultiTaskMdp& mdp, const GroundTruth& gt);

}  // namespace tsvdtd
