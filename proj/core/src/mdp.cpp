#include "tsvdtd/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tsvdtd {

namespace {

void fill_standard_normal(Matrix& m, Rng& rng) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rng.normal();
    }
  }
}

}  // namespace

void validate_mdp_config(int states, int tasks, int rank, double discount) {
  if (states < 1) {
    throw std::invalid_argument("states must satisfy states >= 1, got " + std::to_string(states));
  }
  if (tasks < 1) {
    throw std::invalid_argument("tasks must satisfy tasks >= 1, got " + std::to_string(tasks));
  }
  if (rank < 1 || rank > std::min(states, tasks)) {
    throw std::invalid_argument("rank must satisfy 1 <= rank <= min(states, tasks), got rank=" +
                                std::to_string(rank) + " with states=" + std::to_string(states) +
                                " tasks=" + std::to_string(tasks));
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("gamma must satisfy 0 <= gamma < 1, got " +
                                std::to_string(discount));
  }
}

MultiTaskMdp generate_mdp(int states, int tasks, int rank, double discount, std::uint64_t seed) {
  validate_mdp_config(states, tasks, rank, discount);

  MultiTaskMdp mdp;
  mdp.discount = discount;
  mdp.rank = rank;

  mdp.state_factor = Matrix(states, rank);
  Rng phi_rng(derive_stream(seed, stream_tag::state_factor));
  fill_standard_normal(mdp.state_factor, phi_rng);

  mdp.task_factor = Matrix(rank, tasks);
  Rng mu_rng(derive_stream(seed, stream_tag::task_factor));
  fill_standard_normal(mdp.task_factor, mu_rng);

  Matrix raw = mdp.state_factor * mdp.task_factor;
  const double max_entry = raw.maxCoeff();
  if (!(max_entry > 0.0)) {
    throw std::runtime_error("generate_mdp: reward factors produced a nonpositive maximum entry");
  }
  mdp.expected_reward = raw / max_entry;

  mdp.transition = Matrix(states, states);
  Rng p_rng(derive_stream(seed, stream_tag::transition));
  for (Eigen::Index i = 0; i < states; ++i) {
    for (Eigen::Index j = 0; j < states; ++j) {
      mdp.transition(i, j) = std::abs(p_rng.normal());
    }
  }
  // Two normalization passes keep row-sum error at the rounding floor even
  // for wide rows.
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < states; ++i) {
      mdp.transition.row(i) /= mdp.transition.row(i).sum();
    }
  }
  return mdp;
}

GroundTruth exact_value(const MultiTaskMdp& mdp) {
  const int d = mdp.states();
  const int n = mdp.tasks();

  Matrix system = Matrix::Identity(d, d) - mdp.discount * mdp.transition;
  Eigen::PartialPivLU<Matrix> lu(system);

  GroundTruth gt;
  gt.value = lu.solve(mdp.expected_reward);

  const double residual = (system * gt.value - mdp.expected_reward).norm();
  const double scale = mdp.expected_reward.norm();
  if (!gt.value.allFinite() || residual > 1e-8 * std::max(scale, 1e-300)) {
    throw std::runtime_error("exact_value: Bellman linear solve failed (relative residual " +
                             std::to_string(residual / std::max(scale, 1e-300)) + ")");
  }

  gt.svd = truncated_svd(gt.value, mdp.rank);
  gt.top_singular_value = gt.svd.singular_values(0);
  // rank == tasks has an empty complement; an identically zero value matrix
  // (zero rewards) has no row space at all, so its complement is empty too.
  gt.complement = (mdp.rank < n && gt.top_singular_value > 0.0)
                      ? row_space_complement(gt.value, mdp.rank)
                      : SubspaceComplement::zero_width(n, mdp.rank);
  return gt;
}

SampleBatch sample_batch(const MultiTaskMdp& mdp, double noise_halfwidth, Rng& rng) {
  if (noise_halfwidth < 0.0) {
    throw std::invalid_argument("noise_halfwidth must be >= 0");
  }
  const int d = mdp.states();
  const int n = mdp.tasks();

  SampleBatch batch;
  batch.next_state.resize(d);
  for (int s = 0; s < d; ++s) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    int drawn = d - 1;
    for (int j = 0; j < d; ++j) {
      cumulative += mdp.transition(s, j);
      if (u < cumulative) {
        drawn = j;
        break;
      }
    }
    batch.next_state[s] = drawn;
  }

  if (noise_halfwidth > 0.0) {
    batch.reward = Matrix(d, n);
    for (int s = 0; s < d; ++s) {
      for (int i = 0; i < n; ++i) {
        batch.reward(s, i) =
            mdp.expected_reward(s, i) + rng.uniform(-noise_halfwidth, noise_halfwidth);
      }
    }
  } else {
    batch.reward = mdp.expected_reward;
  }
  return batch;
}

double reward_rowspace_residual(const MultiTaskMdp& mdp, const GroundTruth& gt) {
  const double scale = mdp.expected_reward.norm();
  if (scale == 0.0) {
    return 0.0;
  }
  return std::sqrt(misalignment(mdp.expected_reward, gt.complement)) / scale;
}

}  // namespace tsvdtd
