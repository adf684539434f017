#include "tsvdtd/learner.hpp"

#include <stdexcept>
#include <string>

#include "tsvdtd/linalg.hpp"

namespace tsvdtd {

namespace {

void check_step_inputs(const ValueMatrix& value, const SampleBatch& batch,
                       const MultiTaskMdp& mdp, double alpha, const char* op) {
  if (value.values.rows() != mdp.states() || value.values.cols() != mdp.tasks()) {
    throw std::invalid_argument(std::string(op) + ": value matrix shape does not match the MDP");
  }
  if (static_cast<int>(batch.next_state.size()) != mdp.states() ||
      batch.reward.rows() != mdp.states() || batch.reward.cols() != mdp.tasks()) {
    throw std::invalid_argument(std::string(op) + ": batch shape does not match the MDP");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument(std::string(op) + ": alpha must lie in [0, 1], got " +
                                std::to_string(alpha));
  }
}

// Gathers target rows at the sampled successors: out.row(s) = target.row(ns[s]).
Matrix gather_successor_rows(const Matrix& target, const SampleBatch& batch) {
  Matrix out(target.rows(), target.cols());
  for (Eigen::Index s = 0; s < out.rows(); ++s) {
    out.row(s) = target.row(batch.next_state[s]);
  }
  return out;
}

}  // namespace

ValueMatrix td_step_with_target(const ValueMatrix& value, const Matrix& target,
                                const SampleBatch& batch, const MultiTaskMdp& mdp, double alpha) {
  check_step_inputs(value, batch, mdp, alpha, "td_step_with_target");
  Matrix bootstrapped = gather_successor_rows(target, batch);
  Matrix next =
      value.values + alpha * (batch.reward + mdp.discount * bootstrapped - value.values);
  if (!next.allFinite()) {
    throw std::runtime_error("td step produced non-finite entries");
  }
  return {std::move(next)};
}

double step_size(int t, const StepSchedule& schedule) {
  if (t < 0) {
    throw std::invalid_argument("step_size: t must be >= 0");
  }
  if (schedule.kind == ScheduleKind::simple) {
    return 1.0 / (t + 1.0);
  }
  if (!(schedule.alpha0 > 0.0)) {
    throw std::invalid_argument("step_size: theory schedule requires alpha0 > 0");
  }
  return schedule.alpha0 / (t + schedule.alpha0);
}

double noise_bound_c1(int states, int tasks, double discount) {
  const double n = static_cast<double>(tasks);
  const double one_minus = 1.0 - discount;
  return 16.0 * n * n * static_cast<double>(states) / (one_minus * one_minus);
}

ValueMatrix tsvd_td_step(const ValueMatrix& value, const SampleBatch& batch,
                         const MultiTaskMdp& mdp, int k, double alpha) {
  Matrix target = project_rank_k(value.values, k);
  return td_step_with_target(value, target, batch, mdp, alpha);
}

ValueMatrix vanilla_td_step(const ValueMatrix& value, const SampleBatch& batch,
                            const MultiTaskMdp& mdp, double alpha) {
  return td_step_with_target(value, value.values, batch, mdp, alpha);
}

FeatureModel feature_td_step(const FeatureModel& model, const SampleBatch& batch,
                             const MultiTaskMdp& mdp, double alpha) {
  if (model.features.rows() != mdp.states() || model.weights.rows() != model.features.cols() ||
      model.weights.cols() != mdp.tasks()) {
    throw std::invalid_argument("feature_td_step: model shape does not match the MDP");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("feature_td_step: alpha must lie in [0, 1]");
  }
  Matrix implied = model.features * model.weights;
  Matrix bootstrapped = gather_successor_rows(implied, batch);
  Matrix td_error = batch.reward + mdp.discount * bootstrapped - implied;
  FeatureModel next{model.features, model.weights + alpha * model.features.transpose() * td_error};
  if (!next.weights.allFinite()) {
    throw std::runtime_error("feature_td_step: update produced non-finite weights");
  }
  return next;
}

Matrix sampling_noise(const Matrix& target, const SampleBatch& batch, const MultiTaskMdp& mdp) {
  Matrix gathered = gather_successor_rows(target, batch);
  Matrix expected = mdp.transition * target;
  return (batch.reward - mdp.expected_reward) + mdp.discount * (gathered - expected);
}

DiagnosticRecord noise_term(const ValueMatrix& value, const SampleBatch& batch,
                            const MultiTaskMdp& mdp, int k, double step_used) {
  Matrix target = project_rank_k(value.values, k);
  Matrix w = sampling_noise(target, batch, mdp);
  return {w.squaredNorm(), noise_bound_c1(mdp.states(), mdp.tasks(), mdp.discount), step_used};
}

MatrixStepDecomposition decompose_matrix_step(const ValueMatrix& value, const SampleBatch& batch,
                                              const MultiTaskMdp& mdp, int k, double alpha) {
  check_step_inputs(value, batch, mdp, alpha, "decompose_matrix_step");
  Matrix target = project_rank_k(value.values, k);
  Matrix noise = sampling_noise(target, batch, mdp);
  Matrix rebuilt = (1.0 - alpha) * value.values + alpha * mdp.discount * (mdp.transition * target) +
                   alpha * noise + alpha * mdp.expected_reward;
  ValueMatrix stepped = tsvd_td_step(value, batch, mdp, k, alpha);
  const double residual = (rebuilt - stepped.values).norm();
  return {ValueMatrix{std::move(rebuilt)}, residual};
}

ValueMatrix initialize_value(const GroundTruth& gt, std::uint64_t stream_seed) {
  Rng rng(stream_seed);
  Matrix v0(gt.value.rows(), gt.value.cols());
  for (Eigen::Index i = 0; i < v0.rows(); ++i) {
    for (Eigen::Index j = 0; j < v0.cols(); ++j) {
      v0(i, j) = gt.top_singular_value * rng.normal();
    }
  }
  return {std::move(v0)};
}

}  // namespace tsvdtd
