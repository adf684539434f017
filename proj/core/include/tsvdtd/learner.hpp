#pragma once

#include <cstdint>

#include "tsvdtd/mdp.hpp"
#include "tsvdtd/types.hpp"

namespace tsvdtd {

/// The d x N value iterate. All entries stay finite; steps abort otherwise.
struct ValueMatrix {
  Matrix values;
};

enum class ScheduleKind { theory, simple };

/// Step-size schedule. `theory` is alpha0 / (t + alpha0); `simple` is
/// 1 / (t + 1) regardless of alpha0.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::theory;
  double alpha0 = 1.0;

  static StepSchedule theory(double alpha0) { return {ScheduleKind::theory, alpha0}; }
  static StepSchedule simple() { return {ScheduleKind::simple, 1.0}; }
};

double step_size(int t, const StepSchedule& schedule);

/// Frozen feature matrix (d x k, orthonormal columns) plus the learned
/// k x N weights; the implied value iterate is features * weights.
struct FeatureModel {
  Matrix features;
  Matrix weights;
};

/// Per-step sampling diagnostics: squared Frobenius norm of the noise term,
/// the analytic bound 16 N^2 d / (1 - gamma)^2 it is compared against, and
/// the step size in effect.
struct DiagnosticRecord {
  double noise_norm_sq = 0.0;
  double noise_bound = 0.0;
  double step = 0.0;
};

/// 16 N^2 d / (1 - gamma)^2.
double noise_bound_c1(int states, int tasks, double discount);

/// The shared synchronous sweep: every entry moves toward the sampled
/// bootstrap target R_t[s,i] + gamma * target[next_state[s], i], reading
/// only the pre-step iterate. Both TD variants are thin wrappers over this,
/// which is what makes them bit-identical when their targets coincide.
ValueMatrix td_step_with_target(const ValueMatrix& value, const Matrix& target,
                                const SampleBatch& batch, const MultiTaskMdp& mdp, double alpha);

/// One truncated-SVD TD sweep: the bootstrap target is the rank-k projection
/// of the whole current iterate (one projection per step). k == tasks
/// reduces bit-for-bit to vanilla_td_step. Requires 1 <= k <= tasks and
/// alpha in [0, 1].
ValueMatrix tsvd_td_step(const ValueMatrix& value, const SampleBatch& batch,
                         const MultiTaskMdp& mdp, int k, double alpha);

/// Per-task tabular TD sweep (no projection).
ValueMatrix vanilla_td_step(const ValueMatrix& value, const SampleBatch& batch,
                            const MultiTaskMdp& mdp, double alpha);

/// Linear-approximation TD sweep on frozen features: with V~ = F W the TD
/// error is d[s,i] = R_t[s,i] + gamma V~[next_state[s], i] - V~[s,i] and
/// weights move by alpha * F^T d. Identity features reduce to tabular TD.
FeatureModel feature_td_step(const FeatureModel& model, const SampleBatch& batch,
                             const MultiTaskMdp& mdp, double alpha);

/// Sampling-noise matrix for an arbitrary bootstrap target G:
/// w[s,i] = (R_t[s,i] - R[s,i])
///          + gamma * (G[next_state[s], i] - sum_s' P(s'|s) G[s', i]).
/// Zero-mean over the successor draw by construction.
Matrix sampling_noise(const Matrix& target, const SampleBatch& batch, const MultiTaskMdp& mdp);

/// Noise diagnostics for the truncated-SVD step (target = rank-k projection
/// of the iterate). `step_used` is recorded verbatim.
DiagnosticRecord noise_term(const ValueMatrix& value, const SampleBatch& batch,
                            const MultiTaskMdp& mdp, int k, double step_used = 0.0);

struct MatrixStepDecomposition {
  ValueMatrix reconstructed_step;
  double residual = 0.0;  // Frobenius distance to tsvd_td_step's output
};

/// Rebuilds the step from its four matrix-form terms,
/// (1 - a) V + a gamma P G + a w + a R, and reports the Frobenius residual
/// against tsvd_td_step on the same inputs. The residual is pure rounding;
/// the contract used by callers is residual <= 1e-9 * ||V||_F.
MatrixStepDecomposition decompose_matrix_step(const ValueMatrix& value, const SampleBatch& batch,
                                              const MultiTaskMdp& mdp, int k, double alpha);

/// Draws V_0 with every entry sigma_max(V_*) times a standard normal,
/// fully determined by `stream_seed`.
ValueMatrix initialize_value(const GroundTruth& gt, std::uint64_t stream_seed);

}  // namespace tsvdtd
