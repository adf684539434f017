#include "tsvdtd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "tsvdtd/linalg.hpp"

namespace tsvdtd {

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::tsvd:
      return "tsvd";
    case Algorithm::td:
      return "td";
    case Algorithm::feature_td:
      return "feature-td";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "tsvd") return Algorithm::tsvd;
  if (name == "td") return Algorithm::td;
  if (name == "feature-td") return Algorithm::feature_td;
  return std::nullopt;
}

void validate_config(const RunConfig& config) {
  validate_mdp_config(config.states, config.tasks, config.rank, config.discount);
  if (config.trunc_k < 1 || config.trunc_k > config.tasks) {
    throw std::invalid_argument("trunc-k must satisfy 1 <= trunc-k <= tasks, got trunc-k=" +
                                std::to_string(config.trunc_k) +
                                " with tasks=" + std::to_string(config.tasks));
  }
  if (config.trunc_k < config.rank) {
    throw std::invalid_argument("trunc-k must satisfy trunc-k >= rank, got trunc-k=" +
                                std::to_string(config.trunc_k) +
                                " with rank=" + std::to_string(config.rank));
  }
  if (config.iters < 0) {
    throw std::invalid_argument("iters must be >= 0, got " + std::to_string(config.iters));
  }
  if (config.trials < 1) {
    throw std::invalid_argument("trials must be >= 1, got " + std::to_string(config.trials));
  }
  if (config.noise_halfwidth < 0.0) {
    throw std::invalid_argument("noise must be >= 0, got " +
                                std::to_string(config.noise_halfwidth));
  }
  if (config.algorithms.empty()) {
    throw std::invalid_argument("algorithms list must not be empty");
  }
}

StepSchedule config_schedule(const RunConfig& config) {
  if (config.schedule == ScheduleKind::simple) {
    return StepSchedule::simple();
  }
  return StepSchedule::theory(1.0 / (1.0 - config.discount));
}

namespace {

// Per-trial raw series, unnormalized. Indices 0..iters for the metric
// series; noise_sq[t] belongs to the step taken at iteration t and is 0 at
// the final iteration.
struct ChainResult {
  std::vector<double> err_sq;    // ||V_t - V_*||_F^2
  std::vector<double> mis;       // ||V_t Hperp Hperp^T||_F^2
  std::vector<double> noise_sq;  // ||w_t||_F^2
  Matrix final_value;
};

struct ChainOptions {
  bool metrics = true;      // record err/mis/noise series
  bool keep_final = false;  // keep the final iterate
};

ChainResult run_chain(Algorithm algorithm, const MultiTaskMdp& mdp, const GroundTruth& gt,
                      const Matrix& features, const RunConfig& config, const StepSchedule& schedule,
                      int trial, const ChainOptions& options) {
  const int iters = config.iters;
  const double divergence_cap = 1e6 * std::max(gt.value.norm(), 1e-12);

  ValueMatrix value = initialize_value(gt, derive_stream(config.seed, stream_tag::init_value,
                                                         static_cast<std::uint64_t>(trial)));
  FeatureModel model;
  if (algorithm == Algorithm::feature_td) {
    // W_0 = F^T V_0: the orthogonal projection of the shared initial iterate
    // onto the feature span.
    model.features = features;
    model.weights = features.transpose() * value.values;
    value.values = model.features * model.weights;
  }

  ChainResult result;
  if (options.metrics) {
    result.err_sq.resize(iters + 1);
    result.mis.resize(iters + 1);
    result.noise_sq.assign(iters + 1, 0.0);
  }

  for (int t = 0; t <= iters; ++t) {
    if (options.metrics) {
      result.err_sq[t] = (value.values - gt.value).squaredNorm();
      result.mis[t] = misalignment(value.values, gt.complement);
    }
    if (t == iters) {
      break;
    }

    Rng rng(derive_stream(config.seed, stream_tag::batch, static_cast<std::uint64_t>(trial),
                          static_cast<std::uint64_t>(t)));
    SampleBatch batch = sample_batch(mdp, config.noise_halfwidth, rng);
    const double alpha = step_size(t, schedule);

    switch (algorithm) {
      case Algorithm::tsvd: {
        Matrix target = project_rank_k(value.values, config.trunc_k);
        if (options.metrics) {
          result.noise_sq[t] = sampling_noise(target, batch, mdp).squaredNorm();
        }
        value = td_step_with_target(value, target, batch, mdp, alpha);
        break;
      }
      case Algorithm::td: {
        if (options.metrics) {
          result.noise_sq[t] = sampling_noise(value.values, batch, mdp).squaredNorm();
        }
        value = td_step_with_target(value, value.values, batch, mdp, alpha);
        break;
      }
      case Algorithm::feature_td: {
        if (options.metrics) {
          result.noise_sq[t] = sampling_noise(value.values, batch, mdp).squaredNorm();
        }
        model = feature_td_step(model, batch, mdp, alpha);
        value.values = model.features * model.weights;
        break;
      }
    }

    if (!value.values.allFinite() || value.values.norm() > divergence_cap) {
      throw DivergenceError(algorithm, trial, t + 1);
    }
  }

  if (options.keep_final) {
    result.final_value = std::move(value.values);
  }
  return result;
}

// Runs fn(trial) for every trial, spreading trials over hardware threads.
// Exceptions are collected per trial and the lowest-index one is rethrown, so
// failures are as deterministic as the serial order.
template <typename Fn>
void parallel_trials(int trials, Fn&& fn) {
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), trials);
  if (workers <= 1) {
    for (int trial = 0; trial < trials; ++trial) {
      fn(trial);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(trials);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int trial = next.fetch_add(1); trial < trials; trial = next.fetch_add(1)) {
        try {
          fn(trial);
        } catch (...) {
          errors[trial] = std::current_exception();
        }
      }
    });
  }
  for (auto& thread : pool) {
    thread.join();
  }
  for (auto& error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }
}

Matrix ground_truth_features(const GroundTruth& gt, int k) {
  return truncated_svd(gt.value, k).left_factors;
}

struct TrialMeans {
  std::vector<double> err_sq;
  std::vector<double> mis;
  std::vector<double> noise_sq;
  long noise_violations = 0;
};

TrialMeans average_chains(Algorithm algorithm, const MultiTaskMdp& mdp, const GroundTruth& gt,
                          const Matrix& features, const RunConfig& config,
                          const StepSchedule& schedule, double violation_bound) {
  std::vector<ChainResult> per_trial(config.trials);
  parallel_trials(config.trials, [&](int trial) {
    per_trial[trial] =
        run_chain(algorithm, mdp, gt, features, config, schedule, trial, ChainOptions{});
  });

  TrialMeans means;
  means.err_sq.assign(config.iters + 1, 0.0);
  means.mis.assign(config.iters + 1, 0.0);
  means.noise_sq.assign(config.iters + 1, 0.0);
  for (int trial = 0; trial < config.trials; ++trial) {  // fixed reduction order
    for (int t = 0; t <= config.iters; ++t) {
      means.err_sq[t] += per_trial[trial].err_sq[t];
      means.mis[t] += per_trial[trial].mis[t];
      means.noise_sq[t] += per_trial[trial].noise_sq[t];
      if (t < config.iters && per_trial[trial].noise_sq[t] > violation_bound) {
        ++means.noise_violations;
      }
    }
  }
  const double inv = 1.0 / config.trials;
  for (int t = 0; t <= config.iters; ++t) {
    means.err_sq[t] *= inv;
    means.mis[t] *= inv;
    means.noise_sq[t] *= inv;
  }
  return means;
}

}  // namespace

std::vector<std::pair<Algorithm, std::vector<RunRecord>>> run_convergence(
    const RunConfig& config) {
  validate_config(config);
  const StepSchedule schedule = config_schedule(config);

  MultiTaskMdp mdp =
      generate_mdp(config.states, config.tasks, config.rank, config.discount, config.seed);
  GroundTruth gt = exact_value(mdp);

  Matrix features;
  if (std::find(config.algorithms.begin(), config.algorithms.end(), Algorithm::feature_td) !=
      config.algorithms.end()) {
    features = ground_truth_features(gt, config.trunc_k);
  }

  const double scale = static_cast<double>(config.states) * config.tasks;
  const double c1 = noise_bound_c1(config.states, config.tasks, config.discount);

  std::vector<std::pair<Algorithm, std::vector<RunRecord>>> out;
  for (Algorithm algorithm : config.algorithms) {
    TrialMeans means = average_chains(algorithm, mdp, gt, features, config, schedule, c1);
    std::vector<RunRecord> records(config.iters + 1);
    for (int t = 0; t <= config.iters; ++t) {
      records[t] = RunRecord{t, means.err_sq[t] / scale, means.mis[t] / scale, means.noise_sq[t],
                             step_size(t, schedule)};
    }
    out.emplace_back(algorithm, std::move(records));
  }
  return out;
}

std::vector<RankSweepRecord> run_rank_sweep(const RunConfig& base, std::vector<int> ranks) {
  if (ranks.empty()) {
    throw std::invalid_argument("rank sweep needs at least one rank");
  }
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

  std::vector<RankSweepRecord> out;
  out.reserve(ranks.size());
  for (int rank : ranks) {
    RunConfig config = base;
    config.rank = rank;
    config.trunc_k = std::min(rank + 1, base.tasks);
    config.seed = derive_stream(base.seed, stream_tag::sweep, static_cast<std::uint64_t>(rank));
    validate_config(config);

    MultiTaskMdp mdp =
        generate_mdp(config.states, config.tasks, config.rank, config.discount, config.seed);
    GroundTruth gt = exact_value(mdp);
    const StepSchedule schedule = config_schedule(config);

    const double scale = static_cast<double>(config.states) * config.tasks;
    ChainOptions options{.metrics = false, .keep_final = true};

    std::vector<Matrix> tsvd_finals(config.trials);
    std::vector<Matrix> td_finals(config.trials);
    parallel_trials(config.trials, [&](int trial) {
      tsvd_finals[trial] = run_chain(Algorithm::tsvd, mdp, gt, Matrix(), config, schedule, trial,
                                     options)
                               .final_value;
      td_finals[trial] =
          run_chain(Algorithm::td, mdp, gt, Matrix(), config, schedule, trial, options).final_value;
    });

    Matrix tsvd_mean = Matrix::Zero(config.states, config.tasks);
    Matrix td_mean = Matrix::Zero(config.states, config.tasks);
    for (int trial = 0; trial < config.trials; ++trial) {
      tsvd_mean += tsvd_finals[trial];
      td_mean += td_finals[trial];
    }
    tsvd_mean /= config.trials;
    td_mean /= config.trials;

    out.push_back(RankSweepRecord{rank, (tsvd_mean - td_mean).squaredNorm() / scale});
  }
  return out;
}

BoundReport verify_bounds(const RunConfig& config_in) {
  RunConfig config = config_in;
  if (config.schedule != ScheduleKind::theory) {
    throw std::invalid_argument("verify_bounds requires the theory schedule");
  }
  config.trials = std::max(config.trials, 20);
  config.algorithms = {Algorithm::tsvd};
  validate_config(config);

  const StepSchedule schedule = config_schedule(config);
  const double alpha0 = schedule.alpha0;

  MultiTaskMdp mdp =
      generate_mdp(config.states, config.tasks, config.rank, config.discount, config.seed);
  GroundTruth gt = exact_value(mdp);

  const double c1 = noise_bound_c1(config.states, config.tasks, config.discount);
  TrialMeans means =
      average_chains(Algorithm::tsvd, mdp, gt, Matrix(), config, schedule, c1);

  BoundReport report;
  report.c1 = c1;
  report.alpha0 = alpha0;
  report.trials = config.trials;
  report.iters = config.iters;
  report.lemma1_residual = reward_rowspace_residual(mdp, gt);
  report.lemma2_violations = means.noise_violations;

  const double gamma = config.discount;
  const double thm2_coeff = (2.0 * c1 * alpha0 * gamma * gamma / (1.0 - gamma) + c1);
  double ratio1 = 0.0;
  double ratio2 = 0.0;
  for (int t = 1; t <= config.iters; ++t) {
    ratio1 = std::max(ratio1, means.mis[t] * (t + alpha0) / (c1 * alpha0 * alpha0));
    const double bound2 = means.err_sq[0] * alpha0 / (t + alpha0 + 1.0) +
                          thm2_coeff * alpha0 * alpha0 * std::log(t + alpha0) / (t + alpha0 + 1.0);
    ratio2 = std::max(ratio2, means.err_sq[t] / bound2);
  }
  report.theorem1_envelope_ratio = ratio1;
  report.theorem2_envelope_ratio = ratio2;

  // Least-squares slope of log misalignment against log t over the last
  // decade of iterations.
  const int fit_from = std::max(1, config.iters / 10);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (int t = fit_from; t <= config.iters; ++t) {
    if (means.mis[t] <= 0.0) {
      continue;
    }
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(means.mis[t]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  report.fitted_slope = denom > 0.0 ? (count * sxy - sx * sy) / denom : 0.0;
  return report;
}

}  // namespace tsvdtd
