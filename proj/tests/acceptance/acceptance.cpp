// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line with its elapsed time. Run with a list of criterion
// numbers (default: all). Criterion 10 exercises the installed CLI binary and
// needs --cli <path>.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsvdtd/experiments.hpp"
#include "tsvdtd/linalg.hpp"
#include "tsvdtd/snapshot.hpp"

using namespace tsvdtd;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = rng.normal();
    }
  }
  return m;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

// ---------------------------------------------------------------------------
// 1. Eckart-Young oracle equivalence on 200 seeded matrices, each beating 100
//    random rank-k competitors.
bool criterion1(std::string& detail) {
  for (std::uint64_t instance = 0; instance < 200; ++instance) {
    const int d = 1 + static_cast<int>(derive_stream(instance, 1) % 8);
    const int n = 1 + static_cast<int>(derive_stream(instance, 2) % 8);
    const int k = 1 + static_cast<int>(derive_stream(instance, 3) % n);
    const Matrix m = random_matrix(d, n, 4000 + instance);

    const Matrix projected = project_rank_k(m, k);
    const double oracle_gap = (projected - oracle::rank_k_approx(m, k)).norm();
    if (oracle_gap > 1e-10) {
      detail = "oracle mismatch " + std::to_string(oracle_gap);
      return false;
    }
    const double best = (m - projected).norm();
    for (int c = 0; c < 100; ++c) {
      const Matrix competitor =
          random_matrix(d, k, derive_stream(instance, 10, c)) *
          random_matrix(k, n, derive_stream(instance, 11, c));
      if (best > (m - competitor).norm() + 1e-9) {
        detail = "beaten by a rank-k competitor";
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 2. Rewards share the value row space on 50 seeded MDPs.
bool criterion2(std::string& detail) {
  for (int i = 0; i < 50; ++i) {
    const int rank = 2 + (i % 9);
    const MultiTaskMdp mdp = generate_mdp(100, 20, rank, 0.95, 1000 + i);
    const GroundTruth gt = exact_value(mdp);
    const double residual = reward_rowspace_residual(mdp, gt);
    if (residual > 1e-8) {
      detail = "residual " + std::to_string(residual) + " at rank " + std::to_string(rank);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 3. k == tasks: truncated and vanilla sweeps are bit-identical for 1000
//    paired iterations.
bool criterion3(std::string& detail) {
  const std::uint64_t seed = 77;
  const MultiTaskMdp mdp = generate_mdp(50, 10, 3, 0.95, seed);
  const GroundTruth gt = exact_value(mdp);
  ValueMatrix tsvd_value = initialize_value(gt, derive_stream(seed, stream_tag::init_value, 0));
  ValueMatrix td_value = tsvd_value;
  for (int t = 0; t < 1000; ++t) {
    Rng rng(derive_stream(seed, stream_tag::batch, 0, static_cast<std::uint64_t>(t)));
    const SampleBatch batch = sample_batch(mdp, 0.25, rng);
    const double alpha = 1.0 / (t + 1.0);
    tsvd_value = tsvd_td_step(tsvd_value, batch, mdp, 10, alpha);
    td_value = vanilla_td_step(td_value, batch, mdp, alpha);
    if (!bitwise_equal(tsvd_value.values, td_value.values)) {
      detail = "bit mismatch at iteration " + std::to_string(t);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 4. Matrix-form decomposition reproduces the sweep at every iteration of a
//    1000-step desk run.
bool criterion4(std::string& detail) {
  const std::uint64_t seed = 1;
  const MultiTaskMdp mdp = generate_mdp(200, 40, 8, 0.95, seed);
  const GroundTruth gt = exact_value(mdp);
  const StepSchedule schedule = StepSchedule::theory(1.0 / (1.0 - 0.95));

  ValueMatrix value = initialize_value(gt, derive_stream(seed, stream_tag::init_value, 0));
  for (int t = 0; t < 1000; ++t) {
    Rng rng(derive_stream(seed, stream_tag::batch, 0, static_cast<std::uint64_t>(t)));
    const SampleBatch batch = sample_batch(mdp, 0.0, rng);
    const double alpha = step_size(t, schedule);
    const MatrixStepDecomposition dec = decompose_matrix_step(value, batch, mdp, 9, alpha);
    if (dec.residual > 1e-9 * value.values.norm()) {
      detail = "residual " + std::to_string(dec.residual) + " at iteration " + std::to_string(t);
      return false;
    }
    value = tsvd_td_step(value, batch, mdp, 9, alpha);
  }
  return true;
}

// ---------------------------------------------------------------------------
// 5 & 6 share one 20-trial bound-verification run on the desk config.
const BoundReport& desk_bound_report() {
  static const BoundReport report = [] {
    RunConfig config;
    config.states = 200;
    config.tasks = 40;
    config.rank = 8;
    config.trunc_k = 9;
    config.discount = 0.95;
    config.iters = 2000;
    config.trials = 20;
    config.seed = 1;
    config.schedule = ScheduleKind::theory;
    config.noise_halfwidth = 4.0;  // the verify default: noise-driven 1/t regime
    return verify_bounds(config);
  }();
  return report;
}

bool criterion5(std::string& detail) {
  const BoundReport& report = desk_bound_report();
  std::ostringstream note;
  note << "ratio=" << report.theorem1_envelope_ratio << " slope=" << report.fitted_slope;
  detail = note.str();
  if (report.theorem1_envelope_ratio > 1.0) {
    return false;
  }
  return report.fitted_slope >= -1.3 && report.fitted_slope <= -0.7;
}

bool criterion6(std::string& detail) {
  const BoundReport& report = desk_bound_report();
  std::ostringstream note;
  note << "ratio=" << report.theorem2_envelope_ratio;
  detail = note.str();
  return report.theorem2_envelope_ratio <= 1.0;
}

// ---------------------------------------------------------------------------
// 7. Figure-1 shape: final MSE ordering feature-td <= tsvd < td with >= 5%
//    relative separation between tsvd and td, simple schedule.
bool criterion7(std::string& detail) {
  RunConfig config;
  config.states = 200;
  config.tasks = 40;
  config.rank = 8;
  config.trunc_k = 9;
  config.discount = 0.95;
  config.iters = 5000;
  config.trials = 5;
  config.seed = 1;
  config.schedule = ScheduleKind::simple;
  config.noise_halfwidth = 0.0;
  config.algorithms = {Algorithm::tsvd, Algorithm::td, Algorithm::feature_td};

  const auto runs = run_convergence(config);
  const double tsvd_mse = runs[0].second.back().mse;
  const double td_mse = runs[1].second.back().mse;
  const double ftd_mse = runs[2].second.back().mse;

  std::ostringstream note;
  note << "feature-td=" << ftd_mse << " tsvd=" << tsvd_mse << " td=" << td_mse;
  detail = note.str();
  return ftd_mse <= tsvd_mse && (td_mse - tsvd_mse) >= 0.05 * td_mse;
}

// ---------------------------------------------------------------------------
// 8. Figure-3 shape: zero gap at full rank, negative Spearman correlation of
//    (rank, gap).
bool criterion8(std::string& detail) {
  RunConfig base;
  base.states = 150;
  base.tasks = 30;
  base.discount = 0.95;
  base.iters = 10000;
  base.trials = 10;
  base.seed = 1;
  base.schedule = ScheduleKind::simple;
  base.noise_halfwidth = 0.0;

  const std::vector<int> ranks = {2, 6, 10, 14, 18, 22, 26, 30};
  const auto records = run_rank_sweep(base, ranks);

  std::vector<double> xs, ys;
  double full_rank_gap = -1.0;
  for (const RankSweepRecord& r : records) {
    xs.push_back(r.rank);
    ys.push_back(r.gap_mse);
    if (r.rank == 30) {
      full_rank_gap = r.gap_mse;
    }
  }
  const double rho = oracle::spearman(xs, ys);
  std::ostringstream note;
  note << "gap(30)=" << full_rank_gap << " spearman=" << rho;
  detail = note.str();
  return full_rank_gap == 0.0 && rho < 0.0;
}

// ---------------------------------------------------------------------------
// 9. Fixed point in expectation: the mean of 10^4 sampled sweeps from V_*
//    stays within 3 standard errors of V_* entrywise.
bool criterion9(std::string& detail) {
  const std::uint64_t seed = 3;
  const MultiTaskMdp mdp = generate_mdp(30, 8, 3, 0.95, seed);
  const GroundTruth gt = exact_value(mdp);
  const ValueMatrix at_star{gt.value};
  const double alpha = 0.5;
  const int draws = 10000;

  Matrix sum = Matrix::Zero(30, 8);
  Matrix sum_sq = Matrix::Zero(30, 8);
  for (int t = 0; t < draws; ++t) {
    Rng rng(derive_stream(seed, stream_tag::batch, 0, static_cast<std::uint64_t>(t)));
    const SampleBatch batch = sample_batch(mdp, 0.0, rng);
    const ValueMatrix stepped = tsvd_td_step(at_star, batch, mdp, 3, alpha);
    sum += stepped.values;
    sum_sq += stepped.values.cwiseProduct(stepped.values);
  }

  int worst_s = 0, worst_i = 0;
  double worst_z = 0.0;
  for (int s = 0; s < 30; ++s) {
    for (int i = 0; i < 8; ++i) {
      const double mean = sum(s, i) / draws;
      const double variance = std::max(sum_sq(s, i) / draws - mean * mean, 0.0);
      const double standard_error = std::sqrt(variance / draws) + 1e-15;
      const double z = std::abs(mean - gt.value(s, i)) / standard_error;
      if (z > worst_z) {
        worst_z = z;
        worst_s = s;
        worst_i = i;
      }
    }
  }
  std::ostringstream note;
  note << "max |z| = " << worst_z << " at (" << worst_s << "," << worst_i << ")";
  detail = note.str();
  return worst_z <= 3.0;
}

// ---------------------------------------------------------------------------
// 10. Two cmd_run executions with identical config produce byte-identical
//     CSV files.
bool criterion10(std::string& detail) {
  if (g_cli_path.empty()) {
    detail = "missing --cli <path to the tsvdtd binary>";
    return false;
  }
  const fs::path base = fs::temp_directory_path() / "tsvdtd_acceptance10";
  fs::remove_all(base);
  const fs::path dir_a = base / "a";
  const fs::path dir_b = base / "b";

  auto invoke = [&](const fs::path& out) {
    std::ostringstream cmd;
    cmd << g_cli_path
        << " run --states 100 --tasks 20 --rank 4 --trunc-k 5 --gamma 0.95 --iters 300"
        << " --trials 2 --seed 7 --schedule simple --out " << out.string() << " > /dev/null";
    return std::system(cmd.str().c_str());
  };
  if (invoke(dir_a) != 0 || invoke(dir_b) != 0) {
    detail = "cli invocation failed";
    return false;
  }

  auto read_bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::string csv_a = read_bytes(dir_a / "convergence.csv");
  const std::string csv_b = read_bytes(dir_b / "convergence.csv");
  fs::remove_all(base);

  if (csv_a.empty()) {
    detail = "empty CSV";
    return false;
  }
  if (csv_a != csv_b) {
    detail = "CSV bytes differ";
    return false;
  }
  return true;
}

struct Criterion {
  int id;
  const char* label;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "Eckart-Young oracle equivalence and optimality", 5.0, criterion1},
      {2, "reward/value row-space agreement across 50 MDPs", 10.0, criterion2},
      {3, "k = tasks bit-equivalence over 1000 paired iterations", 5.0, criterion3},
      {4, "matrix-form step decomposition residual over 1000 steps", 10.0, criterion4},
      {5, "misalignment envelope and log-log slope (theory schedule)", 120.0, criterion5},
      {6, "value-error envelope (theory schedule, shared run)", 120.0, criterion6},
      {7, "final MSE ordering feature-td <= tsvd < td", 120.0, criterion7},
      {8, "rank sweep: zero gap at full rank, negative trend", 600.0, criterion8},
      {9, "fixed point in expectation over 10^4 sampled sweeps", 30.0, criterion9},
      {10, "byte-identical CSV across repeated runs", 60.0, criterion10},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli_path = argv[++i];
    } else {
      selected.push_back(std::atoi(arg.c_str()));
    }
  }
  if (selected.empty()) {
    for (const Criterion& c : criteria()) {
      selected.push_back(c.id);
    }
  }

  bool all_pass = true;
  for (int id : selected) {
    const Criterion* criterion = nullptr;
    for (const Criterion& c : criteria()) {
      if (c.id == id) {
        criterion = &c;
      }
    }
    if (criterion == nullptr) {
      std::cout << "FAIL criterion " << id << ": unknown criterion\n";
      all_pass = false;
      continue;
    }

    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criterion->run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > criterion->budget_seconds) {
      detail += (detail.empty() ? "" : "; ") + std::string("over budget");
      ok = false;
    }

    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion->id << ": "
              << criterion->label << " [" << (detail.empty() ? "ok" : detail) << "] ("
              << elapsed << " s, budget " << criterion->budget_seconds << " s)\n";
    all_pass = all_pass && ok;
  }
  return all_pass ? 0 : 1;
}
