#include "tsvdtd/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace tsvdtd {

namespace {

constexpr char kMagic[8] = {'T', 'S', 'V', 'D', 'M', 'D', 'P', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      write_f64(out, m(i, j));
    }
  }
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

Matrix read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = read_f64(in);
    }
  }
  return m;
}

}  // namespace

void save_mdp(const MultiTaskMdp& mdp, std::uint64_t seed, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("save_mdp: cannot open " + tmp.string());
    }
    out.write(kMagic, sizeof(kMagic));
    write_u64(out, static_cast<std::uint64_t>(mdp.states()));
    write_u64(out, static_cast<std::uint64_t>(mdp.tasks()));
    write_u64(out, static_cast<std::uint64_t>(mdp.rank));
    write_f64(out, mdp.discount);
    write_u64(out, seed);
    write_matrix(out, mdp.transition);
    write_matrix(out, mdp.expected_reward);
    write_matrix(out, mdp.state_factor);
    write_matrix(out, mdp.task_factor);
    if (!out) {
      throw std::runtime_error("save_mdp: write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

MdpSnapshot load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_mdp: cannot open " + path.string());
  }
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("load_mdp: bad magic in " + path.string());
  }
  const auto states = static_cast<Eigen::Index>(read_u64(in));
  const auto tasks = static_cast<Eigen::Index>(read_u64(in));
  const auto rank = static_cast<Eigen::Index>(read_u64(in));
  const double discount = read_f64(in);
  const std::uint64_t seed = read_u64(in);
  if (!in || states < 1 || tasks < 1 || rank < 1 || rank > std::min(states, tasks) ||
      !(discount >= 0.0 && discount < 1.0)) {
    throw std::runtime_error("load_mdp: invalid header in " + path.string());
  }

  MdpSnapshot snap;
  snap.seed = seed;
  snap.mdp.discount = discount;
  snap.mdp.rank = static_cast<int>(rank);
  snap.mdp.transition = read_matrix(in, states, states);
  snap.mdp.expected_reward = read_matrix(in, states, tasks);
  snap.mdp.state_factor = read_matrix(in, states, rank);
  snap.mdp.task_factor = read_matrix(in, rank, tasks);
  if (!in) {
    throw std::runtime_error("load_mdp: truncated file " + path.string());
  }
  return snap;
}

}  // namespace tsvdtd
