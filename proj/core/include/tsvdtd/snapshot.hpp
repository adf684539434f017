#pragma once

#include <cstdint>
#include <filesystem>

#include "tsvdtd/mdp.hpp"

namespace tsvdtd {

/// Loaded snapshot contents: the MDP plus the seed it was generated from.
struct MdpSnapshot {
  MultiTaskMdp mdp;
  std::uint64_t seed = 0;
};

/// Writes an MDP to a flat binary snapshot (atomic: temp file + rename).
///
/// Layout, little-endian host doubles, row-major matrices:
///   bytes 0..7   magic "TSVDMDP1"
///   u64 states, u64 tasks, u64 rank
///   f64 discount
///   u64 seed
///   f64[d*d] transition, f64[d*N] expected_reward,
///   f64[d*r] state_factor, f64[r*N] task_factor
void save_mdp(const MultiTaskMdp& mdp, std::uint64_t seed, const std::filesystem::path& path);

/// Reads a snapshot written by save_mdp; throws std::runtime_error on a bad
/// magic, truncated file, or invalid header fields.
MdpSnapshot load_mdp(const std::filesystem::path& path);

}  // namespace tsvdtd
