#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include <json.hpp>

#include "gammabench/sem/case_config.hpp"
#include "gammabench/sem/element.hpp"

namespace gammabench::partition {

using sem::CaseConfig;
using sem::ElementIndex;

/// An element face shared by two ranks. `lower` is the element on the low
/// side of the face along `axis`; its neighbour is lower + e_axis.
struct CutFace {
  ElementIndex lower;
  int axis = 0;
  int rank_a = 0;  // owner of `lower`
  int rank_b = 0;  // owner of the neighbour
};

/// Half-open element range [begin, end) along each axis.
struct Block {
  std::array<int, 3> begin{0, 0, 0};
  std::array<int, 3> end{0, 0, 0};

  int extent(int axis) const { return end[axis] - begin[axis]; }
  std::int64_t element_count() const {
    return static_cast<std::int64_t>(extent(0)) * extent(1) * extent(2);
  }
};

/// Cartesian block decomposition of the element grid over P ranks.
/// Ranks are numbered with the x block index fastest.
struct PartitionPlan {
  int ranks = 1;
  std::array<int, 3> grid{1, 1, 1};      // (p_x, p_y, p_z)
  std::array<int, 3> elements{1, 1, 1};  // (E_x, E_y, E_z)
  std::vector<int> owner;                 // linear element index -> rank
  std::vector<Block> blocks;              // per rank
  std::vector<std::vector<ElementIndex>> rank_elements;
  std::vector<CutFace> cut_faces;

  int owner_of(const ElementIndex& e) const {
    return owner[static_cast<std::size_t>(e.i + elements[0] * (e.j + elements[1] * e.k))];
  }
  std::array<int, 3> rank_coords(int rank) const {
    return {rank % grid[0], (rank / grid[0]) % grid[1], rank / (grid[0] * grid[1])};
  }
  int rank_at(const std::array<int, 3>& c) const { return c[0] + grid[0] * (c[1] + grid[1] * c[2]); }

  /// Face-neighbour rank on the given side (-1 or +1) of `rank`, or -1.
  int neighbor(int rank, int axis, int side) const;
  /// Number of distinct face-neighbour ranks of `rank`.
  int neighbor_count(int rank) const;
  int max_neighbor_count() const;
  /// Number of cut element faces touching `rank`.
  std::int64_t cut_faces_of(int rank) const;
};

/// Factors P into (p_x, p_y, p_z) minimising cut-face area (ties: larger p_z,
/// then larger p_y) and assigns contiguous blocks whose sizes differ by at
/// most one per direction. Throws OverDecompositionError when P exceeds the
/// element count or no factorisation fits the element grid.
PartitionPlan partition_elements(const CaseConfig& config, int ranks);

/// Interface words on the wire per step, counting both directions of every
/// cut face: exchanges * 2 * cut_faces * (face nodes) * n_v.
std::int64_t words_per_step(const PartitionPlan& plan, const CaseConfig& config,
                            std::int64_t exchanges_per_step);

/// Words one rank sends per exchange.
std::int64_t rank_words_per_exchange(const PartitionPlan& plan, const CaseConfig& config, int rank);

inline constexpr double kSaturated = std::numeric_limits<double>::infinity();
inline bool is_saturated(double v) { return v == kSaturated; }

/// Operations per word communicated. Returns kSaturated when no words move.
/// Throws UndefinedProfileError when both counts are zero.
double compute_gamma_a(std::uint64_t flops, std::uint64_t words);

/// Per-step application profile.
struct AppProfile {
  double flops_per_step = 0.0;  // [Flop]
  double words_per_step = 0.0;  // [Word]
  double gamma_a = kSaturated;  // [Flop/Word]

  static AppProfile from_counts(std::uint64_t flops, std::uint64_t words);
};

nlohmann::json plan_to_json(const PartitionPlan& plan);

}  // namespace gammabench::partition
