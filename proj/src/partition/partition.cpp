#include "gammabench/partition/partition.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "gammabench/errors.hpp"

namespace gammabench::partition {

namespace {

// Start of part `p` when `n` items are split into `parts` near-equal runs;
// the first n % parts runs get one extra item.
int split_begin(int n, int parts, int p) {
  const int base = n / parts;
  const int extra = n % parts;
  return p * base + (p < extra ? p : extra);
}

std::int64_t face_nodes(const CaseConfig& config, int axis) {
  std::int64_t n = 1;
  for (int d = 0; d < 3; ++d) {
    if (d != axis) n *= config.degree[d] + 1;
  }
  return n;
}

}  // namespace

int PartitionPlan::neighbor(int rank, int axis, int side) const {
  auto c = rank_coords(rank);
  c[axis] += side;
  if (c[axis] < 0 || c[axis] >= grid[axis]) return -1;
  return rank_at(c);
}

int PartitionPlan::neighbor_count(int rank) const {
  int count = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side : {-1, 1}) {
      if (neighbor(rank, axis, side) >= 0) ++count;
    }
  }
  return count;
}

int PartitionPlan::max_neighbor_count() const {
  int best = 0;
  for (int r = 0; r < ranks; ++r) best = std::max(best, neighbor_count(r));
  return best;
}

std::int64_t PartitionPlan::cut_faces_of(int rank) const {
  std::int64_t n = 0;
  for (const auto& f : cut_faces) {
    if (f.rank_a == rank || f.rank_b == rank) ++n;
  }
  return n;
}

PartitionPlan partition_elements(const CaseConfig& config, int ranks) {
  config.validate();
  const auto& e = config.elements;
  if (ranks < 1) throw InvalidArgumentError(fmt::format("rank count must be >= 1, got {}", ranks));
  if (ranks > config.element_count()) {
    throw OverDecompositionError(
        fmt::format("cannot place {} ranks on {} elements: at least one element per processor",
                    ranks, config.element_count()));
  }

  // (cut area, -p_z, -p_y) ordered ascending picks the documented tie-break.
  std::optional<std::tuple<std::int64_t, int, int>> best_key;
  std::array<int, 3> best{1, 1, 1};
  for (int px = 1; px <= ranks; ++px) {
    if (ranks % px != 0 || px > e[0]) continue;
    for (int py = 1; py <= ranks / px; ++py) {
      if ((ranks / px) % py != 0 || py > e[1]) continue;
      const int pz = ranks / px / py;
      if (pz > e[2]) continue;
      const std::int64_t cut = static_cast<std::int64_t>(px - 1) * e[1] * e[2] +
                               static_cast<std::int64_t>(py - 1) * e[0] * e[2] +
                               static_cast<std::int64_t>(pz - 1) * e[0] * e[1];
      const auto key = std::make_tuple(cut, -pz, -py);
      if (!best_key || key < *best_key) {
        best_key = key;
        best = {px, py, pz};
      }
    }
  }
  if (!best_key) {
    throw OverDecompositionError(fmt::format(
        "{} ranks do not factor onto a {}x{}x{} element grid with at least one element per processor",
        ranks, e[0], e[1], e[2]));
  }

  PartitionPlan plan;
  plan.ranks = ranks;
  plan.grid = best;
  plan.elements = e;
  plan.blocks.resize(static_cast<std::size_t>(ranks));
  plan.rank_elements.resize(static_cast<std::size_t>(ranks));
  plan.owner.assign(static_cast<std::size_t>(config.element_count()), -1);

  for (int r = 0; r < ranks; ++r) {
    const auto c = plan.rank_coords(r);
    Block& b = plan.blocks[static_cast<std::size_t>(r)];
    for (int d = 0; d < 3; ++d) {
      b.begin[d] = split_begin(e[d], best[d], c[d]);
      b.end[d] = split_begin(e[d], best[d], c[d] + 1);
    }
    for (int k = b.begin[2]; k < b.end[2]; ++k) {
      for (int j = b.begin[1]; j < b.end[1]; ++j) {
        for (int i = b.begin[0]; i < b.end[0]; ++i) {
          plan.owner[static_cast<std::size_t>(i + e[0] * (j + e[1] * k))] = r;
          plan.rank_elements[static_cast<std::size_t>(r)].push_back({i, j, k});
        }
      }
    }
  }

  for (int k = 0; k < e[2]; ++k) {
    for (int j = 0; j < e[1]; ++j) {
      for (int i = 0; i < e[0]; ++i) {
        const ElementIndex here{i, j, k};
        const int r = plan.owner_of(here);
        for (int axis = 0; axis < 3; ++axis) {
          ElementIndex next = here;
          int* coord = axis == 0 ? &next.i : axis == 1 ? &next.j : &next.k;
          if (++*coord >= e[axis]) continue;
          const int rn = plan.owner_of(next);
          if (rn != r) plan.cut_faces.push_back({here, axis, r, rn});
        }
      }
    }
  }
  return plan;
}

std::int64_t words_per_step(const PartitionPlan& plan, const CaseConfig& config,
                            std::int64_t exchanges_per_step) {
  std::int64_t per_exchange = 0;
  for (const auto& f : plan.cut_faces) per_exchange += 2 * face_nodes(config, f.axis);
  return exchanges_per_step * per_exchange * config.fields;
}

std::int64_t rank_words_per_exchange(const PartitionPlan& plan, const CaseConfig& config,
                                     int rank) {
  std::int64_t words = 0;
  for (const auto& f : plan.cut_faces) {
    if (f.rank_a == rank || f.rank_b == rank) words += face_nodes(config, f.axis);
  }
  return words * config.fields;
}

double compute_gamma_a(std::uint64_t flops, std::uint64_t words) {
  if (words == 0) {
    if (flops == 0) {
      throw UndefinedProfileError("application profile with zero flops and zero words");
    }
    return kSaturated;
  }
  return static_cast<double>(flops) / static_cast<double>(words);
}

AppProfile AppProfile::from_counts(std::uint64_t flops, std::uint64_t words) {
  return AppProfile{static_cast<double>(flops), static_cast<double>(words),
                    compute_gamma_a(flops, words)};
}

nlohmann::json plan_to_json(const PartitionPlan& plan) {
  using nlohmann::json;
  auto idx = [](const ElementIndex& e) { return json::array({e.i, e.j, e.k}); };
  json ranks = json::array();
  for (int r = 0; r < plan.ranks; ++r) {
    json elems = json::array();
    for (const auto& e : plan.rank_elements[static_cast<std::size_t>(r)]) elems.push_back(idx(e));
    ranks.push_back({{"rank", r}, {"elements", std::move(elems)}});
  }
  json faces = json::array();
  for (const auto& f : plan.cut_faces) {
    ElementIndex upper = f.lower;
    (f.axis == 0 ? upper.i : f.axis == 1 ? upper.j : upper.k) += 1;
    faces.push_back({{"axis", f.axis},
                     {"element_a", idx(f.lower)},
                     {"element_b", idx(upper)},
                     {"rank_a", f.rank_a},
                     {"rank_b", f.rank_b}});
  }
  return json{{"ranks", plan.ranks},
              {"grid", plan.grid},
              {"elements", plan.elements},
              {"assignment", std::move(ranks)},
              {"cut_faces", std::move(faces)}};
}

}  // namespace gammabench::partition
