#include <set>

#include <doctest.h>

#include "gammabench/errors.hpp"
#include "gammabench/partition/partition.hpp"
#include "gammabench/sem/work_unit.hpp"

using namespace gammabench;
using namespace gammabench::partition;
using sem::cubic_case;

namespace {

struct BruteForce {
  std::int64_t cut_faces = 0;
  std::vector<std::set<int>> neighbours;
};

// Walks every element face of the grid and compares owners.
BruteForce enumerate(const PartitionPlan& plan) {
  BruteForce b;
  b.neighbours.resize(static_cast<std::size_t>(plan.ranks));
  const auto& e = plan.elements;
  for (int k = 0; k < e[2]; ++k) {
    for (int j = 0; j < e[1]; ++j) {
      for (int i = 0; i < e[0]; ++i) {
        const ElementIndex here{i, j, k};
        const std::array<ElementIndex, 3> next{ElementIndex{i + 1, j, k}, ElementIndex{i, j + 1, k},
                                               ElementIndex{i, j, k + 1}};
        for (int d = 0; d < 3; ++d) {
          const auto& n = next[static_cast<std::size_t>(d)];
          if (n.i >= e[0] || n.j >= e[1] || n.k >= e[2]) continue;
          const int a = plan.owner_of(here);
          const int b2 = plan.owner_of(n);
          if (a != b2) {
            ++b.cut_faces;
            b.neighbours[static_cast<std::size_t>(a)].insert(b2);
            b.neighbours[static_cast<std::size_t>(b2)].insert(a);
          }
        }
      }
    }
  }
  return b;
}

}  // namespace

TEST_CASE("reference decompositions of the 8^3 grid") {
  struct Row {
    int ranks;
    std::array<int, 3> grid;
    std::int64_t cut;
    int max_neighbours;
  };
  for (const Row& row : {Row{1, {1, 1, 1}, 0, 0}, Row{2, {1, 1, 2}, 64, 1}, Row{8, {2, 2, 2}, 192, 3},
                         Row{16, {2, 2, 4}, 320, 4}, Row{32, {2, 4, 4}, 448, 5}}) {
    const auto plan = partition_elements(cubic_case(8, 8), row.ranks);
    CHECK(plan.grid == row.grid);
    CHECK(static_cast<std::int64_t>(plan.cut_faces.size()) == row.cut);
    CHECK(plan.max_neighbor_count() == row.max_neighbours);
  }
}

TEST_CASE("cut faces and neighbours match brute-force enumeration") {
  for (auto e : {std::array<int, 3>{2, 1, 1}, std::array<int, 3>{2, 2, 2}, std::array<int, 3>{4, 4, 4},
                 std::array<int, 3>{5, 3, 7}, std::array<int, 3>{8, 8, 8}}) {
    sem::CaseConfig c = cubic_case(1, 4);
    c.elements = e;
    for (int p = 1; p <= std::min<std::int64_t>(c.element_count(), 12); ++p) {
      PartitionPlan plan;
      try {
        plan = partition_elements(c, p);
      } catch (const OverDecompositionError&) {
        continue;
      }
      const auto oracle = enumerate(plan);
      CHECK(static_cast<std::int64_t>(plan.cut_faces.size()) == oracle.cut_faces);
      std::int64_t owned = 0;
      for (int r = 0; r < p; ++r) {
        CHECK(plan.neighbor_count(r) == static_cast<int>(oracle.neighbours[static_cast<std::size_t>(r)].size()));
        owned += static_cast<std::int64_t>(plan.rank_elements[static_cast<std::size_t>(r)].size());
        CHECK(plan.blocks[static_cast<std::size_t>(r)].element_count() ==
              static_cast<std::int64_t>(plan.rank_elements[static_cast<std::size_t>(r)].size()));
        for (const auto& el : plan.rank_elements[static_cast<std::size_t>(r)]) CHECK(plan.owner_of(el) == r);
      }
      CHECK(owned == c.element_count());
    }
  }
}

TEST_CASE("blocks differ by at most one element per direction") {
  sem::CaseConfig c = cubic_case(1, 4);
  c.elements = {7, 5, 9};
  for (int p : {2, 3, 4, 6, 9, 12}) {
    const auto plan = partition_elements(c, p);
    for (int d = 0; d < 3; ++d) {
      int lo = 1 << 30, hi = 0;
      for (const auto& b : plan.blocks) {
        lo = std::min(lo, b.extent(d));
        hi = std::max(hi, b.extent(d));
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("ranks are numbered with x fastest") {
  const auto plan = partition_elements(cubic_case(4, 4), 8);
  for (int r = 0; r < 8; ++r) {
    const auto c = plan.rank_coords(r);
    CHECK(plan.rank_at(c) == r);
    CHECK(c[0] == r % 2);
  }
  CHECK(plan.neighbor(0, 0, +1) == 1);
  CHECK(plan.neighbor(0, 0, -1) == -1);
}

TEST_CASE("over-decomposition is rejected") {
  CHECK_THROWS_AS(partition_elements(cubic_case(8, 8), 1000), OverDecompositionError);
  sem::CaseConfig c = cubic_case(1, 4);
  c.elements = {2, 1, 1};
  CHECK_THROWS_AS(partition_elements(c, 4), OverDecompositionError);
  CHECK_THROWS_AS(partition_elements(c, 3), OverDecompositionError);
  CHECK_NOTHROW(partition_elements(c, 2));
  // 7 is prime and exceeds every grid extent.
  CHECK_THROWS_AS(partition_elements(cubic_case(4, 4), 7), OverDecompositionError);
}

TEST_CASE("word counts per exchange") {
  sem::CaseConfig c = cubic_case(1, 8);
  c.elements = {2, 1, 1};
  const auto plan = partition_elements(c, 2);
  CHECK(rank_words_per_exchange(plan, c, 0) == 81);
  CHECK(rank_words_per_exchange(plan, c, 1) == 81);
  CHECK(words_per_step(plan, c, 1) == 162);
  CHECK(words_per_step(plan, c, 10) == 1620);
  c.fields = 3;
  CHECK(words_per_step(plan, c, 1) == 486);

  const auto big = cubic_case(8, 8);
  for (int p : {1, 2, 8, 16, 32}) {
    const auto pl = partition_elements(big, p);
    std::int64_t sum = 0;
    for (int r = 0; r < p; ++r) sum += rank_words_per_exchange(pl, big, r);
    CHECK(sum == words_per_step(pl, big, 1));
    CHECK(words_per_step(pl, big, 1) == 2 * static_cast<std::int64_t>(pl.cut_faces.size()) * 81);
  }
}

TEST_CASE("application intensity") {
  CHECK(is_saturated(compute_gamma_a(100, 0)));
  CHECK(compute_gamma_a(100, 4) == 25.0);
  CHECK(compute_gamma_a(0, 4) == 0.0);
  CHECK_THROWS_AS(compute_gamma_a(0, 0), UndefinedProfileError);

  // Regression: one CG iteration of the 8^3, N=8 case on 8 ranks.
  auto c = cubic_case(8, 8);
  const auto plan = partition_elements(c, 8);
  const auto flops = sem::fixed_step_flops(c, c.element_count()).total();
  const auto words = static_cast<std::uint64_t>(words_per_step(plan, c, 1));
  CHECK(flops == 50015234);
  CHECK(words == 31104);
  CHECK(compute_gamma_a(flops, words) == doctest::Approx(1608.0000643).epsilon(1e-9));
  const auto app = AppProfile::from_counts(flops, words);
  CHECK(app.gamma_a == compute_gamma_a(flops, words));
}

TEST_CASE("plan serialises the grid and cut count") {
  const auto plan = partition_elements(cubic_case(4, 4), 4);
  const auto j = plan_to_json(plan);
  CHECK(j.at("ranks") == 4);
  CHECK(j.at("grid").get<std::array<int, 3>>() == plan.grid);
  CHECK(j.at("cut_faces").size() == plan.cut_faces.size());
}
