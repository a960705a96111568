#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gammabench/harness/transport.hpp"
#include "gammabench/partition/partition.hpp"
#include "gammabench/sem/case_config.hpp"
#include "gammabench/sem/element.hpp"
#include "gammabench/sem/flop_counter.hpp"

namespace gammabench::sem {

using harness::Transport;
using harness::TransportCounters;
using partition::PartitionPlan;

enum class Boundary { dirichlet, neumann };

enum class SolveMode {
  fixed_budget,  // exactly cg_iters_per_step iterations per step
  to_tolerance,  // iterate until the relative residual drops below tolerance
};

struct WorkUnitOptions {
  SolveMode mode = SolveMode::fixed_budget;
  double tolerance = 1e-8;
  int max_iterations = 100000;
  Boundary boundary = Boundary::dirichlet;
  /// Removes the constant mode from the right-hand side; required for Neumann.
  bool project_mean = false;
  /// When > 0, stop stepping once rank 0 has spent this many wall seconds.
  double time_budget_seconds = 0.0;
  /// Keep the final element fields in the report.
  bool keep_solution = false;
};

struct RankStepReport {
  FlopCounter flops;
  TransportCounters traffic;
  int iterations = 0;
  double relative_residual = 0.0;
  double wall_seconds = 0.0;
  double compute_seconds = 0.0;
  double comm_seconds = 0.0;
};

struct RankReport {
  int rank = 0;
  std::int64_t elements = 0;
  std::vector<RankStepReport> steps;
  double max_error = 0.0;  // max nodal error against the manufactured solution
  std::vector<ElementField> solution;  // first field only, when requested
};

/// Outcome of a work unit over all ranks.
struct StepReport {
  std::vector<RankReport> ranks;

  int steps_completed() const;
  int iterations(int step) const;
  double relative_residual(int step) const;
  double max_error() const;
  FlopCounter flops(int step) const;  // summed over ranks
  std::uint64_t words_sent(int step) const;
  std::uint64_t messages_sent(int step) const;
};

/// Element storage and direct stiffness summation for one rank's block.
///
/// Field data is element-local: element e of the rank occupies
/// [e * points, (e + 1) * points) of each field, and interface nodes are
/// duplicated in every element sharing them. After direct_stiffness_sum()
/// every copy of a node holds the same value on every rank.
class RankDomain {
 public:
  RankDomain(const CaseConfig& config, const PartitionPlan& plan, int rank,
             Boundary boundary = Boundary::dirichlet);

  int rank() const { return rank_; }
  std::size_t element_count() const { return elements_.size(); }
  std::size_t points_per_element() const { return shape_.size(); }
  std::size_t local_points() const { return elements_.size() * shape_.size(); }
  const ElementShape& shape() const { return shape_; }
  const std::vector<ElementIndex>& elements() const { return elements_; }

  /// Global node coordinate (integer lattice) of local point p.
  std::array<std::int64_t, 3> node_of(std::size_t p) const;
  /// Physical coordinate in [0,1]^3 of local point p.
  std::array<double, 3> position_of(std::size_t p) const;

  /// Sums redundant copies across elements and ranks for `fields`
  /// consecutive fields of local_points() values each. With apply_mask,
  /// Dirichlet boundary nodes are zeroed. Uses one message per face
  /// neighbour, exchanging axis by axis so edge and corner values travel
  /// inside face messages.
  void direct_stiffness_sum(std::span<double> data, int fields, Transport& transport,
                            bool apply_mask) const;

  /// Words this rank sends per direct_stiffness_sum of one field.
  std::uint64_t words_per_exchange() const;

 private:
  struct Plane {
    int peer = -1;
    std::vector<std::uint32_t> pack;                                  // unique ids, per face node
    std::vector<std::pair<std::uint32_t, std::uint32_t>> apply;       // (buffer pos, unique id)
  };

  int rank_;
  CaseConfig config_;
  ElementShape shape_;
  std::vector<ElementIndex> elements_;
  std::array<std::int64_t, 3> lattice_{};  // global nodes per axis
  std::vector<std::uint32_t> unique_of_;   // local point -> unique node
  std::vector<std::int64_t> unique_gid_;
  std::vector<std::uint8_t> unique_masked_;
  std::array<std::array<Plane, 2>, 3> planes_;
  std::array<std::vector<double>, 3> node_positions_;  // reference GLL nodes per axis
};

/// Runs one rank of the work unit: diagonally preconditioned CG on the
/// Poisson problem -lap u = f over [0,1]^3 with the manufactured solution
/// sin(pi x) sin(pi y) sin(pi z) (Dirichlet) or cos cos cos (Neumann).
/// Each step restarts from a zero initial guess.
RankReport rank_work_unit(const CaseConfig& config, const PartitionPlan& plan,
                          Transport& transport, const WorkUnitOptions& options);

/// Runs all ranks of the work unit on `network`, one thread per rank.
StepReport cg_work_unit(const CaseConfig& config, const PartitionPlan& plan,
                        harness::LoopbackNetwork& network, const WorkUnitOptions& options = {});

/// Counted flops of one fixed-budget step on a rank owning `elements`
/// elements. Matches the instrumented counters exactly.
FlopCounter fixed_step_flops(const CaseConfig& config, std::int64_t elements);

}  // namespace gammabench::sem
