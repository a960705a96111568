#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <vector>

namespace gammabench::harness {

/// Traffic seen by one endpoint. Interface words are counted per peer;
/// collective reductions are tallied separately so that interface counters
/// can be compared against the partition's cut-face prediction.
struct TransportCounters {
  std::vector<std::uint64_t> words_out;  // indexed by peer rank
  std::vector<std::uint64_t> words_in;
  std::uint64_t messages_out = 0;
  std::uint64_t messages_in = 0;
  std::uint64_t reductions = 0;

  std::uint64_t total_words_out() const;
  std::uint64_t total_words_in() const;
  /// Element-wise difference, this - earlier.
  TransportCounters since(const TransportCounters& earlier) const;
};

/// Message-passing endpoint of one rank. Per peer pair, messages arrive in
/// send order. All collectives must be entered by every rank.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int rank() const = 0;
  virtual int size() const = 0;

  virtual void send(int peer, std::span<const double> payload) = 0;
  /// Blocks until the next message from `peer` is available.
  virtual std::vector<double> receive(int peer) = 0;
  virtual void barrier() = 0;
  /// In-place global sum. Partial values are combined in rank order, so
  /// every rank obtains bitwise identical results.
  virtual void allreduce_sum(std::span<double> values) = 0;

  virtual TransportCounters counters() const = 0;
};

/// P connected in-memory endpoints. A non-zero schedule seed inserts short
/// pseudo-random pauses before sends and receives to vary thread
/// interleavings; results do not depend on it.
class LoopbackNetwork {
 public:
  explicit LoopbackNetwork(int ranks, std::uint64_t schedule_seed = 0);
  ~LoopbackNetwork();
  LoopbackNetwork(const LoopbackNetwork&) = delete;
  LoopbackNetwork& operator=(const LoopbackNetwork&) = delete;

  int size() const { return ranks_; }
  Transport& endpoint(int rank);

 private:
  struct Channel {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::vector<double>> queue;
  };
  class Endpoint;

  Channel& channel(int from, int to) {
    return *channels_[static_cast<std::size_t>(from * ranks_ + to)];
  }
  void barrier_wait();
  void allreduce(int rank, std::span<double> values);

  int ranks_;
  std::vector<std::unique_ptr<Channel>> channels_;
  std::vector<std::unique_ptr<Endpoint>> endpoints_;

  std::mutex barrier_mutex_;
  std::condition_variable barrier_cv_;
  int barrier_waiting_ = 0;
  std::uint64_t barrier_generation_ = 0;

  std::vector<std::vector<double>> reduce_slots_;
};

/// Convenience: a loopback network with `ranks` endpoints.
std::unique_ptr<LoopbackNetwork> loopback_transport(int ranks, std::uint64_t schedule_seed = 0);

}  // namespace gammabench::harness
