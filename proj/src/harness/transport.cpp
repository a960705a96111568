#include "gammabench/harness/transport.hpp"

#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "gammabench/errors.hpp"

namespace gammabench::harness {

std::uint64_t TransportCounters::total_words_out() const {
  return std::accumulate(words_out.begin(), words_out.end(), std::uint64_t{0});
}

std::uint64_t TransportCounters::total_words_in() const {
  return std::accumulate(words_in.begin(), words_in.end(), std::uint64_t{0});
}

TransportCounters TransportCounters::since(const TransportCounters& earlier) const {
  TransportCounters d = *this;
  for (std::size_t p = 0; p < d.words_out.size() && p < earlier.words_out.size(); ++p) {
    d.words_out[p] -= earlier.words_out[p];
    d.words_in[p] -= earlier.words_in[p];
  }
  d.messages_out -= earlier.messages_out;
  d.messages_in -= earlier.messages_in;
  d.reductions -= earlier.reductions;
  return d;
}

class LoopbackNetwork::Endpoint final : public Transport {
 public:
  Endpoint(LoopbackNetwork& net, int rank, std::uint64_t seed)
      : net_(net), rank_(rank), jitter_(seed != 0), rng_(seed ^ (0x9e3779b97f4a7c15ULL * (rank + 1))) {
    counters_.words_out.assign(static_cast<std::size_t>(net.size()), 0);
    counters_.words_in.assign(static_cast<std::size_t>(net.size()), 0);
  }

  int rank() const override { return rank_; }
  int size() const override { return net_.size(); }

  void send(int peer, std::span<const double> payload) override {
    check_peer(peer);
    pause();
    auto& ch = net_.channel(rank_, peer);
    {
      std::lock_guard lock(ch.mutex);
      ch.queue.emplace_back(payload.begin(), payload.end());
    }
    ch.ready.notify_one();
    std::lock_guard lock(counter_mutex_);
    counters_.words_out[static_cast<std::size_t>(peer)] += payload.size();
    ++counters_.messages_out;
  }

  std::vector<double> receive(int peer) override {
    check_peer(peer);
    pause();
    auto& ch = net_.channel(peer, rank_);
    std::vector<double> msg;
    {
      std::unique_lock lock(ch.mutex);
      ch.ready.wait(lock, [&] { return !ch.queue.empty(); });
      msg = std::move(ch.queue.front());
      ch.queue.pop_front();
    }
    std::lock_guard lock(counter_mutex_);
    counters_.words_in[static_cast<std::size_t>(peer)] += msg.size();
    ++counters_.messages_in;
    return msg;
  }

  void barrier() override { net_.barrier_wait(); }

  void allreduce_sum(std::span<double> values) override {
    net_.allreduce(rank_, values);
    std::lock_guard lock(counter_mutex_);
    ++counters_.reductions;
  }

  TransportCounters counters() const override {
    std::lock_guard lock(counter_mutex_);
    return counters_;
  }

 private:
  void check_peer(int peer) const {
    if (peer < 0 || peer >= net_.size() || peer == rank_) {
      throw InvalidArgumentError(fmt::format("rank {} cannot address peer {}", rank_, peer));
    }
  }

  void pause() {
    if (!jitter_) return;
    std::uniform_int_distribution<int> us(0, 50);
    std::this_thread::sleep_for(std::chrono::microseconds(us(rng_)));
  }

  LoopbackNetwork& net_;
  int rank_;
  bool jitter_;
  std::mt19937_64 rng_;
  mutable std::mutex counter_mutex_;
  TransportCounters counters_;
};

LoopbackNetwork::LoopbackNetwork(int ranks, std::uint64_t schedule_seed) : ranks_(ranks) {
  if (ranks < 1) throw InvalidArgumentError(fmt::format("loopback needs >= 1 rank, got {}", ranks));
  const auto n = static_cast<std::size_t>(ranks);
  channels_.reserve(n * n);
  for (std::size_t i = 0; i < n * n; ++i) channels_.push_back(std::make_unique<Channel>());
  for (int r = 0; r < ranks; ++r) {
    endpoints_.push_back(std::make_unique<Endpoint>(*this, r, schedule_seed));
  }
  reduce_slots_.resize(n);
}

LoopbackNetwork::~LoopbackNetwork() = default;

Transport& LoopbackNetwork::endpoint(int rank) {
  if (rank < 0 || rank >= ranks_) {
    throw InvalidArgumentError(fmt::format("no endpoint {} in a {}-rank network", rank, ranks_));
  }
  return *endpoints_[static_cast<std::size_t>(rank)];
}

void LoopbackNetwork::barrier_wait() {
  std::unique_lock lock(barrier_mutex_);
  const auto generation = barrier_generation_;
  if (++barrier_waiting_ == ranks_) {
    barrier_waiting_ = 0;
    ++barrier_generation_;
    barrier_cv_.notify_all();
    return;
  }
  barrier_cv_.wait(lock, [&] { return barrier_generation_ != generation; });
}

void LoopbackNetwork::allreduce(int rank, std::span<double> values) {
  reduce_slots_[static_cast<std::size_t>(rank)].assign(values.begin(), values.end());
  barrier_wait();
  std::vector<double> sum(values.size(), 0.0);
  for (const auto& slot : reduce_slots_) {
    if (slot.size() != values.size()) {
      throw InvalidArgumentError("allreduce called with mismatched lengths across ranks");
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += slot[i];
  }
  barrier_wait();
  std::copy(sum.begin(), sum.end(), values.begin());
}

std::unique_ptr<LoopbackNetwork> loopback_transport(int ranks, std::uint64_t schedule_seed) {
  return std::make_unique<LoopbackNetwork>(ranks, schedule_seed);
}

}  // namespace gammabench::harness
