#pragma once

#include <cstdint>

namespace gammabench::sem {

/// Counted real arithmetic inside the numerical kernels. Stands in for a
/// hardware counter: kernels add their exact operation counts per call.
class FlopCounter {
 public:
  void add(std::uint64_t additions, std::uint64_t multiplications, std::uint64_t divisions = 0) {
    additions_ += additions;
    multiplications_ += multiplications;
    divisions_ += divisions;
  }
  void add(const FlopCounter& other) {
    add(other.additions_, other.multiplications_, other.divisions_);
  }
  void reset() { *this = FlopCounter{}; }

  std::uint64_t additions() const { return additions_; }
  std::uint64_t multiplications() const { return multiplications_; }
  std::uint64_t divisions() const { return divisions_; }
  std::uint64_t total() const { return additions_ + multiplications_ + divisions_; }

  friend bool operator==(const FlopCounter&, const FlopCounter&) = default;

 private:
  std::uint64_t additions_ = 0;
  std::uint64_t multiplications_ = 0;
  std::uint64_t divisions_ = 0;
};

}  // namespace gammabench::sem
