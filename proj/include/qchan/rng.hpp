#pragma once

#include <cstdint>
#include <random>

#include "qchan/matrix.hpp"

namespace qchan {

// Deterministic random stream. Independent streams are derived from a
// (seed, stream index) pair via std::seed_seq, so results do not depend on
// the order in which streams are consumed (e.g. across worker threads).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // in [0, 1)
  double uniform(double lo, double hi);
  cplx complex_in_square();  // re, im independently uniform on [-1, 1]

 private:
  std::mt19937_64 engine_;
};

// Normalized ket whose entries have real and imaginary parts uniform on
// [-1, 1] before normalization.
ComplexMatrix random_ket(std::size_t d, RngStream& rng);

}  // namespace qchan
