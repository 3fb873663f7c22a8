#include "qchan/rng.hpp"

#include <cmath>

namespace qchan {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : engine_(make_engine(seed, 0)) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : engine_(make_engine(seed, stream_index)) {}

double RngStream::uniform() {
  // 53 high bits -> [0, 1); avoids distribution objects for portability.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

cplx RngStream::complex_in_square() { return cplx(uniform(-1.0, 1.0), uniform(-1.0, 1.0)); }

ComplexMatrix random_ket(std::size_t d, RngStream& rng) {
  ComplexMatrix v(d, 1);
  double norm2 = 0.0;
  do {  // reject the (measure-zero) near-null draw
    norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      v(i, 0) = rng.complex_in_square();
      norm2 += std::norm(v(i, 0));
    }
  } while (norm2 < 1e-12);
  v *= 1.0 / std::sqrt(norm2);
  return v;
}

}  // namespace qchan
