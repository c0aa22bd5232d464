#pragma once

// Small seeded generators for the property tests. Each suite draws from its
// own seed so that a failing case can be replayed by name.

#include <cstdint>
#include <random>
#include <string>

#include "shintani/numerics.hpp"

namespace gen {

class Source {
 public:
  explicit Source(std::uint64_t seed) : engine_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  // p/q with 1 <= q <= max_den and p/q in [lo, hi)
  shintani::BigRational rational(long lo, long hi, long max_den) {
    long q = integer(1, max_den);
    long p = integer(lo * q, hi * q - 1);
    shintani::BigRational r(p, q);
    r.canonicalize();
    return r;
  }

  // a uniform value in [lo, hi) carrying `bits` random bits after the point
  shintani::HPReal real(double lo, double hi, int precision) {
    shintani::HPReal acc(precision);
    shintani::HPReal scale(1L, precision);
    for (int i = 0; i < precision / 32 + 1; ++i) {
      scale /= 4294967296L;
      acc += scale * static_cast<long>(engine_() & 0xffffffffu);
    }
    return shintani::HPReal(lo, precision) + acc * shintani::HPReal(hi - lo, precision);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// odd a >= 3 with a^2 - 4 square-free
inline long length_one_digit(Source& src, long max_a = 41) {
  for (;;) {
    long a = 2 * src.integer(1, (max_a - 1) / 2) + 1;
    long d = a * a - 4;
    bool square_free = true;
    for (long p = 2; p * p <= d; ++p) {
      if (d % (p * p) == 0) square_free = false;
    }
    if (square_free) return a;
  }
}

}  // namespace gen
