#include "statcurv/sampling.hpp"

#include "statcurv/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace statcurv {
namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

std::vector<std::vector<double>> halton_points(const std::vector<Interval>& domain, std::size_t count) {
  const std::size_t n = domain.size();
  if (n > std::size(kPrimes)) throw UnsupportedDimension("Halton sampling supports at most 12 axes");
  std::vector<std::vector<double>> points(count, std::vector<double>(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      const double centre = 0.5 * (domain[a].lo + domain[a].hi);
      const double half = 0.5 * kSampleBoxFraction * (domain[a].hi - domain[a].lo);
      const double u = radical_inverse(i + 1, kPrimes[a]);
      points[i][a] = centre + (2.0 * u - 1.0) * half;
    }
  }
  return points;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vector random_unit_vector(std::mt19937_64& rng, const Matrix& g) {
  const auto n = g.rows();
  Vector v(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 2.0 * uniform01(rng) - 1.0;
    const double norm2 = v.dot(g * v);
    if (norm2 > 1e-8) return v / std::sqrt(norm2);
  }
}

unsigned worker_count() {
  if (const char* env = std::getenv("STATCURV_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace statcurv
