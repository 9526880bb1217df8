#include "carto/numeric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace carto {
namespace {

constexpr std::int64_t kTableSize = std::int64_t{1} << 21;

double lgammaExact(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

const std::vector<double>& table() {
  static const std::vector<double> values = [] {
    std::vector<double> v(kTableSize);
    for (std::int64_t i = 0; i < kTableSize; ++i) {
      v[i] = lgammaExact(static_cast<double>(i) + 1.0);
    }
    return v;
  }();
  return values;
}

}  // namespace

double lnFactorial(std::int64_t n) {
  if (n < 0) {
    throw std::domain_error("lnFactorial of negative argument " + std::to_string(n));
  }
  if (n < kTableSize) {
    return table()[n];
  }
  return lgammaExact(static_cast<double>(n) + 1.0);
}

double lnBinom(std::int64_t n, std::int64_t k) {
  if (k == 0) {
    return 0.0;
  }
  if (k < 0 || n < k) {
    throw std::domain_error("lnBinom(" + std::to_string(n) + ", " + std::to_string(k) + ")");
  }
  return lnFactorial(n) - lnFactorial(k) - lnFactorial(n - k);
}

}  // namespace carto
