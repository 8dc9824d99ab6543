#include "idxgo/curve.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace idxgo {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw std::invalid_argument("Box: bounds must be non-empty and of equal length");
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] < upper_[j])) {
      std::ostringstream msg;
      msg << "Box: lower bound must be below upper bound on axis " << j;
      throw std::invalid_argument(msg.str());
    }
  }
}

Box Box::unit_cube(int dimension) {
  return Box(std::vector<double>(dimension, -0.5), std::vector<double>(dimension, 0.5));
}

bool Box::contains(std::span<const double> y) const {
  if (y.size() != lower_.size()) return false;
  for (std::size_t j = 0; j < y.size(); ++j)
    if (!(y[j] >= lower_[j] && y[j] <= upper_[j])) return false;
  return true;
}

Point scale_to_domain(std::span<const double> point, const Box& domain) {
  if (static_cast<int>(point.size()) != domain.dimension())
    throw std::invalid_argument("scale_to_domain: dimension mismatch");
  Point y(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) {
    const double a = domain.lower()[j];
    const double b = domain.upper()[j];
    y[j] = a + (b - a) * (point[j] + 0.5);
  }
  return y;
}

Point scale_to_cube(std::span<const double> point, const Box& domain) {
  if (static_cast<int>(point.size()) != domain.dimension())
    throw std::invalid_argument("scale_to_cube: dimension mismatch");
  Point u(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) {
    const double a = domain.lower()[j];
    const double b = domain.upper()[j];
    u[j] = (point[j] - a) / (b - a) - 0.5;
  }
  return u;
}

double holder_distance(double x1, double x2, int dimension) {
  const double gap = std::abs(x1 - x2);
  if (dimension == 1) return gap;
  if (dimension == 2) return std::sqrt(gap);
  return std::pow(gap, 1.0 / dimension);
}

namespace hilbert {

// Transpose form: the rank's bits are dealt round-robin over the axes, most
// significant first (axis 0 gets the top bit).
static std::vector<std::uint32_t> rank_to_transpose(std::uint64_t rank, int bits, int n) {
  std::vector<std::uint32_t> x(n, 0);
  int shift = bits * n;
  for (int q = bits - 1; q >= 0; --q) {
    for (int i = 0; i < n; ++i) {
      --shift;
      x[i] |= static_cast<std::uint32_t>((rank >> shift) & 1u) << q;
    }
  }
  return x;
}

static std::uint64_t transpose_to_rank(std::span<const std::uint32_t> x, int bits) {
  std::uint64_t rank = 0;
  for (int q = bits - 1; q >= 0; --q)
    for (std::uint32_t xi : x) rank = (rank << 1) | ((xi >> q) & 1u);
  return rank;
}

std::vector<std::uint32_t> decode(std::uint64_t rank, int bits, int dimension) {
  const int n = dimension;
  std::vector<std::uint32_t> x = rank_to_transpose(rank, bits, n);
  if (n == 1) return x;

  // Gray decode.
  std::uint32_t t = x[n - 1] >> 1;
  for (int i = n - 1; i > 0; --i) x[i] ^= x[i - 1];
  x[0] ^= t;

  // Undo the per-level reflections and exchanges.
  const std::uint32_t top = std::uint32_t{1} << bits;
  for (std::uint32_t q = 2; q != top; q <<= 1) {
    const std::uint32_t p = q - 1;
    for (int i = n - 1; i >= 0; --i) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
  return x;
}

std::uint64_t encode(std::span<const std::uint32_t> cell, int bits) {
  const int n = static_cast<int>(cell.size());
  std::vector<std::uint32_t> x(cell.begin(), cell.end());
  if (n == 1) return x[0];

  const std::uint32_t msb = std::uint32_t{1} << (bits - 1);
  for (std::uint32_t q = msb; q > 1; q >>= 1) {
    const std::uint32_t p = q - 1;
    for (int i = 0; i < n; ++i) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint32_t t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }

  // Gray encode.
  for (int i = 1; i < n; ++i) x[i] ^= x[i - 1];
  std::uint32_t t = 0;
  for (std::uint32_t q = msb; q > 1; q >>= 1)
    if (x[n - 1] & q) t ^= q - 1;
  for (int i = 0; i < n; ++i) x[i] ^= t;

  return transpose_to_rank(x, bits);
}

}  // namespace hilbert

CurveMap::CurveMap(int dimension, int level) : dimension_(dimension), level_(level) {
  if (dimension < 1) throw std::invalid_argument("CurveMap: dimension must be >= 1");
  if (dimension > 1) {
    if (level < 1) throw std::invalid_argument("CurveMap: level must be >= 1");
    if (level * dimension > kMaxBits) {
      std::ostringstream msg;
      msg << "CurveMap: level*dimension = " << level * dimension << " exceeds " << kMaxBits
          << " bits of double precision";
      throw std::invalid_argument(msg.str());
    }
  }
}

double CurveMap::resolution() const {
  if (dimension_ == 1) return std::ldexp(1.0, -kMaxBits);
  return std::ldexp(1.0, -level_ * dimension_);
}

std::uint64_t CurveMap::cell_count() const {
  if (dimension_ == 1) return std::uint64_t{1} << kMaxBits;
  return std::uint64_t{1} << (level_ * dimension_);
}

std::uint64_t CurveMap::rank_of(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("CurveMap: x must lie in [0, 1]");
  const std::uint64_t count = cell_count();
  // x * 2^(dN) is exact in binary floating point.
  const auto k = static_cast<std::uint64_t>(std::floor(x * static_cast<double>(count)));
  return k < count ? k : count - 1;
}

Point CurveMap::cell_center(std::uint64_t rank) const {
  if (dimension_ == 1) {
    return {(static_cast<double>(rank) + 0.5) * resolution() - 0.5};
  }
  const auto cell = hilbert::decode(rank, level_, dimension_);
  const double edge = std::ldexp(1.0, -level_);
  Point y(dimension_);
  for (int j = 0; j < dimension_; ++j) y[j] = (cell[j] + 0.5) * edge - 0.5;
  return y;
}

Point CurveMap::map_to_cube(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("CurveMap: x must lie in [0, 1]");
  if (dimension_ == 1) return {x - 0.5};
  return cell_center(rank_of(x));
}

Point CurveMap::evolvent(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("CurveMap: x must lie in [0, 1]");
  if (dimension_ == 1) return {x - 0.5};
  const std::uint64_t count = cell_count();
  const double s = x * static_cast<double>(count) - 0.5;
  if (s <= 0.0) return cell_center(0);
  if (s >= static_cast<double>(count - 1)) return cell_center(count - 1);
  const auto k = static_cast<std::uint64_t>(std::floor(s));
  const double f = s - static_cast<double>(k);
  Point a = cell_center(k);
  const Point b = cell_center(k + 1);
  for (int j = 0; j < dimension_; ++j) a[j] += f * (b[j] - a[j]);
  return a;
}

}  // namespace idxgo
