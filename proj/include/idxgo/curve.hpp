#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace idxgo {

using Point = std::vector<double>;

// Hyperinterval {y : lower_j <= y_j <= upper_j}.
class Box {
 public:
  Box(std::vector<double> lower, std::vector<double> upper);

  // The canonical cube [-1/2, 1/2]^N.
  static Box unit_cube(int dimension);

  int dimension() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool contains(std::span<const double> y) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// Affine maps between the canonical cube and an arbitrary box.
Point scale_to_domain(std::span<const double> point, const Box& domain);
Point scale_to_cube(std::span<const double> point, const Box& domain);

// Hoelder metric on [0,1]: |x1 - x2|^(1/N).
double holder_distance(double x1, double x2, int dimension);

namespace hilbert {

// Cell coordinates on a 2^bits grid per axis, rank in [0, 2^(bits*N)).
// Gray-code (Butz/Skilling) ordering; rank 0 is the all-zero cell.
std::vector<std::uint32_t> decode(std::uint64_t rank, int bits, int dimension);
std::uint64_t encode(std::span<const std::uint32_t> cell, int bits);

}  // namespace hilbert

// d-level approximation of the Hilbert curve, [0,1] -> [-1/2,1/2]^N.
//
// [0,1] is cut into 2^(dN) equal subintervals; the k-th one belongs to the
// k-th grid cell (edge 2^-d) in Hilbert order. map_to_cube() returns the cell
// center, so points closer than resolution() may be indistinguishable.
// evolvent() is the polyline through the centers in rank order; it is what
// the solvers evaluate. For N = 1 both are x - 1/2 and the level is ignored.
class CurveMap {
 public:
  static constexpr int kMaxBits = 52;

  CurveMap(int dimension, int level);

  int dimension() const { return dimension_; }
  int level() const { return level_; }

  // 2^(-dN); machine resolution 2^-52 when N = 1.
  double resolution() const;

  std::uint64_t cell_count() const;
  std::uint64_t rank_of(double x) const;

  Point map_to_cube(double x) const;
  // Center k is reached at x = (k + 1/2) 2^(-dN); constant before the first
  // and after the last center.
  Point evolvent(double x) const;
  Point cell_center(std::uint64_t rank) const;

 private:
  int dimension_;
  int level_;
};

}  // namespace idxgo
