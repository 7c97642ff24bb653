#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace equilex {

/// Dense coordinate vector in the ambient d-dimensional section.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim) : coords_(dim, 0.0) {}
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}

  static Point basis(std::size_t dim, std::size_t index) {
    Point p(dim);
    p.coords_.at(index) = 1.0;
    return p;
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<double> coords() noexcept { return coords_; }
  const std::vector<double>& vector() const noexcept { return coords_; }

  bool all_finite() const noexcept {
    for (double v : coords_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool is_zero() const noexcept {
    for (double v : coords_) {
      if (v != 0.0) return false;
    }
    return true;
  }

  Point& operator+=(const Point& o) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Point& operator*=(double c) {
    for (double& v : coords_) v *= c;
    return *this;
  }

  /// this += c * o
  Point& axpy(double c, const Point& o) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += c * o.coords_[i];
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double c, Point a) { return a *= c; }
  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

}  // namespace equilex
