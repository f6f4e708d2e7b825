#pragma once

#include <array>
#include <span>
#include <vector>

#include "popdyn/grid.hpp"

namespace popdyn {

enum class Sex { male = 0, female = 1 };

inline constexpr std::array<Sex, 2> kSexes{Sex::male, Sex::female};

inline const char* sex_label(Sex s) { return s == Sex::male ? "m" : "f"; }

/// Two-sex container; index with a Sex, never with a bare integer.
template <typename V>
struct SexPair {
  V male{};
  V female{};

  V& operator[](Sex s) { return s == Sex::male ? male : female; }
  const V& operator[](Sex s) const { return s == Sex::male ? male : female; }

  bool operator==(const SexPair&) const = default;
};

/// Real values on every node 0..n of an AgeGrid.
class LatticeFunction {
 public:
  LatticeFunction() = default;
  /// Throws InvalidArgument on length mismatch or non-finite values.
  LatticeFunction(AgeGrid grid, std::vector<double> values);
  /// Constant function.
  LatticeFunction(AgeGrid grid, double value);

  template <typename F>
  static LatticeFunction sample(const AgeGrid& grid, F&& f) {
    std::vector<double> v(grid.n() + 1);
    for (std::size_t i = 0; i <= grid.n(); ++i) v[i] = f(grid.node(i));
    return LatticeFunction(grid, std::move(v));
  }

  const AgeGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Values on nodes 1..n.
  std::span<const double> interior() const {
    return std::span<const double>(values_).subspan(1);
  }

  double sup_abs() const;

  bool operator==(const LatticeFunction& other) const {
    return grid_ == other.grid_ && values_ == other.values_;
  }

 private:
  AgeGrid grid_;
  std::vector<double> values_;
};

enum class L2Range { interior, full };

/// h * sum_k u_k v_k over k = 1..n (interior) or k = 0..n (full).
double discrete_l2_inner(const LatticeFunction& u, const LatticeFunction& v,
                         L2Range range);

double discrete_l2_norm(const LatticeFunction& u, L2Range range);

/// h * sum_k u_k v_k for two interior value vectors sharing step h.
double interior_inner(std::span<const double> u, std::span<const double> v,
                      double h);

/// (u_k - u_{k-1})/h for k = 1..n.
std::vector<double> backward_diff(const LatticeFunction& u);

/// (u_{k+1} - u_k)/h for k = 0..n-1.
std::vector<double> forward_diff(const LatticeFunction& u);

}  // namespace popdyn
