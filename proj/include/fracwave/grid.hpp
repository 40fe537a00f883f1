#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracwave {

/// Uniform partition 0 = t_0 < t_1 < ... < t_n = T of the time interval.
class TimeGrid {
 public:
  TimeGrid(double t_max, std::size_t n_steps);

  double t_max() const noexcept { return t_max_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
  double step() const noexcept { return step_; }

  /// t_i; the last node is exactly t_max.
  double node(std::size_t i) const noexcept;
  std::vector<double> nodes() const;

  /// Same interval with the step count multiplied by `factor`.
  TimeGrid refined(std::size_t factor = 2) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
    return a.t_max_ == b.t_max_ && a.n_steps_ == b.n_steps_;
  }

 private:
  double t_max_;
  std::size_t n_steps_;
  double step_;
};

/// Order of a fractional integral or derivative. Construction rejects
/// negative and non-finite values; `for_derivative` further restricts to
/// (0, 2].
class FracOrder {
 public:
  explicit FracOrder(double gamma);

  static FracOrder for_derivative(double gamma);

  double value() const noexcept { return gamma_; }
  bool is_integer() const noexcept;

 private:
  double gamma_;
};

/// A d-dimensional trajectory sampled at every node of a TimeGrid, stored
/// node-major: values[i * dim + k] is component k at t_i.
class SampledPath {
 public:
  SampledPath(TimeGrid grid, std::size_t dim);
  SampledPath(TimeGrid grid, std::size_t dim, std::vector<double> values);

  template <class Fn>
  static SampledPath from_function(const TimeGrid& grid, Fn&& fn) {
    std::vector<double> values(grid.n_nodes());
    for (std::size_t i = 0; i < grid.n_nodes(); ++i) values[i] = fn(grid.node(i));
    return SampledPath(grid, 1, std::move(values));
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t n_nodes() const noexcept { return grid_.n_nodes(); }

  double operator()(std::size_t node, std::size_t comp = 0) const noexcept {
    return values_[node * dim_ + comp];
  }
  double& operator()(std::size_t node, std::size_t comp = 0) noexcept {
    return values_[node * dim_ + comp];
  }

  std::span<const double> row(std::size_t node) const noexcept {
    return {values_.data() + node * dim_, dim_};
  }
  std::span<double> row(std::size_t node) noexcept {
    return {values_.data() + node * dim_, dim_};
  }

  std::vector<double> component(std::size_t comp) const;
  void set_component(std::size_t comp, std::span<const double> samples);

  const std::vector<double>& values() const noexcept { return values_; }

  /// Largest absolute entry over all nodes and components.
  double max_abs() const noexcept;
  /// Throws InvalidArgument if any entry is NaN or infinite.
  void require_finite() const;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

}  // namespace fracwave
