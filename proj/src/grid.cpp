#include "fracwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracwave/error.hpp"

namespace fracwave {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidOrder: return "invalid-order";
    case ErrorCode::InvalidGrid: return "invalid-grid";
    case ErrorCode::GridMismatch: return "grid-mismatch";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InitialConditionViolation: return "initial-condition-violation";
    case ErrorCode::TraceViolation: return "trace-violation";
    case ErrorCode::UnsupportedRange: return "unsupported-range";
    case ErrorCode::RefineGrid: return "refine-grid";
    case ErrorCode::NumericalSingularity: return "numerical-singularity";
    case ErrorCode::Compatibility: return "compatibility";
    case ErrorCode::ResourceCap: return "resource-cap";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Evaluation: return "evaluation";
    case ErrorCode::Syntax: return "syntax";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

TimeGrid::TimeGrid(double t_max, std::size_t n_steps)
    : t_max_(t_max), n_steps_(n_steps), step_(0.0) {
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw Error(ErrorCode::InvalidGrid, "final time must be positive and finite");
  if (n_steps < 2)
    throw Error(ErrorCode::InvalidGrid,
                "time grid needs at least 2 steps, got " + std::to_string(n_steps));
  step_ = t_max / static_cast<double>(n_steps);
}

double TimeGrid::node(std::size_t i) const noexcept {
  if (i >= n_steps_) return t_max_;
  return t_max_ * (static_cast<double>(i) / static_cast<double>(n_steps_));
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> t(n_nodes());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = node(i);
  return t;
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
  return TimeGrid(t_max_, n_steps_ * factor);
}

FracOrder::FracOrder(double gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw Error(ErrorCode::InvalidOrder,
                "fractional order must be finite and non-negative, got " +
                    std::to_string(gamma));
}

FracOrder FracOrder::for_derivative(double gamma) {
  if (!(gamma > 0.0 && gamma <= 2.0))
    throw Error(ErrorCode::InvalidOrder,
                "derivative order must lie in (0, 2], got " + std::to_string(gamma));
  return FracOrder(gamma);
}

bool FracOrder::is_integer() const noexcept {
  return gamma_ == std::floor(gamma_);
}

SampledPath::SampledPath(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), values_(grid.n_nodes() * dim, 0.0) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "path dimension must be >= 1");
}

SampledPath::SampledPath(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "path dimension must be >= 1");
  if (values_.size() != grid_.n_nodes() * dim_)
    throw Error(ErrorCode::InvalidArgument,
                "path holds " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(grid_.n_nodes() * dim_));
  require_finite();
}

std::vector<double> SampledPath::component(std::size_t comp) const {
  std::vector<double> out(n_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(i, comp);
  return out;
}

void SampledPath::set_component(std::size_t comp, std::span<const double> samples) {
  if (samples.size() != n_nodes())
    throw Error(ErrorCode::GridMismatch, "component length does not match grid");
  for (std::size_t i = 0; i < samples.size(); ++i) (*this)(i, comp) = samples[i];
}

double SampledPath::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void SampledPath::require_finite() const {
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j]))
      throw Error(ErrorCode::InvalidArgument,
                  "non-finite path sample at node " + std::to_string(j / dim_));
  }
}

}  // namespace fracwave
