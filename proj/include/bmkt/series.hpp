#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bmkt {

/// Normalized autocorrelation sampled on a uniform lag grid t_k = k * step.
/// values[0] == 1; `variance` is the lag-0 autocovariance.
struct AcfSeries {
  double step = 0.0;
  std::vector<double> values;
  double variance = 1.0;

  std::size_t size() const noexcept { return values.size(); }
  double lag(std::size_t k) const noexcept { return static_cast<double>(k) * step; }
};

/// Normalized memory kernel C_FF(t)/<R^2> on a uniform grid, units 1/time^2.
/// `local_rate` is the weight of a delta component at t = 0 (units 1/time);
/// it contributes local_rate * R(t) to the memory integral.
struct KernelSeries {
  double step = 0.0;
  std::vector<double> values;
  double local_rate = 0.0;

  std::size_t size() const noexcept { return values.size(); }
};

enum class PathLabel { Force, Increment, ReturnRate, Price };

std::string to_string(PathLabel label);

/// Equally sampled paths stored row-major (n_paths x n_points).
class PathEnsemble {
 public:
  PathEnsemble() = default;
  PathEnsemble(std::size_t n_paths, std::size_t n_points, double step, PathLabel label,
               std::uint64_t seed = 0, std::string stream = {})
      : step_(step),
        n_paths_(n_paths),
        n_points_(n_points),
        label_(label),
        seed_(seed),
        stream_(std::move(stream)),
        data_(n_paths * n_points, 0.0) {}

  double step() const noexcept { return step_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t n_points() const noexcept { return n_points_; }
  PathLabel label() const noexcept { return label_; }
  void set_label(PathLabel label) noexcept { label_ = label; }

  /// Seed lineage: master seed plus the stream tag; path i was drawn from
  /// stream (seed, stream, i).
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& stream() const noexcept { return stream_; }

  std::span<double> path(std::size_t i) noexcept {
    return {data_.data() + i * n_points_, n_points_};
  }
  std::span<const double> path(std::size_t i) const noexcept {
    return {data_.data() + i * n_points_, n_points_};
  }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  double step_ = 0.0;
  std::size_t n_paths_ = 0;
  std::size_t n_points_ = 0;
  PathLabel label_ = PathLabel::ReturnRate;
  std::uint64_t seed_ = 0;
  std::string stream_;
  std::vector<double> data_;
};

}  // namespace bmkt
