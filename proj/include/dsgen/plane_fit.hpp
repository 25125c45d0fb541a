#pragma once

// Least-squares estimation of the road disparity projection model from
// (u, v, d) samples on the road. For a fixed roll angle the gain and offset
// have a closed form; the roll angle itself is found by minimizing the
// resulting profile energy over a bounded interval.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "dsgen/camera_geometry.hpp"
#include "dsgen/raster.hpp"

namespace dsgen {

struct Observation {
  double u = 0.0;
  double v = 0.0;
  double d = 0.0;
};

/// Road samples with finite coordinates and finite, positive disparities.
class DisparityObservations {
 public:
  DisparityObservations() = default;
  explicit DisparityObservations(std::vector<Observation> samples);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::span<const Observation> samples() const noexcept { return samples_; }
  const Observation& operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<Observation> samples_;
};

struct FitConfig {
  double phi_min = -std::numbers::pi / 3;
  double phi_max = std::numbers::pi / 3;
  double grid_step = 0.002;
  /// Golden-section stops once the bracket is narrower than this.
  double refine_tolerance = 1e-10;
  /// One round of refitting after dropping |r - median(r)| > trim_k * MAD.
  bool trim = false;
  double trim_k = 3.0;
  /// Subsampling cap applied by extract_observations (0 disables).
  std::size_t max_samples = 100000;
  std::uint64_t seed = 0;
};

struct GainOffsetFit {
  double gain = 0.0;
  double offset = 0.0;
  /// Sum of squared disparity residuals at (phi, gain, offset).
  double energy = 0.0;
};

struct FitResult {
  RoadProjectionModel model;
  double residual_energy = 0.0;
  std::size_t inlier_count = 0;
};

/// Closed-form gain and offset for a fixed roll angle.
///
/// With w_i = w(p_i, phi) and c = m sum(w^2) - (sum w)^2:
///   gain   = (m sum(d w) - sum(d) sum(w)) / c
///   offset = (sum(d) sum(w^2) - sum(w) sum(d w)) / (gain c)
/// Both are evaluated in mean-centered form, which is algebraically identical
/// and avoids cancellation for large pixel coordinates.
///
/// Throws kInsufficientData (m < 3), kDegenerateObservations (all w_i equal)
/// or kPlaneThroughBaseline (gain ~ 0).
GainOffsetFit fit_gain_offset(const DisparityObservations& obs, double phi);

/// Direct evaluation of sum (d_i - gain (w(p_i, roll) + offset))^2.
double model_energy(const DisparityObservations& obs, const RoadProjectionModel& model);

/// Profile energy (energy after the closed-form inner fit) at each angle;
/// nullopt where the inner fit is degenerate. Direct O(m) evaluation per angle.
std::vector<std::optional<double>> energy_profile(const DisparityObservations& obs,
                                                  std::span<const double> phis);

/// Coarse grid over [phi_min, phi_max] followed by golden-section refinement
/// of the best grid cell, then the closed-form inner fit at the final angle.
/// Ties on the grid resolve toward the smaller angle.
FitResult fit_model(const DisparityObservations& obs, const FitConfig& config = {});

/// Exhaustive uniform grid over the same interval as fit_model, with each
/// grid point evaluated directly through fit_gain_offset. Degenerate grid
/// points are skipped. Reference for tests; O(m * interval / grid_step).
FitResult fit_model_bruteforce(const DisparityObservations& obs, double grid_step,
                               const FitConfig& config = {});

/// Road pixels with a valid disparity, optionally capped at
/// config.max_samples by a seeded, evenly strided selection.
DisparityObservations extract_observations(const DisparityMap& disparity,
                                           const BinaryMask& road_mask,
                                           const FitConfig& config = {});

}  // namespace dsgen
