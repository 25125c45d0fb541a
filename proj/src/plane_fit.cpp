#include "dsgen/plane_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dsgen/error.hpp"

namespace dsgen {

namespace {

constexpr double kDegenerateSpread = 1e-12;
constexpr double kMinGain = 1e-12;

void require_fittable(const DisparityObservations& obs) {
  if (obs.size() < 3) {
    throw Error(ErrorCode::kInsufficientData,
                "at least 3 observations are required, got " + std::to_string(obs.size()));
  }
}

// Mean-centered second moments of (u, v, d). The profile energy at any angle
// follows from these in O(1):
//   S_ww = cos^2 S_vv - 2 sin cos S_uv + sin^2 S_uu
//   S_dw = cos S_dv - sin S_du
//   E*   = S_dd - S_dw^2 / S_ww
struct CenteredMoments {
  long double suu = 0, suv = 0, svv = 0, sdu = 0, sdv = 0, sdd = 0;
  long double max_radius_sq = 0;

  explicit CenteredMoments(const DisparityObservations& obs) {
    long double mu = 0, mv = 0, md = 0;
    for (const auto& o : obs.samples()) {
      mu += o.u;
      mv += o.v;
      md += o.d;
      max_radius_sq = std::max(max_radius_sq, static_cast<long double>(o.u) * o.u +
                                                  static_cast<long double>(o.v) * o.v);
    }
    const long double m = static_cast<long double>(obs.size());
    mu /= m;
    mv /= m;
    md /= m;
    for (const auto& o : obs.samples()) {
      const long double du = o.u - mu;
      const long double dv = o.v - mv;
      const long double dd = o.d - md;
      suu += du * du;
      suv += du * dv;
      svv += dv * dv;
      sdu += dd * du;
      sdv += dd * dv;
      sdd += dd * dd;
    }
  }

  // Profile energy, or +inf where the inner fit is degenerate. The spread
  // test uses max(u^2 + v^2) as an upper bound on max(w^2).
  long double profile(double phi) const {
    const long double c = std::cos(static_cast<long double>(phi));
    const long double s = std::sin(static_cast<long double>(phi));
    const long double sww = c * c * svv - 2 * s * c * suv + s * s * suu;
    if (!(sww > kDegenerateSpread * max_radius_sq)) return kInfinity;
    const long double sdw = c * sdv - s * sdu;
    if (std::abs(sdw / sww) <= kMinGain) return kInfinity;
    return std::max<long double>(0, sdd - sdw * sdw / sww);
  }

  static constexpr long double kInfinity = std::numeric_limits<long double>::infinity();
};

struct Probe {
  double phi;
  long double energy;
};

Probe golden_section(const CenteredMoments& moments, double lo, double hi, double tolerance,
                     Probe best) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  long double f1 = moments.profile(x1);
  long double f2 = moments.profile(x2);
  auto keep = [&best](double x, long double f) {
    if (f < best.energy) best = {x, f};
  };
  keep(x1, f1);
  keep(x2, f2);
  for (int iter = 0; iter < 300 && hi - lo > tolerance; ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = moments.profile(x1);
      keep(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = moments.profile(x2);
      keep(x2, f2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  keep(mid, moments.profile(mid));
  return best;
}

void validate_interval(const FitConfig& config, double step) {
  if (!(config.phi_min < config.phi_max) || config.phi_min <= -std::numbers::pi / 2 ||
      config.phi_max >= std::numbers::pi / 2) {
    throw Error(ErrorCode::kInvalidArgument, "roll search interval must lie within (-pi/2, pi/2)");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::kInvalidArgument, "grid step must be positive");
  }
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo + static_cast<double>(k) * step;
  return grid;
}

double median_in_place(std::vector<double>& values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  double upper = *mid;
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

FitResult fit_untrimmed(const DisparityObservations& obs, const FitConfig& config) {
  const CenteredMoments moments(obs);

  Probe best{0.0, CenteredMoments::kInfinity};
  for (double phi : uniform_grid(config.phi_min, config.phi_max, config.grid_step)) {
    const long double e = moments.profile(phi);
    if (e < best.energy) best = {phi, e};
  }
  if (!std::isfinite(static_cast<double>(best.energy))) {
    throw Error(ErrorCode::kUnfittable, "profile energy is degenerate at every grid angle");
  }

  const double lo = std::max(config.phi_min, best.phi - config.grid_step);
  const double hi = std::min(config.phi_max, best.phi + config.grid_step);
  best = golden_section(moments, lo, hi, config.refine_tolerance, best);

  GainOffsetFit inner;
  try {
    inner = fit_gain_offset(obs, best.phi);
  } catch (const Error& e) {
    throw Error(ErrorCode::kUnfittable, std::string("inner fit failed at the optimum: ") + e.what());
  }
  return {RoadProjectionModel(best.phi, inner.gain, inner.offset), inner.energy, obs.size()};
}

}  // namespace

DisparityObservations::DisparityObservations(std::vector<Observation> samples)
    : samples_(std::move(samples)) {
  for (const auto& o : samples_) {
    if (!std::isfinite(o.u) || !std::isfinite(o.v) || !std::isfinite(o.d) || !(o.d > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "observations need finite coordinates and positive finite disparity");
    }
  }
}

GainOffsetFit fit_gain_offset(const DisparityObservations& obs, double phi) {
  require_fittable(obs);
  const std::size_t m = obs.size();
  const long double cos_phi = std::cos(static_cast<long double>(phi));
  const long double sin_phi = std::sin(static_cast<long double>(phi));

  std::vector<long double> w(m);
  long double mean_w = 0.0L;
  long double mean_d = 0.0L;
  long double max_w_sq = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = obs[i].v * cos_phi - obs[i].u * sin_phi;
    mean_w += w[i];
    mean_d += obs[i].d;
    max_w_sq = std::max(max_w_sq, w[i] * w[i]);
  }
  const long double md = static_cast<long double>(m);
  mean_w /= md;
  mean_d /= md;

  long double sww = 0.0L;
  long double sdw = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    const long double dw = w[i] - mean_w;
    sww += dw * dw;
    sdw += (obs[i].d - mean_d) * dw;
  }
  // c = m sum(w^2) - (sum w)^2 = m * sww
  const long double c = md * sww;
  if (!(c > kDegenerateSpread * md * max_w_sq)) {
    throw Error(ErrorCode::kDegenerateObservations,
                "observations are collinear along the rotated image row");
  }
  const long double gain = md * sdw / c;
  if (std::abs(gain) <= kMinGain) {
    throw Error(ErrorCode::kPlaneThroughBaseline, "fitted gain is zero (plane through baseline)");
  }
  // gain * offset is the intercept of the line d = gain * w + gain * offset.
  const long double offset = (mean_d - gain * mean_w) / gain;

  GainOffsetFit fit{static_cast<double>(gain), static_cast<double>(offset), 0.0};
  long double energy = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    const long double r = obs[i].d - static_cast<long double>(fit.gain) * (w[i] + fit.offset);
    energy += r * r;
  }
  fit.energy = static_cast<double>(energy);
  return fit;
}

double model_energy(const DisparityObservations& obs, const RoadProjectionModel& model) {
  long double energy = 0.0L;
  for (const auto& o : obs.samples()) {
    const long double r = o.d - model_disparity(model, {o.u, o.v});
    energy += r * r;
  }
  return static_cast<double>(energy);
}

std::vector<std::optional<double>> energy_profile(const DisparityObservations& obs,
                                                  std::span<const double> phis) {
  require_fittable(obs);
  std::vector<std::optional<double>> profile;
  profile.reserve(phis.size());
  for (double phi : phis) {
    try {
      profile.emplace_back(fit_gain_offset(obs, phi).energy);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateObservations &&
          e.code() != ErrorCode::kPlaneThroughBaseline) {
        throw;
      }
      profile.emplace_back(std::nullopt);
    }
  }
  return profile;
}

FitResult fit_model(const DisparityObservations& obs, const FitConfig& config) {
  require_fittable(obs);
  validate_interval(config, config.grid_step);
  if (!(config.refine_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "refine tolerance must be positive");
  }

  FitResult fit = fit_untrimmed(obs, config);
  if (!config.trim) return fit;

  std::vector<double> residuals(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    residuals[i] = obs[i].d - model_disparity(fit.model, {obs[i].u, obs[i].v});
  }
  std::vector<double> scratch = residuals;
  const double center = median_in_place(scratch);
  for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] = std::abs(residuals[i] - center);
  const double mad = median_in_place(scratch);

  std::vector<Observation> inliers;
  inliers.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (std::abs(residuals[i] - center) <= config.trim_k * mad) inliers.push_back(obs[i]);
  }
  if (inliers.size() < 3 || inliers.size() == obs.size()) return fit;
  return fit_untrimmed(DisparityObservations(std::move(inliers)), config);
}

FitResult fit_model_bruteforce(const DisparityObservations& obs, double grid_step,
                               const FitConfig& config) {
  require_fittable(obs);
  validate_interval(config, grid_step);

  std::optional<double> best_phi;
  GainOffsetFit best;
  for (double phi : uniform_grid(config.phi_min, config.phi_max, grid_step)) {
    GainOffsetFit candidate;
    try {
      candidate = fit_gain_offset(obs, phi);
    } catch (const Error&) {
      continue;
    }
    if (!best_phi || candidate.energy < best.energy) {
      best_phi = phi;
      best = candidate;
    }
  }
  if (!best_phi) throw Error(ErrorCode::kUnfittable, "every grid angle is degenerate");
  return {RoadProjectionModel(*best_phi, best.gain, best.offset), best.energy, obs.size()};
}

DisparityObservations extract_observations(const DisparityMap& disparity,
                                           const BinaryMask& road_mask, const FitConfig& config) {
  if (disparity.width() != road_mask.width() || disparity.height() != road_mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "disparity map and road mask differ in size");
  }
  std::vector<Observation> all;
  for (int v = 0; v < disparity.height(); ++v) {
    for (int u = 0; u < disparity.width(); ++u) {
      if (road_mask.at(u, v) && disparity.valid(u, v)) {
        all.push_back({static_cast<double>(u), static_cast<double>(v), disparity.at(u, v)});
      }
    }
  }
  if (all.size() < 3) {
    throw Error(ErrorCode::kInsufficientData,
                "fewer than 3 road pixels carry a valid disparity (" + std::to_string(all.size()) +
                    ")");
  }
  const std::size_t cap = config.max_samples;
  if (cap == 0 || all.size() <= cap) return DisparityObservations(std::move(all));

  // Evenly spaced picks with a seeded sub-stride phase: index_k =
  // floor((k + phase) * N / cap). The engine's raw output is fully specified
  // by the standard, so the selection is identical on every platform.
  std::mt19937_64 engine(config.seed);
  const double phase = static_cast<double>(engine() >> 11) * 0x1p-53;
  const double stride = static_cast<double>(all.size()) / static_cast<double>(cap);
  std::vector<Observation> picked;
  picked.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) {
    const auto index = static_cast<std::size_t>((static_cast<double>(k) + phase) * stride);
    picked.push_back(all[std::min(index, all.size() - 1)]);
  }
  return DisparityObservations(std::move(picked));
}

}  // namespace dsgen
