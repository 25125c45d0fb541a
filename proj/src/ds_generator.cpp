#include "dsgen/ds_generator.hpp"

#include <algorithm>
#include <cmath>

#include "dsgen/error.hpp"

namespace dsgen {

namespace {

std::uint8_t to_byte(double value) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(value + 0.5), 0.0, 255.0));
}

}  // namespace

GeneratedView generate_view_detailed(const Image& ref_img, const Image& tgt_img,
                                     const RoadProjectionModel& model,
                                     Interpolation interpolation) {
  if (ref_img.width() != tgt_img.width() || ref_img.height() != tgt_img.height() ||
      ref_img.channels() != tgt_img.channels()) {
    throw Error(ErrorCode::kShapeMismatch, "reference and target images differ in shape");
  }
  if (ref_img.empty()) throw Error(ErrorCode::kShapeMismatch, "empty input image");
  const double cos_phi = std::cos(model.roll());
  const double sin_phi = std::sin(model.roll());
  if (!(1.0 + model.gain() * sin_phi > 0.0)) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "source column is not increasing along the row (1 + gain*sin(roll) <= 0)");
  }

  const int width = ref_img.width();
  const int height = ref_img.height();
  const int channels = ref_img.channels();
  GeneratedView out{Image(width, height, channels), BinaryMask(width, height), {}};

  for (int v = 0; v < height; ++v) {
    const auto ref_row = ref_img.row(v);
    const auto tgt_row = tgt_img.row(v);
    auto out_row = out.image.row(v);
    for (int u = 0; u < width; ++u) {
      // Same expression as model_disparity, with the trigonometry hoisted.
      const double w = v * cos_phi - u * sin_phi;
      const double x = u - model.gain() * (w + model.offset());
      const std::size_t dst = static_cast<std::size_t>(u) * channels;

      bool sampled = false;
      if (x > 0.0 && x <= width) {
        if (interpolation == Interpolation::kBilinear) {
          const double x0 = std::floor(x);
          const double frac = x - x0;
          const double x1 = frac > 0.0 ? x0 + 1.0 : x0;
          if (x0 >= 0.0 && x1 <= width - 1) {
            const std::size_t a = static_cast<std::size_t>(x0) * channels;
            const std::size_t b = static_cast<std::size_t>(x1) * channels;
            for (int c = 0; c < channels; ++c) {
              out_row[dst + c] = to_byte((1.0 - frac) * tgt_row[a + c] + frac * tgt_row[b + c]);
            }
            sampled = true;
          }
        } else {
          const double xn = std::floor(x + 0.5);
          if (xn >= 0.0 && xn <= width - 1) {
            const std::size_t a = static_cast<std::size_t>(xn) * channels;
            for (int c = 0; c < channels; ++c) out_row[dst + c] = tgt_row[a + c];
            sampled = true;
          }
        }
      }
      if (sampled) {
        out.target_branch.set(u, v, true);
        ++out.counts.target_sampled;
      } else {
        for (int c = 0; c < channels; ++c) out_row[dst + c] = ref_row[dst + c];
        ++out.counts.reference_copied;
      }
    }
  }
  return out;
}

Image generate_view(const Image& ref_img, const Image& tgt_img, const RoadProjectionModel& model,
                    Interpolation interpolation) {
  return generate_view_detailed(ref_img, tgt_img, model, interpolation).image;
}

AugmentedSample augment_sample(const StereoSample& sample, const FitResult& fit,
                               Interpolation interpolation) {
  validate_sample(sample);
  GeneratedView view =
      generate_view_detailed(sample.ref_image, sample.tgt_image, fit.model, interpolation);
  return {sample.sample_id,
          std::move(view.image),
          sample.road_mask,
          "image_2/" + sample.sample_id,
          "image_3/" + sample.sample_id,
          fit.model,
          view.counts};
}

}  // namespace dsgen
