#include "dsgen/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsgen/dataset_io.hpp"
#include "dsgen/ds_generator.hpp"
#include "dsgen/error.hpp"
#include "dsgen/metrics.hpp"
#include "dsgen/plane_fit.hpp"
#include "dsgen/reports.hpp"
#include "dsgen/synthetic_scene.hpp"

namespace dsgen::cli {

namespace {

using nlohmann::json;

// Demo self-check tolerances.
constexpr double kDemoRollTolerance = 1e-4;
constexpr double kDemoRelativeTolerance = 1e-3;
constexpr double kDemoPhotometricTolerance = 2.0 / 255.0;
constexpr double kDemoRoadBand = 1.0;

/// Applies a flat JSON object of option values to a parsed subcommand.
/// Keys may use '_' or '-'. Options given on the command line win.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::kConfig, "config file not found: " + path);
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfig, path + ": config must be a JSON object");
  auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config") {
      throw Error(ErrorCode::kConfig, path + ": unknown option '" + key + "' for " + sub->get_name());
    }
    if (opt->count() > 0) continue;
    std::vector<std::string> inputs;
    if (value.is_array()) {
      for (const auto& v : value) inputs.push_back(scalar(v));
    } else {
      inputs.push_back(scalar(value));
    }
    try {
      opt->add_result(inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::kConfig, path + ": bad value for '" + key + "': " + e.what());
    }
  }
}

struct RunConfig {
  std::string root;
  std::string out;
  std::string calib;
  std::string scene;
  std::string pred;
  std::string gt;
  std::string roi;
  FitConfig fit;
  std::string interp = "bilinear";
  bool overwrite = false;
  bool strict = false;
  bool global_model = false;
  int jobs = 1;
  std::uint64_t seed = 0;
  int width = 1242;
  int height = 375;
};

Interpolation parse_interp(const std::string& name) {
  return name == "nearest" ? Interpolation::kNearest : Interpolation::kBilinear;
}

json settings_json(const RunConfig& cfg) {
  return {
      {"phi_min", cfg.fit.phi_min},
      {"phi_max", cfg.fit.phi_max},
      {"grid_step", cfg.fit.grid_step},
      {"refine_tol", cfg.fit.refine_tolerance},
      {"trim", cfg.fit.trim},
      {"trim_k", cfg.fit.trim_k},
      {"max_samples", cfg.fit.max_samples},
      {"seed", cfg.fit.seed},
      {"interp", cfg.interp},
      {"global_model", cfg.global_model},
  };
}

void require_directory(const std::string& path, const char* what) {
  std::error_code ec;
  if (path.empty() || !fs::is_directory(path, ec)) {
    throw Error(ErrorCode::kIo, std::string(what) + " is not a readable directory: " + path);
  }
}

std::optional<StereoRig> optional_calibration(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_calibration(path);
}

/// Runs fn(i) for i in [begin, end) on up to `jobs` threads.
void parallel_for(std::size_t begin, std::size_t end, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t n = end - begin;
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < end; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct SampleRecord {
  std::string sample_id;
  bool ok = false;
  std::string error_code;
  std::string reason;
  json details = json::object();
};

json record_to_json(const SampleRecord& r) {
  json j = r.details;
  j["sample_id"] = r.sample_id;
  j["status"] = r.ok ? "ok" : "skipped";
  if (!r.ok) {
    j["error"] = r.error_code;
    j["reason"] = r.reason;
  }
  return j;
}

void mark_failed(SampleRecord& record, const Error& e) {
  record.ok = false;
  record.error_code = std::string(to_string(e.code()));
  record.reason = e.what();
}

struct Batch {
  std::vector<std::string> ids;
  std::vector<SampleRecord> skipped;
};

Batch collect_batch(const std::string& root) {
  Batch batch;
  for (const auto& entry : scan_manifest(root)) {
    if (entry.complete()) {
      batch.ids.push_back(entry.sample_id);
      continue;
    }
    SampleRecord r;
    r.sample_id = entry.sample_id;
    r.error_code = "incomplete_sample";
    std::string missing;
    for (const auto& m : entry.missing()) missing += (missing.empty() ? "" : ", ") + m;
    r.reason = "missing components: " + missing;
    batch.skipped.push_back(std::move(r));
  }
  if (batch.ids.empty() && batch.skipped.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no samples found under " + root);
  }
  return batch;
}

/// One model from the pooled road pixels of every sample; each sample
/// contributes at most max_samples / n observations.
FitResult fit_global(const std::string& root, const std::vector<std::string>& ids,
                     const FitConfig& config) {
  if (ids.empty()) throw Error(ErrorCode::kInsufficientData, "no complete samples to fit");
  FitConfig per_sample = config;
  if (config.max_samples > 0) {
    per_sample.max_samples = std::max<std::size_t>(3, config.max_samples / ids.size());
  }
  std::vector<Observation> pooled;
  for (const auto& id : ids) {
    const StereoSample sample = load_sample(root, id);
    const auto obs = extract_observations(sample.disparity, sample.road_mask, per_sample);
    pooled.insert(pooled.end(), obs.samples().begin(), obs.samples().end());
  }
  return fit_model(DisparityObservations(std::move(pooled)), config);
}

int finish_batch(const std::vector<SampleRecord>& records, bool strict_abort, std::ostream& err) {
  const auto failures = std::count_if(records.begin(), records.end(),
                                      [](const SampleRecord& r) { return !r.ok; });
  if (failures == 0) return kOk;
  json summary = {{"status", strict_abort ? "aborted" : "partial"},
                  {"failed", failures},
                  {"total", records.size()}};
  err << summary.dump() << "\n";
  return strict_abort ? kFailure : kPartial;
}

// ---------------------------------------------------------------------------
// fit

int run_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_directory(cfg.root, "--root");
  const auto rig = optional_calibration(cfg.calib);
  const fs::path out_dir = cfg.out.empty() ? fs::path(cfg.root) : fs::path(cfg.out);
  Batch batch = collect_batch(cfg.root);
  if (cfg.strict && !batch.skipped.empty()) {
    throw Error(ErrorCode::kInsufficientData, batch.skipped.front().sample_id + ": " +
                                                  batch.skipped.front().reason);
  }

  std::optional<FitResult> global;
  if (cfg.global_model) global = fit_global(cfg.root, batch.ids, cfg.fit);

  std::vector<SampleRecord> records(batch.ids.size());
  parallel_for(0, batch.ids.size(), cfg.jobs, [&](std::size_t i) {
    SampleRecord& r = records[i];
    r.sample_id = batch.ids[i];
    try {
      const StereoSample sample = load_sample(cfg.root, r.sample_id);
      const auto obs = extract_observations(sample.disparity, sample.road_mask, cfg.fit);
      const FitResult fit = global ? *global : fit_model(obs, cfg.fit);
      r.details["fit"] = fit_to_json(fit, obs.size(), rig);
      if (global) r.details["fit"]["residual_energy_sample"] = model_energy(obs, fit.model);
      r.ok = true;
    } catch (const Error& e) {
      mark_failed(r, e);
    }
  });
  const bool abort = cfg.strict && std::any_of(records.begin(), records.end(),
                                               [](const SampleRecord& r) { return !r.ok; });
  records.insert(records.end(), batch.skipped.begin(), batch.skipped.end());
  std::sort(records.begin(), records.end(),
            [](const SampleRecord& a, const SampleRecord& b) { return a.sample_id < b.sample_id; });

  json report = {{"schema_version", kReportSchemaVersion},
                 {"command", "fit"},
                 {"settings", settings_json(cfg)},
                 {"samples", json::array()}};
  if (rig) report["calibration"] = rig_to_json(*rig);
  std::size_t ok = 0;
  for (const auto& r : records) {
    report["samples"].push_back(record_to_json(r));
    ok += r.ok ? 1 : 0;
  }
  report["summary"] = {{"total", records.size()}, {"fitted", ok}, {"skipped", records.size() - ok}};
  const fs::path report_path = out_dir / "fit_report.json";
  save_json(report_path, report);
  out << "fitted " << ok << "/" << records.size() << " samples; report: "
      << report_path.generic_string() << "\n";
  return finish_batch(records, abort, err);
}

// ---------------------------------------------------------------------------
// augment

struct AugmentSummary {
  std::vector<SampleRecord> records;
  bool aborted = false;
};

AugmentSummary augment_directory(const RunConfig& cfg, const std::optional<StereoRig>& rig) {
  Batch batch = collect_batch(cfg.root);
  AugmentSummary summary;
  if (cfg.strict && !batch.skipped.empty()) {
    throw Error(ErrorCode::kInsufficientData, batch.skipped.front().sample_id + ": " +
                                                  batch.skipped.front().reason);
  }
  std::optional<FitResult> global;
  if (cfg.global_model) global = fit_global(cfg.root, batch.ids, cfg.fit);
  const Interpolation interp = parse_interp(cfg.interp);

  // Generation runs in parallel chunks; saving (and the manifest) proceeds
  // in sample order so the output does not depend on the job count.
  const std::size_t chunk = static_cast<std::size_t>(std::max(1, cfg.jobs));
  std::vector<SampleRecord> records(batch.ids.size());
  for (std::size_t start = 0; start < batch.ids.size() && !summary.aborted; start += chunk) {
    const std::size_t stop = std::min(batch.ids.size(), start + chunk);
    std::vector<std::optional<AugmentedSample>> generated(stop - start);
    parallel_for(start, stop, cfg.jobs, [&](std::size_t i) {
      SampleRecord& r = records[i];
      r.sample_id = batch.ids[i];
      try {
        const StereoSample sample = load_sample(cfg.root, r.sample_id);
        const auto obs = extract_observations(sample.disparity, sample.road_mask, cfg.fit);
        const FitResult fit = global ? *global : fit_model(obs, cfg.fit);
        r.details["fit"] = fit_to_json(fit, obs.size(), rig);
        generated[i - start] = augment_sample(sample, fit, interp);
        r.ok = true;
      } catch (const Error& e) {
        mark_failed(r, e);
      }
    });
    for (std::size_t i = start; i < stop; ++i) {
      SampleRecord& r = records[i];
      if (r.ok) {
        const AugmentedSample& aug = *generated[i - start];
        try {
          const SavedPaths paths = save_augmented(cfg.out, aug, cfg.overwrite);
          r.details["branches"] = {{"reference_copied", aug.counts.reference_copied},
                                   {"target_sampled", aug.counts.target_sampled}};
          r.details["outputs"] = {
              {"image", paths.image.lexically_relative(cfg.out).generic_string()},
              {"label", paths.label.lexically_relative(cfg.out).generic_string()}};
        } catch (const Error& e) {
          mark_failed(r, e);
        }
      }
      if (!r.ok && cfg.strict) summary.aborted = true;
    }
  }
  for (auto& r : records) {
    if (!r.sample_id.empty()) summary.records.push_back(std::move(r));
  }
  summary.records.insert(summary.records.end(), batch.skipped.begin(), batch.skipped.end());
  std::sort(summary.records.begin(), summary.records.end(),
            [](const SampleRecord& a, const SampleRecord& b) { return a.sample_id < b.sample_id; });
  return summary;
}

json augment_report(const RunConfig& cfg, const std::optional<StereoRig>& rig,
                    const AugmentSummary& summary) {
  json report = {{"schema_version", kReportSchemaVersion},
                 {"command", "augment"},
                 {"settings", settings_json(cfg)},
                 {"samples", json::array()}};
  if (rig) report["calibration"] = rig_to_json(*rig);
  std::size_t ok = 0;
  for (const auto& r : summary.records) {
    report["samples"].push_back(record_to_json(r));
    ok += r.ok ? 1 : 0;
  }
  report["summary"] = {{"total", summary.records.size()},
                       {"generated", ok},
                       {"skipped", summary.records.size() - ok},
                       {"aborted", summary.aborted}};
  return report;
}

int run_augment(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_directory(cfg.root, "--root");
  if (cfg.out.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  const auto rig = optional_calibration(cfg.calib);
  const AugmentSummary summary = augment_directory(cfg, rig);
  const fs::path report_path = fs::path(cfg.out) / "augment_report.json";
  save_json(report_path, augment_report(cfg, rig, summary));
  const auto ok = std::count_if(summary.records.begin(), summary.records.end(),
                                [](const SampleRecord& r) { return r.ok; });
  out << "generated " << ok << "/" << summary.records.size() << " samples; report: "
      << report_path.generic_string() << "\n";
  return finish_batch(summary.records, summary.aborted, err);
}

// ---------------------------------------------------------------------------
// render

void write_rendered(const fs::path& out_dir, const SyntheticScene& scene, bool overwrite) {
  const StereoSample sample = render_planar_scene(scene);
  save_sample(out_dir, sample, overwrite);
  save_calibration(out_dir / "calib.json", scene.rig);
  save_json(out_dir / "scene.json", scene_to_json(scene));
}

int run_render(const RunConfig& cfg, std::ostream& out, bool seed_given) {
  if (cfg.scene.empty()) throw Error(ErrorCode::kConfig, "--scene is required");
  if (cfg.out.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  SyntheticScene scene = load_scene_spec(cfg.scene);
  if (seed_given) scene.texture.seed = cfg.seed;
  write_rendered(cfg.out, scene, cfg.overwrite);
  out << "rendered sample " << scene.sample_id << " into " << cfg.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

std::vector<std::string> png_names(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".png") {
      names.push_back(item.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

int run_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_directory(cfg.pred, "--pred");
  require_directory(cfg.gt, "--gt");
  if (!cfg.roi.empty()) require_directory(cfg.roi, "--roi");
  const auto names = png_names(cfg.gt);
  if (names.empty()) throw Error(ErrorCode::kInsufficientData, "no ground-truth masks in " + cfg.gt);

  ConfusionCounts total;
  std::vector<SampleRecord> records;
  for (const auto& name : names) {
    SampleRecord r;
    r.sample_id = fs::path(name).stem().string();
    try {
      const BinaryMask gt = load_mask(fs::path(cfg.gt) / name);
      const BinaryMask pred = load_mask(fs::path(cfg.pred) / name);
      std::optional<BinaryMask> roi;
      if (!cfg.roi.empty()) roi = load_mask(fs::path(cfg.roi) / name);
      const ConfusionCounts counts = confusion(pred, gt, roi);
      total += counts;
      r.details["metrics"] = metrics_to_json(counts, segmentation_metrics(counts));
      r.ok = true;
    } catch (const Error& e) {
      mark_failed(r, e);
      if (cfg.strict) {
        records.push_back(std::move(r));
        return finish_batch(records, true, err);
      }
    }
    records.push_back(std::move(r));
  }
  if (total.total() == 0) throw Error(ErrorCode::kInsufficientData, "no mask pair could be evaluated");

  const SegmentationMetrics overall = segmentation_metrics(total);
  json report = {{"schema_version", kReportSchemaVersion},
                 {"command", "evaluate"},
                 {"overall", metrics_to_json(total, overall)},
                 {"samples", json::array()}};
  for (const auto& r : records) report["samples"].push_back(record_to_json(r));
  const std::string table = format_metrics_table("overall", overall);
  if (!cfg.out.empty()) {
    save_json(fs::path(cfg.out) / "metrics.json", report);
    write_file_atomic(fs::path(cfg.out) / "metrics.txt", table);
  }
  out << table;
  return finish_batch(records, false, err);
}

// ---------------------------------------------------------------------------
// demo

SyntheticScene demo_scene(const RunConfig& cfg) {
  // KITTI-like calibration at 1242x375; the road is rolled by 0.02 rad and
  // pitched slightly toward the camera.
  // Intrinsics scale with the requested raster size.
  const double sx = cfg.width / 1242.0;
  const double sy = cfg.height / 375.0;
  const StereoRig rig(CameraIntrinsics(721.5377 * sx, 609.5593 * sx, 172.854 * sy), 0.5372);
  const double roll = 0.02;
  const double pitch = 0.01;
  const Eigen::Vector3d normal(-std::sin(roll), std::cos(roll) * std::cos(pitch),
                               std::cos(roll) * std::sin(pitch));
  SyntheticScene scene{rig, PlaneParams(normal, 1.65), TextureSpec{TextureKind::kSinusoid, 1.0, cfg.seed}};
  scene.width = cfg.width;
  scene.height = cfg.height;
  scene.max_depth = 30.0;
  scene.sample_id = "demo_000000";
  return scene;
}

double relative_error(double value, double truth) {
  return std::abs(value - truth) / std::abs(truth);
}

int run_demo(const RunConfig& base, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  const fs::path out_dir = base.out.empty() ? fs::path("dsgen_demo") : fs::path(base.out);
  const fs::path data_dir = out_dir / "data";
  const fs::path aug_dir = out_dir / "augmented";

  const SyntheticScene scene = demo_scene(base);
  write_rendered(data_dir, scene, true);
  err << "demo: rendered " << scene.width << "x" << scene.height << " scene into "
      << data_dir.generic_string() << "\n";

  RunConfig cfg = base;
  cfg.root = data_dir.string();
  cfg.out = aug_dir.string();
  cfg.overwrite = true;
  const AugmentSummary summary = augment_directory(cfg, scene.rig);
  save_json(aug_dir / "augment_report.json", augment_report(cfg, scene.rig, summary));
  if (summary.records.size() != 1 || !summary.records.front().ok) {
    throw Error(ErrorCode::kUnfittable, "demo augmentation failed: " +
                                            (summary.records.empty() ? std::string("no sample")
                                                                     : summary.records.front().reason));
  }

  // Self-check against the rendered ground truth, reading everything back
  // from disk.
  const StereoSample sample = load_sample(data_dir, scene.sample_id);
  const json& fit_json = summary.records.front().details.at("fit");
  const RoadProjectionModel fitted(fit_json.at("phi_rad").get<double>(),
                                   fit_json.at("varkappa").get<double>(),
                                   fit_json.at("kappa").get<double>());
  const RoadProjectionModel truth = plane_to_model(scene.rig, scene.plane);
  const Image generated =
      load_image(aug_dir / kRefDir / (scene.sample_id + std::string(kGeneratedSuffix) + ".png"));
  const GeneratedView view = generate_view_detailed(sample.ref_image, sample.tgt_image, fitted,
                                                    parse_interp(cfg.interp));

  double abs_sum = 0.0;
  std::size_t values = 0;
  for (int v = 0; v < sample.road_mask.height(); ++v) {
    for (int u = 0; u < sample.road_mask.width(); ++u) {
      if (!sample.road_mask.at(u, v)) continue;
      for (int c = 0; c < generated.channels(); ++c) {
        abs_sum += std::abs(int(generated.at(u, v, c)) - int(sample.ref_image.at(u, v, c)));
        ++values;
      }
    }
  }
  const double photometric = abs_sum / (255.0 * static_cast<double>(values));
  const std::size_t pixels = static_cast<std::size_t>(generated.width()) * generated.height();
  const bool partition_ok =
      view.counts.reference_copied + view.counts.target_sampled == pixels &&
      view.target_branch.count() == view.counts.target_sampled && view.image == generated;

  // Geometry-only road detection from the fitted model, scored against the
  // rendered road mask.
  BinaryMask detected(sample.road_mask.width(), sample.road_mask.height());
  for (int v = 0; v < detected.height(); ++v) {
    for (int u = 0; u < detected.width(); ++u) {
      if (!sample.disparity.valid(u, v)) continue;
      const double residual = sample.disparity.at(u, v) - model_disparity(fitted, {double(u), double(v)});
      detected.set(u, v, std::abs(residual) <= kDemoRoadBand);
    }
  }
  const ConfusionCounts counts = confusion(detected, sample.road_mask);
  const SegmentationMetrics metrics = segmentation_metrics(counts);

  const double roll_error = std::abs(fitted.roll() - truth.roll());
  const double gain_error = relative_error(fitted.gain(), truth.gain());
  const double offset_error = relative_error(fitted.offset(), truth.offset());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  struct Check {
    const char* name;
    double value;
    double limit;
  };
  const Check checks[] = {
      {"roll error [rad]", roll_error, kDemoRollTolerance},
      {"gain relative error", gain_error, kDemoRelativeTolerance},
      {"offset relative error", offset_error, kDemoRelativeTolerance},
      {"road photometric MAE", photometric, kDemoPhotometricTolerance},
  };
  bool all_ok = partition_ok;
  char line[160];
  for (const auto& c : checks) {
    const bool ok = c.value <= c.limit;
    all_ok = all_ok && ok;
    std::snprintf(line, sizeof(line), "%-24s %12.4e  (limit %.4e)  %s\n", c.name, c.value, c.limit,
                  ok ? "ok" : "FAIL");
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-24s %12s  %s\n", "branch partition",
                partition_ok ? "exact" : "broken", partition_ok ? "ok" : "FAIL");
  out << line;
  out << format_metrics_table("model road detection", metrics);

  json report = {{"schema_version", kReportSchemaVersion},
                 {"command", "demo"},
                 {"seed", base.seed},
                 {"truth", model_to_json(truth)},
                 {"fitted", fit_json},
                 {"roll_error_rad", roll_error},
                 {"gain_relative_error", gain_error},
                 {"offset_relative_error", offset_error},
                 {"photometric_mae", photometric},
                 {"branches", {{"reference_copied", view.counts.reference_copied},
                               {"target_sampled", view.counts.target_sampled},
                               {"pixels", pixels},
                               {"partition_exact", partition_ok}}},
                 {"road_detection", metrics_to_json(counts, metrics)},
                 {"passed", all_ok}};
  save_json(out_dir / "demo_report.json", report);
  err << "demo: finished in " << seconds << " s\n";
  return all_ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

void add_fit_options(CLI::App* app, RunConfig& cfg) {
  app->add_option("--phi-min", cfg.fit.phi_min, "Lower end of the roll search interval [rad]");
  app->add_option("--phi-max", cfg.fit.phi_max, "Upper end of the roll search interval [rad]");
  app->add_option("--grid-step", cfg.fit.grid_step, "Coarse roll grid step [rad]")
      ->check(CLI::PositiveNumber);
  app->add_option("--refine-tol", cfg.fit.refine_tolerance, "Golden-section bracket width [rad]")
      ->check(CLI::PositiveNumber);
  app->add_flag("--trim,!--no-trim", cfg.fit.trim, "Refit once after dropping k*MAD outliers");
  app->add_option("--trim-k", cfg.fit.trim_k, "Outlier threshold in MADs")->check(CLI::PositiveNumber);
  app->add_option("--max-samples", cfg.fit.max_samples, "Observation cap per fit (0 = no cap)");
  app->add_flag("--global-model", cfg.global_model, "Fit one model over all samples");
}

void add_batch_options(CLI::App* app, RunConfig& cfg) {
  app->add_option("--root", cfg.root, "Dataset root (image_2/, image_3/, disp/, gt_mask/)");
  app->add_option("--calib", cfg.calib, "Calibration JSON (f, o_u, o_v, baseline_Tc)");
  app->add_flag("--strict", cfg.strict, "Abort the batch on the first failing sample");
  app->add_option("--jobs", cfg.jobs, "Parallel workers")->check(CLI::PositiveNumber);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Road-plane homography data augmentation for stereo driving scenes", "dsgen"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;

  auto* fit = app.add_subcommand("fit", "Fit a road model per sample and write fit_report.json");
  auto* augment = app.add_subcommand("augment", "Fit, generate and save reference-view images");
  auto* render = app.add_subcommand("render", "Render a synthetic planar stereo sample");
  auto* evaluate = app.add_subcommand("evaluate", "Segmentation metrics over mask directories");
  auto* demo = app.add_subcommand("demo", "Render, fit, augment and evaluate a synthetic scene");

  for (auto* sub : {fit, augment, render, evaluate, demo}) {
    sub->add_option("--config", config_path, "JSON file of option values (command line wins)");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_flag("--overwrite", cfg.overwrite, "Replace existing outputs");
  }
  for (auto* sub : {fit, augment, demo}) {
    add_fit_options(sub, cfg);
    sub->add_option("--seed", cfg.seed, "Seed for subsampling and textures");
  }
  for (auto* sub : {fit, augment}) add_batch_options(sub, cfg);
  for (auto* sub : {augment, demo}) {
    sub->add_option("--interp", cfg.interp, "Target sampling: bilinear or nearest")
        ->check(CLI::IsMember({"bilinear", "nearest"}));
  }
  render->add_option("--scene", cfg.scene, "Scene spec JSON");
  CLI::Option* seed_opt = render->add_option("--seed", cfg.seed, "Override the texture seed of the scene");
  evaluate->add_option("--pred", cfg.pred, "Directory of predicted masks");
  evaluate->add_option("--gt", cfg.gt, "Directory of ground-truth masks (same file names)");
  evaluate->add_option("--roi", cfg.roi, "Optional directory of evaluation-region masks");
  evaluate->add_flag("--strict", cfg.strict, "Abort on the first unreadable pair");
  demo->add_option("--width", cfg.width, "Rendered width")->check(CLI::PositiveNumber);
  demo->add_option("--height", cfg.height, "Rendered height")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << json{{"status", "error"}, {"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return kUsage;
  }
  try {
    if (!config_path.empty()) {
      for (auto* sub : {fit, augment, render, evaluate, demo}) {
        if (sub->parsed()) apply_config_file(sub, config_path);
      }
    }
    cfg.fit.seed = cfg.seed;
    if (fit->parsed()) return run_fit(cfg, out, err);
    if (augment->parsed()) return run_augment(cfg, out, err);
    if (render->parsed()) return run_render(cfg, out, seed_opt->count() > 0);
    if (evaluate->parsed()) return run_evaluate(cfg, out, err);
    if (demo->parsed()) return run_demo(cfg, out, err);
  } catch (const Error& e) {
    err << json{{"status", "error"}, {"error", to_string(e.code())}, {"message", e.what()}}.dump()
        << "\n";
    return e.code() == ErrorCode::kConfig ? kUsage : kFailure;
  } catch (const std::exception& e) {
    err << json{{"status", "error"}, {"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace dsgen::cli
