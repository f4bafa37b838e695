#pragma once

// End-to-end runs: single-image segmentation with artifacts on disk, batch
// benchmarks over an image/ground-truth directory, and the synthetic
// experiments (seed placement, multi-intensity, noise).

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levelseg/config.hpp"
#include "levelseg/image_io.hpp"
#include "levelseg/levelset.hpp"
#include "levelseg/metrics.hpp"
#include "levelseg/models.hpp"
#include "levelseg/saliency.hpp"
#include "levelseg/synthetic.hpp"

namespace levelseg {

namespace fs = std::filesystem;

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct RunConfig {
  fs::path input;
  ModelId model = ModelId::proposed;
  std::optional<RegionSpec> seed;  // default: centered rectangle, half the image
  ModelParams params;
  fs::path output_dir = ".";
  std::optional<fs::path> ground_truth;
  std::optional<NoiseSpec> noise;
  bool color = true;  // use Lab for proposed/sdrel when the input has color
};

inline RegionSpec default_seed(int width, int height) {
  return RectRegion{width / 4, height / 4, std::max(1, width / 2), std::max(1, height / 2)};
}

// What a model actually evolves on: Lab for the saliency-driven models on
// color input, grayscale for everything else.
struct PreparedInput {
  Raster field;
  std::optional<SaliencyMap> saliency;
};

inline SaliencyPreset saliency_preset_for(ModelId model) {
  return model == ModelId::sdrel ? kSdrelSaliency : kLocalFittingSaliency;
}

inline PreparedInput prepare_input(const Raster& img, ModelId model, bool color) {
  PreparedInput in;
  const bool use_lab = color && img.channels() == 3 && needs_saliency(model);
  if (use_lab) {
    in.field = srgb_to_lab(img);
    in.saliency = saliency_color(in.field, saliency_preset_for(model));
  } else {
    in.field = to_grayscale(img);
    if (needs_saliency(model)) in.saliency = saliency_gray(in.field, saliency_preset_for(model));
  }
  return in;
}

inline EvolutionTrace run_model(ModelId model, const Raster& img, const RegionSpec& seed,
                                const ModelParams& params, bool color = true) {
  const PreparedInput in = prepare_input(img, model, color);
  LevelSetField phi = init_level_set(img.width(), img.height(), seed, params.p);
  return evolve(model, in.field, in.saliency ? &*in.saliency : nullptr, std::move(phi), params);
}

// Pixels where phi changes sign against a 4-neighbor.
inline BinaryMask zero_level_set(const LevelSetField& phi) {
  BinaryMask z(phi.width(), phi.height());
  for (int y = 0; y < phi.height(); ++y)
    for (int x = 0; x < phi.width(); ++x) {
      const bool in = phi.at(x, y) > 0.0;
      const bool edge = (x > 0 && (phi.at(x - 1, y) > 0.0) != in) ||
                        (x + 1 < phi.width() && (phi.at(x + 1, y) > 0.0) != in) ||
                        (y > 0 && (phi.at(x, y - 1) > 0.0) != in) ||
                        (y + 1 < phi.height() && (phi.at(x, y + 1) > 0.0) != in);
      z.set(x, y, edge);
    }
  return z;
}

// The input as RGB with the zero level set painted red.
inline Raster render_overlay(const Raster& img, const LevelSetField& phi) {
  if (!img.same_grid(phi.values())) throw InvalidParameter("overlay: image and level set differ in size");
  Raster out(img.width(), img.height(), 3);
  for (int c = 0; c < 3; ++c) {
    const auto src = img.plane(img.channels() == 3 ? c : 0);
    std::copy(src.begin(), src.end(), out.plane(c).begin());
  }
  const BinaryMask z = zero_level_set(phi);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (z.at(x, y)) {
        out.at(x, y, 0) = 255.0;
        out.at(x, y, 1) = 0.0;
        out.at(x, y, 2) = 0.0;
      }
  return out;
}

inline std::string format_double(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::string trace_csv(const EvolutionTrace& t) {
  std::ostringstream os;
  os << "iteration,changed_pixels,max_abs_force\n";
  for (std::size_t i = 0; i < t.changed_pixels.size(); ++i)
    os << i + 1 << ',' << t.changed_pixels[i] << ',' << format_double(t.max_abs_force[i]) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// segment

struct SegmentResult {
  EvolutionTrace trace;
  std::optional<ScoreReport> score;
  std::vector<fs::path> written;
};

inline SegmentResult run_segment(const RunConfig& cfg) {
  cfg.params.validate();
  Raster img = read_image(cfg.input);
  if (cfg.noise && cfg.noise->sigma > 0.0) {
    Raster noisy(img.width(), img.height(), img.channels());
    for (int c = 0; c < img.channels(); ++c) {
      const Raster ch = add_gaussian_noise(img.channel(c), cfg.noise->sigma, cfg.noise->seed + c);
      std::copy(ch.plane().begin(), ch.plane().end(), noisy.plane(c).begin());
    }
    img = std::move(noisy);
  }
  std::optional<BinaryMask> truth;
  if (cfg.ground_truth) {
    truth = read_mask(*cfg.ground_truth);
    if (truth->width() != img.width() || truth->height() != img.height())
      throw InvalidParameter("ground truth is " + std::to_string(truth->width()) + "x" +
                             std::to_string(truth->height()) + " but the image is " +
                             std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }

  const PreparedInput in = prepare_input(img, cfg.model, cfg.color);
  const RegionSpec seed = cfg.seed ? *cfg.seed : default_seed(img.width(), img.height());
  LevelSetField phi = init_level_set(img.width(), img.height(), seed, cfg.params.p);

  SegmentResult res;
  res.trace = evolve(cfg.model, in.field, in.saliency ? &*in.saliency : nullptr, std::move(phi), cfg.params);

  fs::create_directories(cfg.output_dir);
  const std::string stem = cfg.input.stem().string() + "_" + std::string(model_name(cfg.model));
  auto out = [&](const std::string& suffix) {
    res.written.push_back(cfg.output_dir / (stem + suffix));
    return res.written.back();
  };
  write_mask(out("_mask.png"), res.trace.mask);
  write_image(out("_overlay.png"), render_overlay(img, res.trace.phi));
  if (in.saliency) write_image(out("_saliency.pgm"), in.saliency->values());
  write_text_atomic(out("_trace.csv"), trace_csv(res.trace));
  const auto raw = encode_phi_raw(res.trace.phi);
  write_bytes_atomic(out("_phi.raw"), raw.data(), raw.size());

  if (truth) {
    ScoreReport s = score(res.trace.mask, *truth);
    s.image_id = cfg.input.stem().string();
    s.model = std::string(model_name(cfg.model));
    std::ostringstream os;
    os << "image_id,model,dice,jaccard,bfscore,iterations,converged\n"
       << s.image_id << ',' << s.model << ',' << format_double(s.dice) << ',' << format_double(s.jaccard) << ','
       << format_double(s.bfscore) << ',' << res.trace.iterations_run << ',' << (res.trace.converged ? 1 : 0)
       << '\n';
    write_text_atomic(out("_score.csv"), os.str());
    res.score = s;
  }
  return res;
}

// ---------------------------------------------------------------------------
// bench

struct BenchRow {
  std::string image_id;
  std::string model;
  double dice = 0, jaccard = 0, bfscore = 0;
  double iterations = 0;
  double wall_ms = 0;
};

struct BenchConfig {
  fs::path dataset_dir;
  std::vector<ModelId> models{std::begin(kAllModels), std::end(kAllModels)};
  std::optional<RegionSpec> seed;
  ModelParams params;
  bool color = true;
};

struct BenchReport {
  std::vector<BenchRow> rows;   // per image and model
  std::vector<BenchRow> means;  // one per model, image_id "mean"
  std::vector<std::string> skipped;
};

inline bool is_image_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".png" || ext == ".pgm";
}

// Ground truth for <stem>.png is <stem>_gt.{png,pgm} beside it or
// gt/<stem>.{png,pgm}.
inline std::optional<fs::path> find_ground_truth(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".png", ".pgm"}) {
    if (fs::exists(dir / (stem + "_gt" + ext))) return dir / (stem + "_gt" + ext);
    if (fs::exists(dir / "gt" / (stem + ext))) return dir / "gt" / (stem + ext);
  }
  return std::nullopt;
}

inline BenchReport run_benchmark(const BenchConfig& cfg, std::ostream& log = std::cerr) {
  cfg.params.validate();
  if (!fs::is_directory(cfg.dataset_dir)) throw IoError("not a directory: " + cfg.dataset_dir.string());
  if (cfg.models.empty()) throw InvalidParameter("no models requested");
  std::vector<fs::path> images;
  for (const auto& e : fs::directory_iterator(cfg.dataset_dir)) {
    if (!e.is_regular_file() || !is_image_file(e.path())) continue;
    const std::string stem = e.path().stem().string();
    if (stem.size() > 3 && stem.ends_with("_gt")) continue;
    images.push_back(e.path());
  }
  std::sort(images.begin(), images.end());
  if (images.empty()) throw InvalidParameter("no images found in " + cfg.dataset_dir.string());

  BenchReport rep;
  for (const fs::path& path : images) {
    const std::string stem = path.stem().string();
    const auto gt_path = find_ground_truth(cfg.dataset_dir, stem);
    if (!gt_path) {
      log << "warning: no ground truth for " << path.filename().string() << ", skipped\n";
      rep.skipped.push_back(stem);
      continue;
    }
    const Raster img = read_image(path);
    const BinaryMask truth = read_mask(*gt_path);
    if (truth.width() != img.width() || truth.height() != img.height()) {
      log << "warning: ground truth size mismatch for " << path.filename().string() << ", skipped\n";
      rep.skipped.push_back(stem);
      continue;
    }
    const RegionSpec seed = cfg.seed ? *cfg.seed : default_seed(img.width(), img.height());
    for (ModelId m : cfg.models) {
      const EvolutionTrace t = run_model(m, img, seed, cfg.params, cfg.color);
      const ScoreReport s = score(t.mask, truth);
      rep.rows.push_back({stem, std::string(model_name(m)), s.dice, s.jaccard, s.bfscore,
                          double(t.iterations_run), t.wall_ms});
    }
  }
  for (ModelId m : cfg.models) {
    BenchRow mean{"mean", std::string(model_name(m))};
    int n = 0;
    for (const BenchRow& r : rep.rows)
      if (r.model == mean.model) {
        mean.dice += r.dice;
        mean.jaccard += r.jaccard;
        mean.bfscore += r.bfscore;
        mean.iterations += r.iterations;
        mean.wall_ms += r.wall_ms;
        ++n;
      }
    if (n == 0) continue;
    mean.dice /= n;
    mean.jaccard /= n;
    mean.bfscore /= n;
    mean.iterations /= n;
    mean.wall_ms /= n;
    rep.means.push_back(mean);
  }
  return rep;
}

inline std::string bench_csv(const BenchReport& rep) {
  std::ostringstream os;
  os << "image_id,model,dice,jaccard,bfscore,iterations,wall_ms\n";
  auto row = [&](const BenchRow& r) {
    os << r.image_id << ',' << r.model << ',' << format_double(r.dice) << ',' << format_double(r.jaccard) << ','
       << format_double(r.bfscore) << ',' << format_double(r.iterations, 1) << ',' << format_double(r.wall_ms, 3)
       << '\n';
  };
  for (const BenchRow& r : rep.rows) row(r);
  for (const BenchRow& r : rep.means) row(r);
  return os.str();
}

// ---------------------------------------------------------------------------
// Preset synthetic scenes

// Bright disk on a dark background.
inline SceneSpec disk_scene() {
  SceneSpec s;
  s.width = s.height = 64;
  s.background = 50;
  s.shapes.push_back({ShapeKind::disk, {31.5, 31.5, 20}, 200});
  return s;
}

inline RegionSpec disk_scene_seed() { return RectRegion{16, 16, 32, 32}; }

// Six blobs of different intensities on black; no single threshold
// separates all of them from the background and from each other.
inline SceneSpec six_intensity_scene() {
  SceneSpec s;
  s.width = s.height = 64;
  s.background = 0;
  const double radius[6] = {10, 9, 7, 7, 7, 7};
  for (int i = 0; i < 6; ++i)
    s.shapes.push_back({ShapeKind::disk, {11.5 + 20.0 * (i % 3), 19.5 + 24.0 * (i / 3), radius[i]}, 40.0 + 40.0 * i});
  return s;
}

inline RegionSpec six_intensity_seed() { return RectRegion{4, 12, 56, 40}; }

// Five-point star under a linear bias field.
inline SceneSpec star_scene() {
  SceneSpec s;
  s.width = s.height = 80;
  s.background = 60;
  s.shapes.push_back({ShapeKind::star, {39.5, 39.5, 30, 14, 5, 0}, 180});
  s.bias = {BiasKind::linear, 0.3, 0.0};
  return s;
}

inline std::vector<RegionSpec> star_scene_seeds() {
  return {DiskRegion{39.5, 39.5, 20}, DiskRegion{36, 42, 18}, DiskRegion{41, 38, 24}, RectRegion{20, 20, 40, 40},
          RectRegion{14, 22, 50, 36}};
}

// A rectangle and a disk; the clean reference for the noise experiment.
inline SceneSpec shapes_scene() {
  SceneSpec s;
  s.width = s.height = 64;
  s.background = 30;
  s.shapes.push_back({ShapeKind::rectangle, {8, 10, 20, 40}, 220});
  s.shapes.push_back({ShapeKind::disk, {44, 32, 12}, 220});
  return s;
}

inline RegionSpec shapes_scene_seed() { return RectRegion{6, 6, 52, 52}; }

inline constexpr double kReproNoiseSigma = 15.0;
inline constexpr std::uint64_t kReproNoiseSeed = 2024;

inline std::optional<SceneSpec> preset_scene(const std::string& name) {
  if (name == "disk") return disk_scene();
  if (name == "six-intensity") return six_intensity_scene();
  if (name == "star") return star_scene();
  if (name == "shapes") return shapes_scene();
  return std::nullopt;
}

inline const std::vector<std::string>& preset_scene_names() {
  static const std::vector<std::string> names{"disk", "six-intensity", "star", "shapes"};
  return names;
}

// ---------------------------------------------------------------------------
// repro

struct ReproRun {
  std::string variant;  // seed index, "clean"/"noisy", ...
  ModelId model = ModelId::proposed;
  ScoreReport score;
  int iterations = 0;
  LevelSetField phi;
  Raster image;
};

struct ReproCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReproReport {
  std::string experiment;
  std::vector<ReproRun> runs;
  std::vector<ReproCheck> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ReproCheck& c) { return c.pass; });
  }
  double dice(const std::string& variant, ModelId m) const {
    for (const ReproRun& r : runs)
      if (r.variant == variant && r.model == m) return r.score.dice;
    throw InvalidParameter("no run for " + variant + "/" + std::string(model_name(m)));
  }
};

inline const std::vector<std::string>& repro_experiment_ids() {
  static const std::vector<std::string> ids{"init-independence", "multi-intensity", "noise"};
  return ids;
}

namespace detail {

inline ReproRun repro_run(const std::string& variant, ModelId m, const Raster& img, const BinaryMask& truth,
                          const RegionSpec& seed, const ModelParams& params) {
  EvolutionTrace t = run_model(m, img, seed, params);
  ReproRun r{variant, m, score(t.mask, truth), t.iterations_run, std::move(t.phi), img};
  r.score.image_id = variant;
  r.score.model = std::string(model_name(m));
  return r;
}

inline std::string fmt(double v) { return format_double(v, 4); }

}  // namespace detail

// Five seed placements on the star scene. Passes when the proposed model's
// Dice spread is <= 0.02 and every run reaches 0.95.
inline ReproReport repro_init_independence(const ModelParams& params = {},
                                           const std::vector<ModelId>& models = {std::begin(kAllModels),
                                                                                 std::end(kAllModels)}) {
  ReproReport rep{"init-independence"};
  const SyntheticScene scene = make_synthetic(star_scene());
  const auto seeds = star_scene_seeds();
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (ModelId m : models)
      rep.runs.push_back(detail::repro_run("seed" + std::to_string(i + 1), m, scene.image, scene.truth, seeds[i], params));
  double lo = 1.0, hi = 0.0;
  for (const ReproRun& r : rep.runs)
    if (r.model == ModelId::proposed) {
      lo = std::min(lo, r.score.dice);
      hi = std::max(hi, r.score.dice);
    }
  if (hi >= lo) {
    rep.checks.push_back({"proposed dice spread <= 0.02", hi - lo <= 0.02, "spread " + detail::fmt(hi - lo)});
    rep.checks.push_back({"proposed dice >= 0.95 for every seed", lo >= 0.95, "min " + detail::fmt(lo)});
  }
  return rep;
}

// Six-intensity scene, all models. Passes when proposed, lif and lbf reach
// 0.95, cv and sdrel score strictly below all three, and proposed beats cv by
// at least 0.10.
inline ReproReport repro_multi_intensity(const ModelParams& params = {}) {
  ReproReport rep{"multi-intensity"};
  const SyntheticScene scene = make_synthetic(six_intensity_scene());
  for (ModelId m : kAllModels)
    rep.runs.push_back(detail::repro_run("six", m, scene.image, scene.truth, six_intensity_seed(), params));
  const double prop = rep.dice("six", ModelId::proposed), lif = rep.dice("six", ModelId::lif),
               lbf = rep.dice("six", ModelId::lbf), cv = rep.dice("six", ModelId::cv),
               sdrel = rep.dice("six", ModelId::sdrel);
  const double local_min = std::min({prop, lif, lbf});
  rep.checks.push_back({"proposed, lif, lbf dice >= 0.95", local_min >= 0.95,
                        "proposed " + detail::fmt(prop) + ", lif " + detail::fmt(lif) + ", lbf " + detail::fmt(lbf)});
  rep.checks.push_back({"cv and sdrel strictly lower", std::max(cv, sdrel) < local_min,
                        "cv " + detail::fmt(cv) + ", sdrel " + detail::fmt(sdrel)});
  rep.checks.push_back({"proposed - cv >= 0.10", prop - cv >= 0.10, "gap " + detail::fmt(prop - cv)});
  return rep;
}

// Shapes scene clean and with sigma 15 Gaussian noise. Passes when the
// proposed model's Dice changes by at most 0.05.
inline ReproReport repro_noise(const ModelParams& params = {},
                               const std::vector<ModelId>& models = {std::begin(kAllModels), std::end(kAllModels)}) {
  ReproReport rep{"noise"};
  const SyntheticScene scene = make_synthetic(shapes_scene());
  const Raster noisy = add_gaussian_noise(scene.image, kReproNoiseSigma, kReproNoiseSeed);
  for (ModelId m : models) {
    rep.runs.push_back(detail::repro_run("clean", m, scene.image, scene.truth, shapes_scene_seed(), params));
    rep.runs.push_back(detail::repro_run("noisy", m, noisy, scene.truth, shapes_scene_seed(), params));
  }
  const double clean = rep.dice("clean", ModelId::proposed), dirty = rep.dice("noisy", ModelId::proposed);
  rep.checks.push_back({"proposed |dice clean - dice noisy| <= 0.05", std::abs(clean - dirty) <= 0.05,
                        "clean " + detail::fmt(clean) + ", noisy " + detail::fmt(dirty)});
  return rep;
}

inline ReproReport run_repro_experiment(const std::string& id, const ModelParams& params = {}) {
  if (id == "init-independence") return repro_init_independence(params);
  if (id == "multi-intensity") return repro_multi_intensity(params);
  if (id == "noise") return repro_noise(params);
  std::string valid;
  for (const auto& e : repro_experiment_ids()) valid += (valid.empty() ? "" : ", ") + e;
  throw InvalidParameter("unknown experiment '" + id + "' (valid: " + valid + ")");
}

inline std::string repro_csv(const ReproReport& rep) {
  std::ostringstream os;
  os << "experiment,variant,model,dice,jaccard,bfscore,iterations\n";
  for (const ReproRun& r : rep.runs)
    os << rep.experiment << ',' << r.variant << ',' << model_name(r.model) << ',' << format_double(r.score.dice) << ','
       << format_double(r.score.jaccard) << ',' << format_double(r.score.bfscore) << ',' << r.iterations << '\n';
  return os.str();
}

inline std::string repro_summary(const ReproReport& rep) {
  std::ostringstream os;
  for (const ReproCheck& c : rep.checks)
    os << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
  os << rep.experiment << ": " << (rep.pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

// Writes overlays, the CSV and the summary into `dir`.
inline std::vector<fs::path> write_repro(const ReproReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  for (const ReproRun& r : rep.runs) {
    written.push_back(dir / (rep.experiment + "_" + r.variant + "_" + std::string(model_name(r.model)) + "_overlay.png"));
    write_image(written.back(), render_overlay(r.image, r.phi));
  }
  written.push_back(dir / (rep.experiment + ".csv"));
  write_text_atomic(written.back(), repro_csv(rep));
  written.push_back(dir / (rep.experiment + "_summary.txt"));
  write_text_atomic(written.back(), repro_summary(rep));
  return written;
}

}  // namespace levelseg
