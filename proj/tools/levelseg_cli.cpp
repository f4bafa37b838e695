// levelseg: segment images with level-set contour models, benchmark them
// against ground truth, and regenerate the synthetic experiments.
//
// Exit codes: 0 success, 1 usage or input error, 2 numerical abort.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levelseg/levelseg.hpp"

namespace {

using namespace levelseg;

std::string valid_model_ids() {
  std::string s;
  for (ModelId m : kAllModels) s += (s.empty() ? "" : ", ") + std::string(model_name(m));
  return s;
}

ModelId parse_model_or_throw(const std::string& s) {
  const auto id = parse_model_id(s);
  if (!id) throw InvalidParameter("unknown model '" + s + "' (valid: " + valid_model_ids() + ")");
  return *id;
}

std::vector<double> parse_numbers(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidParameter(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (v.size() != n) throw InvalidParameter(std::string(what) + " needs " + std::to_string(n) + " comma-separated numbers");
  return v;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidParameter(path + ": " + e.what());
  }
}

// Parameter overrides shared by every verb that runs a model.
struct ParamFlags {
  std::optional<double> dt, eps, mu, nu, sigma_s, sigma_m, tol;
  std::optional<int> max_iters;
  std::string config;

  void attach(CLI::App* app) {
    app->add_option("--dt", dt, "time step");
    app->add_option("--eps", eps, "Heaviside/Dirac width");
    app->add_option("--mu", mu, "distance regularizer weight");
    app->add_option("--nu", nu, "length weight");
    app->add_option("--sigma-s", sigma_s, "saliency window scale");
    app->add_option("--sigma-m", sigma_m, "image window scale");
    app->add_option("--max-iters", max_iters, "iteration cap");
    app->add_option("--tol", tol, "stop when sign flips stay below tol * pixels");
    app->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  }

  // Config file first, then flags on top.
  ModelParams resolve(const Json& cfg) const {
    ModelParams p = cfg.contains("params") ? params_from_json(cfg.at("params")) : ModelParams{};
    if (dt) p.dt = *dt;
    if (eps) p.eps = *eps;
    if (mu) p.mu = *mu;
    if (nu) p.nu = *nu;
    if (sigma_s) p.sigma_s = *sigma_s;
    if (sigma_m) p.sigma_m = *sigma_m;
    if (max_iters) p.max_iters = *max_iters;
    if (tol) p.tol = *tol;
    p.validate();
    return p;
  }

  Json config_json() const {
    if (config.empty()) return Json::object();
    Json j = load_json(config);
    detail::reject_unknown_keys(j, {"model", "models", "seed", "params", "noise", "color"}, "config");
    return j;
  }
};

std::optional<RegionSpec> resolve_seed(const std::string& rect, const std::string& disk, const std::string& mask,
                                       const Json& cfg) {
  const int given = !rect.empty() + !disk.empty() + !mask.empty();
  if (given > 1) throw InvalidParameter("use only one of --rect, --disk, --init-mask");
  if (!rect.empty()) {
    const auto v = parse_numbers(rect, 4, "--rect");
    return RectRegion{int(v[0]), int(v[1]), int(v[2]), int(v[3])};
  }
  if (!disk.empty()) {
    const auto v = parse_numbers(disk, 3, "--disk");
    return DiskRegion{v[0], v[1], v[2]};
  }
  if (!mask.empty()) return read_mask(mask);
  if (cfg.contains("seed")) return region_from_json(cfg.at("seed"));
  return std::nullopt;
}

std::vector<ModelId> parse_model_list(const std::string& s) {
  std::vector<ModelId> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_model_or_throw(item));
  if (out.empty()) throw InvalidParameter("no models given");
  return out;
}

int report_error(const char* kind, const std::exception& e) {
  std::cerr << "levelseg: " << kind << e.what() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set image segmentation"};
  app.require_subcommand(1);

  // segment
  auto* seg = app.add_subcommand("segment", "segment one image");
  std::string seg_input, seg_model = "proposed", seg_out = ".", seg_gt, seg_rect, seg_disk, seg_mask;
  std::optional<double> seg_noise;
  std::optional<std::uint64_t> rng_seed;
  bool gray = false;
  ParamFlags seg_params;
  seg->add_option("input", seg_input, "PNG or PGM image")->required()->check(CLI::ExistingFile);
  seg->add_option("-m,--model", seg_model, "model id: " + valid_model_ids());
  seg->add_option("-o,--out", seg_out, "output directory");
  seg->add_option("--gt", seg_gt, "ground-truth mask; writes a score CSV")->check(CLI::ExistingFile);
  seg->add_option("--rect", seg_rect, "seed rectangle x0,y0,w,h");
  seg->add_option("--disk", seg_disk, "seed disk cx,cy,r");
  seg->add_option("--init-mask", seg_mask, "seed mask image")->check(CLI::ExistingFile);
  seg->add_option("--noise", seg_noise, "add Gaussian noise with this standard deviation first");
  seg->add_option("--seed", rng_seed, "noise RNG seed");
  seg->add_flag("--gray", gray, "run every model on the grayscale conversion");
  seg_params.attach(seg);

  // bench
  auto* bench = app.add_subcommand("bench", "score models over an image/ground-truth directory");
  std::string bench_dir, bench_models, bench_out, bench_rect, bench_disk;
  ParamFlags bench_params;
  bench->add_option("dir", bench_dir, "directory of <stem>.png with <stem>_gt.png or gt/<stem>.png")->required();
  bench->add_option("-m,--models", bench_models, "comma-separated model ids (default: all)");
  bench->add_option("-o,--out", bench_out, "CSV report path (default: stdout)");
  bench->add_option("--rect", bench_rect, "seed rectangle x0,y0,w,h");
  bench->add_option("--disk", bench_disk, "seed disk cx,cy,r");
  bench->add_flag("--gray", gray, "run every model on the grayscale conversion");
  bench_params.attach(bench);

  // repro
  auto* repro = app.add_subcommand("repro", "rerun a synthetic experiment");
  std::string repro_id, repro_out = "repro";
  ParamFlags repro_params;
  std::string repro_ids;
  for (const auto& id : repro_experiment_ids()) repro_ids += (repro_ids.empty() ? "" : ", ") + id;
  repro->add_option("experiment", repro_id, repro_ids)->required();
  repro->add_option("-o,--out", repro_out, "output directory");
  repro_params.attach(repro);

  // saliency
  auto* sal = app.add_subcommand("saliency", "write the saliency map of an image");
  std::string sal_input, sal_out, sal_preset = "lif";
  sal->add_option("input", sal_input, "PNG or PGM image")->required()->check(CLI::ExistingFile);
  sal->add_option("-o,--out", sal_out, "output PGM")->required();
  sal->add_option("--preset", sal_preset, "lif (sigma 0.5, 5x5) or sdrel (sigma 0.8, 3x3)")
      ->check(CLI::IsMember({"lif", "sdrel"}));
  sal->add_flag("--gray", gray, "ignore color");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene and its ground truth");
  std::string synth_preset, synth_scene, synth_out, synth_gt;
  std::optional<double> synth_noise;
  std::string presets;
  for (const auto& n : preset_scene_names()) presets += (presets.empty() ? "" : ", ") + n;
  synth->add_option("--preset", synth_preset, presets);
  synth->add_option("--scene", synth_scene, "scene JSON")->check(CLI::ExistingFile);
  synth->add_option("-o,--out", synth_out, "image path (.png or .pgm)")->required();
  synth->add_option("--gt", synth_gt, "ground-truth mask path");
  synth->add_option("--noise", synth_noise, "Gaussian noise standard deviation");
  synth->add_option("--seed", rng_seed, "noise RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*seg) {
      const Json cfg = seg_params.config_json();
      RunConfig rc;
      rc.input = seg_input;
      std::string model = seg_model;
      if (seg->count("--model") == 0 && cfg.contains("model")) model = cfg.at("model").get<std::string>();
      rc.model = parse_model_or_throw(model);
      rc.params = seg_params.resolve(cfg);
      rc.seed = resolve_seed(seg_rect, seg_disk, seg_mask, cfg);
      rc.output_dir = seg_out;
      if (!seg_gt.empty()) rc.ground_truth = seg_gt;
      NoiseSpec noise;
      if (cfg.contains("noise")) {
        const Json& n = cfg.at("noise");
        detail::reject_unknown_keys(n, {"sigma", "seed"}, "noise");
        detail::read_field(n, "sigma", noise.sigma);
        detail::read_field(n, "seed", noise.seed);
      }
      if (seg_noise) noise.sigma = *seg_noise;
      if (rng_seed) noise.seed = *rng_seed;
      if (noise.sigma < 0) throw InvalidParameter("noise sigma must be >= 0");
      if (noise.sigma > 0) rc.noise = noise;
      rc.color = !gray && cfg.value("color", true);

      const SegmentResult res = run_segment(rc);
      std::cout << model_name(rc.model) << ": " << res.trace.iterations_run << " iterations, "
                << (res.trace.converged ? "converged" : "stopped at max-iters") << '\n';
      if (res.score)
        std::cout << "dice " << format_double(res.score->dice, 4) << "  jaccard " << format_double(res.score->jaccard, 4)
                  << "  bfscore " << format_double(res.score->bfscore, 4) << '\n';
      for (const auto& p : res.written) std::cout << "wrote " << p.string() << '\n';
    } else if (*bench) {
      const Json cfg = bench_params.config_json();
      BenchConfig bc;
      bc.dataset_dir = bench_dir;
      if (!bench_models.empty())
        bc.models = parse_model_list(bench_models);
      else if (cfg.contains("models"))
        bc.models = parse_model_list(cfg.at("models").get<std::string>());
      bc.params = bench_params.resolve(cfg);
      bc.seed = resolve_seed(bench_rect, bench_disk, "", cfg);
      bc.color = !gray && cfg.value("color", true);
      const BenchReport rep = run_benchmark(bc);
      const std::string csv = bench_csv(rep);
      if (bench_out.empty())
        std::cout << csv;
      else
        write_text_atomic(bench_out, csv);
    } else if (*repro) {
      const Json cfg = repro_params.config_json();
      const ModelParams params = repro_params.resolve(cfg);
      const ReproReport rep = run_repro_experiment(repro_id, params);
      write_repro(rep, repro_out);
      std::cout << repro_summary(rep);
    } else if (*sal) {
      const Raster img = read_image(sal_input);
      const SaliencyPreset preset = sal_preset == "sdrel" ? kSdrelSaliency : kLocalFittingSaliency;
      const SaliencyMap s = (!gray && img.channels() == 3) ? saliency_color(srgb_to_lab(img), preset)
                                                           : saliency_gray(to_grayscale(img), preset);
      write_image(sal_out, s.values());
    } else if (*synth) {
      if (synth_preset.empty() == synth_scene.empty()) throw InvalidParameter("give exactly one of --preset or --scene");
      SceneSpec spec;
      if (!synth_preset.empty()) {
        const auto p = preset_scene(synth_preset);
        if (!p) throw InvalidParameter("unknown preset '" + synth_preset + "' (valid: " + presets + ")");
        spec = *p;
      } else {
        spec = scene_from_json(load_json(synth_scene));
      }
      SyntheticScene scene = make_synthetic(spec);
      if (synth_noise && *synth_noise > 0)
        scene.image = add_gaussian_noise(scene.image, *synth_noise, rng_seed.value_or(0));
      write_image(synth_out, scene.image);
      if (!synth_gt.empty()) write_mask(synth_gt, scene.truth);
    }
  } catch (const NumericalAbort& e) {
    std::cerr << "levelseg: numerical abort: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParameter& e) {
    return report_error("", e);
  } catch (const IoError& e) {
    return report_error("", e);
  } catch (const Json::exception& e) {
    return report_error("config: ", e);
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error("", e);
  }
  return 0;
}
