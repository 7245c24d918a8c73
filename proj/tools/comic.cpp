// Command-line front end: detect, fit, synth, score, translate.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "comic/pipeline.hpp"
#include "comic/synth.hpp"

namespace {

using comic::PipelineConfig;
using comic::run_stage;
using comic::StageError;

/// Flags shared by detect and fit; unset flags leave the config file's value.
struct PipelineFlags {
  std::string config;
  std::optional<std::string> pre, post, translated, gt, out_dir, model, method;
  std::optional<std::size_t> ns_model, ns_test, pca, min_region;
  std::optional<double> alpha, eps, theta_max, compactness;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file; flags override its keys");
    app->add_option("--pre", pre, "pre-event raster");
    app->add_option("--post", post, "post-event raster");
    app->add_option("--translated", translated, "translated pre-event raster in the post modality");
    app->add_option("--gt", gt, "ground-truth change map");
    app->add_option("--out-dir", out_dir, "output directory");
    app->add_option("--model", model, "use this model.json instead of fitting");
    app->add_option("--ns-model", ns_model, "superpixels for training (default 1000)");
    app->add_option("--ns-test", ns_test, "superpixels for detection (default 1000)");
    app->add_option("--alpha", alpha, "DI weight in the clustering vectors (default 5)");
    app->add_option("--eps", eps, "EM stopping tolerance (default 0.01)");
    app->add_option("--theta-max", theta_max, "upper end of the theta grid (default 20)");
    app->add_option("--pca", pca, "keep this many principal components (0 = off)");
    app->add_option("--compactness", compactness, "SLIC compactness (default 10)");
    app->add_option("--min-region", min_region, "smallest co-segmentation region (default 10)");
    app->add_option("--method", method, "baseline translation: histogram_match | linear_regress");
    app->add_option("--seed", seed, "random seed");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config.empty()) {
      run_stage("config", [&] {
        std::ifstream in(config);
        if (!in) throw comic::IoError("cannot open config " + config);
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::exception& e) {
          throw comic::ContractError(std::string("config is not valid JSON: ") + e.what());
        }
        comic::apply_config_json(cfg, j);
      });
    }
    if (pre) cfg.pre = *pre;
    if (post) cfg.post = *post;
    if (translated) cfg.translated = *translated;
    if (gt) cfg.gt = *gt;
    if (out_dir) cfg.out_dir = *out_dir;
    if (model) cfg.model = *model;
    if (ns_model) cfg.ns_model = *ns_model;
    if (ns_test) cfg.ns_test = *ns_test;
    if (pca) cfg.pca = *pca;
    if (min_region) cfg.min_region = *min_region;
    if (alpha) cfg.alpha = *alpha;
    if (eps) cfg.eps = *eps;
    if (theta_max) cfg.theta_max = *theta_max;
    if (compactness) cfg.compactness = *compactness;
    if (seed) cfg.seed = *seed;
    if (method) cfg.method = run_stage("config", [&] { return comic::parse_translation_method(*method); });
    return cfg;
  }
};

void print_metrics(const comic::MetricsReport& r) {
  std::cout << "kc=" << r.kc << " fm=" << r.fm << " acc=" << r.acc << '\n';
}

void write_metrics(const comic::MetricsReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream json(dir / "metrics.json");
  json << comic::to_json(r).dump(2) << '\n';
  std::ofstream csv(dir / "metrics.csv");
  csv << comic::csv_header() << '\n' << comic::to_csv_row(r) << '\n';
  if (!json || !csv) throw comic::IoError("cannot write metrics to " + dir.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula-based change detection for heterogeneous image pairs"};
  app.require_subcommand(1);

  PipelineFlags detect_flags, fit_flags;
  auto* detect = app.add_subcommand("detect", "fit the dependence model and write change maps");
  detect_flags.attach(detect);
  auto* fit = app.add_subcommand("fit", "fit the dependence model only");
  fit_flags.attach(fit);
  std::string samples;
  fit->add_option("--samples", samples, "two-column CSV; fit one channel pair on it directly");

  comic::SynthConfig synth_cfg;
  std::string synth_out = "synth", tail_mode = "clayton", orientation = "identity", shape = "rectangle";
  auto* synth = app.add_subcommand("synth", "generate a synthetic pair with known change");
  synth->add_option("--m", synth_cfg.m, "rows");
  synth->add_option("--n", synth_cfg.n, "columns");
  synth->add_option("--cx", synth_cfg.cx, "pre-event channels");
  synth->add_option("--cy", synth_cfg.cy, "post-event channels");
  synth->add_option("--rho", synth_cfg.model.rho, "Gaussian correlation");
  synth->add_option("--theta", synth_cfg.model.theta, "Clayton parameter");
  synth->add_option("--w", synth_cfg.model.w, "Gaussian weight");
  synth->add_option("--tail-mode", tail_mode, "clayton | clayton_survival");
  synth->add_option("--orientation", orientation, "identity | negated");
  synth->add_option("--change-fraction", synth_cfg.change_fraction, "changed share of the image");
  synth->add_option("--change-shape", shape, "rectangle | blobs");
  synth->add_option("--noise-sigma", synth_cfg.noise_sigma, "pixel noise, in units of the 255 range");
  synth->add_option("--seed", synth_cfg.seed, "random seed");
  synth->add_option("--out-dir", synth_out, "output directory (pre, post, gt, gt.pgm)");

  std::string bcm_path, gt_path, score_out;
  auto* score = app.add_subcommand("score", "compare a change map against ground truth");
  score->add_option("--bcm", bcm_path, "binary change map")->required();
  score->add_option("--gt", gt_path, "ground truth")->required();
  score->add_option("--out-dir", score_out, "write metrics.json and metrics.csv here");

  std::string tr_pre, tr_post, tr_out = "translated", tr_method = "histogram_match";
  auto* translate = app.add_subcommand("translate", "baseline translation of pre into the post modality");
  translate->add_option("--pre", tr_pre, "pre-event raster")->required();
  translate->add_option("--post", tr_post, "post-event raster")->required();
  translate->add_option("--method", tr_method, "histogram_match | linear_regress");
  translate->add_option("--out", tr_out, "output raster base path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error [usage]: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*detect) {
      const auto result = comic::run_detect(detect_flags.resolve());
      if (result.metrics) print_metrics(*result.metrics);
    } else if (*fit) {
      if (!samples.empty()) {
        const PipelineConfig cfg = fit_flags.resolve();
        const auto fitted = run_stage("fit", [&] { return comic::fit_samples_csv(samples, comic::em_config(cfg)); });
        run_stage("write", [&] {
          std::filesystem::create_directories(cfg.out_dir);
          comic::save_model_set(fitted.models, cfg.out_dir / "model.json");
          comic::write_trace_csv(cfg.out_dir / "em_trace.csv", fitted.models, fitted.traces);
        });
      } else {
        comic::run_fit(fit_flags.resolve());
      }
    } else if (*synth) {
      const auto pair = run_stage("synth", [&] {
        synth_cfg.model.tail_mode = comic::parse_tail_mode(tail_mode);
        synth_cfg.model.orientation = comic::parse_orientation(orientation);
        synth_cfg.change_shape = comic::parse_change_shape(shape);
        return comic::generate_pair(synth_cfg);
      });
      run_stage("write", [&] {
        const std::filesystem::path dir = synth_out;
        std::filesystem::create_directories(dir);
        comic::save_raster(pair.x, dir / "pre");
        comic::save_raster(pair.y, dir / "post");
        comic::save_binary_map(pair.gt, dir / "gt");
        std::vector<std::uint8_t> gray(pair.gt.values.size());
        for (std::size_t p = 0; p < gray.size(); ++p) gray[p] = pair.gt.values[p] ? 255 : 0;
        std::ofstream pgm(dir / "gt.pgm", std::ios::binary);
        pgm << "P5\n" << pair.gt.width << ' ' << pair.gt.height << "\n255\n";
        pgm.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
        if (!pgm) throw comic::IoError("cannot write gt.pgm");
      });
    } else if (*score) {
      const auto [bcm, gt] = run_stage("load", [&] {
        return std::pair{comic::load_binary_map(bcm_path), comic::load_binary_map(gt_path)};
      });
      const auto report = run_stage("score", [&] { return comic::score(bcm, gt); });
      print_metrics(report);
      if (!score_out.empty()) run_stage("write", [&] { write_metrics(report, score_out); });
    } else if (*translate) {
      const auto [x, y] = run_stage("load", [&] {
        return std::pair{comic::load_raster(tr_pre), comic::load_raster(tr_post)};
      });
      const auto out = run_stage("translate", [&] {
        return comic::translate_baseline(x, y, {comic::parse_translation_method(tr_method), {}});
      });
      run_stage("write", [&] { comic::save_raster(out, tr_out); });
    }
  } catch (const StageError& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
