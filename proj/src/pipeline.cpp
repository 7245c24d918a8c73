#include "comic/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "comic/parallel.hpp"

namespace comic {

namespace {

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

void PipelineConfig::validate() const {
  require(ns_model >= 10 && ns_test >= 10, "ns-model and ns-test must be >= 10");
  require(alpha >= 0.0, "alpha must be >= 0");
  require(eps > 0.0, "eps must be > 0");
  require(theta_max > 0.0, "theta-max must be > 0");
  require(compactness > 0.0, "compactness must be > 0");
  require(min_region >= 1, "min-region must be >= 1");
}

void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j) {
  require(j.is_object(), "config must be a JSON object");
  for (const auto& [raw_key, value] : j.items()) {
    const std::string key = normalize_key(raw_key);
    try {
      if (key == "pre") cfg.pre = value.get<std::string>();
      else if (key == "post") cfg.post = value.get<std::string>();
      else if (key == "translated") cfg.translated = value.get<std::string>();
      else if (key == "gt") cfg.gt = value.get<std::string>();
      else if (key == "model") cfg.model = value.get<std::string>();
      else if (key == "out-dir") cfg.out_dir = value.get<std::string>();
      else if (key == "ns-model") cfg.ns_model = value.get<std::size_t>();
      else if (key == "ns-test") cfg.ns_test = value.get<std::size_t>();
      else if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "eps") cfg.eps = value.get<double>();
      else if (key == "theta-max") cfg.theta_max = value.get<double>();
      else if (key == "pca") cfg.pca = value.get<std::size_t>();
      else if (key == "compactness") cfg.compactness = value.get<double>();
      else if (key == "min-region") cfg.min_region = value.get<std::size_t>();
      else if (key == "method") cfg.method = parse_translation_method(value.get<std::string>());
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else throw ContractError("unknown config key: " + raw_key);
    } catch (const nlohmann::json::exception& e) {
      throw ContractError("config key " + raw_key + ": " + e.what());
    }
  }
}

EmConfig em_config(const PipelineConfig& cfg) {
  EmConfig em;
  em.eps = cfg.eps;
  em.theta_max = cfg.theta_max;
  em.theta0 = std::min(em.theta0, cfg.theta_max);
  return em;
}

PreparedInputs prepare_inputs(const PipelineConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); });
  auto [x, y, translated] = run_stage("load", [&] {
    Raster x = load_raster(cfg.pre);
    Raster y = load_raster(cfg.post);
    std::optional<Raster> t;
    if (cfg.translated) t = load_raster(*cfg.translated);
    require(x.same_grid(y), "pre and post rasters differ in size");
    if (t) {
      require(t->same_grid(y), "translated raster differs in size from post");
      require(t->channels() == y.channels(), "translated raster must have the post raster's channel count");
    }
    return std::tuple{std::move(x), std::move(y), std::move(t)};
  });

  if (cfg.pca > 0) {
    run_stage("pca", [&] {
      require(cfg.pca <= x.channels() && cfg.pca <= y.channels(), "pca exceeds the channel count");
      x = pca_reduce(x, cfg.pca);
      const PcaBasis by = fit_pca(y, cfg.pca);
      y = apply_pca(y, by);
      if (translated) translated = apply_pca(*translated, by);
    });
  }
  if (!translated) {
    translated = run_stage("translate", [&] { return translate_baseline(x, y, TranslationSpec{cfg.method, {}}); });
  }
  return {std::move(x), std::move(y), std::move(*translated)};
}

TrainResult train(const Raster& x, const Raster& translated, const PipelineConfig& cfg) {
  SegmentationMap seg = run_stage("segment", [&] {
    return cosegment(slic(x, cfg.ns_model, cfg.compactness, cfg.seed),
                     slic(translated, cfg.ns_model, cfg.compactness, cfg.seed), cfg.min_region);
  });
  ModelSetFit fit = run_stage("fit", [&] {
    return fit_channel_pairs(extract_features(x, seg), extract_features(translated, seg), em_config(cfg));
  });
  return {std::move(seg), std::move(fit)};
}

DetectResult detect(const PreparedInputs& in, const PipelineConfig& cfg, const ChannelPairModelSet* pretrained) {
  DetectResult out;
  if (pretrained) {
    out.models = *pretrained;
  } else {
    auto trained = train(in.x, in.translated, cfg);
    out.seg_model = std::move(trained.seg);
    out.models = trained.fit.models;
    out.fitted = std::move(trained.fit);
  }
  out.seg_test = run_stage("segment", [&] {
    return cosegment(slic(in.x, cfg.ns_test, cfg.compactness, cfg.seed),
                     slic(in.y, cfg.ns_test, cfg.compactness, cfg.seed), cfg.min_region);
  });
  run_stage("detect", [&] {
    const FeatureMatrix fx = extract_features(in.x, out.seg_test);
    const FeatureMatrix fy = extract_features(in.y, out.seg_test);
    out.stats = test_statistics(fx, fy, *out.models);
    out.dm = fuse_difference(out.stats);
    const RepVectors rep = representative_vectors(fx, fy, out.dm, cfg.alpha);
    out.bcm = two_stage_bcm(rep, out.dm, out.seg_test, cfg.seed);
  });
  return out;
}

void write_trace_csv(const std::filesystem::path& path, const ChannelPairModelSet& models,
                     const std::vector<EmTrace>& traces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "c1,c2,iteration,l,rho,theta,w\n";
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& pair = models.pairs().at(k);
    write_trace_rows(out, traces[k], std::to_string(pair.c1) + ',' + std::to_string(pair.c2) + ',');
  }
  if (!out) throw IoError("failed writing " + path.string());
}

DetectResult run_detect(const PipelineConfig& cfg) {
  const PreparedInputs in = prepare_inputs(cfg);
  std::optional<ChannelPairModelSet> pretrained;
  if (cfg.model) pretrained = run_stage("load", [&] { return load_model_set(*cfg.model); });
  std::optional<BinaryMap> gt;
  if (cfg.gt) {
    gt = run_stage("load", [&] {
      BinaryMap g = load_binary_map(*cfg.gt);
      require(g.height == in.x.height() && g.width == in.x.width(), "ground truth differs in size from the rasters");
      return g;
    });
  }

  DetectResult result = detect(in, cfg, pretrained ? &*pretrained : nullptr);
  if (gt) result.metrics = run_stage("score", [&] { return score(result.bcm, *gt); });

  run_stage("write", [&] {
    ensure_dir(cfg.out_dir);
    save_model_set(*result.models, cfg.out_dir / "model.json");
    if (result.fitted) {
      write_trace_csv(cfg.out_dir / "em_trace.csv", result.fitted->models, result.fitted->traces);
    } else {
      write_trace_csv(cfg.out_dir / "em_trace.csv", *result.models, {});
    }
    const auto di = paint(result.seg_test, result.dm.di);
    std::vector<float> di_f(di.begin(), di.end());
    save_raster(Raster(in.x.height(), in.x.width(), 1, std::move(di_f)), cfg.out_dir / "di");
    export_graymap(di, in.x.height(), in.x.width(), cfg.out_dir / "di.pgm");
    save_binary_map(result.bcm, cfg.out_dir / "bcm");
    const std::vector<double> bcm_d(result.bcm.values.begin(), result.bcm.values.end());
    export_graymap(bcm_d, in.x.height(), in.x.width(), cfg.out_dir / "bcm.pgm");
    if (result.metrics) {
      std::ofstream m(cfg.out_dir / "metrics.json");
      if (!m) throw IoError("cannot write metrics.json");
      m << to_json(*result.metrics).dump(2) << '\n';
    }
  });
  return result;
}

ModelSetFit run_fit(const PipelineConfig& cfg) {
  const PreparedInputs in = prepare_inputs(cfg);
  TrainResult trained = train(in.x, in.translated, cfg);
  run_stage("write", [&] {
    ensure_dir(cfg.out_dir);
    save_model_set(trained.fit.models, cfg.out_dir / "model.json");
    write_trace_csv(cfg.out_dir / "em_trace.csv", trained.fit.models, trained.fit.traces);
  });
  return std::move(trained.fit);
}

ModelSetFit fit_samples_csv(const std::filesystem::path& csv, const EmConfig& config) {
  std::ifstream in(csv);
  if (!in) throw IoError("cannot open " + csv.string());
  FeatureMatrix fx, fy;
  fx.cols = fy.cols = 1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) {
      if (line_no == 1) continue;  // header
      throw ContractError("samples line " + std::to_string(line_no) + " is not two numbers");
    }
    fx.values.push_back(a);
    fy.values.push_back(b);
  }
  fx.rows = fy.rows = fx.values.size();
  return fit_channel_pairs(fx, fy, config);
}

}  // namespace comic
