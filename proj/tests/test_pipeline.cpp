#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "comic/pipeline.hpp"
#include "comic/synth.hpp"

namespace fs = std::filesystem;
using namespace comic;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("comic_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct RunResult {
  int code;
  std::string err;
  std::string out;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const auto err = dir / "stderr.txt", out = dir / "stdout.txt";
  const std::string cmd = std::string(COMIC_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err), slurp(out)};
}

/// Small synthetic pair written to `dir` as pre/post/gt.
void write_pair(const fs::path& dir, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.m = cfg.n = 64;
  cfg.model = {0.9, 1.0, 1.0};
  cfg.change_fraction = 0.1;
  cfg.seed = seed;
  const auto pair = generate_pair(cfg);
  save_raster(pair.x, dir / "pre");
  save_raster(pair.y, dir / "post");
  save_binary_map(pair.gt, dir / "gt");
}

PipelineConfig small_config(const fs::path& dir) {
  PipelineConfig cfg;
  cfg.pre = dir / "pre";
  cfg.post = dir / "post";
  cfg.gt = dir / "gt";
  cfg.out_dir = dir / "out";
  cfg.ns_model = 60;
  cfg.ns_test = 80;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST(Pipeline, DetectWritesAllArtifacts) {
  const auto dir = fresh_dir("artifacts");
  write_pair(dir, 1);
  const auto result = run_detect(small_config(dir));
  for (const char* f : {"model.json", "di.hdr.json", "di.f32", "di.pgm", "bcm.hdr.json", "bcm.u8", "bcm.pgm",
                        "em_trace.csv", "metrics.json"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  ASSERT_TRUE(result.fitted);
  for (const auto& t : result.fitted->traces) EXPECT_TRUE(t.monotone(1e-9));
  EXPECT_EQ(slurp(dir / "out" / "em_trace.csv").substr(0, 30), "c1,c2,iteration,l,rho,theta,w\n");
  ASSERT_TRUE(result.metrics);
  EXPECT_EQ(result.metrics->tp + result.metrics->tn + result.metrics->fp + result.metrics->fn, 64u * 64u);
  EXPECT_EQ(load_binary_map(dir / "out" / "bcm"), result.bcm);
}

TEST(Pipeline, DeterministicAndStageIsolated) {
  const auto dir = fresh_dir("isolation");
  write_pair(dir, 2);
  auto cfg = small_config(dir);
  run_detect(cfg);
  const auto bcm1 = slurp(dir / "out" / "bcm.u8");
  const auto di1 = slurp(dir / "out" / "di.f32");
  fs::rename(dir / "out", dir / "first");

  run_detect(cfg);
  EXPECT_EQ(slurp(dir / "out" / "bcm.u8"), bcm1);
  EXPECT_EQ(slurp(dir / "out" / "di.f32"), di1);

  auto fit_cfg = cfg;
  fit_cfg.out_dir = dir / "fit";
  run_fit(fit_cfg);
  EXPECT_EQ(slurp(dir / "fit" / "model.json"), slurp(dir / "first" / "model.json"));
  auto staged = cfg;
  staged.model = dir / "fit" / "model.json";
  staged.out_dir = dir / "staged";
  run_detect(staged);
  EXPECT_EQ(slurp(dir / "staged" / "bcm.u8"), bcm1);
  EXPECT_EQ(slurp(dir / "staged" / "di.f32"), di1);
}

TEST(Pipeline, TranslatedInputAndPca) {
  const auto dir = fresh_dir("pca");
  SynthConfig s;
  s.m = s.n = 48;
  s.cx = 3;
  s.cy = 2;
  s.seed = 5;
  const auto pair = generate_pair(s);
  save_raster(pair.x, dir / "pre");
  save_raster(pair.y, dir / "post");
  save_raster(translate_baseline(pair.x, pair.y), dir / "translated");
  auto cfg = small_config(dir);
  cfg.gt.reset();
  cfg.translated = dir / "translated";
  cfg.pca = 2;
  const auto result = run_detect(cfg);
  EXPECT_EQ(result.models->channels_x(), 2u);
  EXPECT_EQ(result.models->channels_y(), 2u);
  EXPECT_FALSE(fs::exists(dir / "out" / "metrics.json"));
}

TEST(Pipeline, ConfigJsonKeysAndErrors) {
  PipelineConfig cfg;
  apply_config_json(cfg, nlohmann::json::parse(R"({"ns-model": 50, "ns_test": 70, "alpha": 2.5,
      "theta-max": 10, "method": "linear_regress", "seed": 3, "out-dir": "x"})"));
  EXPECT_EQ(cfg.ns_model, 50u);
  EXPECT_EQ(cfg.ns_test, 70u);
  EXPECT_EQ(cfg.alpha, 2.5);
  EXPECT_EQ(cfg.theta_max, 10.0);
  EXPECT_EQ(cfg.method, TranslationMethod::LinearRegress);
  EXPECT_EQ(cfg.out_dir, fs::path("x"));
  EXPECT_THROW(apply_config_json(cfg, nlohmann::json::parse(R"({"bogus": 1})")), ContractError);
  EXPECT_THROW(apply_config_json(cfg, nlohmann::json::parse(R"({"alpha": "high"})")), ContractError);
  cfg.ns_model = 5;
  EXPECT_THROW(cfg.validate(), ContractError);
}

TEST(Pipeline, StageErrorsCarryExitCodes) {
  PipelineConfig cfg;
  cfg.pre = "/nonexistent/pre";
  cfg.post = "/nonexistent/post";
  try {
    prepare_inputs(cfg);
    FAIL() << "expected a StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "load");
    EXPECT_EQ(e.exit_code(), 2);
  }
  try {
    run_stage("fit", []() -> int { throw NumericalError("nan"); });
  } catch (const StageError& e) {
    EXPECT_EQ(e.exit_code(), 3);
  }
}

TEST(Cli, MissingPreIsLoadError) {
  const auto dir = fresh_dir("cli_missing");
  const auto r = run_cli("detect --pre " + (dir / "nope").string() + " --post " + (dir / "nope2").string() +
                             " --out-dir " + (dir / "out").string(),
                         dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error [load]:", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto dir = fresh_dir("cli_usage");
  EXPECT_EQ(run_cli("", dir).code, 2);
  EXPECT_EQ(run_cli("detect --alpha notanumber", dir).code, 2);
  EXPECT_EQ(run_cli("frobnicate", dir).code, 2);
}

TEST(Cli, ScoreIdenticalMaps) {
  const auto dir = fresh_dir("cli_score");
  write_pair(dir, 3);
  const auto r = run_cli("score --bcm " + (dir / "gt").string() + " --gt " + (dir / "gt").string() + " --out-dir " +
                             (dir / "m").string(),
                         dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("kc=1 "), std::string::npos) << r.out;
  std::ifstream in(dir / "m" / "metrics.json");
  EXPECT_EQ(nlohmann::json::parse(in)["kc"], 1.0);
  EXPECT_TRUE(fs::exists(dir / "m" / "metrics.csv"));
}

TEST(Cli, SynthWithoutChangeWritesBlankGroundTruth) {
  const auto dir = fresh_dir("cli_synth");
  const auto r = run_cli("synth --m 20 --n 30 --change-fraction 0 --out-dir " + (dir / "s").string(), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pgm = slurp(dir / "s" / "gt.pgm");
  const std::string header = "P5\n30 20\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 600u);
  EXPECT_EQ(pgm.substr(0, header.size()), header);
  for (std::size_t i = header.size(); i < pgm.size(); ++i) ASSERT_EQ(pgm[i], '\0');
  EXPECT_TRUE(fs::exists(dir / "s" / "pre.f32"));
  EXPECT_TRUE(fs::exists(dir / "s" / "post.hdr.json"));
}

TEST(Cli, FitOnSamplerOutputRecoversTheta) {
  const auto dir = fresh_dir("cli_fit");
  const auto samples = sample_mixture({0.5, 2.0, 0.0, TailMode::Clayton, Orientation::Identity}, 5000, 21);
  {
    std::ofstream csv(dir / "samples.csv");
    csv.precision(17);
    csv << "u,v\n";
    for (auto [u, v] : samples) csv << u << ',' << v << '\n';
  }
  const auto r = run_cli("fit --samples " + (dir / "samples.csv").string() + " --out-dir " + (dir / "m").string(), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "m" / "model.json");
  const auto j = nlohmann::json::parse(in);
  const double theta = j["pairs"][0]["theta"];
  EXPECT_GE(theta, 1.7);
  EXPECT_LE(theta, 2.3);
  EXPECT_EQ(j["pairs"][0]["tail_mode"], "clayton");
}

TEST(Cli, DetectWithConfigFileAndOverride) {
  const auto dir = fresh_dir("cli_detect");
  write_pair(dir, 6);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << nlohmann::json{{"pre", (dir / "pre").string()},
                          {"post", (dir / "post").string()},
                          {"gt", (dir / "gt").string()},
                          {"out-dir", (dir / "ignored").string()},
                          {"ns-model", 60},
                          {"ns-test", 80}}
               .dump();
  }
  const auto r = run_cli("detect --config " + (dir / "cfg.json").string() + " --out-dir " + (dir / "out").string(), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "metrics.json"));
  EXPECT_FALSE(fs::exists(dir / "ignored"));

  const auto t = run_cli("translate --pre " + (dir / "pre").string() + " --post " + (dir / "post").string() +
                             " --out " + (dir / "tr").string(),
                         dir);
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(load_raster(dir / "tr").channels(), 1u);
}
