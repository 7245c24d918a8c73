#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <string>
#include <utility>

#include <json.hpp>

#include "comic/detector.hpp"
#include "comic/emfit.hpp"
#include "comic/error.hpp"
#include "comic/metrics.hpp"
#include "comic/translate.hpp"

namespace comic {

struct PipelineConfig {
  std::filesystem::path pre;
  std::filesystem::path post;
  std::optional<std::filesystem::path> translated;
  std::optional<std::filesystem::path> gt;
  std::optional<std::filesystem::path> model;  // skip fitting and use this model.json
  std::filesystem::path out_dir = "out";
  std::size_t ns_model = 1000;
  std::size_t ns_test = 1000;
  double alpha = 5.0;
  double eps = 0.01;
  double theta_max = 20.0;
  std::size_t pca = 0;  // 0 keeps the input bands
  double compactness = 10.0;
  std::size_t min_region = 10;
  TranslationMethod method = TranslationMethod::HistogramMatch;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Overlays the keys of a JSON config object (flag names, '-' or '_') onto `cfg`.
void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j);

/// A failure tagged with the pipeline stage it happened in and the process
/// exit code it maps to (2 contract / IO, 3 numerical).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message, int exit_code)
      : std::runtime_error(message), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

/// Runs `fn` and converts any exception into a StageError for `stage`.
template <typename Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ContractError& e) {
    throw StageError(stage, e.what(), 2);
  } catch (const IoError& e) {
    throw StageError(stage, e.what(), 2);
  } catch (const NumericalError& e) {
    throw StageError(stage, e.what(), 3);
  } catch (const std::invalid_argument& e) {
    throw StageError(stage, e.what(), 2);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), 3);
  }
}

struct DetectResult {
  std::optional<ModelSetFit> fitted;  // empty when the model was loaded
  std::optional<ChannelPairModelSet> models;
  SegmentationMap seg_model;
  SegmentationMap seg_test;
  StatTensor stats;
  DifferenceMap dm;
  BinaryMap bcm;
  std::optional<MetricsReport> metrics;
};

/// Inputs after loading and optional PCA; `translated` is the baseline
/// translation when none was supplied.
struct PreparedInputs {
  Raster x;
  Raster y;
  Raster translated;
};

PreparedInputs prepare_inputs(const PipelineConfig& cfg);

/// Co-segments (X, Y') with ns_model and fits every channel pair.
struct TrainResult {
  SegmentationMap seg;
  ModelSetFit fit;
};
TrainResult train(const Raster& x, const Raster& translated, const PipelineConfig& cfg);

/// Full detection on prepared inputs; does not touch the file system.
DetectResult detect(const PreparedInputs& in, const PipelineConfig& cfg,
                    const ChannelPairModelSet* pretrained = nullptr);

/// detect + artifacts: model.json, di.{hdr.json,f32,pgm}, bcm.{hdr.json,u8,pgm},
/// em_trace.csv and metrics.json when a ground truth is configured.
DetectResult run_detect(const PipelineConfig& cfg);

/// Training only: model.json and em_trace.csv.
ModelSetFit run_fit(const PipelineConfig& cfg);

/// Fits a single channel pair on a two-column CSV of raw samples.
ModelSetFit fit_samples_csv(const std::filesystem::path& csv, const EmConfig& config);

void write_trace_csv(const std::filesystem::path& path, const ChannelPairModelSet& models,
                     const std::vector<EmTrace>& traces);

EmConfig em_config(const PipelineConfig& cfg);

}  // namespace comic
