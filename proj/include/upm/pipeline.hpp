#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "upm/aligner.hpp"
#include "upm/classifier.hpp"
#include "upm/localizer.hpp"
#include "upm/mining.hpp"
#include "upm/serialize.hpp"
#include "upm/transactions.hpp"

namespace upm {

namespace fs = std::filesystem;

struct PipelineConfig {
  double beta = 0.07;
  std::size_t k_parts = 4;
  double lambda = 0.25;
  ThresholdMode alpha_mode = ThresholdMode::Global;
  int connectivity = 8;
  double objbox_frac = 0.2;
  std::size_t max_pattern_len = 3;
  bool strict_support = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t restarts = 5;
  // Frame for layouts when no image tensor accompanies the features.
  std::size_t image_size = 448;
  bool render = true;
  bool dump = false;
  fs::path features_dir;
  fs::path out_dir;

  /// Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

/// Files known for one image. Empty paths are absent.
struct ImageEntry {
  std::string id;
  fs::path stack;  // pre-fused C × h × w activations
  fs::path relu5;
  fs::path pool5;
  fs::path conv5;
  fs::path image;  // 3 × H × W, values 0..255
  fs::path blocks;
};

/// Reads `manifest.json` when present, otherwise groups `<id>.<kind>.npy`
/// files. Entries come back sorted by id. Throws ConfigError when the
/// directory is missing or a listed file does not exist.
std::vector<ImageEntry> discover_inputs(const fs::path& dir);

/// The fused activation stack for an entry (pool5 resized onto relu5).
Tensor load_feature_stack(const ImageEntry& entry);

struct LocalizationResult {
  PartLayout layout;
  SupportMap support;  // image scale, largest component only
  SupportMap grid_support;
  TransactionDB transactions;
  PatternSet patterns;
  double alpha = 0.0;
  std::vector<std::string> warnings;
};

/// Transactions → Apriori → support map → upsample → largest component →
/// part centers → layout → object box, for one activation stack.
LocalizationResult localize_parts(const Tensor& stack, const PipelineConfig& config, std::size_t image_h,
                                  std::size_t image_w);

struct ImageReport {
  std::string id;
  bool ok = false;
  std::string error;
  std::vector<std::string> warnings;
  double alpha = 0.0;
  std::size_t patterns = 0;
  std::size_t frequent_items = 0;
  double elapsed_ms = 0.0;
};

struct RunSummary {
  std::vector<ImageReport> images;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
};

/// Localizes every discovered image with a bounded worker pool and writes
/// `<id>.layout.json`, `<id>.overlay.ppm` and `summary.json` into out_dir.
/// Per-image failures are recorded, not thrown.
RunSummary run_pipeline(const PipelineConfig& config);

Json summary_to_json(const RunSummary& summary, const PipelineConfig& config, bool include_timing = true);

struct AlignConfig {
  fs::path layouts_dir;
  fs::path features_dir;
  fs::path out_dir;
  std::size_t k_parts = 4;
  std::uint64_t seed = 0;
};

struct AlignOutput {
  PartDescriptorTable table;
  AlignmentResult result;
  SlotAssignment slots;
};

/// Masked-GAP descriptors of every mined part, spectral clustering into k
/// groups, slot assignment. Writes alignment.json and slots.json.
AlignOutput run_alignment(const AlignConfig& config);

struct FuseTrainConfig {
  fs::path features_dir;
  fs::path labels_file;
  fs::path out_dir;
  std::optional<fs::path> model;  // predict with this model instead of training
  double c_reg = 1.0;
  std::uint64_t seed = 0;
};

struct FuseTrainOutput {
  LinearModel model;
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<std::string> predicted;
  double accuracy = 0.0;
};

/// Fuses `<id>.blocks.npy` descriptors and trains (or applies) the linear
/// SVM. Writes model.json (training only) and predictions.json.
FuseTrainOutput run_fuse_train(const FuseTrainConfig& config);

/// `key = value` lines; '#' comments and [section] headers are ignored.
/// Keys are normalized to dashed form (k_parts → k-parts).
std::map<std::string, std::string> parse_config_file(const fs::path& path);

}  // namespace upm
