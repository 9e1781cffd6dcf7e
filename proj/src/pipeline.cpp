#include "upm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "upm/npy.hpp"
#include "upm/ops.hpp"
#include "upm/render.hpp"

namespace upm {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoFailure, "cannot create output directory '" + dir.string() + "'");
  }
}

void require_file(const fs::path& p) {
  if (!p.empty() && !fs::is_regular_file(p)) {
    throw Error(ErrorCode::ConfigError, "missing input file '" + p.string() + "'");
  }
}

// `<id>.<kind>.npy` → (id, kind)
std::optional<std::pair<std::string, std::string>> split_name(const fs::path& p) {
  if (p.extension() != ".npy") return std::nullopt;
  const std::string stem = p.stem().string();
  const auto dot = stem.rfind('.');
  if (dot == std::string::npos || dot == 0) return std::nullopt;
  return std::make_pair(stem.substr(0, dot), stem.substr(dot + 1));
}

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
  if (!(beta > 0.0 && beta <= 1.0)) fail("beta must lie in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) fail("lambda must lie in (0, 1]");
  if (k_parts == 0) fail("k-parts must be >= 1");
  if (connectivity != 4 && connectivity != 8) fail("connectivity must be 4 or 8");
  if (!(objbox_frac > 0.0 && objbox_frac < 1.0)) fail("objbox-frac must lie in (0, 1)");
  if (max_pattern_len == 0) fail("max-pattern-len must be >= 1");
  if (jobs == 0) fail("jobs must be >= 1");
  if (image_size == 0) fail("image-size must be >= 1");
}

std::vector<ImageEntry> discover_inputs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::ConfigError, "features directory '" + dir.string() + "' does not exist");
  }
  std::map<std::string, ImageEntry> found;
  const fs::path manifest = dir / "manifest.json";
  if (fs::is_regular_file(manifest)) {
    const Json j = read_json(manifest);
    try {
      for (const auto& img : j.at("images")) {
        ImageEntry e;
        e.id = img.at("id").get<std::string>();
        const auto& outputs = img.contains("outputs") ? img.at("outputs") : img;
        auto path_of = [&](const char* key) -> fs::path {
          return outputs.contains(key) ? dir / outputs.at(key).get<std::string>() : fs::path{};
        };
        e.stack = path_of("stack");
        e.relu5 = path_of("relu5");
        e.pool5 = path_of("pool5");
        e.conv5 = path_of("conv5");
        e.image = path_of("image");
        e.blocks = path_of("blocks");
        for (const auto& p : {e.stack, e.relu5, e.pool5, e.conv5, e.image, e.blocks}) require_file(p);
        found[e.id] = std::move(e);
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::ConfigError, "malformed manifest '" + manifest.string() + "': " + ex.what());
    }
  } else {
    for (const auto& file : fs::directory_iterator(dir)) {
      if (!file.is_regular_file()) continue;
      const auto parts = split_name(file.path());
      if (!parts) continue;
      const auto& [id, kind] = *parts;
      ImageEntry& e = found[id];
      e.id = id;
      if (kind == "stack") e.stack = file.path();
      else if (kind == "relu5") e.relu5 = file.path();
      else if (kind == "pool5") e.pool5 = file.path();
      else if (kind == "conv5") e.conv5 = file.path();
      else if (kind == "image") e.image = file.path();
      else if (kind == "blocks") e.blocks = file.path();
    }
  }
  std::vector<ImageEntry> out;
  for (auto& [id, e] : found) out.push_back(std::move(e));
  return out;
}

Tensor load_feature_stack(const ImageEntry& entry) {
  if (!entry.stack.empty()) return read_tensor(entry.stack);
  if (entry.relu5.empty()) {
    throw Error(ErrorCode::ConfigError, "image '" + entry.id + "' has no activation stack");
  }
  Tensor relu5 = read_tensor(entry.relu5);
  if (entry.pool5.empty()) return relu5;
  return fuse_feature_layers(relu5, read_tensor(entry.pool5));
}

LocalizationResult localize_parts(const Tensor& stack, const PipelineConfig& config, std::size_t image_h,
                                  std::size_t image_w) {
  LocalizationResult r;
  const auto thr = compute_threshold(stack, config.alpha_mode);
  if (config.alpha_mode == ThresholdMode::Global) r.alpha = thr.alpha[0];
  r.transactions = build_transactions(stack, thr);

  MiningOptions mining;
  mining.beta = config.beta;
  mining.max_len = config.max_pattern_len;
  mining.strict = config.strict_support;
  r.patterns = apriori(r.transactions, mining);

  r.grid_support = build_support_map(r.patterns, r.transactions);
  if (r.grid_support.empty_patterns) r.warnings.push_back("no frequent pattern at this beta");

  const SupportMap upsampled = upsample_support_map(r.grid_support, image_h, image_w);
  r.support = extract_largest_component(upsampled, config.connectivity);
  const auto centers = find_part_centers(r.support, config.k_parts, config.seed, config.restarts);
  r.layout = derive_part_layout(centers, r.support, config.lambda, image_h, image_w);
  r.layout.object_box = object_box(r.support, config.objbox_frac, config.connectivity);
  return r;
}

RunSummary run_pipeline(const PipelineConfig& config) {
  config.validate();
  const auto entries = discover_inputs(config.features_dir);
  if (entries.empty()) {
    throw Error(ErrorCode::ConfigError, "no feature tensors found in '" + config.features_dir.string() + "'");
  }
  for (const auto& e : entries) {
    if (e.stack.empty() && e.relu5.empty()) {
      throw Error(ErrorCode::ConfigError, "image '" + e.id + "' has no stack or relu5 tensor in '" +
                                              config.features_dir.string() + "'");
    }
  }
  ensure_dir(config.out_dir);

  RunSummary summary;
  summary.images.resize(entries.size());
  parallel_for(entries.size(), config.jobs, [&](std::size_t i) {
    const auto& entry = entries[i];
    ImageReport& report = summary.images[i];
    report.id = entry.id;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Tensor stack = load_feature_stack(entry);
      std::optional<Tensor> image;
      std::size_t h = config.image_size, w = config.image_size;
      if (!entry.image.empty()) {
        image = read_tensor(entry.image);
        h = image->height();
        w = image->width();
      }
      auto result = localize_parts(stack, config, h, w);
      report.alpha = result.alpha;
      report.patterns = result.patterns.size();
      report.frequent_items = result.patterns.item_union().size();
      report.warnings = result.warnings;

      const std::string source = (entry.image.empty() ? (entry.stack.empty() ? entry.relu5 : entry.stack)
                                                      : entry.image)
                                     .generic_string();
      write_json(layout_to_json(result.layout, source), config.out_dir / (entry.id + ".layout.json"));
      if (config.render) {
        render_overlay(image ? *image : support_map_image(result.support), result.layout,
                       config.out_dir / (entry.id + ".overlay.ppm"));
      }
      if (config.dump) {
        write_text(format_transactions(result.transactions), config.out_dir / (entry.id + ".transactions.txt"));
        write_text(format_patterns(result.patterns), config.out_dir / (entry.id + ".patterns.txt"));
        write_tensor(result.grid_support.values, config.out_dir / (entry.id + ".support.npy"));
      }
      report.ok = true;
    } catch (const std::exception& e) {
      report.ok = false;
      report.error = e.what();
    }
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  for (const auto& r : summary.images) (r.ok ? summary.succeeded : summary.failed)++;
  write_json(summary_to_json(summary, config), config.out_dir / "summary.json");
  return summary;
}

Json summary_to_json(const RunSummary& summary, const PipelineConfig& config, bool include_timing) {
  Json j;
  Json cfg;
  cfg["beta"] = config.beta;
  cfg["k_parts"] = config.k_parts;
  cfg["lambda"] = config.lambda;
  cfg["alpha_mode"] = to_string(config.alpha_mode);
  cfg["connectivity"] = config.connectivity;
  cfg["objbox_frac"] = config.objbox_frac;
  cfg["max_pattern_len"] = config.max_pattern_len;
  cfg["strict_support"] = config.strict_support;
  cfg["seed"] = config.seed;
  j["config"] = std::move(cfg);
  Json images = Json::array();
  for (const auto& r : summary.images) {
    Json img;
    img["id"] = r.id;
    img["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) img["error"] = r.error;
    img["warnings"] = r.warnings;
    img["alpha"] = r.alpha;
    img["patterns"] = r.patterns;
    img["frequent_items"] = r.frequent_items;
    if (include_timing) img["elapsed_ms"] = r.elapsed_ms;
    images.push_back(std::move(img));
  }
  j["images"] = std::move(images);
  j["succeeded"] = summary.succeeded;
  j["failed"] = summary.failed;
  return j;
}

AlignOutput run_alignment(const AlignConfig& config) {
  if (!fs::is_directory(config.layouts_dir)) {
    throw Error(ErrorCode::ConfigError, "layouts directory '" + config.layouts_dir.string() + "' does not exist");
  }
  const auto entries = discover_inputs(config.features_dir);
  std::map<std::string, fs::path> conv5;
  for (const auto& e : entries) {
    if (!e.conv5.empty()) conv5[e.id] = e.conv5;
  }

  std::vector<fs::path> layouts;
  for (const auto& file : fs::directory_iterator(config.layouts_dir)) {
    const std::string name = file.path().filename().string();
    if (name.size() > 12 && name.ends_with(".layout.json")) layouts.push_back(file.path());
  }
  std::sort(layouts.begin(), layouts.end());

  AlignOutput out;
  for (const auto& path : layouts) {
    const std::string name = path.filename().string();
    const std::string id = name.substr(0, name.size() - std::string(".layout.json").size());
    const auto it = conv5.find(id);
    if (it == conv5.end()) {
      throw Error(ErrorCode::ConfigError, "no conv5 features for '" + id + "' in '" +
                                              config.features_dir.string() + "'");
    }
    const PartLayout layout = layout_from_json(read_json(path));
    const Tensor features = read_tensor(it->second);
    if (features.rank() != 3) throw Error(ErrorCode::ShapeMismatch, "conv5 tensor for '" + id + "' is not rank 3");
    out.table.feature_channels = features.channels();
    out.table.feature_height = features.height();
    out.table.feature_width = features.width();
    for (std::size_t p = 0; p < layout.k(); ++p) {
      const BinaryMask small = downsample_mask(layout.masks[p], features.height(), features.width());
      out.table.rows.push_back({id, p, part_descriptor(features, small)});
    }
  }

  out.result = spectral_cluster(out.table, config.k_parts, config.seed);
  out.slots = assign_part_slots(out.table, out.result);

  ensure_dir(config.out_dir);
  write_json(alignment_to_json(out.result), config.out_dir / "alignment.json");

  Json slots;
  Json rows = Json::array();
  for (const auto& r : out.table.rows) rows.push_back(Json{{"image", r.image_id}, {"part", r.part}});
  slots["rows"] = std::move(rows);
  slots["group_slot"] = out.slots.group_slot;
  Json assignments = Json::object();
  for (std::size_t i = 0; i < out.slots.images.size(); ++i) {
    assignments[out.slots.images[i]] = out.slots.rows[i];
  }
  slots["assignments"] = std::move(assignments);
  write_json(slots, config.out_dir / "slots.json");
  return out;
}

FuseTrainOutput run_fuse_train(const FuseTrainConfig& config) {
  std::ifstream in(config.labels_file);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read labels file '" + config.labels_file.string() + "'");
  const auto entries = discover_inputs(config.features_dir);
  std::map<std::string, fs::path> blocks;
  for (const auto& e : entries) {
    if (!e.blocks.empty()) blocks[e.id] = e.blocks;
  }

  FuseTrainOutput out;
  std::vector<FusedFeature> features;
  for (std::string line; std::getline(in, line);) {
    const auto words = split_words(line);
    if (words.empty() || words[0].starts_with('#')) continue;
    const auto it = blocks.find(words[0]);
    if (it == blocks.end()) {
      throw Error(ErrorCode::ConfigError, "no blocks tensor for '" + words[0] + "'");
    }
    const Tensor t = read_tensor(it->second);
    if (t.rank() != 2) throw Error(ErrorCode::ShapeMismatch, "blocks tensor for '" + words[0] + "' is not rank 2");
    std::vector<Descriptor> parts(t.height());
    for (std::size_t b = 0; b < t.height(); ++b) {
      const auto row = t.data().subspan(b * t.width(), t.width());
      parts[b].values.assign(row.begin(), row.end());
    }
    features.push_back(fuse_features(parts));
    out.ids.push_back(words[0]);
    out.labels.push_back(words.size() > 1 ? words[1] : std::string{});
  }

  ensure_dir(config.out_dir);
  if (config.model) {
    out.model = model_from_json(read_json(*config.model));
  } else {
    SvmOptions opts;
    opts.c_reg = config.c_reg;
    opts.seed = config.seed;
    out.model = train_linear_svm(features, out.labels, opts);
    write_json(model_to_json(out.model), config.out_dir / "model.json");
  }

  std::size_t correct = 0, labelled = 0;
  Json preds = Json::array();
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.predicted.push_back(predict(out.model, features[i].values));
    if (!out.labels[i].empty()) {
      ++labelled;
      correct += out.predicted[i] == out.labels[i];
    }
    preds.push_back(Json{{"id", out.ids[i]}, {"label", out.labels[i]}, {"predicted", out.predicted[i]}});
  }
  out.accuracy = labelled ? static_cast<double>(correct) / static_cast<double>(labelled) : 0.0;
  Json j;
  j["accuracy"] = out.accuracy;
  j["predictions"] = std::move(preds);
  write_json(j, config.out_dir / "predictions.json");
  return out;
}

std::map<std::string, std::string> parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file '" + path.string() + "'");
  std::map<std::string, std::string> out;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    out[key] = value;
  }
  return out;
}

}  // namespace upm
