// upm: unsupervised part mining from CNN activation tensors.
//
//   upm synth      --out DIR [--count N] [--seed N]
//   upm mine       --features DIR --out DIR [--beta F] [--k-parts N] ...
//   upm align      --layouts DIR --features DIR --out DIR
//   upm fuse-train --features DIR --labels FILE --out DIR [--model FILE]
//   upm render     --layout FILE --image FILE --out FILE

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "upm/npy.hpp"
#include "upm/pipeline.hpp"
#include "upm/random.hpp"
#include "upm/render.hpp"
#include "upm/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct MineArgs {
  upm::PipelineConfig config;
  std::string alpha_mode = "global";
  std::string config_file;
};

// Fills options the user did not pass on the command line from the config
// file, so precedence is flags > file > defaults.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [key, value] : upm::parse_config_file(path)) {
    CLI::Option* opt = nullptr;
    try {
      opt = cmd.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw upm::Error(upm::ErrorCode::ConfigError, "unknown key '" + key + "' in " + path);
    }
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

int run_mine(CLI::App& cmd, MineArgs& args) {
  apply_config_file(cmd, args.config_file);
  args.config.alpha_mode = upm::parse_threshold_mode(args.alpha_mode);
  const auto summary = upm::run_pipeline(args.config);
  for (const auto& r : summary.images) {
    if (r.ok) {
      std::printf("%-24s ok      patterns=%zu items=%zu  %.1f ms\n", r.id.c_str(), r.patterns,
                  r.frequent_items, r.elapsed_ms);
    } else {
      std::printf("%-24s FAILED  %s\n", r.id.c_str(), r.error.c_str());
    }
  }
  std::printf("%zu ok, %zu failed -> %s\n", summary.succeeded, summary.failed,
              args.config.out_dir.string().c_str());
  return summary.succeeded == 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised part mining over CNN activation tensors"};
  app.require_subcommand(1);

  // mine
  MineArgs mine;
  auto* mine_cmd = app.add_subcommand("mine", "Localize object parts for every image in a features directory");
  auto& cfg = mine.config;
  mine_cmd->add_option("--features", cfg.features_dir, "Directory of <id>.stack.npy or <id>.relu5/.pool5.npy")->required();
  mine_cmd->add_option("--out", cfg.out_dir, "Output directory")->required();
  mine_cmd->add_option("--beta", cfg.beta, "Minimum support threshold")->capture_default_str();
  mine_cmd->add_option("--k-parts", cfg.k_parts, "Parts per image")->capture_default_str();
  mine_cmd->add_option("--lambda", cfg.lambda, "Part side as a fraction of the support box")->capture_default_str();
  mine_cmd->add_option("--alpha-mode", mine.alpha_mode, "global | per-map")->capture_default_str();
  mine_cmd->add_option("--connectivity", cfg.connectivity, "4 or 8")->capture_default_str();
  mine_cmd->add_option("--objbox-frac", cfg.objbox_frac, "Object-box binarization fraction of the peak")->capture_default_str();
  mine_cmd->add_option("--max-pattern-len", cfg.max_pattern_len, "Largest itemset mined")->capture_default_str();
  mine_cmd->add_flag("--strict-support", cfg.strict_support, "Require support > beta instead of >=");
  mine_cmd->add_option("--seed", cfg.seed, "k-means seed")->capture_default_str();
  mine_cmd->add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str();
  mine_cmd->add_option("--image-size", cfg.image_size, "Layout frame when no <id>.image.npy is present")->capture_default_str();
  mine_cmd->add_flag("!--no-render", cfg.render, "Skip overlay PPMs");
  mine_cmd->add_flag("--dump", cfg.dump, "Also write transactions, patterns and grid support maps");
  mine_cmd->add_option("--config", mine.config_file, "key = value file; flags override it");

  // align
  upm::AlignConfig align;
  auto* align_cmd = app.add_subcommand("align", "Group mined parts across images by spectral clustering");
  align_cmd->add_option("--layouts", align.layouts_dir, "Directory of <id>.layout.json from `mine`")->required();
  align_cmd->add_option("--features", align.features_dir, "Directory holding <id>.conv5.npy")->required();
  align_cmd->add_option("--out", align.out_dir, "Output directory")->required();
  align_cmd->add_option("--k-parts", align.k_parts, "Number of groups")->capture_default_str();
  align_cmd->add_option("--seed", align.seed, "Clustering seed")->capture_default_str();

  // fuse-train
  upm::FuseTrainConfig fuse;
  std::string model_path;
  auto* fuse_cmd = app.add_subcommand("fuse-train", "Fuse per-stream descriptors and train a linear SVM");
  fuse_cmd->add_option("--features", fuse.features_dir, "Directory holding <id>.blocks.npy")->required();
  fuse_cmd->add_option("--labels", fuse.labels_file, "Lines of '<id> <label>'")->required();
  fuse_cmd->add_option("--out", fuse.out_dir, "Output directory")->required();
  fuse_cmd->add_option("--c", fuse.c_reg, "SVM regularization C")->capture_default_str();
  fuse_cmd->add_option("--seed", fuse.seed, "Coordinate order seed")->capture_default_str();
  fuse_cmd->add_option("--model", model_path, "Predict with an existing model.json instead of training");

  // render
  std::string layout_file, image_file, ppm_out;
  auto* render_cmd = app.add_subcommand("render", "Draw a layout over an image as PPM");
  render_cmd->add_option("--layout", layout_file, "Layout JSON")->required();
  render_cmd->add_option("--image", image_file, "3 x H x W image tensor (.npy)")->required();
  render_cmd->add_option("--out", ppm_out, "Output .ppm")->required();

  // synth
  upm::PlantedOptions planted;
  fs::path synth_out;
  std::size_t synth_count = 8, synth_classes = 2, conv_channels = 32, block_len = 64;
  auto* synth_cmd = app.add_subcommand("synth", "Write planted-part fixtures");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--count", synth_count, "Number of images")->capture_default_str();
  synth_cmd->add_option("--seed", planted.seed, "Base seed")->capture_default_str();
  synth_cmd->add_option("--groups", planted.groups, "Planted part groups")->capture_default_str();
  synth_cmd->add_option("--maps", planted.maps, "Feature maps per image")->capture_default_str();
  synth_cmd->add_option("--grid", planted.grid, "Feature grid side")->capture_default_str();
  synth_cmd->add_option("--image-size", planted.image_size, "Image side in pixels")->capture_default_str();
  synth_cmd->add_option("--classes", synth_classes, "Classes for the fuse-train blocks")->capture_default_str();
  synth_cmd->add_option("--conv-channels", conv_channels, "Channels of the conv5 fixture")->capture_default_str();
  synth_cmd->add_option("--block-len", block_len, "Descriptor length of each fused block")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (mine_cmd->parsed()) return run_mine(*mine_cmd, mine);

    if (align_cmd->parsed()) {
      const auto out = upm::run_alignment(align);
      for (std::size_t g = 0; g < out.result.group_sizes.size(); ++g) {
        std::printf("group %zu: %zu parts, slot %zu\n", g, out.result.group_sizes[g], out.slots.group_slot[g]);
      }
      return 0;
    }

    if (fuse_cmd->parsed()) {
      if (!model_path.empty()) fuse.model = model_path;
      const auto out = upm::run_fuse_train(fuse);
      std::printf("%zu samples, %zu classes, accuracy %.4f\n", out.ids.size(), out.model.classes.size(),
                  out.accuracy);
      return 0;
    }

    if (render_cmd->parsed()) {
      const auto layout = upm::layout_from_json(upm::read_json(layout_file));
      upm::render_overlay(upm::read_tensor(image_file), layout, ppm_out);
      return 0;
    }

    if (synth_cmd->parsed()) {
      fs::create_directories(synth_out);
      std::string labels;
      for (std::size_t i = 0; i < synth_count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "img%04zu", i);
        upm::PlantedOptions o = planted;
        o.seed = upm::splitmix64(planted.seed + i);
        const auto fixture = upm::make_planted_fixture(o);
        upm::write_tensor(fixture.stack, synth_out / (std::string(id) + ".stack.npy"));
        upm::write_tensor(upm::render_fixture_image(fixture, o), synth_out / (std::string(id) + ".image.npy"));
        upm::write_tensor(upm::make_group_features(fixture, o, conv_channels, o.seed + 1),
                          synth_out / (std::string(id) + ".conv5.npy"));
        const std::size_t label = i % std::max<std::size_t>(synth_classes, 1);
        upm::write_tensor(upm::make_class_blocks(label, planted.groups + 2, block_len, o.seed + 2),
                          synth_out / (std::string(id) + ".blocks.npy"));
        labels += std::string(id) + " class" + std::to_string(label) + "\n";

        upm::Json truth;
        truth["centers"] = upm::Json::array();
        for (const auto& c : fixture.image_centers) truth["centers"].push_back({c.x, c.y});
        truth["group_freq"] = fixture.group_freq;
        upm::Json blobs = upm::Json::array();
        for (const auto& b : fixture.blobs) blobs.push_back(upm::box_to_json(b));
        truth["blobs_grid"] = std::move(blobs);
        upm::write_json(truth, synth_out / (std::string(id) + ".truth.json"));
      }
      upm::write_text(labels, synth_out / "labels.txt");
      std::printf("wrote %zu fixtures to %s\n", synth_count, synth_out.string().c_str());
      return 0;
    }
  } catch (const upm::Error& e) {
    std::fprintf(stderr, "upm: %s\n", e.what());
    return e.code() == upm::ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "upm: %s\n", e.what());
    return 1;
  }
  return 0;
}
