#include "upm/serialize.hpp"

#include <fstream>
#include <iterator>

namespace upm {

namespace {

template <typename F>
auto parse_field(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid ") + what + " JSON: " + e.what());
  }
}

}  // namespace

Json box_to_json(const Box& b) { return Json::array({b.x, b.y, b.width, b.height}); }

Box box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorCode::ConfigError, "box must be a 4-element array");
  }
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

Json layout_to_json(const PartLayout& layout, const std::string& image) {
  Json j;
  j["image"] = image;
  j["image_size"] = Json::array({layout.image_width, layout.image_height});
  j["object_box"] = box_to_json(layout.object_box);
  j["side"] = layout.side;
  Json parts = Json::array();
  for (std::size_t i = 0; i < layout.k(); ++i) {
    Json p;
    p["center"] = Json::array({layout.centers[i].x, layout.centers[i].y});
    p["box"] = box_to_json(layout.part_boxes[i]);
    parts.push_back(std::move(p));
  }
  j["parts"] = std::move(parts);
  return j;
}

PartLayout layout_from_json(const Json& j) {
  return parse_field("layout", [&] {
    PartLayout layout;
    layout.image_width = j.at("image_size").at(0).get<std::size_t>();
    layout.image_height = j.at("image_size").at(1).get<std::size_t>();
    layout.object_box = box_from_json(j.at("object_box"));
    layout.support_box = layout.object_box;
    layout.side = j.at("side").get<int>();
    for (const auto& p : j.at("parts")) {
      const PixelPoint c{p.at("center").at(0).get<int>(), p.at("center").at(1).get<int>()};
      layout.centers.push_back(c);
      layout.masks.push_back(part_mask(c, layout.side, layout.image_height, layout.image_width));
      layout.part_boxes.push_back(box_from_json(p.at("box")));
    }
    return layout;
  });
}

Json alignment_to_json(const AlignmentResult& result) {
  Json j;
  j["labels"] = result.labels;
  j["groups"] = result.groups();
  return j;
}

AlignmentResult alignment_from_json(const Json& j) {
  return parse_field("alignment", [&] {
    AlignmentResult r;
    r.labels = j.at("labels").get<std::vector<std::size_t>>();
    r.group_sizes.assign(j.at("groups").size(), 0);
    for (auto l : r.labels) {
      if (l >= r.group_sizes.size()) throw Error(ErrorCode::ConfigError, "label outside group range");
      ++r.group_sizes[l];
    }
    return r;
  });
}

Json model_to_json(const LinearModel& model) {
  Json j;
  j["classes"] = model.classes;
  j["weights"] = model.weights;
  j["biases"] = model.biases;
  j["c_reg"] = model.c_reg;
  return j;
}

LinearModel model_from_json(const Json& j) {
  return parse_field("model", [&] {
    LinearModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.biases = j.at("biases").get<std::vector<double>>();
    m.c_reg = j.at("c_reg").get<double>();
    if (m.weights.size() != m.classes.size() || m.biases.size() != m.classes.size()) {
      throw Error(ErrorCode::ConfigError, "model has mismatched class/weight/bias counts");
    }
    return m;
  });
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

void write_json(const Json& j, const std::filesystem::path& path) { write_text(j.dump(2) + "\n", path); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace upm
