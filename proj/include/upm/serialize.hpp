#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "upm/aligner.hpp"
#include "upm/classifier.hpp"
#include "upm/localizer.hpp"

namespace upm {

using Json = nlohmann::ordered_json;

/// {"image", "image_size": [w, h], "object_box": [x, y, w, h], "side",
///  "parts": [{"center": [x, y], "box": [x, y, w, h]}, ...]}
Json layout_to_json(const PartLayout& layout, const std::string& image);

/// Rebuilds a layout (masks included) from its JSON form.
PartLayout layout_from_json(const Json& j);

/// {"labels": [...], "groups": [[row, ...], ...]}
Json alignment_to_json(const AlignmentResult& result);
AlignmentResult alignment_from_json(const Json& j);

/// {"classes", "weights", "biases", "c_reg"}
Json model_to_json(const LinearModel& model);
LinearModel model_from_json(const Json& j);

Json box_to_json(const Box& b);
Box box_from_json(const Json& j);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace upm
