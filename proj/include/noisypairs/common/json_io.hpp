#pragma once

#include <filesystem>

#include <json.hpp>

namespace noisypairs {

using Json = nlohmann::json;

Json read_json(const std::filesystem::path& path);

/// Writes `value` (pretty-printed, 2-space indent) via a temp file and a rename,
/// so readers never observe a partially written file.
void write_json_atomic(const std::filesystem::path& path, const Json& value);

/// Same temp-then-rename discipline for arbitrary text.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace noisypairs
