#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace dpkit {

inline constexpr int kSchemaVersion = 1;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// JSON-lines: one JSON document per line, UTF-8, '\n' terminated.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& rows);

nlohmann::json parse_json(const std::string& text);  // ErrorKind::Parse on failure
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace dpkit
