#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace ctrag {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kManifestFile = "manifest.json";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Hash over the dataset files' names and contents.
std::string dataset_hash(const std::filesystem::path& dataset_dir);

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::string corpus_hash;
  std::map<std::string, std::string> artifacts;  // file name -> sha256
  std::string tool_version = std::string(kToolVersion);
  std::string started_at;
  std::string finished_at;
};

/// Hashes each artifact file (names relative to `dir`) and writes dir/manifest.json.
void write_manifest(const std::filesystem::path& dir, RunManifest manifest);
/// Throws ParseError when the file is missing fields.
RunManifest read_manifest(const std::filesystem::path& dir);

/// Writes `content` to `path` in binary mode, throwing std::runtime_error on failure.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace ctrag
