#include "ctrag/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ctrag/corpus.hpp"
#include "ctrag/errors.hpp"

namespace ctrag {

namespace {

std::string hex(const unsigned char* data, unsigned int n) {
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", data[i]);
    out += buf;
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  return hex(digest.data(), len);
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string dataset_hash(const std::filesystem::path& dataset_dir) {
  std::string listing;
  for (auto name : kDatasetFiles) {
    listing += std::string(name) + " " + sha256_file(dataset_dir / name) + "\n";
  }
  return sha256_hex(listing);
}

void write_manifest(const std::filesystem::path& dir, RunManifest manifest) {
  for (auto& [name, hash] : manifest.artifacts) hash = sha256_file(dir / name);
  nlohmann::json j = {{"command", manifest.command},
                      {"config", manifest.config},
                      {"corpus_hash", manifest.corpus_hash},
                      {"artifacts", manifest.artifacts},
                      {"tool_version", manifest.tool_version},
                      {"started_at", manifest.started_at},
                      {"finished_at", manifest.finished_at}};
  write_file(dir / kManifestFile, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestFile;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 1, "manifest", e.what());
  } catch (const std::runtime_error& e) {
    throw ParseError(path.string(), 0, "manifest", e.what());
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.corpus_hash = j.at("corpus_hash").get<std::string>();
    m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 1, "manifest", e.what());
  }
  return m;
}

}  // namespace ctrag
