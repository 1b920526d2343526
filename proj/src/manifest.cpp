#include "fbasis/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "fbasis/bundle.hpp"
#include "fbasis/error.hpp"

namespace fbasis {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error(ErrorKind::Io, "sha256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file_bytes(path)); }

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.push_back({path.string(), sha256_file(path)});
}

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs.push_back({path.string(), sha256_file(path)});
}

namespace {

nlohmann::json digests_to_json(const std::vector<FileDigest>& files) {
  auto arr = nlohmann::json::array();
  for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return arr;
}

std::vector<FileDigest> digests_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw Error(ErrorKind::Manifest, std::string("missing array '") + key + "'");
  }
  std::vector<FileDigest> out;
  for (const auto& item : j.at(key)) {
    if (!item.is_object() || !item.contains("path") || !item.contains("sha256") ||
        !item.at("path").is_string() || !item.at("sha256").is_string()) {
      throw Error(ErrorKind::Manifest, std::string("malformed entry in '") + key + "'");
    }
    out.push_back({item.at("path").get<std::string>(), item.at("sha256").get<std::string>()});
  }
  return out;
}

const nlohmann::json& require_object(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_object()) {
    throw Error(ErrorKind::Manifest, std::string("missing object '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},      {"flags", flags},   {"seeds", seeds},
          {"inputs", digests_to_json(inputs)}, {"reports", reports},
          {"outputs", digests_to_json(outputs)}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Manifest, "manifest is not a JSON object");
  if (!j.contains("command") || !j.at("command").is_string()) {
    throw Error(ErrorKind::Manifest, "missing string 'command'");
  }
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.flags = require_object(j, "flags");
  m.seeds = require_object(j, "seeds");
  m.reports = require_object(j, "reports");
  m.inputs = digests_from_json(j, "inputs");
  m.outputs = digests_from_json(j, "outputs");
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << manifest.to_json().dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const auto j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Manifest, path.string() + " is not valid JSON");
  return RunManifest::from_json(j);
}

std::vector<std::string> verify_manifest(const RunManifest& manifest) {
  std::vector<std::string> bad;
  const auto check = [&](const FileDigest& d) {
    std::error_code ec;
    if (!std::filesystem::exists(d.path, ec) || sha256_file(d.path) != d.sha256) bad.push_back(d.path);
  };
  for (const auto& d : manifest.inputs) check(d);
  for (const auto& d : manifest.outputs) check(d);
  return bad;
}

nlohmann::json to_json(const SolverReport& report) {
  return {{"iterations", report.iterations},
          {"costs", report.costs},
          {"grad_norms", report.grad_norms},
          {"step_sizes", report.step_sizes},
          {"final_grad_norm", report.final_grad_norm},
          {"termination", to_string(report.termination)},
          {"elapsed", report.elapsed},
          {"restarted", report.restarted},
          {"fell_back_to_input", report.fell_back_to_input}};
}

}  // namespace fbasis
