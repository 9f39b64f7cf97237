#include "dna/artifacts.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "dna/errors.hpp"

#ifndef DNA_VERSION
#define DNA_VERSION "0.0.0"
#endif

namespace dna {

std::string code_version() { return "dnatrain " DNA_VERSION; }

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256: init failed");
    }
  }
  void update(const void* data, std::size_t n) {
    EVP_DigestUpdate(ctx_.get(), data, n);
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open: " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

RunDir::RunDir(std::filesystem::path dir, bool force)
    : dir_(std::move(dir)), force_(force) {}

void RunDir::claim(const std::vector<std::string>& names) const {
  if (force_) return;
  for (const auto& name : names) {
    if (std::filesystem::exists(dir_ / name)) {
      throw ConfigError("refusing to overwrite " + (dir_ / name).string() +
                        " (pass --force to replace)");
    }
  }
}

void RunDir::write_text(const std::string& name, const std::string& contents) const {
  std::filesystem::create_directories(dir_);
  std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw MissingInputError("cannot write " + (dir_ / name).string());
  out << contents;
}

std::string Manifest::to_json(const RunDir& dir) const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["code_version"] = code_version();
  j["seed"] = seed;
  j["dataset_sha256"] = dataset_sha256;
  j["inputs"] = inputs;
  j["config"] = config;
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& name : artifacts) files[name] = sha256_file(dir.path(name));
  j["artifacts"] = files;
  return j.dump(2) + "\n";
}

std::string recorded_dataset_sha(const std::filesystem::path& artifact) {
  namespace fs = std::filesystem;
  const fs::path dir = artifact.has_parent_path() ? artifact.parent_path() : fs::path(".");
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (!name.ends_with("_manifest.json")) continue;
    try {
      std::ifstream in(entry.path());
      const auto j = nlohmann::json::parse(in);
      if (j.contains("artifacts") &&
          j["artifacts"].contains(artifact.filename().string())) {
        return j.value("dataset_sha256", "");
      }
    } catch (const nlohmann::json::exception&) {
      continue;
    }
  }
  return "";
}

}  // namespace dna
