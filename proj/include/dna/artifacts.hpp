#ifndef DNA_ARTIFACTS_HPP_
#define DNA_ARTIFACTS_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dna {

std::string code_version();

// Lowercase hex SHA-256 of a file's bytes / of a string.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

// Output directory that refuses to replace existing files unless forced.
class RunDir {
 public:
  RunDir(std::filesystem::path dir, bool force);

  // Throws ConfigError if any target exists and force is off. Called before
  // a command does any work.
  void claim(const std::vector<std::string>& names) const;

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  void write_text(const std::string& name, const std::string& contents) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  bool force_;
};

struct Manifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;     // role -> path
  std::string dataset_sha256;
  std::vector<std::string> artifacts;            // file names in the run dir

  // JSON with config echo, seed, dataset hash, artifact hashes and version.
  std::string to_json(const RunDir& dir) const;
};

// Reads "<dir>/<command>_manifest.json" next to an artifact and returns the
// dataset hash recorded there, or "" if there is none.
std::string recorded_dataset_sha(const std::filesystem::path& artifact);

}  // namespace dna

#endif  // DNA_ARTIFACTS_HPP_
