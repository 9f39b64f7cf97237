#include "dna/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace dna {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw DataError(name_ + ": truncated checkpoint");
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return std::bit_cast<double>(v);
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<unsigned char>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const PolicyParams<double>& params,
                     const std::filesystem::path& path) {
  std::vector<unsigned char> out(kCheckpointMagic.begin(), kCheckpointMagic.end());
  out.push_back(kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.seq_len()));
  put_u32(out, static_cast<std::uint32_t>(params.feature_dim()));
  put_u32(out, static_cast<std::uint32_t>(params.vocab_size()));
  for (Eigen::Index i = 0; i < params.flat().size(); ++i) put_f64(out, params.flat()(i));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw MissingInputError("cannot open for writing: " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw DataError("write failed: " + path.string());
}

PolicyParams<double> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw MissingInputError("cannot open checkpoint: " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                         std::istreambuf_iterator<char>());
  Reader in(bytes, path.string());
  for (char c : kCheckpointMagic) {
    if (in.u8() != static_cast<unsigned char>(c)) {
      throw DataError(path.string() + ": bad checkpoint magic");
    }
  }
  if (const auto version = in.u8(); version != kCheckpointVersion) {
    throw DataError(path.string() + ": unsupported checkpoint version " +
                    std::to_string(version));
  }
  const auto seq_len = in.u32();
  const auto feature_dim = in.u32();
  const auto vocab_size = in.u32();
  if (seq_len == 0 || feature_dim == 0 || vocab_size < 4 || seq_len > 1024 ||
      feature_dim > (1u << 20) || vocab_size > (1u << 16)) {
    throw DataError(path.string() + ": implausible checkpoint dimensions");
  }
  PolicyParams<double> params(static_cast<int>(seq_len),
                              static_cast<int>(vocab_size),
                              static_cast<int>(feature_dim));
  for (Eigen::Index i = 0; i < params.flat().size(); ++i) params.flat()(i) = in.f64();
  if (!in.at_end()) throw DataError(path.string() + ": trailing bytes in checkpoint");
  if (!params.all_finite()) throw DataError(path.string() + ": non-finite parameters");
  return params;
}

}  // namespace dna
