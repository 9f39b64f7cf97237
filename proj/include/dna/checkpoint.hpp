#ifndef DNA_CHECKPOINT_HPP_
#define DNA_CHECKPOINT_HPP_

#include <array>
#include <filesystem>

#include "dna/policy.hpp"

namespace dna {

// Binary checkpoint layout, all integers and floats little-endian:
//
//   offset  size  field
//   0       8     magic "DNAPOLCY"
//   8       1     version (= 1)
//   9       4     uint32 seq_len L
//   13      4     uint32 feature_dim d
//   17      4     uint32 vocab_size |V|
//   21      ...   for t in [0, L): W_t row-major (|V| * d float64), b_t (|V|)
inline constexpr std::array<char, 8> kCheckpointMagic = {'D', 'N', 'A', 'P',
                                                         'O', 'L', 'C', 'Y'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

void save_checkpoint(const PolicyParams<double>& params,
                     const std::filesystem::path& path);
PolicyParams<double> load_checkpoint(const std::filesystem::path& path);

}  // namespace dna

#endif  // DNA_CHECKPOINT_HPP_
