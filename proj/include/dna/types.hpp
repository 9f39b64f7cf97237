#ifndef DNA_TYPES_HPP_
#define DNA_TYPES_HPP_

#include <Eigen/Dense>

namespace dna {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// Token layout: OPT_0 .. OPT_{K-1}, ANS_OPEN, ANS_CLOSE.
class Vocabulary {
 public:
  explicit Vocabulary(int num_options) : num_options_(num_options) {}

  int num_options() const { return num_options_; }
  int size() const { return num_options_ + 2; }
  int option(int k) const { return k; }
  int ans_open() const { return num_options_; }
  int ans_close() const { return num_options_ + 1; }
  bool is_option(int token) const {
    return token >= 0 && token < num_options_;
  }

  static int options_for_size(int vocab_size) { return vocab_size - 2; }

 private:
  int num_options_;
};

}  // namespace dna

#endif  // DNA_TYPES_HPP_
