#ifndef DNA_POLICY_HPP_
#define DNA_POLICY_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dna/errors.hpp"
#include "dna/rng.hpp"
#include "dna/types.hpp"

namespace dna {

// Position-indexed linear-softmax policy parameters.
//
// Position t owns a weight matrix W_t (|V| x d, row-major) and a bias b_t
// (|V|). All blocks live in one flat vector laid out as
//   [W_0, b_0, W_1, b_1, ..., W_{L-1}, b_{L-1}]
// so optimizers and finite-difference checks can treat the parameters as a
// single point in R^n. Gradients use the same type.
template <typename Scalar>
class PolicyParams {
 public:
  using WeightMap = Eigen::Map<MatrixX<Scalar>>;
  using ConstWeightMap = Eigen::Map<const MatrixX<Scalar>>;
  using BiasMap = Eigen::Map<VectorX<Scalar>>;
  using ConstBiasMap = Eigen::Map<const VectorX<Scalar>>;

  PolicyParams() = default;

  PolicyParams(int seq_len, int vocab_size, int feature_dim)
      : seq_len_(seq_len), vocab_size_(vocab_size), feature_dim_(feature_dim) {
    if (seq_len < 1 || vocab_size < 1 || feature_dim < 1) {
      throw ShapeError("PolicyParams: dimensions must be positive");
    }
    flat_ = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(seq_len) *
                                  block_size());
  }

  static PolicyParams gaussian(int seq_len, int vocab_size, int feature_dim,
                               double stddev, Rng& rng) {
    PolicyParams p(seq_len, vocab_size, feature_dim);
    for (Eigen::Index i = 0; i < p.flat_.size(); ++i) {
      p.flat_(i) = static_cast<Scalar>(stddev * rng.normal());
    }
    return p;
  }

  int seq_len() const { return seq_len_; }
  int vocab_size() const { return vocab_size_; }
  int feature_dim() const { return feature_dim_; }
  int num_options() const { return Vocabulary::options_for_size(vocab_size_); }
  Eigen::Index block_size() const {
    return static_cast<Eigen::Index>(vocab_size_) * (feature_dim_ + 1);
  }

  VectorX<Scalar>& flat() { return flat_; }
  const VectorX<Scalar>& flat() const { return flat_; }

  WeightMap weight(int t) {
    return WeightMap(flat_.data() + t * block_size(), vocab_size_,
                     feature_dim_);
  }
  ConstWeightMap weight(int t) const {
    return ConstWeightMap(flat_.data() + t * block_size(), vocab_size_,
                          feature_dim_);
  }
  BiasMap bias(int t) {
    return BiasMap(flat_.data() + t * block_size() +
                       static_cast<Eigen::Index>(vocab_size_) * feature_dim_,
                   vocab_size_);
  }
  ConstBiasMap bias(int t) const {
    return ConstBiasMap(flat_.data() + t * block_size() +
                            static_cast<Eigen::Index>(vocab_size_) *
                                feature_dim_,
                        vocab_size_);
  }

  bool same_shape(const PolicyParams& other) const {
    return seq_len_ == other.seq_len_ && vocab_size_ == other.vocab_size_ &&
           feature_dim_ == other.feature_dim_;
  }
  bool all_finite() const { return flat_.allFinite(); }

  PolicyParams zeros_like() const {
    return PolicyParams(seq_len_, vocab_size_, feature_dim_);
  }

  template <typename Other>
  PolicyParams<Other> cast() const {
    PolicyParams<Other> out(seq_len_, vocab_size_, feature_dim_);
    out.flat() = flat_.template cast<Other>();
    return out;
  }

 private:
  int seq_len_ = 0;
  int vocab_size_ = 0;
  int feature_dim_ = 0;
  VectorX<Scalar> flat_;
};

template <typename Scalar>
struct Response {
  std::vector<int> tokens;
  VectorX<Scalar> per_token_logprob;
  Scalar total_logprob = 0;
};

namespace detail {

template <typename Scalar, typename Derived>
void check_obs(const PolicyParams<Scalar>& params,
               const Eigen::MatrixBase<Derived>& obs) {
  if (obs.size() != params.feature_dim()) {
    throw ShapeError("observation has length " + std::to_string(obs.size()) +
                     ", policy expects " +
                     std::to_string(params.feature_dim()));
  }
}

template <typename Scalar>
void check_position(const PolicyParams<Scalar>& params, int position) {
  if (position < 0 || position >= params.seq_len()) {
    throw ShapeError("position " + std::to_string(position) +
                     " outside [0, " + std::to_string(params.seq_len()) + ")");
  }
}

template <typename Scalar>
void check_tokens(const PolicyParams<Scalar>& params,
                  std::span<const int> tokens) {
  if (static_cast<int>(tokens.size()) != params.seq_len()) {
    throw ShapeError("token sequence has length " +
                     std::to_string(tokens.size()) + ", expected " +
                     std::to_string(params.seq_len()));
  }
  for (int tok : tokens) {
    if (tok < 0 || tok >= params.vocab_size()) {
      throw ShapeError("token id " + std::to_string(tok) +
                       " outside vocabulary of size " +
                       std::to_string(params.vocab_size()));
    }
  }
}

// Max-shifted log-softmax.
template <typename Scalar>
VectorX<Scalar> log_softmax(const VectorX<Scalar>& logits) {
  const Scalar shift = logits.maxCoeff();
  const VectorX<Scalar> shifted = logits.array() - shift;
  const Scalar log_norm = std::log(shifted.array().exp().sum());
  return shifted.array() - log_norm;
}

template <typename Scalar>
int argmax_first(const VectorX<Scalar>& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

}  // namespace detail

template <typename Scalar, typename Derived>
VectorX<Scalar> token_logits(const PolicyParams<Scalar>& params,
                             const Eigen::MatrixBase<Derived>& obs,
                             int position) {
  detail::check_obs(params, obs);
  detail::check_position(params, position);
  return params.weight(position) * obs.template cast<Scalar>() +
         params.bias(position);
}

template <typename Scalar, typename Derived>
VectorX<Scalar> token_log_distribution(const PolicyParams<Scalar>& params,
                                       const Eigen::MatrixBase<Derived>& obs,
                                       int position) {
  return detail::log_softmax<Scalar>(token_logits(params, obs, position));
}

// softmax(W_t obs + b_t).
template <typename Scalar, typename Derived>
VectorX<Scalar> token_distribution(const PolicyParams<Scalar>& params,
                                   const Eigen::MatrixBase<Derived>& obs,
                                   int position) {
  return token_log_distribution(params, obs, position).array().exp();
}

template <typename Scalar, typename Derived>
Response<Scalar> sequence_logprob(const PolicyParams<Scalar>& params,
                                  const Eigen::MatrixBase<Derived>& obs,
                                  std::span<const int> tokens) {
  detail::check_obs(params, obs);
  detail::check_tokens(params, tokens);
  Response<Scalar> r;
  r.tokens.assign(tokens.begin(), tokens.end());
  r.per_token_logprob.resize(params.seq_len());
  for (int t = 0; t < params.seq_len(); ++t) {
    r.per_token_logprob(t) = token_log_distribution(params, obs, t)(tokens[t]);
  }
  r.total_logprob = r.per_token_logprob.sum();
  return r;
}

// Draws one token per position from softmax(logits / temperature). A
// temperature of zero decodes greedily (first argmax) and never touches rng.
// Reported log-probabilities are always those of the temperature-1 policy.
template <typename Scalar, typename Derived>
Response<Scalar> sample_response(const PolicyParams<Scalar>& params,
                                 const Eigen::MatrixBase<Derived>& obs,
                                 Rng& rng, double temperature) {
  detail::check_obs(params, obs);
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ShapeError("temperature must be finite and >= 0");
  }
  Response<Scalar> r;
  r.tokens.resize(static_cast<std::size_t>(params.seq_len()));
  r.per_token_logprob.resize(params.seq_len());
  for (int t = 0; t < params.seq_len(); ++t) {
    const VectorX<Scalar> logits = token_logits(params, obs, t);
    const VectorX<Scalar> logp = detail::log_softmax<Scalar>(logits);
    int tok;
    if (temperature == 0.0) {
      tok = detail::argmax_first(logits);
    } else {
      const VectorX<Scalar> tempered = detail::log_softmax<Scalar>(
          VectorX<Scalar>(logits / static_cast<Scalar>(temperature)));
      const double u = rng.uniform();
      double cumulative = 0.0;
      tok = static_cast<int>(logits.size()) - 1;
      for (int v = 0; v < logits.size(); ++v) {
        cumulative += static_cast<double>(std::exp(tempered(v)));
        if (u < cumulative) {
          tok = v;
          break;
        }
      }
    }
    r.tokens[static_cast<std::size_t>(t)] = tok;
    r.per_token_logprob(t) = logp(tok);
  }
  r.total_logprob = r.per_token_logprob.sum();
  return r;
}

template <typename Scalar, typename Derived>
Response<Scalar> greedy_response(const PolicyParams<Scalar>& params,
                                 const Eigen::MatrixBase<Derived>& obs) {
  Rng unused(0);
  return sample_response(params, obs, unused, 0.0);
}

// grad += sum_t token_weights[t] * d/dtheta log pi(tokens[t] | obs, t).
// Per position: dW_t = (onehot(tok) - p_t) obs^T, db_t = onehot(tok) - p_t.
template <typename Scalar, typename Derived, typename WeightsDerived>
void accumulate_logprob_grad(const PolicyParams<Scalar>& params,
                             const Eigen::MatrixBase<Derived>& obs,
                             std::span<const int> tokens,
                             const Eigen::MatrixBase<WeightsDerived>& token_weights,
                             PolicyParams<Scalar>& grad) {
  detail::check_obs(params, obs);
  detail::check_tokens(params, tokens);
  if (!grad.same_shape(params)) throw ShapeError("gradient shape mismatch");
  const VectorX<Scalar> x = obs.template cast<Scalar>();
  for (int t = 0; t < params.seq_len(); ++t) {
    const Scalar w = token_weights(t);
    if (w == Scalar(0)) continue;
    VectorX<Scalar> delta = -token_distribution(params, x, t);
    delta(tokens[t]) += Scalar(1);
    delta *= w;
    grad.weight(t).noalias() += delta * x.transpose();
    grad.bias(t) += delta;
  }
}

// Gradient of total_logprob with respect to every parameter.
template <typename Scalar, typename Derived>
PolicyParams<Scalar> logprob_grad(const PolicyParams<Scalar>& params,
                                  const Eigen::MatrixBase<Derived>& obs,
                                  std::span<const int> tokens) {
  PolicyParams<Scalar> grad = params.zeros_like();
  accumulate_logprob_grad(params, obs, tokens,
                          VectorX<Scalar>::Ones(params.seq_len()), grad);
  return grad;
}

}  // namespace dna

#endif  // DNA_POLICY_HPP_
