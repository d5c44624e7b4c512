#pragma once

#include <cmath>
#include <vector>

#include "hptr/autodiff.hpp"

namespace hptr::ad {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double epsilon = 1e-8;
  double clip_norm = 5.0;  // global-norm clipping; <= 0 disables
};

// Adam with bias correction, preceded by global-norm gradient clipping.
template <class T>
class Adam {
 public:
  Adam(const ParameterSet<T>& params, AdamConfig config) : config_(config), lr_(config.learning_rate) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& v = params.at(i).value;
      m_.push_back(Matrix<T>::Zero(v.rows(), v.cols()));
      v_.push_back(Matrix<T>::Zero(v.rows(), v.cols()));
    }
  }

  // Clips `grads` in place and updates `params`. Returns the pre-clip global norm.
  double step(ParameterSet<T>& params, Gradients<T>& grads) {
    if (!grads.all_finite()) throw NumericError("non-finite gradient");
    const double norm = std::sqrt(grads.squared_norm());
    if (config_.clip_norm > 0 && norm > config_.clip_norm) grads.scale(static_cast<T>(config_.clip_norm / norm));
    ++t_;
    const T b1 = static_cast<T>(config_.beta1), b2 = static_cast<T>(config_.beta2);
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    const T step_size = static_cast<T>(lr_ / c1);
    const T eps = static_cast<T>(config_.epsilon);
    const T inv_sqrt_c2 = static_cast<T>(1.0 / std::sqrt(c2));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const ParamId id{static_cast<std::uint32_t>(i)};
      auto& m = m_[i];
      auto& v = v_[i];
      if (grads.touched(id)) {
        const auto& g = grads.raw(id);
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g.cwiseProduct(g);
      } else {
        m *= b1;
        v *= b2;
      }
      // lr * m_hat / (sqrt(v_hat) + eps)
      params.at(i).value.array() -= step_size * m.array() / (v.array().sqrt() * inv_sqrt_c2 + eps);
    }
    return norm;
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  long steps() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const Matrix<T>& first_moment(std::size_t i) const { return m_[i]; }
  const Matrix<T>& second_moment(std::size_t i) const { return v_[i]; }

 private:
  AdamConfig config_;
  double lr_;
  long t_ = 0;
  std::vector<Matrix<T>> m_, v_;
};

}  // namespace hptr::ad
