// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SATBSEP_TENSOR_HPP_
#define SATBSEP_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "satbsep/common.hpp"

namespace satbsep {

// Dense row-major tensor of doubles. Value semantics; shapes are small
// (rank <= 4 in practice).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), v_(count(shape_), 0.0) {}
  Tensor(std::initializer_list<std::size_t> shape)
      : Tensor(std::vector<std::size_t>(shape)) {}

  static std::size_t count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return v_.size(); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  // 2-D / 3-D accessors; no bounds checks in hot paths.
  double& at2(std::size_t i, std::size_t j) { return v_[i * shape_[1] + j]; }
  double at2(std::size_t i, std::size_t j) const { return v_[i * shape_[1] + j]; }
  double& at3(std::size_t c, std::size_t i, std::size_t j) {
    return v_[(c * shape_[1] + i) * shape_[2] + j];
  }
  double at3(std::size_t c, std::size_t i, std::size_t j) const {
    return v_[(c * shape_[1] + i) * shape_[2] + j];
  }

  void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  std::string shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i)
      s += (i ? "," : "") + std::to_string(shape_[i]);
    return s + "]";
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> v_;
};

inline void require_shape(const Tensor& t, const std::vector<std::size_t>& shape,
                          const char* what) {
  if (t.shape() != shape) {
    Tensor want(shape);
    throw ValueError(std::string(what) + ": expected shape " + want.shape_str() +
                     ", got " + t.shape_str());
  }
}

}  // namespace satbsep

#endif  // SATBSEP_TENSOR_HPP_
