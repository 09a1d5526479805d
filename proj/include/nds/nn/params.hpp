#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "nds/common/error.hpp"

namespace nds::nn {

enum class ParamRole { weight, bias, bn_scale, bn_shift, bn_mean, bn_var };

template <typename T>
struct Param {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<T> value;
  ParamRole role = ParamRole::weight;
  bool trainable = true;
  std::size_t layer = 0;  // index into ModelSpec::layers

  // Weights and biases of FC/SC/CONV layers carry the L2 penalty.
  bool penalized() const noexcept { return role == ParamRole::weight || role == ParamRole::bias; }
};

// Named parameter arrays in layer order. Names are "<layer>/<W|b|gamma|beta|mean|var>".
template <typename T>
class ParamStore {
 public:
  std::size_t add(Param<T> p) {
    if (index_.contains(p.name)) throw InvalidArgument("duplicate parameter name: " + p.name);
    index_.emplace(p.name, params_.size());
    params_.push_back(std::move(p));
    return params_.size() - 1;
  }

  std::size_t size() const noexcept { return params_.size(); }
  Param<T>& operator[](std::size_t i) { return params_[i]; }
  const Param<T>& operator[](std::size_t i) const { return params_[i]; }

  bool contains(const std::string& name) const { return index_.contains(name); }
  std::size_t index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InvalidArgument("unknown parameter: " + name);
    return it->second;
  }
  Param<T>& at(const std::string& name) { return params_[index(name)]; }
  const Param<T>& at(const std::string& name) const { return params_[index(name)]; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Param<T>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One gradient array per parameter, index-aligned with the ParamStore.
template <typename T>
using Gradients = std::vector<std::vector<T>>;

}  // namespace nds::nn
