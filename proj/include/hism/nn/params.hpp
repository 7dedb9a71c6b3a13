#pragma once

#include <map>
#include <string>
#include <vector>

#include "hism/error.hpp"
#include "hism/nn/tensor.hpp"

namespace hism::nn {

/// Gradient buffers, index-aligned with a ParameterStore's entries.
template <class T>
struct Gradients {
  std::vector<std::vector<T>> tensors;

  void zero() {
    for (auto& t : tensors) std::fill(t.begin(), t.end(), T{});
  }
  void add(const Gradients& other) {
    for (std::size_t i = 0; i < tensors.size(); ++i)
      for (std::size_t k = 0; k < tensors[i].size(); ++k) tensors[i][k] += other.tensors[i][k];
  }
  void scale(T s) {
    for (auto& t : tensors)
      for (auto& v : t) v *= s;
  }
};

/// Named parameter tensors in insertion order, with Adam moments.
template <class T>
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    Tensor<T> value;
    std::vector<T> m;
    std::vector<T> v;
  };

  std::size_t add(const std::string& name, Shape shape) {
    if (index_.count(name)) throw Error(ErrorCode::invalid_argument, "duplicate parameter " + name);
    const std::size_t n = shape_size(shape);
    entries_.push_back({name, Tensor<T>(std::move(shape)), std::vector<T>(n), std::vector<T>(n)});
    index_[name] = entries_.size() - 1;
    return entries_.size() - 1;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  std::size_t index(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorCode::shape_mismatch, "missing parameter " + name);
    return it->second;
  }

  Tensor<T>& value(std::size_t i) { return entries_[i].value; }
  const Tensor<T>& value(std::size_t i) const { return entries_[i].value; }
  Tensor<T>& value(const std::string& name) { return entries_[index(name)].value; }
  const Tensor<T>& value(const std::string& name) const { return entries_[index(name)].value; }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t tensor_count() const { return entries_.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  Gradients<T> zero_gradients() const {
    Gradients<T> g;
    for (const auto& e : entries_) g.tensors.emplace_back(e.value.size(), T{});
    return g;
  }

  void reset_optimizer() {
    for (auto& e : entries_) {
      std::fill(e.m.begin(), e.m.end(), T{});
      std::fill(e.v.begin(), e.v.end(), T{});
    }
    step = 0;
  }

  template <class U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const auto& e : entries_) out.add(e.name, e.value.shape) ;
    for (std::size_t i = 0; i < entries_.size(); ++i)
      out.value(i).data.assign(entries_[i].value.data.begin(), entries_[i].value.data.end());
    return out;
  }

  /// Number of Adam steps taken.
  int step = 0;

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace hism::nn
