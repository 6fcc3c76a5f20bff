#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "socsim/types.hpp"

namespace socsim {

// Dense square matrix of doubles, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Sorted user list with index lookup; the canonical agent order of a run.
class Roster {
 public:
  Roster() = default;
  explicit Roster(std::vector<UserId> users) : users_(std::move(users)) {
    std::sort(users_.begin(), users_.end());
    for (std::size_t i = 0; i < users_.size(); ++i) {
      if (users_[i].empty()) throw ConfigError("empty user id");
      if (!index_.emplace(users_[i], i).second) throw ConfigError("duplicate user id " + users_[i]);
    }
  }

  std::size_t size() const { return users_.size(); }
  const std::vector<UserId>& users() const { return users_; }
  const UserId& operator[](std::size_t i) const { return users_[i]; }
  bool contains(const UserId& u) const { return index_.count(u) > 0; }

  std::size_t index(const UserId& u) const {
    auto it = index_.find(u);
    if (it == index_.end()) throw CorruptionError("unknown user id '" + u + "'");
    return it->second;
  }

 private:
  std::vector<UserId> users_;
  std::map<UserId, std::size_t> index_;
};

}  // namespace socsim
