#pragma once

// Inhomogeneity g(x, t) and its evaluation on a fixed set of nodes.

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nlwave/linalg.hpp"

namespace nlwave {

/// g(x, t) as a sum of separable terms p(x) q(t) plus general terms.
/// Separable terms let node-based loads be precomputed once.
class Forcing {
public:
  using Profile = std::function<double(double)>;
  using Envelope = std::function<double(double)>;
  using Field = std::function<double(double, double)>;

  struct Term {
    Profile profile;
    Envelope envelope; // empty means q(t) = 1
  };

  /// g = 0.
  Forcing() = default;

  static Forcing separable(Profile profile, Envelope envelope) {
    Forcing g;
    g.separable_.push_back({std::move(profile), std::move(envelope)});
    return g;
  }

  static Forcing steady(Profile profile) { return separable(std::move(profile), {}); }

  static Forcing general(Field field) {
    Forcing g;
    g.general_.push_back(std::move(field));
    return g;
  }

  Forcing& operator+=(const Forcing& other) {
    separable_.insert(separable_.end(), other.separable_.begin(), other.separable_.end());
    general_.insert(general_.end(), other.general_.begin(), other.general_.end());
    return *this;
  }

  friend Forcing operator+(Forcing a, const Forcing& b) { return a += b; }

  bool empty() const noexcept { return separable_.empty() && general_.empty(); }

  double operator()(double x, double t) const {
    double sum = 0.0;
    for (const auto& term : separable_) {
      sum += term.profile(x) * (term.envelope ? term.envelope(t) : 1.0);
    }
    for (const auto& field : general_) {
      sum += field(x, t);
    }
    return sum;
  }

  const std::vector<Term>& separable_terms() const noexcept { return separable_; }
  const std::vector<Field>& general_terms() const noexcept { return general_; }

private:
  std::vector<Term> separable_;
  std::vector<Field> general_;
};

/// b(t) = T^T g(x_l, t) for a fixed node set x_l and test matrix T
/// (rows indexed by node). Without a test matrix b(t) is the nodal vector.
class LoadEvaluator {
public:
  /// Zero load of dimension `dim`.
  explicit LoadEvaluator(Eigen::Index dim = 0) : dim_(dim) {}

  LoadEvaluator(const Forcing& g, std::vector<double> nodes, std::optional<Matrix> test)
      : nodes_(std::move(nodes)), test_(std::move(test)) {
    dim_ = test_ ? test_->cols() : static_cast<Eigen::Index>(nodes_.size());
    for (const auto& term : g.separable_terms()) {
      Vector values(static_cast<Eigen::Index>(nodes_.size()));
      for (std::size_t l = 0; l < nodes_.size(); ++l) {
        values(static_cast<Eigen::Index>(l)) = term.profile(nodes_[l]);
      }
      Vector reduced = test_ ? Vector(test_->transpose() * values) : values;
      if (term.envelope) {
        separable_.push_back({std::move(reduced), term.envelope});
      } else {
        if (steady_.size() == 0) {
          steady_ = Vector::Zero(dim_);
        }
        steady_ += reduced;
      }
    }
    general_ = g.general_terms();
  }

  Eigen::Index dim() const noexcept { return dim_; }

  bool is_zero() const noexcept {
    return separable_.empty() && general_.empty() && steady_.size() == 0;
  }

  Vector operator()(double t) const {
    Vector b = steady_.size() ? steady_ : Vector::Zero(dim_);
    for (const auto& [vec, envelope] : separable_) {
      b += envelope(t) * vec;
    }
    if (!general_.empty()) {
      Vector values(static_cast<Eigen::Index>(nodes_.size()));
      for (std::size_t l = 0; l < nodes_.size(); ++l) {
        double sum = 0.0;
        for (const auto& field : general_) {
          sum += field(nodes_[l], t);
        }
        values(static_cast<Eigen::Index>(l)) = sum;
      }
      if (test_) {
        b.noalias() += test_->transpose() * values;
      } else {
        b += values;
      }
    }
    return b;
  }

private:
  Eigen::Index dim_ = 0;
  std::vector<double> nodes_;
  std::optional<Matrix> test_;
  Vector steady_;
  std::vector<std::pair<Vector, Forcing::Envelope>> separable_;
  std::vector<Forcing::Field> general_;
};

} // namespace nlwave
