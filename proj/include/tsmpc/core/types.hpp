#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tsmpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<Vector>;
using ConstVectorRef = Eigen::Ref<const Vector>;
using MatrixRef = Eigen::Ref<Matrix>;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(ConstVectorRef v) { return v.allFinite(); }

inline void require_dim(ConstVectorRef v, Eigen::Index expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(v.size()));
  }
}

inline void require_finite(ConstVectorRef v, const char* what) {
  if (!v.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entry");
}

/// Strongly typed vector for one role in the plant (target state, extra state, input).
template <class Tag>
struct TypedVector {
  Vector values;

  TypedVector() = default;
  explicit TypedVector(Vector v) : values(std::move(v)) {}
  TypedVector(std::initializer_list<double> init) : values(static_cast<Eigen::Index>(init.size())) {
    Eigen::Index i = 0;
    for (double d : init) values[i++] = d;
  }

  static TypedVector zeros(Eigen::Index n) { return TypedVector(Vector::Zero(n)); }

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
  double& operator[](Eigen::Index i) { return values[i]; }
  bool operator==(const TypedVector& o) const {
    return values.size() == o.values.size() && values == o.values;
  }
};

struct TargetTag {};
struct ExtraTag {};
struct InputTag {};

using TargetState = TypedVector<TargetTag>;
using ExtraState = TypedVector<ExtraTag>;
using ControlInput = TypedVector<InputTag>;

/// Timescale parameter in seconds. Always positive and finite.
class Timescale {
 public:
  explicit Timescale(double seconds) : seconds_(seconds) {
    if (!std::isfinite(seconds) || seconds <= 0.0) throw ConfigError("delta must be positive");
  }
  double seconds() const { return seconds_; }
  bool operator==(const Timescale& o) const { return seconds_ == o.seconds_; }

 private:
  double seconds_;
};

}  // namespace tsmpc
