#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraudgraph {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles. Node states are stacked as rows.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ·b and a·bᵀ without materializing the transpose; used by backward passes.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix relu(const Matrix& m);

/// Seeded generator. Wraps mt19937_64 and does its own distribution
/// transforms so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  std::size_t below(std::size_t n);  // [0, n), n > 0
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; derives independent child seeds from one root.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

Matrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng);

/// One named parameter tensor as seen by the gradient checker. `value` is
/// perturbed in place, so the loss callback must read parameters through it.
struct ParamSlot {
  std::string path;
  std::span<double> value;
  std::span<const double> analytic;
  std::size_t cols = 1;
};

struct GradReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  // Max relative error per tensor path.
  std::map<std::string, double> per_param_errors;
  double tolerance = 0.0;
  std::size_t scalars_checked = 0;

  bool passed() const { return max_rel_error <= tolerance; }
};

/// Central-difference check of every scalar in `params`. Relative error is
/// |a - n| / max(|a|, |n|, 1e-8). Throws std::runtime_error if the loss turns
/// non-finite while probing.
GradReport check_gradients(const std::function<double()>& loss, std::span<const ParamSlot> params,
                           double epsilon = 1e-5, double tolerance = 1e-4);

}  // namespace fraudgraph
