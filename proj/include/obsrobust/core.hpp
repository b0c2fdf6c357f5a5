#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace obsrobust {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr const char* kToolName = "obsrobust";
inline constexpr const char* kToolVersion = "1.0.0";

// Error hierarchy. Everything thrown by the library derives from Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
// The instance exceeds a tractability cap (multiplicity or matching deficiency).
struct CapExceeded : Error {
  using Error::Error;
};

/// Duplicate-free, sorted set of sensor indices. Stored 0-based; every
/// document and report shows them 1-based.
class SensorSubset {
 public:
  SensorSubset() = default;
  explicit SensorSubset(std::vector<int> zero_based);

  static SensorSubset from_one_based(const std::vector<int>& one_based);

  const std::vector<int>& indices() const { return idx_; }
  std::vector<int> one_based() const;
  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  bool contains(int i) const;

  /// Complement within {0, ..., r-1}.
  SensorSubset complement(int r) const;

  friend bool operator==(const SensorSubset&, const SensorSubset&) = default;
  friend auto operator<=>(const SensorSubset& a, const SensorSubset& b) {
    return a.idx_ <=> b.idx_;
  }

 private:
  std::vector<int> idx_;
};

/// Zero/free-parameter pattern. Support entries are (row, col), 0-based,
/// sorted row-major and duplicate-free.
class PatternMatrix {
 public:
  PatternMatrix() = default;
  PatternMatrix(int rows, int cols, std::vector<std::pair<int, int>> support);

  static PatternMatrix from_dense(const Matrix& m);
  static PatternMatrix full(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<std::pair<int, int>>& support() const { return support_; }
  std::size_t nnz() const { return support_.size(); }
  bool contains(int i, int j) const;

  /// Column indices of the free entries in row i, ascending.
  std::vector<int> row(int i) const;
  std::vector<std::vector<int>> row_lists() const;
  PatternMatrix transpose() const;
  PatternMatrix select_rows(const std::vector<int>& keep) const;

  friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::pair<int, int>> support_;
};

/// Structured pair (A-pattern, C-pattern).
class StructuredSystem {
 public:
  StructuredSystem(PatternMatrix a, PatternMatrix c);

  int n() const { return a_.rows(); }
  int r() const { return c_.rows(); }
  const PatternMatrix& a() const { return a_; }
  const PatternMatrix& c() const { return c_; }

  friend bool operator==(const StructuredSystem&, const StructuredSystem&) = default;

 private:
  PatternMatrix a_;
  PatternMatrix c_;
};

/// Numeric pair (A, C). Validated on construction and carries its induced
/// pattern (support = exact nonzeros).
class DenseSystem {
 public:
  DenseSystem(Matrix a, Matrix c, std::vector<std::string> sensor_labels = {});

  int n() const { return static_cast<int>(a_.rows()); }
  int r() const { return static_cast<int>(c_.rows()); }
  const Matrix& a() const { return a_; }
  const Matrix& c() const { return c_; }
  const std::vector<std::string>& sensor_labels() const { return labels_; }
  const StructuredSystem& pattern() const { return pattern_; }

  /// The system with the given sensors removed. Throws if none remain.
  DenseSystem without(const SensorSubset& removed) const;

  friend bool operator==(const DenseSystem& x, const DenseSystem& y) {
    return x.a_ == y.a_ && x.c_ == y.c_ && x.labels_ == y.labels_;
  }

 private:
  Matrix a_;
  Matrix c_;
  std::vector<std::string> labels_;
  StructuredSystem pattern_;
};

class CostVector {
 public:
  explicit CostVector(std::vector<double> costs);
  static CostVector unit(int r) { return CostVector(std::vector<double>(r, 1.0)); }

  std::size_t size() const { return costs_.size(); }
  double operator[](std::size_t i) const { return costs_[i]; }
  const std::vector<double>& values() const { return costs_; }
  double total(const SensorSubset& s) const;

 private:
  std::vector<double> costs_;
};

struct EigenvalueResult {
  Complex value;
  int multiplicity = 0;
  int r_i = 0;
  SensorSubset removal;
  double cost = 0.0;            // c(F_i) when costs were supplied
  int conjugate_of = -1;        // index of the searched partner, or -1
  double wall_ms = 0.0;
  std::vector<std::size_t> layer_sizes;
};

struct RobustnessReport {
  bool observable = true;
  int r_min = 0;
  SensorSubset f_min;
  int eigen_index = -1;         // eigenvalue that realised r_min
  std::vector<EigenvalueResult> per_eigenvalue;
  int s_robust = -1;
  int attack_tolerance = 0;
  std::optional<double> r_c_min;
  std::optional<SensorSubset> f_c_min;
};

/// s-robust index r_min - 1, clamped at -1.
int s_robust_index(int r_min);
/// Tolerable attack count floor((r_min - 1) / 2), clamped at 0.
int attack_tolerance_index(int r_min);

/// Actuator analysis by duality: (A, B) -> (A^T, B^T).
DenseSystem dualize(const Matrix& a, const Matrix& b);

}  // namespace obsrobust
