#pragma once

#include <cstddef>
#include <deque>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cavity {

/// Row-major dense tensor. A tensor with no storage is treated as an
/// implicit zero by the contraction helpers.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<std::size_t> dims, double fill = 0.0);

  static DenseTensor scalar(double v);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  template <typename... I>
  double& operator()(I... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <typename... I>
  double operator()(I... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  double& at(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }
  double at(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }

  std::vector<std::size_t> strides() const;

  DenseTensor& operator+=(const DenseTensor& o);
  DenseTensor& operator-=(const DenseTensor& o);
  DenseTensor& operator*=(double s);
  /// this += a * o
  DenseTensor& axpy(double a, const DenseTensor& o);

  void set_zero();
  double norm() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t offset(std::initializer_list<std::size_t> idx) const;
  std::size_t offset(const std::vector<std::size_t>& idx) const;

  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double s, DenseTensor a);

/// out[i_0..] = t[i_perm[0]..]; output mode k takes input mode perm[k].
DenseTensor permute(const DenseTensor& t, const std::vector<std::size_t>& perm);

/// Einsum-style pairwise contraction: c <- alpha * (a x b) + beta * c.
/// Pattern "ijae,be->ijab". Each label appears in exactly one of
/// {a and b, a and output, b and output}.
void contract(const std::string& spec, const DenseTensor& a, const DenseTensor& b, double alpha,
              DenseTensor& c, double beta);

/// Allocating form of contract with beta = 0.
DenseTensor einsum(const std::string& spec, const DenseTensor& a, const DenseTensor& b,
                   double alpha = 1.0);

/// Spin-blocked chemists' (pr|qs) -> <pq||rs> = (pr|qs) - (ps|qr).
DenseTensor antisymmetrize_eri(const DenseTensor& eri_mo_chem);

/// Spatial chemists' tensor -> spin-blocked chemists' tensor (spin-forbidden zero).
DenseTensor spin_block_chem(const DenseTensor& spatial);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// C^T h C with orthonormality check against the overlap.
RowMatrix mo_transform(const RowMatrix& h, const RowMatrix& coeffs, const RowMatrix& overlap,
                       double tol = 1e-8);
/// Four quarter transforms of a chemists' tensor (no orthonormality check).
DenseTensor mo_transform(const DenseTensor& eri, const RowMatrix& coeffs);
/// Checked form of the two-body transform.
DenseTensor mo_transform(const DenseTensor& eri, const RowMatrix& coeffs, const RowMatrix& overlap,
                         double tol = 1e-8);

/// Pulay DIIS history.
struct DiisState {
  explicit DiisState(std::size_t capacity = 5) : capacity(capacity) {}
  void push(Eigen::VectorXd parameters, Eigen::VectorXd residual);
  void clear() { history.clear(); }

  std::size_t capacity;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;
};

/// Extrapolation weights; drops oldest entries while the B matrix is singular.
Eigen::VectorXd diis_coefficients(DiisState& state);
Eigen::VectorXd diis_extrapolate(DiisState& state);

}  // namespace cavity
