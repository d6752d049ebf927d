#include "cavity/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>

#include "cavity/errors.hpp"

namespace cavity {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

bool is_identity(const std::vector<std::size_t>& perm) {
  for (std::size_t k = 0; k < perm.size(); ++k)
    if (perm[k] != k) return false;
  return true;
}

using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims, double fill)
    : dims_(std::move(dims)), data_(product(dims_), fill) {}

DenseTensor DenseTensor::scalar(double v) { return DenseTensor({}, v); }

std::vector<std::size_t> DenseTensor::strides() const {
  std::vector<std::size_t> s(dims_.size(), 1);
  for (std::size_t k = dims_.size(); k-- > 1;) s[k - 1] = s[k] * dims_[k];
  return s;
}

std::size_t DenseTensor::offset(std::initializer_list<std::size_t> idx) const {
  std::size_t off = 0;
  std::size_t k = 0;
  for (std::size_t i : idx) off = off * dims_[k++] + i;
  return off;
}

std::size_t DenseTensor::offset(const std::vector<std::size_t>& idx) const {
  std::size_t off = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) off = off * dims_[k] + idx[k];
  return off;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& o) { return axpy(1.0, o); }
DenseTensor& DenseTensor::operator-=(const DenseTensor& o) { return axpy(-1.0, o); }

DenseTensor& DenseTensor::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

DenseTensor& DenseTensor::axpy(double a, const DenseTensor& o) {
  if (o.empty()) return *this;
  if (empty()) {
    *this = o;
    return *this *= a;
  }
  if (dims_ != o.dims_) throw StructuralError("tensor axpy: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * o.data_[i];
  return *this;
}

void DenseTensor::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

double DenseTensor::norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool DenseTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

DenseTensor permute(const DenseTensor& t, const std::vector<std::size_t>& perm) {
  const std::size_t r = t.rank();
  if (perm.size() != r) throw StructuralError("permute: rank mismatch");
  if (is_identity(perm)) return t;
  std::vector<std::size_t> out_dims(r);
  for (std::size_t k = 0; k < r; ++k) out_dims[k] = t.dims()[perm[k]];
  DenseTensor out(out_dims);
  if (t.empty()) return out;
  const auto in_strides = t.strides();
  std::vector<std::size_t> step(r);
  for (std::size_t k = 0; k < r; ++k) step[k] = in_strides[perm[k]];

  // innermost output mode is walked with a fixed input stride
  const std::size_t inner = out_dims[r - 1];
  const std::size_t inner_step = step[r - 1];
  const std::size_t outer = out.size() / inner;
  std::vector<std::size_t> idx(r, 0);
  const double* src = t.data();
  double* dst = out.data();
  std::size_t base = 0;
  for (std::size_t o = 0; o < outer; ++o) {
    const double* s = src + base;
    for (std::size_t i = 0; i < inner; ++i) dst[i] = s[i * inner_step];
    dst += inner;
    for (std::size_t k = r - 1; k-- > 0;) {
      ++idx[k];
      base += step[k];
      if (idx[k] < out_dims[k]) break;
      base -= step[k] * idx[k];
      idx[k] = 0;
    }
  }
  return out;
}

namespace {

struct ParsedSpec {
  std::string a, b, out;
};

ParsedSpec parse_spec(const std::string& spec) {
  const auto arrow = spec.find("->");
  const auto comma = spec.find(',');
  if (arrow == std::string::npos || comma == std::string::npos || comma > arrow)
    throw StructuralError("contract: malformed pattern '" + spec + "'");
  ParsedSpec p{spec.substr(0, comma), spec.substr(comma + 1, arrow - comma - 1),
               spec.substr(arrow + 2)};
  for (const std::string* s : {&p.a, &p.b, &p.out}) {
    std::string sorted = *s;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw StructuralError("contract: repeated label within one operand in '" + spec + "'");
  }
  return p;
}

}  // namespace

void contract(const std::string& spec, const DenseTensor& a, const DenseTensor& b, double alpha,
              DenseTensor& c, double beta) {
  const ParsedSpec p = parse_spec(spec);
  if (p.a.size() != a.rank() || p.b.size() != b.rank())
    throw StructuralError("contract: operand rank does not match pattern '" + spec + "'");

  std::string free_a, free_b, summed;
  for (char l : p.a) {
    const bool in_b = p.b.find(l) != std::string::npos;
    const bool in_out = p.out.find(l) != std::string::npos;
    if (in_b && in_out) throw StructuralError("contract: batch label unsupported in '" + spec + "'");
    if (!in_b && !in_out) throw StructuralError("contract: dangling label in '" + spec + "'");
    (in_b ? summed : free_a) += l;
  }
  for (char l : p.b) {
    const bool in_a = p.a.find(l) != std::string::npos;
    const bool in_out = p.out.find(l) != std::string::npos;
    if (!in_a && !in_out) throw StructuralError("contract: dangling label in '" + spec + "'");
    if (!in_a) free_b += l;
  }
  for (char l : p.out)
    if (p.a.find(l) == std::string::npos && p.b.find(l) == std::string::npos)
      throw StructuralError("contract: output label absent from inputs in '" + spec + "'");

  auto extent = [&](char l) -> std::size_t {
    const auto ia = p.a.find(l);
    const auto ib = p.b.find(l);
    if (ia != std::string::npos && ib != std::string::npos && a.dims()[ia] != b.dims()[ib])
      throw StructuralError(std::string("contract: extent mismatch for label '") + l + "'");
    return ia != std::string::npos ? a.dims()[ia] : b.dims()[ib];
  };

  std::vector<std::size_t> out_dims;
  for (char l : p.out) out_dims.push_back(extent(l));
  std::size_t m = 1, n = 1, k = 1;
  for (char l : free_a) m *= extent(l);
  for (char l : free_b) n *= extent(l);
  for (char l : summed) k *= extent(l);

  if (c.empty() || beta == 0.0) {
    if (c.dims() != out_dims || c.empty()) c = DenseTensor(out_dims);
    else c.set_zero();
  } else if (c.dims() != out_dims) {
    throw StructuralError("contract: output shape mismatch in '" + spec + "'");
  } else if (beta != 1.0) {
    c *= beta;
  }
  if (a.empty() || b.empty() || alpha == 0.0) return;

  std::vector<std::size_t> perm_a, perm_b, perm_out;
  for (char l : free_a + summed) perm_a.push_back(p.a.find(l));
  for (char l : summed + free_b) perm_b.push_back(p.b.find(l));
  const std::string res_labels = free_a + free_b;
  for (char l : p.out) perm_out.push_back(res_labels.find(l));

  DenseTensor a_tmp, b_tmp;
  const double* pa = a.data();
  const double* pb = b.data();
  if (!is_identity(perm_a)) {
    a_tmp = permute(a, perm_a);
    pa = a_tmp.data();
  }
  if (!is_identity(perm_b)) {
    b_tmp = permute(b, perm_b);
    pb = b_tmp.data();
  }
  ConstMap am(pa, m, k);
  ConstMap bm(pb, k, n);

  if (is_identity(perm_out)) {
    MutMap cm(c.data(), m, n);
    cm.noalias() += alpha * am * bm;
    return;
  }
  std::vector<std::size_t> res_dims;
  for (char l : res_labels) res_dims.push_back(extent(l));
  DenseTensor res(res_dims);
  MutMap rm(res.data(), m, n);
  rm.noalias() = am * bm;
  c.axpy(alpha, permute(res, perm_out));
}

DenseTensor einsum(const std::string& spec, const DenseTensor& a, const DenseTensor& b,
                   double alpha) {
  DenseTensor c;
  contract(spec, a, b, alpha, c, 0.0);
  return c;
}

DenseTensor spin_block_chem(const DenseTensor& spatial) {
  if (spatial.rank() != 4) throw StructuralError("spin_block_chem: rank-4 tensor required");
  const std::size_t n = spatial.dims()[0];
  const std::size_t ns = 2 * n;
  DenseTensor out({ns, ns, ns, ns});
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t q = 0; q < n; ++q) {
            const double* src = &spatial.data()[((p * n + r) * n + q) * n];
            double* dst = &out(p + s1 * n, r + s1 * n, q + s2 * n, s2 * n);
            std::copy(src, src + n, dst);
          }
  return out;
}

DenseTensor antisymmetrize_eri(const DenseTensor& eri_mo_chem) {
  if (eri_mo_chem.rank() != 4) throw StructuralError("antisymmetrize_eri: rank-4 tensor required");
  // <pq|rs> = (pr|qs)
  DenseTensor direct = permute(eri_mo_chem, {0, 2, 1, 3});
  direct -= permute(direct, {0, 1, 3, 2});
  // the (p,q) antisymmetry must be exact even if (pr|qs) = (qs|pr) only holds to rounding
  DenseTensor swapped = permute(direct, {1, 0, 2, 3});
  direct -= swapped;
  direct *= 0.5;
  return direct;
}

RowMatrix mo_transform(const RowMatrix& h, const RowMatrix& coeffs, const RowMatrix& overlap,
                       double tol) {
  const RowMatrix metric = coeffs.transpose() * overlap * coeffs;
  const double dev = (metric - RowMatrix::Identity(metric.rows(), metric.cols())).cwiseAbs().maxCoeff();
  if (dev > tol) throw DataCorruptionError("mo_transform: coefficients not orthonormal");
  return coeffs.transpose() * h * coeffs;
}

DenseTensor mo_transform(const DenseTensor& eri, const RowMatrix& coeffs) {
  if (eri.rank() != 4) throw StructuralError("mo_transform: rank-4 tensor required");
  const auto n_ao = static_cast<Eigen::Index>(coeffs.rows());
  const auto n_mo = static_cast<Eigen::Index>(coeffs.cols());
  for (std::size_t d : eri.dims())
    if (d != static_cast<std::size_t>(n_ao)) throw StructuralError("mo_transform: extent mismatch");

  // Each pass transforms the leading index and rotates it to the back.
  DenseTensor cur = eri;
  std::vector<std::size_t> dims = eri.dims();
  for (int pass = 0; pass < 4; ++pass) {
    const Eigen::Index lead = static_cast<Eigen::Index>(dims[0]);
    const Eigen::Index rest = static_cast<Eigen::Index>(cur.size()) / lead;
    std::vector<std::size_t> nd(dims.begin() + 1, dims.end());
    nd.push_back(static_cast<std::size_t>(n_mo));
    DenseTensor next(nd);
    ConstMap src(cur.data(), lead, rest);
    MutMap dst(next.data(), rest, n_mo);
    dst.noalias() = src.transpose() * coeffs;
    cur = std::move(next);
    dims = std::move(nd);
  }
  return cur;
}

DenseTensor mo_transform(const DenseTensor& eri, const RowMatrix& coeffs, const RowMatrix& overlap,
                         double tol) {
  const RowMatrix metric = coeffs.transpose() * overlap * coeffs;
  const double dev = (metric - RowMatrix::Identity(metric.rows(), metric.cols())).cwiseAbs().maxCoeff();
  if (dev > tol) throw DataCorruptionError("mo_transform: coefficients not orthonormal");
  return mo_transform(eri, coeffs);
}

}  // namespace cavity
