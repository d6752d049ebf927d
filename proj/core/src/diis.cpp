#include <Eigen/LU>

#include "cavity/errors.hpp"
#include "cavity/tensor.hpp"

namespace cavity {

void DiisState::push(Eigen::VectorXd parameters, Eigen::VectorXd residual) {
  if (!history.empty() && (history.front().first.size() != parameters.size() ||
                           history.front().second.size() != residual.size()))
    throw StructuralError("DIIS: vector length changed within history");
  history.emplace_back(std::move(parameters), std::move(residual));
  while (history.size() > capacity) history.pop_front();
}

Eigen::VectorXd diis_coefficients(DiisState& state) {
  if (state.history.empty()) throw StructuralError("DIIS: empty history");
  while (state.history.size() > 1) {
    const auto n = static_cast<Eigen::Index>(state.history.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        b(i, j) = b(j, i) = state.history[i].second.dot(state.history[j].second);
    const double scale = b.topLeftCorner(n, n).diagonal().maxCoeff();
    if (scale > 0.0) b.topLeftCorner(n, n) /= scale;
    b.row(n).head(n).setConstant(-1.0);
    b.col(n).head(n).setConstant(-1.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = -1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    lu.setThreshold(1e-14);
    if (scale > 0.0 && lu.isInvertible()) {
      Eigen::VectorXd c = lu.solve(rhs);
      if (c.allFinite()) return c.head(n);
    }
    state.history.pop_front();
  }
  return Eigen::VectorXd::Ones(1);
}

Eigen::VectorXd diis_extrapolate(DiisState& state) {
  const Eigen::VectorXd c = diis_coefficients(state);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(state.history.front().first.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) out += c(k) * state.history[k].first;
  return out;
}

}  // namespace cavity
