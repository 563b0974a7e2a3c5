#include "nbv/sh/sh.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "nbv/core/errors.hpp"

namespace nbv {

namespace {

void require_unit(const Vec3& d) {
  if (std::abs(d.norm() - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "direction is not unit length: |d| = " << d.norm();
    throw ContractViolation(msg.str());
  }
}

}  // namespace

ShVector sh_basis(const Vec3& d) {
  require_unit(d);
  ShVector out;
  kern::active().sh_basis_batch(&d.x, &d.y, &d.z, 1, out.c.data());
  return out;
}

double sh_eval(const ShVector& coeffs, const Vec3& d) {
  const ShVector basis = sh_basis(d);
  return kern::active().dot64(coeffs.c.data(), basis.c.data());
}

double sh_dot(const ShVector& a, const ShVector& b) {
  return kern::active().dot64(a.c.data(), b.c.data());
}

ShProjector::ShProjector(const std::vector<Vec3>& dirs) : n_(dirs.size()) {
  constexpr int kC = kShCoeffCount;
  if (n_ < static_cast<std::size_t>(kC)) {
    std::ostringstream msg;
    msg << "projection needs at least " << kC << " directions, got " << n_;
    throw RankDeficiencyError(msg.str());
  }
  std::vector<double> xs(n_), ys(n_), zs(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    require_unit(dirs[i]);
    xs[i] = dirs[i].x;
    ys[i] = dirs[i].y;
    zs[i] = dirs[i].z;
  }
  std::vector<double> rows(n_ * kC);
  kern::active().sh_basis_batch(xs.data(), ys.data(), zs.data(), n_, rows.data());

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> design(rows.data(), static_cast<Eigen::Index>(n_), kC);
  const Eigen::MatrixXd normal = design.transpose() * design;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(kC - 1);
  if (!(lo > 0.0) || std::sqrt(hi / lo) >= 1e6) {
    std::ostringstream msg;
    msg << "projection directions are rank-deficient: design condition = "
        << (lo > 0.0 ? std::sqrt(hi / lo) : std::numeric_limits<double>::infinity());
    throw RankDeficiencyError(msg.str());
  }
  cond_ = std::sqrt(hi / lo);

  // Pseudo-inverse (N^-1 A^T), stored row-major so project() is 64 dot
  // products of length n.
  const Eigen::MatrixXd pinv = normal.ldlt().solve(design.transpose());
  pinv_.resize(static_cast<std::size_t>(kC) * n_);
  for (int k = 0; k < kC; ++k)
    for (std::size_t i = 0; i < n_; ++i)
      pinv_[static_cast<std::size_t>(k) * n_ + i] = pinv(k, static_cast<Eigen::Index>(i));
}

ShVector ShProjector::project(const std::vector<double>& values) const {
  if (values.size() != n_) {
    std::ostringstream msg;
    msg << "project: expected " << n_ << " values, got " << values.size();
    throw InvalidInput(msg.str());
  }
  ShVector out;
  for (int k = 0; k < kShCoeffCount; ++k) {
    const double* row = pinv_.data() + static_cast<std::size_t>(k) * n_;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) acc += row[i] * values[i];
    out[k] = acc;
  }
  return out;
}

ShVector project_directions(const std::vector<Vec3>& dirs,
                            const std::vector<double>& values) {
  return ShProjector(dirs).project(values);
}

}  // namespace nbv
