// SPDX-License-Identifier: Apache-2.0
#include "modcalc/core/grid.hpp"

#include <cmath>
#include <sstream>

namespace modcalc {

OrderedBasis::OrderedBasis(Eigen::MatrixXd columns)
    : columns_(std::move(columns)) {
  if (columns_.rows() != columns_.cols() || columns_.rows() == 0) {
    throw DimensionError("basis matrix must be square and non-empty");
  }
  det_ = columns_.determinant();
  if (!std::isfinite(det_) || det_ == 0.0) {
    throw DimensionError("basis matrix must be invertible");
  }
}

OrderedBasis OrderedBasis::identity(int dim) {
  return OrderedBasis(Eigen::MatrixXd::Identity(dim, dim));
}

bool OrderedBasis::is_identity(Real tol) const {
  return (columns_ - Eigen::MatrixXd::Identity(dim(), dim()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

bool OrderedBasis::is_scaled_permutation(std::vector<int>* axis_of,
                                         Eigen::VectorXd* scale,
                                         Real tol) const {
  const int d = dim();
  std::vector<int> axis(d, -1);
  Eigen::VectorXd s(d);
  std::vector<bool> used(d, false);
  for (int k = 0; k < d; ++k) {
    int hit = -1;
    for (int r = 0; r < d; ++r) {
      if (std::abs(columns_(r, k)) > tol) {
        if (hit >= 0) return false;  // two nonzero rows in one column
        hit = r;
      }
    }
    if (hit < 0 || used[hit]) return false;
    used[hit] = true;
    axis[k] = hit;
    s[k] = columns_(hit, k);
  }
  if (axis_of) *axis_of = std::move(axis);
  if (scale) *scale = std::move(s);
  return true;
}

UniformGrid::UniformGrid(OrderedBasis basis_in, std::vector<Index> counts_in,
                         Eigen::ArrayXd steps_in, Eigen::ArrayXd offsets_in)
    : basis(std::move(basis_in)),
      counts(std::move(counts_in)),
      steps(std::move(steps_in)),
      offsets(std::move(offsets_in)) {
  const int d = basis.dim();
  if (static_cast<int>(counts.size()) != d || steps.size() != d ||
      offsets.size() != d) {
    throw DimensionError("grid axis data must match basis dimension");
  }
  for (Index n : counts) {
    if (n < 1) throw DimensionError("grid counts must be positive");
  }
  if ((steps <= 0.0).any()) {
    throw DimensionError("grid steps must be positive");
  }
  if (!steps.isFinite().all() || !offsets.isFinite().all()) {
    throw DimensionError("grid steps/offsets must be finite");
  }
}

UniformGrid UniformGrid::centered(int dim, Index n, Real half_width) {
  return centered(std::vector<Index>(dim, n),
                  Eigen::ArrayXd::Constant(dim, half_width));
}

UniformGrid UniformGrid::centered(const std::vector<Index>& n,
                                  const Eigen::ArrayXd& half_width) {
  const int d = static_cast<int>(n.size());
  Eigen::ArrayXd steps(d), offsets(d);
  for (int k = 0; k < d; ++k) {
    steps[k] = 2.0 * half_width[k] / static_cast<Real>(n[k]);
    offsets[k] = -half_width[k] + 0.5 * steps[k];
  }
  return UniformGrid(OrderedBasis::identity(d), n, steps, offsets);
}

Index UniformGrid::size() const { return index_count(counts); }

Real UniformGrid::cell_volume() const {
  return std::abs(basis.det()) * steps.prod();
}

Eigen::VectorXd UniformGrid::coordinates(const MultiIndex& j) const {
  const int d = dim();
  Eigen::VectorXd c(d);
  for (int k = 0; k < d; ++k) c[k] = coordinate(k, j[k]);
  return c;
}

Eigen::VectorXd UniformGrid::point(const MultiIndex& j) const {
  if (basis.is_identity()) return coordinates(j);
  return basis.matrix() * coordinates(j);
}

bool UniformGrid::same_layout(const UniformGrid& other, Real tol) const {
  if (dim() != other.dim() || counts != other.counts) return false;
  if (((steps - other.steps).abs() > tol * steps.abs().max(1.0)).any())
    return false;
  if (((offsets - other.offsets).abs() > tol * steps.abs().max(1.0)).any())
    return false;
  return (basis.matrix() - other.basis.matrix()).cwiseAbs().maxCoeff() <= tol;
}

Index linear_index(const std::vector<Index>& counts, const MultiIndex& j) {
  Index lin = 0;
  for (size_t k = 0; k < counts.size(); ++k) {
    lin = lin * counts[k] + j[k];
  }
  return lin;
}

void unravel_index(const std::vector<Index>& counts, Index linear,
                   MultiIndex& j) {
  j.resize(counts.size());
  for (size_t k = counts.size(); k-- > 0;) {
    j[k] = linear % counts[k];
    linear /= counts[k];
  }
}

Index index_count(const std::vector<Index>& counts) {
  Index total = 1;
  for (Index n : counts) total *= n;
  return total;
}

void for_each_index(const std::vector<Index>& counts,
                    const std::function<void(const MultiIndex&, Index)>& fn) {
  const Index total = index_count(counts);
  MultiIndex j(counts.size(), 0);
  for (Index lin = 0; lin < total; ++lin) {
    fn(j, lin);
    for (size_t k = counts.size(); k-- > 0;) {
      if (++j[k] < counts[k]) break;
      j[k] = 0;
    }
  }
}

std::vector<MultiIndex> multi_indices_up_to(int dim, int max_total) {
  if (dim < 1 || max_total < 0) {
    throw DimensionError("multi_indices_up_to needs dim >= 1, max >= 0");
  }
  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 0);
  std::function<void(int, int)> rec = [&](int axis, int budget) {
    if (axis == dim) {
      out.push_back(cur);
      return;
    }
    for (int a = 0; a <= budget; ++a) {
      cur[axis] = a;
      rec(axis + 1, budget - a);
    }
  };
  rec(0, max_total);
  return out;
}

}  // namespace modcalc
