// SPDX-License-Identifier: Apache-2.0
//
// Ordered bases, uniform lattice grids, and multi-index bookkeeping.
//
// A grid is the set of points  o + sum_k j_k h_k e_k  with j_k in
// [0, N_k).  The basis columns e_k are ordered: coordinate k always
// means "along column k", and every norm or transform that talks about
// "axis k" refers to that column.  Storage is C-ordered: the last axis
// varies fastest.

#ifndef MODCALC_CORE_GRID_HPP
#define MODCALC_CORE_GRID_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "modcalc/core/errors.hpp"

namespace modcalc {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;
using MultiIndex = std::vector<Index>;

// Invertible d x d matrix whose columns are the (ordered) basis vectors.
class OrderedBasis {
 public:
  explicit OrderedBasis(Eigen::MatrixXd columns);
  static OrderedBasis identity(int dim);

  int dim() const { return static_cast<int>(columns_.cols()); }
  const Eigen::MatrixXd& matrix() const { return columns_; }
  Eigen::VectorXd vector(int k) const { return columns_.col(k); }
  Real det() const { return det_; }
  bool is_identity(Real tol = 0.0) const;

  // True when every column is a (positive or negative) multiple of a
  // distinct coordinate axis; fills axis_of[k] = which coordinate axis
  // column k lies along, and scale[k] = signed length.
  bool is_scaled_permutation(std::vector<int>* axis_of = nullptr,
                             Eigen::VectorXd* scale = nullptr,
                             Real tol = 1e-12) const;

 private:
  Eigen::MatrixXd columns_;
  Real det_;
};

struct UniformGrid {
  OrderedBasis basis;
  std::vector<Index> counts;   // points per axis, all >= 1
  Eigen::ArrayXd steps;        // h_k > 0
  Eigen::ArrayXd offsets;      // o_k

  UniformGrid(OrderedBasis basis_in, std::vector<Index> counts_in,
              Eigen::ArrayXd steps_in, Eigen::ArrayXd offsets_in);

  // Identity-basis grid of N^d points covering [-L, L) per axis,
  // cell-centered: x_j = -L + (j + 1/2) h with h = 2L/N.
  static UniformGrid centered(int dim, Index n, Real half_width);
  // Same but with per-axis counts/half-widths.
  static UniformGrid centered(const std::vector<Index>& n,
                              const Eigen::ArrayXd& half_width);

  int dim() const { return basis.dim(); }
  Index size() const;                    // total point count
  Real cell_volume() const;              // |det(basis)| * prod h_k
  Real coordinate(int axis, Index j) const {
    return offsets[axis] + static_cast<Real>(j) * steps[axis];
  }
  // Physical location of a multi-index: basis * (o + j.*h).
  Eigen::VectorXd point(const MultiIndex& j) const;
  // Per-axis coordinates (before applying the basis).
  Eigen::VectorXd coordinates(const MultiIndex& j) const;

  bool same_layout(const UniformGrid& other, Real tol = 1e-9) const;
};

// --- C-order linearization helpers (last axis fastest) ---

Index linear_index(const std::vector<Index>& counts, const MultiIndex& j);
void unravel_index(const std::vector<Index>& counts, Index linear,
                   MultiIndex& j);
Index index_count(const std::vector<Index>& counts);

// Calls fn(multi_index, linear_index) for every point in C order.
void for_each_index(const std::vector<Index>& counts,
                    const std::function<void(const MultiIndex&, Index)>& fn);

// All derivative/monomial multi-orders with |alpha| <= max_total.
std::vector<MultiIndex> multi_indices_up_to(int dim, int max_total);

}  // namespace modcalc

#endif
