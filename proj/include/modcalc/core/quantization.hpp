// SPDX-License-Identifier: Apache-2.0
//
// Quantization matrices and the lattice geometry helpers: the
// fundamental parallelepiped of an ordered basis and phase-split
// detection for bases of R^{2d}.

#ifndef MODCALC_CORE_QUANTIZATION_HPP
#define MODCALC_CORE_QUANTIZATION_HPP

#include <optional>

#include "modcalc/core/grid.hpp"

namespace modcalc {

// Real d x d matrix A selecting the operator family Op_A.  A = 0 is the
// Kohn-Nirenberg form, A = I/2 the Weyl form.  Entries are kept inside
// the numerically safe range |A_ij| <= 4.
class QuantizationSpec {
 public:
  explicit QuantizationSpec(Eigen::MatrixXd A);
  static QuantizationSpec kohn_nirenberg(int dim);
  static QuantizationSpec weyl(int dim);

  int dim() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& matrix() const { return A_; }
  bool is_zero(Real tol = 0.0) const;

 private:
  Eigen::MatrixXd A_;
};

// kappa(E) = { sum_k t_k e_k : t_k in [0,1) }, half-open so translates
// by the lattice E Z^d tile space without overlap.
struct Parallelepiped {
  OrderedBasis basis;
  Eigen::MatrixXd vertices;                       // d x 2^d corner points
  std::vector<std::pair<int, int>> edges;         // vertex index pairs
  Real volume;                                    // |det E|

  // Half-open membership: true iff p = E t with all t_k in [0,1).
  bool contains(const Eigen::VectorXd& p, Real tol = 0.0) const;
};

Parallelepiped kappa_parallelepiped(const OrderedBasis& E);

// Result of a phase-split search on a basis of R^{2d}: indices of the
// columns spanning the position plane {(x,0)} and of those spanning the
// frequency plane {(0,xi)}.
struct PhaseSplit {
  bool split = false;
  std::vector<int> position;
  std::vector<int> frequency;
};

// Exhaustive search over d-element subsets (2d <= 8 enforced).
PhaseSplit is_phase_split(const OrderedBasis& E, Real tol = 1e-12);

}  // namespace modcalc

#endif
