// SPDX-License-Identifier: Apache-2.0
#include "modcalc/core/quantization.hpp"

#include <bit>
#include <cmath>

namespace modcalc {

QuantizationSpec::QuantizationSpec(Eigen::MatrixXd A) : A_(std::move(A)) {
  if (A_.rows() != A_.cols() || A_.rows() == 0) {
    throw DimensionError("quantization matrix must be square and non-empty");
  }
  if (!A_.allFinite()) {
    throw ConfigError("quantization matrix must be finite");
  }
  if (A_.cwiseAbs().maxCoeff() > 4.0) {
    throw ConfigError(
        "quantization matrix entries outside the supported range |A| <= 4");
  }
}

QuantizationSpec QuantizationSpec::kohn_nirenberg(int dim) {
  return QuantizationSpec(Eigen::MatrixXd::Zero(dim, dim));
}

QuantizationSpec QuantizationSpec::weyl(int dim) {
  return QuantizationSpec(0.5 * Eigen::MatrixXd::Identity(dim, dim));
}

bool QuantizationSpec::is_zero(Real tol) const {
  return A_.cwiseAbs().maxCoeff() <= tol;
}

bool Parallelepiped::contains(const Eigen::VectorXd& p, Real tol) const {
  const Eigen::VectorXd t = basis.matrix().partialPivLu().solve(p);
  for (Index k = 0; k < t.size(); ++k) {
    if (t[k] < -tol || t[k] >= 1.0 - tol) return false;
  }
  return true;
}

Parallelepiped kappa_parallelepiped(const OrderedBasis& E) {
  const int d = E.dim();
  const Index corners = Index{1} << d;
  Eigen::MatrixXd vertices(d, corners);
  for (Index c = 0; c < corners; ++c) {
    Eigen::VectorXd t(d);
    for (int k = 0; k < d; ++k) t[k] = static_cast<Real>((c >> k) & 1);
    vertices.col(c) = E.matrix() * t;
  }
  // Edges connect corners differing in exactly one coordinate bit.
  std::vector<std::pair<int, int>> edges;
  for (Index c = 0; c < corners; ++c) {
    for (int k = 0; k < d; ++k) {
      if (((c >> k) & 1) == 0) {
        edges.emplace_back(static_cast<int>(c),
                           static_cast<int>(c | (Index{1} << k)));
      }
    }
  }
  return Parallelepiped{E, std::move(vertices), std::move(edges),
                        std::abs(E.det())};
}

namespace {

// True when the given columns lie in the span of coordinate rows
// [row_begin, row_end) and are linearly independent there.
bool spans_block(const Eigen::MatrixXd& E, const std::vector<int>& cols,
                 int row_begin, int row_end, Real tol) {
  const int d = row_end - row_begin;
  Eigen::MatrixXd block(d, d);
  for (int c = 0; c < d; ++c) {
    const auto col = E.col(cols[c]);
    const Real scale = col.cwiseAbs().maxCoeff();
    for (Index r = 0; r < E.rows(); ++r) {
      const bool inside = r >= row_begin && r < row_end;
      if (!inside && std::abs(col[r]) > tol * scale) return false;
    }
    block.col(c) = col.segment(row_begin, d);
  }
  return block.fullPivLu().rank() == d;
}

}  // namespace

PhaseSplit is_phase_split(const OrderedBasis& E, Real tol) {
  const int n = E.dim();
  if (n % 2 != 0) {
    throw DimensionError("phase-split search requires even dimension 2d");
  }
  if (n > 8) {
    throw DimensionError(
        "phase-split search is exhaustive and limited to 2d <= 8");
  }
  const int d = n / 2;

  PhaseSplit result;
  // Enumerate d-element subsets of the n columns as bitmasks.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != d) continue;
    std::vector<int> pos, freq;
    for (int k = 0; k < n; ++k) {
      if (mask & (1u << k)) {
        pos.push_back(k);
      } else {
        freq.push_back(k);
      }
    }
    if (spans_block(E.matrix(), pos, 0, d, tol) &&
        spans_block(E.matrix(), freq, d, n, tol)) {
      result.split = true;
      result.position = std::move(pos);
      result.frequency = std::move(freq);
      return result;
    }
  }
  return result;
}

}  // namespace modcalc
