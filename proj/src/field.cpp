// SPDX-License-Identifier: Apache-2.0
#include "modcalc/core/field.hpp"

namespace modcalc {

SampledField::SampledField(UniformGrid grid, Eigen::ArrayXcd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DimensionError("field value count does not match grid size");
  }
}

SampledField::SampledField(UniformGrid grid)
    : grid_(std::move(grid)),
      values_(Eigen::ArrayXcd::Zero(grid_.size())) {}

bool SampledField::all_finite() const {
  for (Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag()))
      return false;
  }
  return true;
}

void ensure_finite(const SampledField& f, const std::string& what) {
  if (!f.all_finite()) {
    throw InvalidFieldError(what + ": field contains non-finite values");
  }
}

SampledField sample(const UniformGrid& grid,
                    const std::function<Complex(const Eigen::VectorXd&)>& fn) {
  SampledField out(grid);
  for_each_index(grid.counts, [&](const MultiIndex& j, Index lin) {
    out(lin) = fn(grid.point(j));
  });
  return out;
}

}  // namespace modcalc
