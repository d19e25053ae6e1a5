// SPDX-License-Identifier: Apache-2.0
//
// Complex-valued data sampled on a uniform grid, plus file round trips.

#ifndef MODCALC_CORE_FIELD_HPP
#define MODCALC_CORE_FIELD_HPP

#include <map>
#include <string>

#include <json.hpp>

#include "modcalc/core/grid.hpp"

namespace modcalc {

class SampledField {
 public:
  SampledField(UniformGrid grid, Eigen::ArrayXcd values);
  // Zero-filled field on the given grid.
  explicit SampledField(UniformGrid grid);

  const UniformGrid& grid() const { return grid_; }
  const Eigen::ArrayXcd& values() const { return values_; }
  Eigen::ArrayXcd& values() { return values_; }

  Complex operator()(Index linear) const { return values_[linear]; }
  Complex& operator()(Index linear) { return values_[linear]; }
  Complex at(const MultiIndex& j) const {
    return values_[linear_index(grid_.counts, j)];
  }
  Complex& at(const MultiIndex& j) {
    return values_[linear_index(grid_.counts, j)];
  }

  Index size() const { return values_.size(); }
  bool all_finite() const;

  // Riemann sum of |f|^2 over the grid cells.
  Real squared_l2() const { return grid_.cell_volume() * values_.abs2().sum(); }
  Real l2_norm() const { return std::sqrt(squared_l2()); }

 private:
  UniformGrid grid_;
  Eigen::ArrayXcd values_;
};

// Throws InvalidFieldError naming `what` when the field has NaN/Inf entries.
void ensure_finite(const SampledField& f, const std::string& what);

// Build a field by evaluating fn at every grid point (fn gets the
// physical point, i.e. after applying the basis).
SampledField sample(const UniformGrid& grid,
                    const std::function<Complex(const Eigen::VectorXd&)>& fn);

// --- serialization ---
//
// Binary layout (little-endian):
//   "MODC"  u32 version  u32 dim
//   dim x u64 counts,  dim x f64 steps,  dim x f64 offsets
//   dim*dim x f64 basis (row-major)
//   zero or more metadata chunks: 4-byte tag, u64 byte length, JSON bytes
//   "DATA"  u64 value count  values interleaved (re, im) as f64
//
// Metadata tags are four ASCII characters ("STFT", "SYMB", ...).  The
// JSON form mirrors the same content in one object.

using MetadataBlocks = std::map<std::string, nlohmann::json>;

void save_field(const SampledField& f, const std::string& path,
                const MetadataBlocks& meta = {});
SampledField load_field(const std::string& path,
                        MetadataBlocks* meta = nullptr);

void save_field_json(const SampledField& f, const std::string& path,
                     const MetadataBlocks& meta = {});
SampledField load_field_json(const std::string& path,
                             MetadataBlocks* meta = nullptr);

nlohmann::json field_to_json(const SampledField& f,
                             const MetadataBlocks& meta = {});
SampledField field_from_json(const nlohmann::json& j,
                             MetadataBlocks* meta = nullptr);

}  // namespace modcalc

#endif
