// SPDX-License-Identifier: Apache-2.0
//
// Pseudo-differential operators in an arbitrary quantization A:
//
//   (Op_A(a) f)(x) = (2 pi)^{-d} iint a((I-A)x + Ay, xi)
//                                 e^{i<x - y, xi>} f(y) dy dxi.
//
// A = 0 is the operator-acts-after-the-Fourier-pairing convention,
// A = I/2 the symmetric one.  The fast path pivots through A = 0 and
// pairs the symbol with the spectrum of f; the quadrature path performs
// the direct double sum and serves as an FFT-free oracle.

#ifndef MODCALC_PDO_OP_HPP
#define MODCALC_PDO_OP_HPP

#include "modcalc/core/field.hpp"
#include "modcalc/core/quantization.hpp"
#include "modcalc/pdo/symbol.hpp"

namespace modcalc {

enum class ApplyMethod { Fast, Quadrature };

// The phase-space grid induced by an identity-basis signal grid:
// position axes first, then the reciprocal (frequency) axes.
UniformGrid induced_phase_grid(const UniformGrid& signal_grid);

// Apply Op_A(a) to a field on an identity-basis grid.  Fast handles any
// dimension; sampled symbols must live on the induced phase grid.
// Quadrature handles one dimension up to 512 points and, for sampled
// symbols, only the A = 0 pivot.
SampledField apply_op(const Symbol& a, const QuantizationSpec& A,
                      const SampledField& f,
                      ApplyMethod method = ApplyMethod::Fast);

// Re-express a symbol so that Op_to(result) = Op_from(a).  Convertible
// closed forms go through the terminating mixed-derivative series and
// stay closed; everything else becomes a spectral multiplier on phase
// space, so closed forms are first sampled on *phase_grid (required in
// that case) and sampled symbols must decay at their grid boundary.
Symbol change_quantization(const Symbol& a, const QuantizationSpec& from,
                           const QuantizationSpec& to,
                           const UniformGrid* phase_grid = nullptr);

// Symbol of the adjoint: Op_0(adjoint_symbol(a)) = Op_0(a)^*.  Follows
// the same closed/sampled routes as change_quantization.
Symbol adjoint_symbol(const Symbol& a,
                      const UniformGrid* phase_grid = nullptr);

}  // namespace modcalc

#endif
