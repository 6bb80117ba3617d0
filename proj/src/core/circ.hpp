#pragma once

#include "core/pencil.hpp"

namespace pencilkit {

// Multiplication on the cotangent bundle attached to an ordered metric
// pair: alpha o beta = nabla_{g* alpha} beta - tilde nabla_{g* alpha} beta.
// Since the connection difference is tensorial this reduces to a contraction
// with the contorsion:
//   (dx^a o dx^b)_j = -g^{ia} K^b_ij.
// The swapped pair's product is a different object; build it from the
// swapped pencil.
struct CircProduct {
  int n = 0;
  ExprT3 structure;  // structure.at(a, b, j) = (dx^a o dx^b)_j

  OneFormExpr apply(const Chart& chart, const OneFormExpr& alpha,
                    const OneFormExpr& beta) const;
};

CircProduct make_circ(const Pencil& pencil);

// g*(a o b, c) = g*(a, c o b) for any pair; the gt* law additionally needs
// almost compatibility and is skipped (with a note) when it fails.
CheckReport check_circ_invariance(const Pencil& pencil, const RunContext& ctx,
                                  const CheckReport* almost);

// (b o c) o a = (b o a) o c; equivalent to compatibility for almost
// compatible pairs.
CheckReport check_right_symmetry(const Pencil& pencil, const RunContext& ctx,
                                 const CheckReport& almost);

// Curvature difference expressed through the product:
//   R_{g*a, g*b}(d) - Rt_{g*a, g*b}(d)
//     = nabla~_{g*a}(o)(b, d) - nabla~_{g*b}(o)(a, d)
//     + a o (b o d) - (a o b) o d - b o (a o d) + (b o a) o d
// holds for an arbitrary pair; the free slot of the printed statement is
// resolved by acting on the last form, and the report says so.
CheckReport check_circ_curvature(const Pencil& pencil, const RunContext& ctx);

}  // namespace pencilkit
