#pragma once

#include "core/pencil.hpp"

namespace pencilkit {

// First-order hydrodynamic operator data for one metric: the leading
// coefficient g^ij and b^{ij}_k = -g^{is} Gamma^j_{sk}, with the three
// admissibility verdicts (symmetry, Levi-Civita consistency, flatness).
// A flat metric gives the local operator type; curvature means a nonlocal
// tail is required, which is reported but not constructed.
struct DNOperatorData {
  ExprMatrix g_contra;
  ExprT3 b;  // b.at(k, i, j) = b^{ij}_k
  bool flat = false;
  double curvature_norm = 0.0;
  CheckReport report;  // check name "dn_operator"
};

DNOperatorData assemble_dn_operator(const MetricGeometry& geo,
                                    const RunContext& ctx);
DNOperatorData assemble_dn_operator(const MetricField& g, const RunContext& ctx);

// Operator data for both metrics of a pencil plus the pencil-level verdicts:
// a flat pencil gives a local bi-Hamiltonian label, otherwise the label is
// nonlocal with the compatibility verdict attached.
struct PencilOperatorData {
  DNOperatorData first;
  DNOperatorData second;
  CheckReport report;  // check name "dn_pencil"
};

PencilOperatorData assemble_pencil_operators(const Pencil& pencil,
                                             const RunContext& ctx,
                                             const CheckReport& flat,
                                             const CheckReport* compatible);

}  // namespace pencilkit
