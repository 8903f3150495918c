#pragma once

#include "dnnrelax/solver.hpp"

namespace dnnrelax::detail {

/// Homogeneous self-dual interior-point run on a minimization-form program whose
/// rows are linearly independent. Objectives and the iteration log are
/// multiplied by `report_sign`; y, dual blocks and rays stay in minimization form.
void run_embedding(const ConicProgram& prog, const SolverSettings& settings, double report_sign,
                   ConicSolution& out);

}  // namespace dnnrelax::detail
