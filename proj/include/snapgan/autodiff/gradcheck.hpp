#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "snapgan/autodiff/tape.hpp"
#include "snapgan/common/rng.hpp"

namespace snapgan::ad {

// Builds a scalar on `tape` from leaves holding the supplied inputs. Must be
// deterministic: it is re-evaluated at perturbed inputs.
using ScalarFunction = std::function<Var(Tape& tape, std::span<const Var> inputs)>;

struct GradCheckOptions {
  double step = 1e-5;
  double rel_tolerance = 1e-4;
  // Denominator floor for the relative error so near-zero gradients are
  // judged on an absolute scale of rel_tolerance * floor.
  double scale_floor = 1e-2;
  // For piecewise-smooth functions (relu, sorting): an entry whose central
  // difference at `step` disagrees with the one at `step / 2` has a kink
  // inside the stencil, so the comparison is skipped and counted instead.
  bool skip_nonsmooth = false;
  // Fraction of entries that may be skipped before the check fails.
  double max_skipped_fraction = 0.01;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t entries_checked = 0;
  std::size_t entries_skipped = 0;
  bool passed = true;
};

// Compares reverse-mode gradients against central finite differences for
// every element of every input except the trailing `fixed_inputs`, which are
// passed as constants and never perturbed.
GradCheckResult check_gradients(const ScalarFunction& fn, std::vector<Tensor> inputs,
                                const GradCheckOptions& options = {},
                                std::size_t fixed_inputs = 0);

struct GradCheckCase {
  std::string name;
  // Draws random inputs for one instance.
  std::function<std::vector<Tensor>(Rng&)> make_inputs;
  ScalarFunction fn;
  std::size_t fixed_inputs = 0;
};

struct GradCheckReport {
  std::string name;
  std::size_t instances = 0;
  double worst_rel_error = 0.0;
  std::size_t entries_checked = 0;
  std::size_t entries_skipped = 0;
  bool passed = true;
};

// One case per differentiable primitive, each composed with a random linear
// read-out so every output element receives a distinct upstream gradient.
std::vector<GradCheckCase> primitive_gradcheck_cases();

std::vector<GradCheckReport> run_gradcheck_cases(std::span<const GradCheckCase> cases,
                                                 std::size_t instances,
                                                 std::uint64_t seed,
                                                 const GradCheckOptions& options = {});

}  // namespace snapgan::ad
