#pragma once

#include <vector>

#include "snapgan/autodiff/gradcheck.hpp"

namespace snapgan::model {

// Finite-difference cases for the full scorer with every parameter tensor as
// an input: snapshot adjacency, global adjacency, and fixed-k flattening.
// Each instance draws a small random graph and snapshot.
std::vector<ad::GradCheckCase> scorer_gradcheck_cases();

}  // namespace snapgan::model
