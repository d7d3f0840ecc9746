#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "snapgan/autodiff/ops.hpp"
#include "snapgan/graph/graph.hpp"

namespace snapgan::model {

// One graph convolution: relu(A_norm * Z * W).
ad::Var gcn_forward(const ad::Var& weight, std::shared_ptr<const ad::SparseMatrix> adjacency,
                    const ad::Var& features);

// Row order used by DegPool over the candidate rows of `features`:
// out-degree descending, then feature channels compared from the last
// column towards the first (larger first), then tie id ascending.
std::vector<std::size_t> degpool_order(const ad::Tensor& features,
                                       std::span<const std::size_t> rows,
                                       std::span<const std::size_t> degrees,
                                       std::span<const graph::VertexId> tie_ids);

// Gather indices realising DegPool: the first min(k, |rows|) rows in
// degpool_order, followed by zero rows (std::nullopt) up to k.
std::vector<std::optional<std::size_t>> degpool_indices(const ad::Tensor& features,
                                                        std::span<const std::size_t> rows,
                                                        std::span<const std::size_t> degrees,
                                                        std::span<const graph::VertexId> tie_ids,
                                                        std::size_t k);

// DegPool over all rows of z (n x C); ties fall back to row index unless
// tie_ids are given. Output is always k x C. Throws for k < 1 or when
// degrees/tie_ids lengths differ from n.
ad::Var degpool(const ad::Var& z, std::span<const std::size_t> out_degrees, std::size_t k,
                std::span<const graph::VertexId> tie_ids = {});

}  // namespace snapgan::model
