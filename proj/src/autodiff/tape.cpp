#include "snapgan/autodiff/tape.hpp"

#include <stdexcept>

namespace snapgan::ad {

const Tensor& Var::value() const { return tape_->value(id_); }

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::constant(Tensor value) { return leaf(std::move(value), false); }

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<Var> parents, BackwardFn backward) {
  bool any = false;
  for (const auto& p : parents) {
    if (&p.tape() != this) {
      throw std::invalid_argument("op mixes vars from different tapes");
    }
    any = any || requires_grad(p.id());
  }
  Node node;
  node.value = std::move(value);
  node.requires_grad = any;
  if (any) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& node = nodes_[id];
  if (!node.has_grad) {
    node.grad = Tensor(node.value.shape(), 0.0);
    node.has_grad = true;
  }
  return node.grad;
}

void Tape::backward(const Var& output) {
  if (&output.tape() != this) throw std::invalid_argument("var from another tape");
  if (output.value().size() != 1) {
    throw std::invalid_argument("backward() needs a scalar output, got shape " +
                                shape_string(output.shape()));
  }
  if (backward_done_) throw std::logic_error("backward() already ran on this tape");
  backward_done_ = true;
  if (!nodes_[output.id()].requires_grad) return;
  grad_buffer(output.id()).fill(1.0);
  for (std::size_t i = output.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.has_grad || !node.backward) continue;
    node.backward(*this, i);
  }
}

const Tensor* Tape::grad(const Var& var) const {
  const Node& node = nodes_[var.id()];
  if (!node.requires_grad || !node.has_grad) return nullptr;
  return &node.grad;
}

}  // namespace snapgan::ad
