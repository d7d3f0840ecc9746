#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "snapgan/autodiff/tensor.hpp"

namespace snapgan::ad {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
// is alive.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Records a forward computation as an append-only list of nodes. Nodes are
// appended after their parents, so index order is a topological order and a
// reverse sweep visits every node exactly once.
class Tape {
 public:
  // Called with the tape and the node index; reads grad(self) and
  // accumulates into the parents' gradient buffers.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var leaf(Tensor value, bool requires_grad = true);

  // Records an op result. The node requires grad iff any parent does; the
  // backward rule is dropped otherwise.
  Var record(Tensor value, std::vector<Var> parents, BackwardFn backward);

  // Seeds d(output)/d(output) = 1 and propagates. Output must hold exactly
  // one element. May be called once per tape.
  void backward(const Var& output);

  // Gradient of the last backward() output w.r.t. var, or nullptr when the
  // var does not require grad or received none.
  const Tensor* grad(const Var& var) const;

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient buffer of node id, zero-initialised on first access.
  Tensor& grad_buffer(std::size_t id);
  const Tensor& upstream(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace snapgan::ad
