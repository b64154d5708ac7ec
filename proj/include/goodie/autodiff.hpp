#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "goodie/graph.hpp"
#include "goodie/masking.hpp"

namespace goodie {

// Persistent learnable parameter; gradients accumulate across tape uses.
struct Param {
    Matrix value;
    Matrix grad;

    Param() = default;
    explicit Param(Matrix v) : value(std::move(v)), grad(value.rows, value.cols) {}
    void zero_grad() { grad.fill(0.0); }
};

class Rng;

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

// Reverse-mode tape over 2-D tensors. Covers exactly the operation set the
// model's computation graph needs. Single-threaded per tape.
class Tape {
public:
    using Ref = std::size_t;

    Ref constant(Matrix m);
    Ref param(Param* p);

    Ref matmul(Ref a, Ref b);
    Ref transpose(Ref a);
    Ref spmm(const NormalizedAdjacency* adj, Ref x);
    Ref add(Ref a, Ref b);
    Ref sub(Ref a, Ref b);
    Ref axpy(Ref a, Ref b, double s);      // a + s*b
    Ref affine(Ref x, double a, double b); // a*x + b elementwise
    Ref relu(Ref x);
    Ref leaky_relu(Ref x, double slope = 0.3);
    Ref sigmoid(Ref x);
    Ref row_softmax(Ref x, double temperature = 1.0);
    Ref dropout(Ref x, double p, bool training, std::uint64_t seed);
    Ref row_l2_normalize(Ref x);
    Ref row_scale(Ref x, Ref s);           // s is N x 1
    Ref concat_cols(Ref a, Ref b);
    Ref sum(Ref x);                        // 1x1

    // Row-pair dot products: output k-th entry is z[u_k] . z[v_k].
    Ref pair_dot(Ref z, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

    // Mean binary cross-entropy from logits, numerically stable.
    Ref bce_with_logits(Ref logits, const std::vector<uint8_t>& targets);

    // Mean negative log-likelihood over subset rows, stable log-softmax path.
    Ref masked_cross_entropy(Ref logits, const LabelTable& labels,
                             const std::vector<std::size_t>& subset);

    // Weighted contrastive reduction over a similarity matrix. pos_weight is a
    // dense N x N matrix, nonzero exactly on positive pairs (i != p). Rows
    // with no positive contribute zero.
    Ref contrastive_reduce(Ref sim, const Matrix& pos_weight, double tau);

    // Sum over rows of log-sum-exp of off-diagonal similarities.
    Ref lse_offdiag(Ref sim, double tau);

    const Matrix& value(Ref r) const { return nodes_[r].value; }
    const Matrix& grad(Ref r) const { return nodes_[r].grad; }

    // loss must be 1x1; flushes gradients into Param-backed leaves.
    void backward(Ref loss);

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        Param* external = nullptr;
        std::function<void(Tape&, Node&)> back;
    };

    Ref push(Node n);
    void accumulate(Ref r, const Matrix& g);

    std::vector<Node> nodes_;
    friend struct TapeAccess;
};

struct AdamState {
    double lr = 0.005, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t step = 0;
    std::vector<Matrix> m, v;
};

void adam_step(std::vector<Param*>& params, AdamState& state);

// Central finite differences against analytic gradients. `loss` must run a
// fresh forward+backward (accumulating into zeroed param grads) and return
// the scalar loss. Returns the max relative error over all coordinates.
double grad_check(const std::function<double()>& loss, std::vector<Param*>& params,
                  double eps = 1e-4);

}  // namespace goodie
