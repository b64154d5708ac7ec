#include "goodie/autodiff.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "goodie/rng.hpp"

namespace goodie {

namespace {

Matrix transpose_m(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

}  // namespace

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& x : m.data) x = (2.0 * rng.uniform() - 1.0) * limit;
    return m;
}

Tape::Ref Tape::push(Node n) {
    if (n.requires_grad) n.grad = Matrix(n.value.rows, n.value.cols);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

void Tape::accumulate(Ref r, const Matrix& g) {
    Node& n = nodes_[r];
    if (!n.requires_grad) return;
    for (std::size_t i = 0; i < g.size(); ++i) n.grad.data[i] += g.data[i];
}

Tape::Ref Tape::constant(Matrix m) {
    Node n;
    n.value = std::move(m);
    return push(std::move(n));
}

Tape::Ref Tape::param(Param* p) {
    Node n;
    n.value = p->value;
    n.requires_grad = true;
    n.external = p;
    return push(std::move(n));
}

Tape::Ref Tape::matmul(Ref a, Ref b) {
    const Matrix& av = nodes_[a].value;
    const Matrix& bv = nodes_[b].value;
    Node n;
    n.value = matmul_dense(av, bv);
    n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
    n.back = [a, b](Tape& t, Node& self) {
        if (t.nodes_[a].requires_grad)
            t.accumulate(a, matmul_dense(self.grad, transpose_m(t.nodes_[b].value)));
        if (t.nodes_[b].requires_grad)
            t.accumulate(b, matmul_dense(transpose_m(t.nodes_[a].value), self.grad));
    };
    return push(std::move(n));
}

Tape::Ref Tape::transpose(Ref a) {
    Node n;
    n.value = transpose_m(nodes_[a].value);
    n.requires_grad = nodes_[a].requires_grad;
    n.back = [a](Tape& t, Node& self) { t.accumulate(a, transpose_m(self.grad)); };
    return push(std::move(n));
}

Tape::Ref Tape::spmm(const NormalizedAdjacency* adj, Ref x) {
    Node n;
    n.value = goodie::spmm(*adj, nodes_[x].value);
    n.requires_grad = nodes_[x].requires_grad;
    // adjacency is symmetric, so A^T grad = A grad
    n.back = [adj, x](Tape& t, Node& self) { t.accumulate(x, goodie::spmm(*adj, self.grad)); };
    return push(std::move(n));
}

Tape::Ref Tape::add(Ref a, Ref b) { return axpy(a, b, 1.0); }

Tape::Ref Tape::sub(Ref a, Ref b) { return axpy(a, b, -1.0); }

Tape::Ref Tape::axpy(Ref a, Ref b, double s) {
    const Matrix& av = nodes_[a].value;
    const Matrix& bv = nodes_[b].value;
    if (!av.same_shape(bv)) throw std::invalid_argument("axpy: shape mismatch");
    Node n;
    n.value = av;
    for (std::size_t i = 0; i < bv.size(); ++i) n.value.data[i] += s * bv.data[i];
    n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
    n.back = [a, b, s](Tape& t, Node& self) {
        t.accumulate(a, self.grad);
        if (t.nodes_[b].requires_grad) {
            Matrix g = self.grad;
            for (double& x : g.data) x *= s;
            t.accumulate(b, g);
        }
    };
    return push(std::move(n));
}

Tape::Ref Tape::affine(Ref x, double a, double b) {
    Node n;
    n.value = nodes_[x].value;
    for (double& v : n.value.data) v = a * v + b;
    n.requires_grad = nodes_[x].requires_grad;
    n.back = [x, a](Tape& t, Node& self) {
        Matrix g = self.grad;
        for (double& v : g.data) v *= a;
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::relu(Ref x) {
    Node n;
    n.value = nodes_[x].value;
    for (double& v : n.value.data) v = v > 0.0 ? v : 0.0;
    n.requires_grad = nodes_[x].requires_grad;
    n.back = [x](Tape& t, Node& self) {
        Matrix g = self.grad;
        const Matrix& in = t.nodes_[x].value;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (in.data[i] <= 0.0) g.data[i] = 0.0;
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::leaky_relu(Ref x, double slope) {
    Node n;
    n.value = nodes_[x].value;
    for (double& v : n.value.data) v = v > 0.0 ? v : slope * v;
    n.requires_grad = nodes_[x].requires_grad;
    n.back = [x, slope](Tape& t, Node& self) {
        Matrix g = self.grad;
        const Matrix& in = t.nodes_[x].value;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (in.data[i] <= 0.0) g.data[i] *= slope;
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::sigmoid(Ref x) {
    Node n;
    n.value = nodes_[x].value;
    for (double& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
    n.requires_grad = nodes_[x].requires_grad;
    Ref self_ref = nodes_.size();
    n.back = [x, self_ref](Tape& t, Node& self) {
        Matrix g = self.grad;
        const Matrix& y = t.nodes_[self_ref].value;
        for (std::size_t i = 0; i < g.size(); ++i) g.data[i] *= y.data[i] * (1.0 - y.data[i]);
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::row_softmax(Ref x, double temperature) {
    const Matrix& in = nodes_[x].value;
    Node n;
    n.value = Matrix(in.rows, in.cols);
    for (std::size_t i = 0; i < in.rows; ++i) {
        const double* r = in.row(i);
        double m = r[0];
        for (std::size_t j = 1; j < in.cols; ++j) m = std::max(m, r[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < in.cols; ++j) denom += std::exp((r[j] - m) / temperature);
        for (std::size_t j = 0; j < in.cols; ++j)
            n.value(i, j) = std::exp((r[j] - m) / temperature) / denom;
    }
    n.requires_grad = nodes_[x].requires_grad;
    Ref self_ref = nodes_.size();
    n.back = [x, self_ref, temperature](Tape& t, Node& self) {
        const Matrix& y = t.nodes_[self_ref].value;
        Matrix g(y.rows, y.cols);
        for (std::size_t i = 0; i < y.rows; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < y.cols; ++j) dot += self.grad(i, j) * y(i, j);
            for (std::size_t j = 0; j < y.cols; ++j)
                g(i, j) = y(i, j) * (self.grad(i, j) - dot) / temperature;
        }
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::dropout(Ref x, double p, bool training, std::uint64_t seed) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout: p outside [0,1)");
    if (!training || p == 0.0) {
        Node n;
        n.value = nodes_[x].value;
        n.requires_grad = nodes_[x].requires_grad;
        n.back = [x](Tape& t, Node& self) { t.accumulate(x, self.grad); };
        return push(std::move(n));
    }
    Rng rng(seed);
    auto mask = std::make_shared<std::vector<uint8_t>>(nodes_[x].value.size());
    for (auto& b : *mask) b = rng.uniform() >= p ? 1 : 0;
    double scale = 1.0 / (1.0 - p);
    Node n;
    n.value = nodes_[x].value;
    for (std::size_t i = 0; i < n.value.size(); ++i)
        n.value.data[i] = (*mask)[i] ? n.value.data[i] * scale : 0.0;
    n.requires_grad = nodes_[x].requires_grad;
    n.back = [x, mask, scale](Tape& t, Node& self) {
        Matrix g = self.grad;
        for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = (*mask)[i] ? g.data[i] * scale : 0.0;
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::row_l2_normalize(Ref x) {
    const Matrix& in = nodes_[x].value;
    auto norms = std::make_shared<std::vector<double>>(in.rows);
    Node n;
    n.value = Matrix(in.rows, in.cols);
    for (std::size_t i = 0; i < in.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < in.cols; ++j) s += in(i, j) * in(i, j);
        double norm = std::sqrt(s);
        (*norms)[i] = norm;
        if (norm > 1e-12)
            for (std::size_t j = 0; j < in.cols; ++j) n.value(i, j) = in(i, j) / norm;
        // zero rows stay zero
    }
    n.requires_grad = nodes_[x].requires_grad;
    Ref self_ref = nodes_.size();
    n.back = [x, self_ref, norms](Tape& t, Node& self) {
        const Matrix& y = t.nodes_[self_ref].value;
        Matrix g(y.rows, y.cols);
        for (std::size_t i = 0; i < y.rows; ++i) {
            double norm = (*norms)[i];
            if (norm <= 1e-12) continue;
            double dot = 0.0;
            for (std::size_t j = 0; j < y.cols; ++j) dot += self.grad(i, j) * y(i, j);
            for (std::size_t j = 0; j < y.cols; ++j)
                g(i, j) = (self.grad(i, j) - dot * y(i, j)) / norm;
        }
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::row_scale(Ref x, Ref s) {
    const Matrix& xv = nodes_[x].value;
    const Matrix& sv = nodes_[s].value;
    if (sv.rows != xv.rows || sv.cols != 1) throw std::invalid_argument("row_scale: s must be N x 1");
    Node n;
    n.value = xv;
    for (std::size_t i = 0; i < xv.rows; ++i)
        for (std::size_t j = 0; j < xv.cols; ++j) n.value(i, j) *= sv(i, 0);
    n.requires_grad = nodes_[x].requires_grad || nodes_[s].requires_grad;
    n.back = [x, s](Tape& t, Node& self) {
        const Matrix& xv2 = t.nodes_[x].value;
        const Matrix& sv2 = t.nodes_[s].value;
        if (t.nodes_[x].requires_grad) {
            Matrix gx(xv2.rows, xv2.cols);
            for (std::size_t i = 0; i < xv2.rows; ++i)
                for (std::size_t j = 0; j < xv2.cols; ++j) gx(i, j) = self.grad(i, j) * sv2(i, 0);
            t.accumulate(x, gx);
        }
        if (t.nodes_[s].requires_grad) {
            Matrix gs(sv2.rows, 1);
            for (std::size_t i = 0; i < xv2.rows; ++i) {
                double d = 0.0;
                for (std::size_t j = 0; j < xv2.cols; ++j) d += self.grad(i, j) * xv2(i, j);
                gs(i, 0) = d;
            }
            t.accumulate(s, gs);
        }
    };
    return push(std::move(n));
}

Tape::Ref Tape::concat_cols(Ref a, Ref b) {
    const Matrix& av = nodes_[a].value;
    const Matrix& bv = nodes_[b].value;
    if (av.rows != bv.rows) throw std::invalid_argument("concat_cols: row mismatch");
    Node n;
    n.value = Matrix(av.rows, av.cols + bv.cols);
    for (std::size_t i = 0; i < av.rows; ++i) {
        for (std::size_t j = 0; j < av.cols; ++j) n.value(i, j) = av(i, j);
        for (std::size_t j = 0; j < bv.cols; ++j) n.value(i, av.cols + j) = bv(i, j);
    }
    n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
    std::size_t ac = av.cols, bc = bv.cols;
    n.back = [a, b, ac, bc](Tape& t, Node& self) {
        Matrix ga(self.grad.rows, ac), gb(self.grad.rows, bc);
        for (std::size_t i = 0; i < self.grad.rows; ++i) {
            for (std::size_t j = 0; j < ac; ++j) ga(i, j) = self.grad(i, j);
            for (std::size_t j = 0; j < bc; ++j) gb(i, j) = self.grad(i, ac + j);
        }
        t.accumulate(a, ga);
        t.accumulate(b, gb);
    };
    return push(std::move(n));
}

Tape::Ref Tape::sum(Ref x) {
    Node n;
    n.value = Matrix(1, 1);
    for (double v : nodes_[x].value.data) n.value(0, 0) += v;
    n.requires_grad = nodes_[x].requires_grad;
    n.back = [x](Tape& t, Node& self) {
        Matrix g(t.nodes_[x].value.rows, t.nodes_[x].value.cols, self.grad(0, 0));
        t.accumulate(x, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::pair_dot(Ref z, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    const Matrix& zv = nodes_[z].value;
    Node n;
    n.value = Matrix(pairs.size(), 1);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double* u = zv.row(pairs[k].first);
        const double* v = zv.row(pairs[k].second);
        double d = 0.0;
        for (std::size_t j = 0; j < zv.cols; ++j) d += u[j] * v[j];
        n.value(k, 0) = d;
    }
    n.requires_grad = nodes_[z].requires_grad;
    auto ps = std::make_shared<std::vector<std::pair<std::size_t, std::size_t>>>(pairs);
    n.back = [z, ps](Tape& t, Node& self) {
        const Matrix& zv2 = t.nodes_[z].value;
        Matrix g(zv2.rows, zv2.cols);
        for (std::size_t k = 0; k < ps->size(); ++k) {
            double gk = self.grad(k, 0);
            std::size_t u = (*ps)[k].first, v = (*ps)[k].second;
            for (std::size_t j = 0; j < zv2.cols; ++j) {
                g(u, j) += gk * zv2(v, j);
                g(v, j) += gk * zv2(u, j);
            }
        }
        t.accumulate(z, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::bce_with_logits(Ref logits, const std::vector<uint8_t>& targets) {
    const Matrix& lv = nodes_[logits].value;
    if (lv.size() != targets.size()) throw std::invalid_argument("bce_with_logits: size mismatch");
    Node n;
    n.value = Matrix(1, 1);
    double total = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        double x = lv.data[k];
        double y = targets[k] ? 1.0 : 0.0;
        total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
    }
    n.value(0, 0) = total / static_cast<double>(targets.size());
    n.requires_grad = nodes_[logits].requires_grad;
    auto tg = std::make_shared<std::vector<uint8_t>>(targets);
    n.back = [logits, tg](Tape& t, Node& self) {
        const Matrix& lv2 = t.nodes_[logits].value;
        Matrix g(lv2.rows, lv2.cols);
        double scale = self.grad(0, 0) / static_cast<double>(tg->size());
        for (std::size_t k = 0; k < tg->size(); ++k) {
            double s = 1.0 / (1.0 + std::exp(-lv2.data[k]));
            g.data[k] = scale * (s - ((*tg)[k] ? 1.0 : 0.0));
        }
        t.accumulate(logits, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::masked_cross_entropy(Ref logits, const LabelTable& labels,
                                     const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw std::invalid_argument("masked_cross_entropy: empty subset");
    const Matrix& lv = nodes_[logits].value;
    Node n;
    n.value = Matrix(1, 1);
    double total = 0.0;
    for (std::size_t i : subset) {
        const double* r = lv.row(i);
        double m = r[0];
        for (std::size_t c = 1; c < lv.cols; ++c) m = std::max(m, r[c]);
        double denom = 0.0;
        for (std::size_t c = 0; c < lv.cols; ++c) denom += std::exp(r[c] - m);
        total += std::log(denom) + m - r[labels.labels[i]];
    }
    n.value(0, 0) = total / static_cast<double>(subset.size());
    n.requires_grad = nodes_[logits].requires_grad;
    std::vector<std::size_t> sub = subset;
    std::vector<std::size_t> labs = labels.labels;
    n.back = [logits, sub, labs](Tape& t, Node& self) {
        const Matrix& lv2 = t.nodes_[logits].value;
        Matrix g(lv2.rows, lv2.cols);
        double scale = self.grad(0, 0) / static_cast<double>(sub.size());
        for (std::size_t i : sub) {
            const double* r = lv2.row(i);
            double m = r[0];
            for (std::size_t c = 1; c < lv2.cols; ++c) m = std::max(m, r[c]);
            double denom = 0.0;
            for (std::size_t c = 0; c < lv2.cols; ++c) denom += std::exp(r[c] - m);
            for (std::size_t c = 0; c < lv2.cols; ++c) {
                double p = std::exp(r[c] - m) / denom;
                g(i, c) += scale * (p - (c == labs[i] ? 1.0 : 0.0));
            }
        }
        t.accumulate(logits, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::contrastive_reduce(Ref sim, const Matrix& pos_weight, double tau) {
    const Matrix& sv = nodes_[sim].value;
    std::size_t n_rows = sv.rows;
    if (n_rows < 2) throw std::invalid_argument("contrastive_reduce: needs >= 2 nodes");
    auto w = std::make_shared<Matrix>(pos_weight);

    Node n;
    n.value = Matrix(1, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        std::size_t np = 0;
        for (std::size_t p = 0; p < n_rows; ++p)
            if (p != i && (*w)(i, p) != 0.0) ++np;
        if (np == 0) continue;
        // log-sum-exp over a != i
        double m = -1e300;
        for (std::size_t a = 0; a < n_rows; ++a)
            if (a != i) m = std::max(m, sv(i, a) / tau);
        double denom = 0.0;
        for (std::size_t a = 0; a < n_rows; ++a)
            if (a != i) denom += std::exp(sv(i, a) / tau - m);
        double lse = std::log(denom) + m;
        double row = 0.0;
        for (std::size_t p = 0; p < n_rows; ++p)
            if (p != i && (*w)(i, p) != 0.0) row += (*w)(i, p) * (sv(i, p) / tau - lse);
        total += -row / static_cast<double>(np);
    }
    n.value(0, 0) = total;
    n.requires_grad = nodes_[sim].requires_grad;
    n.back = [sim, w, tau](Tape& t, Node& self) {
        const Matrix& sv2 = t.nodes_[sim].value;
        std::size_t nr = sv2.rows;
        Matrix g(nr, nr);
        double gscale = self.grad(0, 0);
        for (std::size_t i = 0; i < nr; ++i) {
            std::size_t np = 0;
            double sumw = 0.0;
            for (std::size_t p = 0; p < nr; ++p)
                if (p != i && (*w)(i, p) != 0.0) { ++np; sumw += (*w)(i, p); }
            if (np == 0) continue;
            double inv_np = 1.0 / static_cast<double>(np);
            double m = -1e300;
            for (std::size_t a = 0; a < nr; ++a)
                if (a != i) m = std::max(m, sv2(i, a) / tau);
            double denom = 0.0;
            for (std::size_t a = 0; a < nr; ++a)
                if (a != i) denom += std::exp(sv2(i, a) / tau - m);
            for (std::size_t a = 0; a < nr; ++a) {
                if (a == i) continue;
                double soft = std::exp(sv2(i, a) / tau - m) / denom;
                double d = sumw * inv_np * soft / tau;  // from the lse term
                if ((*w)(i, a) != 0.0) d -= (*w)(i, a) * inv_np / tau;
                g(i, a) += gscale * d;
            }
        }
        t.accumulate(sim, g);
    };
    return push(std::move(n));
}

Tape::Ref Tape::lse_offdiag(Ref sim, double tau) {
    const Matrix& sv = nodes_[sim].value;
    std::size_t nr = sv.rows;
    Node n;
    n.value = Matrix(1, 1);
    double total = 0.0;
    for (std::size_t c = 0; c < nr; ++c) {
        if (nr < 2) break;
        double m = -1e300;
        for (std::size_t b = 0; b < nr; ++b)
            if (b != c) m = std::max(m, sv(c, b) / tau);
        double denom = 0.0;
        for (std::size_t b = 0; b < nr; ++b)
            if (b != c) denom += std::exp(sv(c, b) / tau - m);
        total += std::log(denom) + m;
    }
    n.value(0, 0) = total;
    n.requires_grad = nodes_[sim].requires_grad;
    n.back = [sim, tau](Tape& t, Node& self) {
        const Matrix& sv2 = t.nodes_[sim].value;
        std::size_t nr2 = sv2.rows;
        if (nr2 < 2) return;
        Matrix g(nr2, nr2);
        double gscale = self.grad(0, 0);
        for (std::size_t c = 0; c < nr2; ++c) {
            double m = -1e300;
            for (std::size_t b = 0; b < nr2; ++b)
                if (b != c) m = std::max(m, sv2(c, b) / tau);
            double denom = 0.0;
            for (std::size_t b = 0; b < nr2; ++b)
                if (b != c) denom += std::exp(sv2(c, b) / tau - m);
            for (std::size_t b = 0; b < nr2; ++b) {
                if (b == c) continue;
                g(c, b) += gscale * std::exp(sv2(c, b) / tau - m) / denom / tau;
            }
        }
        t.accumulate(sim, g);
    };
    return push(std::move(n));
}

void Tape::backward(Ref loss) {
    Node& ln = nodes_[loss];
    if (ln.value.rows != 1 || ln.value.cols != 1)
        throw std::invalid_argument("backward: loss must be scalar");
    if (!ln.requires_grad) return;
    ln.grad(0, 0) = 1.0;
    for (std::size_t r = loss + 1; r-- > 0;) {
        Node& n = nodes_[r];
        if (n.requires_grad && n.back) n.back(*this, n);
    }
    for (Node& n : nodes_) {
        if (n.external) {
            for (std::size_t i = 0; i < n.grad.size(); ++i)
                n.external->grad.data[i] += n.grad.data[i];
        }
    }
}

void adam_step(std::vector<Param*>& params, AdamState& state) {
    if (state.m.empty()) {
        for (Param* p : params) {
            state.m.emplace_back(p->value.rows, p->value.cols);
            state.v.emplace_back(p->value.rows, p->value.cols);
        }
    }
    ++state.step;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Param* p = params[k];
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            double g = p->grad.data[i];
            double& m = state.m[k].data[i];
            double& v = state.v[k].data[i];
            m = state.beta1 * m + (1.0 - state.beta1) * g;
            v = state.beta2 * v + (1.0 - state.beta2) * g * g;
            p->value.data[i] -= state.lr * (m / bc1) / (std::sqrt(v / bc2) + state.eps);
        }
    }
}

double grad_check(const std::function<double()>& loss, std::vector<Param*>& params, double eps) {
    for (Param* p : params) p->zero_grad();
    loss();
    std::vector<Matrix> analytic;
    for (Param* p : params) analytic.push_back(p->grad);

    double max_err = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Param* p = params[k];
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            double orig = p->value.data[i];
            p->value.data[i] = orig + eps;
            for (Param* q : params) q->zero_grad();
            double fp = loss();
            p->value.data[i] = orig - eps;
            for (Param* q : params) q->zero_grad();
            double fm = loss();
            p->value.data[i] = orig;
            double numeric = (fp - fm) / (2.0 * eps);
            double a = analytic[k].data[i];
            double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
            max_err = std::max(max_err, err);
        }
    }
    for (Param* p : params) p->zero_grad();
    return max_err;
}

}  // namespace goodie
