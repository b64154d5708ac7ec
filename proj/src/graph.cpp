#include "goodie/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "goodie/rng.hpp"

namespace goodie {

Matrix matmul_dense(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(a.rows); ++i) {
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Matrix matmul_dense_serial(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a(i, k);
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

Graph build_graph(const std::vector<Edge>& edge_list, std::size_t n_nodes) {
    if (n_nodes == 0) throw std::invalid_argument("build_graph: n_nodes must be positive");
    std::vector<Edge> canon;
    canon.reserve(edge_list.size());
    for (const auto& [u, v] : edge_list) {
        if (u >= n_nodes || v >= n_nodes)
            throw std::out_of_range("build_graph: node index out of range");
        if (u == v) continue;  // self-loops re-added during normalization
        canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    Graph g;
    g.n_nodes = n_nodes;
    g.edges = canon;

    std::vector<std::size_t> degree(n_nodes, 0);
    for (const auto& [u, v] : canon) {
        ++degree[u];
        ++degree[v];
    }
    Csr& csr = g.csr;
    csr.n_rows = csr.n_cols = n_nodes;
    csr.row_ptr.assign(n_nodes + 1, 0);
    for (std::size_t i = 0; i < n_nodes; ++i) csr.row_ptr[i + 1] = csr.row_ptr[i] + degree[i];
    csr.col_idx.assign(csr.row_ptr.back(), 0);
    csr.values.assign(csr.row_ptr.back(), 1.0);
    std::vector<std::size_t> cursor(csr.row_ptr.begin(), csr.row_ptr.end() - 1);
    for (const auto& [u, v] : canon) {
        csr.col_idx[cursor[u]++] = v;
        csr.col_idx[cursor[v]++] = u;
    }
    for (std::size_t i = 0; i < n_nodes; ++i)
        std::sort(csr.col_idx.begin() + csr.row_ptr[i], csr.col_idx.begin() + csr.row_ptr[i + 1]);
    return g;
}

NormalizedAdjacency normalize_sym(const Graph& graph) {
    std::size_t n = graph.n_nodes;
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t d = graph.csr.row_ptr[i + 1] - graph.csr.row_ptr[i];
        inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(d + 1));  // +1 self-loop
    }
    NormalizedAdjacency adj;
    adj.n_nodes = n;
    Csr& csr = adj.csr;
    csr.n_rows = csr.n_cols = n;
    csr.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t d = graph.csr.row_ptr[i + 1] - graph.csr.row_ptr[i];
        csr.row_ptr[i + 1] = csr.row_ptr[i] + d + 1;  // + diagonal
    }
    csr.col_idx.resize(csr.row_ptr.back());
    csr.values.resize(csr.row_ptr.back());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t out = csr.row_ptr[i];
        bool diag_done = false;
        for (std::size_t k = graph.csr.row_ptr[i]; k < graph.csr.row_ptr[i + 1]; ++k) {
            std::size_t j = graph.csr.col_idx[k];
            if (!diag_done && j > i) {
                csr.col_idx[out] = i;
                csr.values[out] = inv_sqrt_deg[i] * inv_sqrt_deg[i];
                ++out;
                diag_done = true;
            }
            csr.col_idx[out] = j;
            csr.values[out] = inv_sqrt_deg[i] * inv_sqrt_deg[j];
            ++out;
        }
        if (!diag_done) {
            csr.col_idx[out] = i;
            csr.values[out] = inv_sqrt_deg[i] * inv_sqrt_deg[i];
        }
    }
    return adj;
}

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& dense) {
    if (dense.rows != adj.n_nodes) throw std::invalid_argument("spmm: row count mismatch");
    Matrix out(adj.n_nodes, dense.cols);
    const Csr& csr = adj.csr;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(adj.n_nodes); ++i) {
        double* oi = out.row(i);
        for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) {
            double w = csr.values[k];
            const double* dj = dense.row(csr.col_idx[k]);
            for (std::size_t c = 0; c < dense.cols; ++c) oi[c] += w * dj[c];
        }
    }
    return out;
}

Matrix spmm_serial(const NormalizedAdjacency& adj, const Matrix& dense) {
    if (dense.rows != adj.n_nodes) throw std::invalid_argument("spmm: row count mismatch");
    Matrix out(adj.n_nodes, dense.cols);
    const Csr& csr = adj.csr;
    for (std::size_t i = 0; i < adj.n_nodes; ++i) {
        double* oi = out.row(i);
        for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) {
            double w = csr.values[k];
            const double* dj = dense.row(csr.col_idx[k]);
            for (std::size_t c = 0; c < dense.cols; ++c) oi[c] += w * dj[c];
        }
    }
    return out;
}

double spectral_radius_estimate(const NormalizedAdjacency& adj, std::size_t iters, std::uint64_t seed) {
    Rng rng(seed);
    Matrix v(adj.n_nodes, 1);
    for (std::size_t i = 0; i < adj.n_nodes; ++i) v(i, 0) = rng.normal();
    double lambda = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        Matrix w = spmm_serial(adj, v);
        double norm = 0.0;
        for (double x : w.data) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        lambda = norm;  // ||A v|| with ||v|| = 1
        for (double& x : w.data) x /= norm;
        v = w;
    }
    return lambda;
}

std::vector<Edge> load_edge_list(const std::string& path, std::size_t& max_index) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    std::vector<Edge> edges;
    max_index = 0;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        long long u, v;
        if (!(ss >> u >> v)) continue;
        if (u < 0 || v < 0) throw std::runtime_error("edge list: negative node index");
        edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
        max_index = std::max({max_index, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
    }
    return edges;
}

}  // namespace goodie
