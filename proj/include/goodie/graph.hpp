#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "goodie/matrix.hpp"

namespace goodie {

using Edge = std::pair<std::size_t, std::size_t>;

// Sparse matrix in compressed sparse row form. Column indices within a row
// are strictly ascending, which pins the accumulation order in spmm.
struct Csr {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_ptr;  // size n_rows + 1
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
};

// Immutable undirected graph. Symmetric, deduplicated, no self-loops stored.
struct Graph {
    std::size_t n_nodes = 0;
    std::vector<Edge> edges;  // canonical (min,max) pairs, sorted
    Csr csr;                  // binary adjacency, both directions
};

// Symmetric-normalized self-looped adjacency D^-1/2 (A+I) D^-1/2.
struct NormalizedAdjacency {
    std::size_t n_nodes = 0;
    Csr csr;
};

Graph build_graph(const std::vector<Edge>& edge_list, std::size_t n_nodes);

NormalizedAdjacency normalize_sym(const Graph& graph);

// Sparse-dense product, OpenMP over rows; per-row accumulation order is
// ascending column index, so output is bit-identical run to run.
Matrix spmm(const NormalizedAdjacency& adj, const Matrix& dense);

// Serial reference for tests and the kernel benchmark.
Matrix spmm_serial(const NormalizedAdjacency& adj, const Matrix& dense);

// Power iteration estimate of the largest-magnitude eigenvalue.
double spectral_radius_estimate(const NormalizedAdjacency& adj, std::size_t iters, std::uint64_t seed);

// One `src<TAB>dst` pair per line, 0-based, `#` comments.
std::vector<Edge> load_edge_list(const std::string& path, std::size_t& max_index);

}  // namespace goodie
