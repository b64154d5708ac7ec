#include "goodie/synthetic.hpp"

#include <stdexcept>

#include "goodie/rng.hpp"

namespace goodie {

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_nodes == 0 || spec.n_classes == 0)
        throw std::invalid_argument("generate_synthetic: empty spec");
    Rng rng(spec.seed);
    SyntheticData d;
    d.labels.resize(spec.n_nodes);
    for (std::size_t i = 0; i < spec.n_nodes; ++i) d.labels[i] = i % spec.n_classes;

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < spec.n_nodes; ++i) {
        for (std::size_t j = i + 1; j < spec.n_nodes; ++j) {
            double p = d.labels[i] == d.labels[j] ? spec.intra_p : spec.inter_p;
            if (rng.uniform() < p) edges.emplace_back(i, j);
        }
    }
    d.graph = build_graph(edges, spec.n_nodes);

    // class mean vectors: signal-scaled Gaussian directions, fixed per class
    Matrix means(spec.n_classes, spec.feature_dim);
    for (double& v : means.data) v = spec.signal * rng.normal();
    d.features = Matrix(spec.n_nodes, spec.feature_dim);
    for (std::size_t i = 0; i < spec.n_nodes; ++i)
        for (std::size_t f = 0; f < spec.feature_dim; ++f)
            d.features(i, f) = means(d.labels[i], f) + rng.normal();
    return d;
}

}  // namespace goodie
