#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goodie/baselines.hpp"
#include "goodie/metrics.hpp"
#include "goodie/rng.hpp"
#include "goodie/synthetic.hpp"

using namespace goodie;

TEST_CASE("neighbor mean imputation on a path") {
    // 0 - 1 - 2, middle node missing
    Graph g = build_graph({{0, 1}, {1, 2}}, 3);
    Matrix x(3, 1);
    x(0, 0) = 2.0;
    x(1, 0) = std::nan("");
    x(2, 0) = 6.0;
    MaskedFeatures mf = wrap_observed(x);
    Matrix out = neighbor_mean_impute(g, mf);
    CHECK(out(0, 0) == 2.0);
    CHECK(out(1, 0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(out(2, 0) == 6.0);
}

TEST_CASE("neighbor mean skips missing neighbors per dimension") {
    // star: 0 center with leaves 1,2,3; center missing both dims
    Graph g = build_graph({{0, 1}, {0, 2}, {0, 3}}, 4);
    Matrix x(4, 2);
    x(0, 0) = std::nan("");
    x(0, 1) = std::nan("");
    x(1, 0) = 1.0;
    x(1, 1) = std::nan("");  // leaf 1 misses dim 1
    x(2, 0) = 3.0;
    x(2, 1) = 10.0;
    x(3, 0) = std::nan("");
    x(3, 1) = 20.0;
    MaskedFeatures mf = wrap_observed(x);
    Matrix out = neighbor_mean_impute(g, mf);
    CHECK(out(0, 0) == doctest::Approx(2.0).epsilon(1e-15));   // mean of 1, 3
    CHECK(out(0, 1) == doctest::Approx(15.0).epsilon(1e-15));  // mean of 10, 20
    // leaf 3 dim 0: only neighbor is the center, itself missing -> zero
    CHECK(out(3, 0) == 0.0);
    // leaf 1 dim 1: center missing -> zero
    CHECK(out(1, 1) == 0.0);
    // observed entries never move
    CHECK(out(2, 1) == 10.0);
}

TEST_CASE("isolated node with missing features imputes to zero") {
    Graph g = build_graph({{0, 1}}, 3);  // node 2 isolated
    Matrix x(3, 1);
    x(0, 0) = 1.0;
    x(1, 0) = 2.0;
    x(2, 0) = std::nan("");
    MaskedFeatures mf = wrap_observed(x);
    Matrix out = neighbor_mean_impute(g, mf);
    CHECK(out(2, 0) == 0.0);
}

TEST_CASE("imputation with nothing missing is the identity") {
    SyntheticSpec spec;
    spec.n_nodes = 60;
    spec.seed = 2;
    SyntheticData data = generate_synthetic(spec);
    MaskedFeatures mf = mask_uniform(data.features, 0.0, 0);
    Matrix out = neighbor_mean_impute(data.graph, mf);
    CHECK(max_abs_diff(out, data.features) == 0.0);
}

TEST_CASE("propagation-only classifier labels a two-block graph") {
    // two triangles joined by nothing; one labeled node per block
    Graph g = build_graph({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, 6);
    NormalizedAdjacency adj = normalize_sym(g);
    LabelTable lt;
    lt.labels = {0, 0, 0, 1, 1, 1};
    lt.train_idx = {0, 3};
    lt.test_idx = {1, 2, 4, 5};
    lt.n_classes = 2;
    lt.y0 = Matrix(6, 2);
    lt.y0(0, 0) = 1.0;
    lt.y0(3, 1) = 1.0;
    auto pred = lp_only_predict(adj, lt, 0.99, 50);
    CHECK(pred == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
    CHECK(accuracy(pred, lt.labels, lt.test_idx) == 1.0);
}

TEST_CASE("propagation-only classifier is strong on homophilous graphs") {
    SyntheticSpec spec;
    spec.n_nodes = 300;
    spec.intra_p = 0.1;
    spec.inter_p = 0.002;
    spec.seed = 9;
    SyntheticData data = generate_synthetic(spec);
    NormalizedAdjacency adj = normalize_sym(data.graph);
    LabelTable lt = make_splits(data.labels, 20, 60, 1);
    auto pred = lp_only_predict(adj, lt, 0.99, 50);
    CHECK(accuracy(pred, data.labels, lt.test_idx) > 0.9);
    // train nodes always keep their own label
    for (std::size_t i : lt.train_idx) CHECK(pred[i] == data.labels[i]);
}

TEST_CASE("two-layer graph network shapes and determinism") {
    SyntheticSpec spec;
    spec.n_nodes = 50;
    spec.seed = 3;
    SyntheticData data = generate_synthetic(spec);
    NormalizedAdjacency adj = normalize_sym(data.graph);
    GcnParams params = init_gcn_params(data.features.cols, 16, 4, 7);
    CHECK(params.w1.value.rows == data.features.cols);
    CHECK(params.w1.value.cols == 16);
    CHECK(params.w2.value.rows == 16);
    CHECK(params.w2.value.cols == 4);

    Tape t1, t2;
    Tape::Ref o1 = gcn_forward(t1, adj, data.features, params, 0.5, false, 0);
    Tape::Ref o2 = gcn_forward(t2, adj, data.features, params, 0.5, false, 99);
    CHECK(t1.value(o1).rows == 50);
    CHECK(t1.value(o1).cols == 4);
    // eval mode ignores the dropout seed entirely
    CHECK(max_abs_diff(t1.value(o1), t2.value(o2)) == 0.0);

    GcnParams again = init_gcn_params(data.features.cols, 16, 4, 7);
    CHECK(max_abs_diff(params.w1.value, again.w1.value) == 0.0);
    CHECK(max_abs_diff(params.w2.value, again.w2.value) == 0.0);
}

TEST_CASE("graph network gradients check out") {
    SyntheticSpec spec;
    spec.n_nodes = 20;
    spec.n_classes = 2;
    spec.feature_dim = 5;
    spec.intra_p = 0.3;
    spec.inter_p = 0.1;
    spec.seed = 5;
    SyntheticData data = generate_synthetic(spec);
    NormalizedAdjacency adj = normalize_sym(data.graph);
    LabelTable lt = make_splits(data.labels, 4, 4, 1);
    GcnParams params = init_gcn_params(data.features.cols, 6, lt.n_classes, 11);
    std::vector<Param*> plist = params.all();
    auto loss = [&]() {
        Tape tape;
        Tape::Ref logits = gcn_forward(tape, adj, data.features, params, 0.4, true, 17);
        Tape::Ref ce = tape.masked_cross_entropy(logits, lt, lt.train_idx);
        tape.backward(ce);
        return tape.value(ce)(0, 0);
    };
    CHECK(grad_check(loss, plist) < 1e-3);
}
