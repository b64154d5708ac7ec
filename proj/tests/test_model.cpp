#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goodie/model.hpp"
#include "goodie/rng.hpp"
#include "goodie/synthetic.hpp"

using namespace goodie;

namespace {

struct Instance {
    Matrix z;                      // n x d raw embeddings
    std::vector<std::size_t> ext;  // label per node
    PairWeights pw;
    LabelTable lt;
};

Instance random_instance(std::uint64_t seed) {
    Rng rng(seed);
    std::size_t n = 4 + rng.index(9);        // 4..12 nodes
    std::size_t c = 2 + rng.index(3);        // 2..4 classes
    std::size_t d = 2 + rng.index(3);
    Instance inst;
    inst.z = Matrix(n, d);
    for (double& v : inst.z.data) v = rng.normal();
    inst.ext.resize(n);
    inst.pw.is_train.resize(n);
    inst.pw.confidence.resize(n);
    inst.lt.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        inst.ext[i] = rng.index(c);
        inst.lt.labels[i] = inst.ext[i];
        inst.pw.is_train[i] = rng.uniform() < 0.4 ? 1 : 0;
        inst.pw.confidence[i] = 0.05 + 0.95 * rng.uniform();
    }
    // guarantee at least two train nodes so the train-only variant is defined
    inst.pw.is_train[0] = 1;
    inst.pw.is_train[1] = 1;
    for (std::size_t i = 0; i < n; ++i)
        if (inst.pw.is_train[i]) inst.lt.train_idx.push_back(i);
    inst.lt.n_classes = c;
    return inst;
}

Matrix l2_rows(const Matrix& z) {
    Matrix out = z;
    for (std::size_t i = 0; i < z.rows; ++i) {
        double nrm = 0.0;
        for (std::size_t j = 0; j < z.cols; ++j) nrm += z(i, j) * z(i, j);
        nrm = std::sqrt(nrm);
        if (nrm > 1e-12)
            for (std::size_t j = 0; j < z.cols; ++j) out(i, j) /= nrm;
    }
    return out;
}

double dot_row(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(j, k);
    return s;
}

// Straight double-loop evaluation of the weighted contrastive objective over
// normalized embeddings; naive exponentials, no shared code with the tape.
double oracle_contrastive(const Matrix& z_raw, const std::vector<std::size_t>& labels,
                          const std::function<double(std::size_t, std::size_t)>& weight_of,
                          double tau) {
    Matrix z = l2_rows(z_raw);
    std::size_t n = z.rows;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> pos;
        for (std::size_t p = 0; p < n; ++p)
            if (p != i && labels[p] == labels[i] && weight_of(i, p) != 0.0) pos.push_back(p);
        if (pos.empty()) continue;
        double denom = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            if (a != i) denom += std::exp(dot_row(z, i, z, a) / tau);
        double row = 0.0;
        for (std::size_t p : pos)
            row += weight_of(i, p) * std::log(std::exp(dot_row(z, i, z, p) / tau) / denom);
        total += -row / static_cast<double>(pos.size());
    }
    return total;
}

double oracle_scaled(const Matrix& z_raw, const Instance& inst, double tau) {
    std::size_t c = inst.lt.n_classes, n = z_raw.rows, d = z_raw.cols;
    Matrix protos(c, d);
    std::vector<std::size_t> count(c, 0);
    for (std::size_t i = 0; i < n; ++i) ++count[inst.ext[i]];
    for (std::size_t i = 0; i < n; ++i) {
        double coef = inst.pw.is_train[i] ? 1.0 : inst.pw.confidence[i];
        for (std::size_t j = 0; j < d; ++j)
            protos(inst.ext[i], j) += coef * z_raw(i, j) / static_cast<double>(count[inst.ext[i]]);
    }
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < c; ++k)
        if (count[k] > 0) live.push_back(k);
    if (live.size() < 2) return 0.0;
    Matrix plive(live.size(), d);
    for (std::size_t r = 0; r < live.size(); ++r)
        for (std::size_t j = 0; j < d; ++j) plive(r, j) = protos(live[r], j);
    Matrix pn = l2_rows(plive);
    double total = 0.0;
    for (std::size_t a = 0; a < pn.rows; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b < pn.rows; ++b)
            if (b != a) s += std::exp(dot_row(pn, a, pn, b) / tau);
        total += std::log(s);
    }
    return total;
}

double eval_loss(const Instance& inst, const GoodieConfig& cfg) {
    Tape tape;
    Tape::Ref z = tape.constant(inst.z);
    Tape::Ref loss = goodie_pseudo_loss(tape, z, inst.ext, inst.pw, inst.lt, cfg);
    return tape.value(loss)(0, 0);
}

}  // namespace

TEST_CASE("pair weight four-case values") {
    CHECK(pair_weight(true, true, 0.3, 0.2) == 1.0);
    CHECK(pair_weight(true, false, 0.9, 0.8) == 0.8);
    CHECK(pair_weight(false, true, 0.9, 0.8) == 0.9);
    CHECK(pair_weight(false, false, 0.9, 0.8) == doctest::Approx(0.72).epsilon(1e-15));
}

TEST_CASE("pair weight ordering holds across sampled confidences") {
    Rng rng(77);
    for (int k = 0; k < 100000; ++k) {
        double ci = rng.uniform(), cp = rng.uniform();
        double tt = pair_weight(true, true, ci, cp);
        double tp = pair_weight(true, false, ci, cp);
        double pt = pair_weight(false, true, ci, cp);
        double pp = pair_weight(false, false, ci, cp);
        CHECK(tt == 1.0);
        CHECK(pp <= std::min(tp, pt) + 1e-15);
        CHECK(std::max(tp, pt) <= 1.0);
        CHECK(pp >= 0.0);
    }
}

TEST_CASE("extended labels use the train label where available") {
    LabelTable lt;
    lt.labels = {2, 0, 1};
    lt.train_idx = {0, 2};
    LPResult lp;
    lp.pseudo_labels = {1, 1, 0};
    auto ext = extended_labels(lt, lp);
    CHECK(ext == std::vector<std::size_t>{2, 1, 1});
}

TEST_CASE("positive weight matrix matches the per-pair rule") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Instance inst = random_instance(seed);
        std::size_t n = inst.z.rows;
        Matrix w = positive_weights(inst.ext, inst.pw, LossVariant::pseudocon);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t p = 0; p < n; ++p) {
                double expect = 0.0;
                if (i != p && inst.ext[i] == inst.ext[p])
                    expect = inst.pw.weight(i, p);
                CHECK(w(i, p) == expect);
            }
        }
    }
}

TEST_CASE("positive weight variants") {
    Instance inst = random_instance(42);
    std::size_t n = inst.z.rows;
    Matrix ws = positive_weights(inst.ext, inst.pw, LossVariant::strong);
    Matrix ww = positive_weights(inst.ext, inst.pw, LossVariant::weak);
    Matrix wm = positive_weights(inst.ext, inst.pw, LossVariant::manual);
    Matrix wn = positive_weights(inst.ext, inst.pw, LossVariant::none);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < n; ++p) {
            CHECK(wn(i, p) == 0.0);
            if (i == p || inst.ext[i] != inst.ext[p]) {
                CHECK(ws(i, p) == 0.0);
                continue;
            }
            bool ti = inst.pw.is_train[i], tp = inst.pw.is_train[p];
            CHECK(ws(i, p) == 1.0);
            CHECK(ww(i, p) == ((ti && tp) ? 1.0
                                          : inst.pw.confidence[i] * inst.pw.confidence[p]));
            CHECK(wm(i, p) == ((ti && tp) ? 1.0 : (ti || tp) ? 0.5 : 0.25));
        }
    }
}

TEST_CASE("class prototypes match the coefficient route and a direct sum") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Instance inst = random_instance(100 + seed);
        std::vector<uint8_t> nonempty;
        Matrix protos = class_prototypes(inst.z, inst.ext, inst.pw, inst.lt.n_classes, &nonempty);
        std::size_t c = inst.lt.n_classes, d = inst.z.cols;
        Matrix expect(c, d);
        std::vector<std::size_t> count(c, 0);
        for (std::size_t i = 0; i < inst.z.rows; ++i) ++count[inst.ext[i]];
        for (std::size_t i = 0; i < inst.z.rows; ++i) {
            double coef = inst.pw.is_train[i] ? 1.0 : inst.pw.confidence[i];
            for (std::size_t j = 0; j < d; ++j)
                expect(inst.ext[i], j) += coef * inst.z(i, j) / static_cast<double>(count[inst.ext[i]]);
        }
        CHECK(max_abs_diff(protos, expect) < 1e-12);
        for (std::size_t k = 0; k < c; ++k) CHECK((nonempty[k] != 0) == (count[k] > 0));
    }
}

TEST_CASE("contrastive loss equals the double-loop reference") {
    GoodieConfig cfg;
    cfg.tau = 0.5;  // modest sharpening keeps the naive reference in range
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        Instance inst = random_instance(1000 + seed);

        cfg.loss_variant = LossVariant::pseudocon;
        double expect = oracle_contrastive(
            inst.z, inst.ext,
            [&](std::size_t i, std::size_t p) { return inst.pw.weight(i, p); }, cfg.tau);
        CHECK(eval_loss(inst, cfg) == doctest::Approx(expect).epsilon(1e-9));

        cfg.loss_variant = LossVariant::strong;
        expect = oracle_contrastive(
            inst.z, inst.ext, [](std::size_t, std::size_t) { return 1.0; }, cfg.tau);
        CHECK(eval_loss(inst, cfg) == doctest::Approx(expect).epsilon(1e-9));

        cfg.loss_variant = LossVariant::weak;
        expect = oracle_contrastive(
            inst.z, inst.ext,
            [&](std::size_t i, std::size_t p) {
                return (inst.pw.is_train[i] && inst.pw.is_train[p])
                           ? 1.0
                           : inst.pw.confidence[i] * inst.pw.confidence[p];
            },
            cfg.tau);
        CHECK(eval_loss(inst, cfg) == doctest::Approx(expect).epsilon(1e-9));

        cfg.loss_variant = LossVariant::manual;
        expect = oracle_contrastive(
            inst.z, inst.ext,
            [&](std::size_t i, std::size_t p) {
                bool ti = inst.pw.is_train[i], tp = inst.pw.is_train[p];
                return (ti && tp) ? 1.0 : (ti || tp) ? 0.5 : 0.25;
            },
            cfg.tau);
        CHECK(eval_loss(inst, cfg) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("train-only variant restricts the anchor and denominator set") {
    GoodieConfig cfg;
    cfg.tau = 0.5;
    cfg.loss_variant = LossVariant::supcon_train;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Instance inst = random_instance(5000 + seed);
        // reference works on the train submatrix only
        std::size_t m = inst.lt.train_idx.size();
        Matrix zt(m, inst.z.cols);
        std::vector<std::size_t> lab(m);
        for (std::size_t a = 0; a < m; ++a) {
            std::size_t i = inst.lt.train_idx[a];
            lab[a] = inst.ext[i];
            for (std::size_t j = 0; j < inst.z.cols; ++j) zt(a, j) = inst.z(i, j);
        }
        double expect =
            oracle_contrastive(zt, lab, [](std::size_t, std::size_t) { return 1.0; }, cfg.tau);
        CHECK(eval_loss(inst, cfg) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("prototype-level loss equals the brute-force reference") {
    GoodieConfig cfg;
    cfg.tau = 0.5;
    cfg.loss_variant = LossVariant::pseudocon;
    cfg.scaled_loss = true;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Instance inst = random_instance(9000 + seed);
        double expect = oracle_scaled(inst.z, inst, cfg.tau);
        CHECK(eval_loss(inst, cfg) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("disabled contrastive term is exactly zero") {
    GoodieConfig cfg;
    cfg.loss_variant = LossVariant::none;
    Instance inst = random_instance(1);
    CHECK(eval_loss(inst, cfg) == 0.0);
}

TEST_CASE("attention weights form a convex pair in (0,1)") {
    SyntheticSpec spec;
    spec.n_nodes = 80;
    spec.seed = 4;
    SyntheticData data = generate_synthetic(spec);
    NormalizedAdjacency adj = normalize_sym(data.graph);
    LabelTable lt = make_splits(data.labels, 10, 20, 2);
    LPResult lp = label_propagate(adj, lt, 0.99, 50, 0.01);
    MaskedFeatures mf = mask_uniform(data.features, 0.3, 1);
    FPResult fp = feature_propagate(adj, mf, 40);

    GoodieConfig cfg;
    cfg.hidden = 16;
    GoodieParams params = init_goodie_params(lt.n_classes, data.features.cols, cfg, 5);
    Tape tape;
    GoodieForward f = goodie_forward(tape, adj, lp.y_hat, fp.x_hat, params, cfg, false, 0);
    REQUIRE(f.alpha_lp.size() == 80);
    for (std::size_t i = 0; i < 80; ++i) {
        CHECK(f.alpha_lp[i] > 0.0);
        CHECK(f.alpha_lp[i] < 1.0);
        CHECK(f.alpha_lp[i] + f.alpha_fp[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(tape.value(f.logits).rows == 80);
    CHECK(tape.value(f.logits).cols == lt.n_classes);
    // softmax rows sum to one
    const Matrix& probs = tape.value(f.probs);
    for (std::size_t i = 0; i < probs.rows; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < probs.cols; ++c) s += probs(i, c);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("combination variants produce validly shaped outputs") {
    SyntheticSpec spec;
    spec.n_nodes = 40;
    spec.seed = 6;
    SyntheticData data = generate_synthetic(spec);
    NormalizedAdjacency adj = normalize_sym(data.graph);
    LabelTable lt = make_splits(data.labels, 5, 10, 2);
    LPResult lp = label_propagate(adj, lt, 0.99, 50, 0.01);
    MaskedFeatures mf = mask_uniform(data.features, 0.3, 1);
    FPResult fp = feature_propagate(adj, mf, 40);

    for (AttentionVariant v : {AttentionVariant::random, AttentionVariant::sum,
                               AttentionVariant::mean, AttentionVariant::concat}) {
        GoodieConfig cfg;
        cfg.hidden = 8;
        cfg.attention_variant = v;
        GoodieParams params = init_goodie_params(lt.n_classes, data.features.cols, cfg, 5);
        Tape tape;
        GoodieForward f = goodie_forward(tape, adj, lp.y_hat, fp.x_hat, params, cfg, false, 0);
        CHECK(f.alpha_lp.empty());
        std::size_t zc = v == AttentionVariant::concat ? 16 : 8;
        CHECK(tape.value(f.z).cols == zc);
        CHECK(tape.value(f.logits).cols == lt.n_classes);
    }

    // mean is half of sum, elementwise
    GoodieConfig cs, cm;
    cs.hidden = cm.hidden = 8;
    cs.attention_variant = AttentionVariant::sum;
    cm.attention_variant = AttentionVariant::mean;
    GoodieParams ps = init_goodie_params(lt.n_classes, data.features.cols, cs, 5);
    GoodieParams pm = init_goodie_params(lt.n_classes, data.features.cols, cm, 5);
    Tape ts, tm;
    GoodieForward fs = goodie_forward(ts, adj, lp.y_hat, fp.x_hat, ps, cs, false, 0);
    GoodieForward fm = goodie_forward(tm, adj, lp.y_hat, fp.x_hat, pm, cm, false, 0);
    Matrix half = ts.value(fs.z);
    for (double& v : half.data) v *= 0.5;
    CHECK(max_abs_diff(half, tm.value(fm.z)) < 1e-15);
}

TEST_CASE("full objective passes a finite-difference check") {
    SyntheticSpec spec;
    spec.n_nodes = 24;
    spec.n_classes = 3;
    spec.feature_dim = 6;
    spec.intra_p = 0.2;
    spec.inter_p = 0.05;
    spec.seed = 12;
    SyntheticData data = generate_synthetic(spec);
    NormalizedAdjacency adj = normalize_sym(data.graph);
    LabelTable lt = make_splits(data.labels, 3, 6, 2);
    LPResult lp = label_propagate(adj, lt, 0.99, 50, 0.01);
    MaskedFeatures mf = mask_uniform(data.features, 0.4, 1);
    FPResult fp = feature_propagate(adj, mf, 40);
    PairWeights pw = make_pair_weights(lt, lp);
    std::vector<std::size_t> ext = extended_labels(lt, lp);

    GoodieConfig cfg;
    cfg.hidden = 5;
    cfg.tau = 0.5;
    cfg.dropout = 0.3;  // fixed seed keeps the mask constant across evaluations
    GoodieParams params = init_goodie_params(lt.n_classes, data.features.cols, cfg, 8);
    std::vector<Param*> plist = params.all();
    auto loss = [&]() {
        Tape tape;
        GoodieForward f = goodie_forward(tape, adj, lp.y_hat, fp.x_hat, params, cfg, true, 31);
        Tape::Ref ce = tape.masked_cross_entropy(f.logits, lt, lt.train_idx);
        Tape::Ref con = goodie_pseudo_loss(tape, f.z, ext, pw, lt, cfg);
        Tape::Ref total = tape.axpy(ce, con, cfg.lambda);
        tape.backward(total);
        return tape.value(total)(0, 0);
    };
    CHECK(grad_check(loss, plist) < 1e-3);
}

TEST_CASE("variant parsers round-trip and reject junk") {
    CHECK(parse_attention_variant("attention") == AttentionVariant::attention);
    CHECK(parse_attention_variant("concat") == AttentionVariant::concat);
    CHECK_THROWS(parse_attention_variant("bogus"));
    CHECK(parse_loss_variant("pseudocon") == LossVariant::pseudocon);
    CHECK(parse_loss_variant("none") == LossVariant::none);
    CHECK_THROWS(parse_loss_variant("bogus"));
}
