#include "goodie/harness.hpp"

#include "goodie/io.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "goodie/metrics.hpp"
#include "goodie/rng.hpp"

namespace goodie {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<std::size_t> argmax_rows(const Matrix& m) {
    std::vector<std::size_t> out(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < m.cols; ++c)
            if (r[c] > r[arg]) arg = c;
        out[i] = arg;
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return -1.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

Method parse_method(const std::string& s) {
    if (s == "goodie") return Method::goodie;
    if (s == "lp") return Method::lp;
    if (s == "gcn-zero") return Method::gcn_zero;
    if (s == "gcn-nm") return Method::gcn_nm;
    if (s == "fp-gcn") return Method::fp_gcn;
    throw std::invalid_argument("unknown method: " + s);
}

std::string method_name(Method m) {
    switch (m) {
        case Method::goodie: return "goodie";
        case Method::lp: return "lp";
        case Method::gcn_zero: return "gcn-zero";
        case Method::gcn_nm: return "gcn-nm";
        case Method::fp_gcn: return "fp-gcn";
    }
    return "?";
}

MissingScenario parse_scenario(const std::string& s) {
    if (s == "uniform") return MissingScenario::uniform;
    if (s == "structural") return MissingScenario::structural;
    throw std::invalid_argument("unknown scenario: " + s);
}

std::string scenario_name(MissingScenario s) {
    return s == MissingScenario::uniform ? "uniform" : "structural";
}

std::vector<double> default_mr_grid() {
    return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999, 0.9999, 1.0};
}

RunResult train_loop(TrainHooks& hooks, const LabelTable& labels, double lr,
                     std::size_t patience, std::size_t max_epochs) {
    auto t0 = std::chrono::steady_clock::now();
    AdamState adam;
    adam.lr = lr;
    RunResult rr;
    std::vector<Matrix> best_values;
    double best_val = -1.0;
    std::size_t since_best = 0;

    for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
        {
            Tape tape;
            Tape::Ref logits = 0;
            Tape::Ref loss = hooks.forward(tape, true, epoch, &logits, nullptr, nullptr);
            double lv = tape.value(loss)(0, 0);
            if (!std::isfinite(lv))
                throw std::runtime_error("train_loop: non-finite loss at epoch " +
                                         std::to_string(epoch) + " (" + std::to_string(lv) + ")");
            rr.train_loss.push_back(lv);
            for (Param* p : hooks.params) p->zero_grad();
            tape.backward(loss);
            adam_step(hooks.params, adam);
        }
        {
            Tape tape;
            Tape::Ref logits = 0;
            hooks.forward(tape, false, epoch, &logits, nullptr, nullptr);
            auto preds = argmax_rows(tape.value(logits));
            double val = accuracy(preds, labels.labels, labels.val_idx);
            rr.val_acc.push_back(val);
            if (val > best_val) {
                best_val = val;
                rr.best_epoch = epoch;
                since_best = 0;
                best_values.clear();
                for (Param* p : hooks.params) best_values.push_back(p->value);
            } else {
                ++since_best;
            }
        }
        rr.epochs = epoch + 1;
        if (since_best > patience) break;
    }

    if (best_values.empty()) throw std::runtime_error("train_loop: max_epochs must be >= 1");
    for (std::size_t k = 0; k < hooks.params.size(); ++k)
        hooks.params[k]->value = best_values[k];
    rr.best_val_acc = best_val;

    Tape tape;
    Tape::Ref logits = 0;
    std::vector<double> alpha_lp, alpha_fp;
    hooks.forward(tape, false, rr.best_epoch, &logits, &alpha_lp, &alpha_fp);
    auto preds = argmax_rows(tape.value(logits));
    rr.test_acc = accuracy(preds, labels.labels, labels.test_idx);
    rr.alpha_lp_mean = mean_of(alpha_lp);
    rr.alpha_fp_mean = mean_of(alpha_fp);
    rr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rr;
}

PreparedData prepare_data(const ExperimentConfig& cfg, std::uint64_t seed) {
    PreparedData d;
    if (!cfg.dataset_dir.empty()) {
        // file-backed dataset: graph fixed across seeds; nan features are
        // pre-masked and stay masked under every mr
        Dataset ds = load_dataset(cfg.dataset_dir);
        d.graph = std::move(ds.graph);
        d.adj = normalize_sym(d.graph);
        d.labels = std::move(ds.labels);
        d.pre_observed.assign(ds.features.size(), 1);
        for (std::size_t k = 0; k < ds.features.size(); ++k) {
            if (std::isnan(ds.features.data[k])) {
                d.pre_observed[k] = 0;
                ds.features.data[k] = 0.0;
            }
        }
        d.features = std::move(ds.features);
        return d;
    }
    SyntheticSpec spec = cfg.synthetic;
    spec.seed = mix(seed, 0xA11CE);
    SyntheticData s = generate_synthetic(spec);
    d.graph = std::move(s.graph);
    d.adj = normalize_sym(d.graph);
    d.features = std::move(s.features);
    d.labels = std::move(s.labels);
    return d;
}

namespace {

MaskedFeatures apply_mask(const PreparedData& data, MissingScenario scenario, double mr,
                          std::uint64_t seed) {
    MaskedFeatures mf = scenario == MissingScenario::uniform
                            ? mask_uniform(data.features, mr, mix(seed, 0x5EED1))
                            : mask_structural(data.features, mr, mix(seed, 0x5EED1));
    for (std::size_t k = 0; k < data.pre_observed.size(); ++k) {
        if (!data.pre_observed[k]) {
            mf.observed[k] = 0;
            mf.values.data[k] = 0.0;
        }
    }
    return mf;
}

LabelTable build_splits(const std::vector<std::size_t>& labels, const ExperimentConfig& cfg,
                        std::uint64_t seed) {
    std::size_t n_classes = 0;
    for (std::size_t c : labels) n_classes = std::max(n_classes, c + 1);
    std::size_t train_total = cfg.per_class_train * n_classes;
    std::size_t remaining = labels.size() > train_total ? labels.size() - train_total : 0;
    // full requested validation size when it fits; halve the remainder on
    // small graphs so the test set stays non-empty
    std::size_t n_val = cfg.n_val < remaining ? cfg.n_val : remaining / 2;
    return make_splits(labels, cfg.per_class_train, n_val, mix(seed, 0x511));
}

}  // namespace

RunResult run_node_method(Method method, const PreparedData& data, MissingScenario scenario,
                          double mr, std::uint64_t seed, const ExperimentConfig& cfg) {
    const GoodieConfig& mc = cfg.model;
    MaskedFeatures masked = apply_mask(data, scenario, mr, seed);
    LabelTable lt = build_splits(data.labels, cfg, seed);

    if (method == Method::lp) {
        auto t0 = std::chrono::steady_clock::now();
        auto preds = lp_only_predict(data.adj, lt, mc.alpha, mc.k_lp);
        RunResult rr;
        rr.test_acc = accuracy(preds, lt.labels, lt.test_idx);
        rr.best_val_acc = accuracy(preds, lt.labels, lt.val_idx);
        rr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rr;
    }

    if (method == Method::goodie) {
        LPResult lp = label_propagate(data.adj, lt, mc.alpha, mc.k_lp, mc.tau);
        FPResult fp = feature_propagate(data.adj, masked, mc.k_fp);
        PairWeights pw = make_pair_weights(lt, lp);
        std::vector<std::size_t> ext = extended_labels(lt, lp);
        GoodieParams params = init_goodie_params(lt.n_classes, data.features.cols, mc, mix(seed, 0x9A));
        TrainHooks hooks;
        hooks.params = params.all();
        const NormalizedAdjacency& adj = data.adj;
        hooks.forward = [&, seed](Tape& tape, bool training, std::uint64_t epoch, Tape::Ref* logits,
                                  std::vector<double>* alp, std::vector<double>* afp) {
            GoodieForward f = goodie_forward(tape, adj, lp.y_hat, fp.x_hat, params, mc, training,
                                             mix(seed, 0xD0 + epoch));
            *logits = f.logits;
            if (alp) *alp = f.alpha_lp;
            if (afp) *afp = f.alpha_fp;
            Tape::Ref ce = tape.masked_cross_entropy(f.logits, lt, lt.train_idx);
            if (!training || mc.loss_variant == LossVariant::none || mc.lambda == 0.0) return ce;
            Tape::Ref pseudo = goodie_pseudo_loss(tape, f.z, ext, pw, lt, mc);
            return tape.axpy(ce, pseudo, mc.lambda);
        };
        return train_loop(hooks, lt, mc.lr, mc.patience, mc.max_epochs);
    }

    // 2-layer GCN over the method's feature matrix
    Matrix feats;
    switch (method) {
        case Method::gcn_zero: feats = masked.values; break;
        case Method::gcn_nm: feats = neighbor_mean_impute(data.graph, masked); break;
        case Method::fp_gcn: feats = feature_propagate(data.adj, masked, mc.k_fp).x_hat; break;
        default: throw std::logic_error("unreachable");
    }
    GcnParams params = init_gcn_params(data.features.cols, mc.hidden, lt.n_classes, mix(seed, 0x9A));
    TrainHooks hooks;
    hooks.params = params.all();
    const NormalizedAdjacency& adj = data.adj;
    hooks.forward = [&, seed](Tape& tape, bool training, std::uint64_t epoch, Tape::Ref* logits,
                              std::vector<double>*, std::vector<double>*) {
        Tape::Ref out =
            gcn_forward(tape, adj, feats, params, cfg.model.dropout, training, mix(seed, 0xE0 + epoch));
        *logits = out;
        return tape.masked_cross_entropy(out, lt, lt.train_idx);
    };
    return train_loop(hooks, lt, mc.lr, mc.patience, mc.max_epochs);
}

LinkSplit link_split(const Graph& graph, double test_frac, double val_frac, std::uint64_t seed) {
    std::vector<Edge> edges = graph.edges;
    Rng rng(mix(seed, 0x11AB));
    rng.shuffle(edges);
    std::size_t n_test = round_even(test_frac * static_cast<double>(edges.size()));
    std::size_t n_val = round_even(val_frac * static_cast<double>(edges.size()));
    LinkSplit ls;
    ls.test_pos.assign(edges.begin(), edges.begin() + n_test);
    ls.val_pos.assign(edges.begin() + n_test, edges.begin() + n_test + n_val);
    std::vector<Edge> train_edges(edges.begin() + n_test + n_val, edges.end());
    ls.train_graph = build_graph(train_edges, graph.n_nodes);

    std::set<Edge> present(graph.edges.begin(), graph.edges.end());
    auto sample_negatives = [&](std::size_t count) {
        std::vector<Edge> neg;
        while (neg.size() < count) {
            std::size_t u = rng.index(graph.n_nodes);
            std::size_t v = rng.index(graph.n_nodes);
            if (u == v) continue;
            Edge e{std::min(u, v), std::max(u, v)};
            if (present.count(e)) continue;
            present.insert(e);  // keep samples distinct
            neg.push_back(e);
        }
        return neg;
    };
    ls.test_neg = sample_negatives(n_test);
    ls.val_neg = sample_negatives(n_val);
    return ls;
}

namespace {

struct LinkEncoder {
    std::vector<Param*> params;
    std::function<Tape::Ref(Tape&, bool training, std::uint64_t epoch)> encode;
};

std::vector<double> pair_scores(const Matrix& emb, const std::vector<Edge>& pairs) {
    std::vector<double> s(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double* u = emb.row(pairs[k].first);
        const double* v = emb.row(pairs[k].second);
        double d = 0.0;
        for (std::size_t j = 0; j < emb.cols; ++j) d += u[j] * v[j];
        s[k] = 1.0 / (1.0 + std::exp(-d));
    }
    return s;
}

}  // namespace

RunResult link_train_eval(Method method, const PreparedData& data, MissingScenario scenario,
                          double mr, std::uint64_t seed, const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    const GoodieConfig& mc = cfg.model;
    constexpr std::size_t kH1 = 32, kH2 = 16;

    // features masked once, then split; propagation runs on train edges only
    MaskedFeatures masked = apply_mask(data, scenario, mr, seed);
    LinkSplit ls = link_split(data.graph, cfg.link_test_frac, cfg.link_val_frac, seed);
    NormalizedAdjacency adj = normalize_sym(ls.train_graph);

    LinkEncoder enc;
    GcnParams gcn1, gcn2;  // storage referenced by closures below
    GoodieParams glp, gfp;
    Param attn;
    Matrix enc_feats;
    Matrix y_hat;
    if (method == Method::goodie) {
        LabelTable lt = build_splits(data.labels, cfg, seed);
        LPResult lp = label_propagate(adj, lt, mc.alpha, mc.k_lp, mc.tau);
        FPResult fp = feature_propagate(adj, masked, mc.k_fp);
        y_hat = lp.y_hat;
        enc_feats = fp.x_hat;
        Rng rng(mix(seed, 0x9A));
        gcn1.w1 = Param(glorot_uniform(lt.n_classes, kH1, rng));
        gcn1.w2 = Param(glorot_uniform(kH1, kH2, rng));
        gcn2.w1 = Param(glorot_uniform(data.features.cols, kH1, rng));
        gcn2.w2 = Param(glorot_uniform(kH1, kH2, rng));
        attn = Param(glorot_uniform(kH2, 1, rng));
        enc.params = {&gcn1.w1, &gcn1.w2, &gcn2.w1, &gcn2.w2, &attn};
        enc.encode = [&, seed](Tape& tape, bool training, std::uint64_t epoch) {
            auto branch = [&](GcnParams& p, const Matrix& input, std::uint64_t salt) {
                Tape::Ref x = tape.constant(input);
                Tape::Ref h = tape.relu(tape.spmm(&adj, tape.matmul(x, tape.param(&p.w1))));
                h = tape.dropout(h, mc.dropout, training, mix(seed, salt + epoch));
                return tape.spmm(&adj, tape.matmul(h, tape.param(&p.w2)));
            };
            Tape::Ref h_lp = branch(gcn1, y_hat, 0x100);
            Tape::Ref h_fp = branch(gcn2, enc_feats, 0x200);
            Tape::Ref a = tape.param(&attn);
            Tape::Ref s_lp = tape.leaky_relu(tape.matmul(h_lp, a), 0.3);
            Tape::Ref s_fp = tape.leaky_relu(tape.matmul(h_fp, a), 0.3);
            Tape::Ref a_lp = tape.sigmoid(tape.sub(s_lp, s_fp));
            Tape::Ref a_fp = tape.affine(a_lp, -1.0, 1.0);
            return tape.add(tape.row_scale(h_lp, a_lp), tape.row_scale(h_fp, a_fp));
        };
    } else if (method == Method::lp) {
        throw std::invalid_argument("link_train_eval: lp has no embedding pipeline");
    } else {
        switch (method) {
            case Method::gcn_zero: enc_feats = masked.values; break;
            case Method::gcn_nm: enc_feats = neighbor_mean_impute(ls.train_graph, masked); break;
            case Method::fp_gcn: enc_feats = feature_propagate(adj, masked, mc.k_fp).x_hat; break;
            default: break;
        }
        Rng rng(mix(seed, 0x9A));
        gcn1.w1 = Param(glorot_uniform(data.features.cols, kH1, rng));
        gcn1.w2 = Param(glorot_uniform(kH1, kH2, rng));
        enc.params = {&gcn1.w1, &gcn1.w2};
        enc.encode = [&, seed](Tape& tape, bool training, std::uint64_t epoch) {
            Tape::Ref x = tape.constant(enc_feats);
            Tape::Ref h = tape.relu(tape.spmm(&adj, tape.matmul(x, tape.param(&gcn1.w1))));
            h = tape.dropout(h, mc.dropout, training, mix(seed, 0x300 + epoch));
            return tape.spmm(&adj, tape.matmul(h, tape.param(&gcn1.w2)));
        };
    }

    AdamState adam;
    adam.lr = mc.lr;
    RunResult rr;
    double best_val = -1.0;
    std::size_t since_best = 0;
    std::vector<Matrix> best_values;
    std::set<Edge> full_edges(data.graph.edges.begin(), data.graph.edges.end());

    for (std::size_t epoch = 0; epoch < mc.max_epochs; ++epoch) {
        {
            Tape tape;
            Tape::Ref emb = enc.encode(tape, true, epoch);
            // train positives plus per-epoch resampled negatives
            std::vector<Edge> pairs = ls.train_graph.edges;
            std::vector<uint8_t> targets(pairs.size(), 1);
            Rng nrng(mix(seed, 0x400 + epoch));
            std::size_t n_neg = pairs.size();
            while (n_neg > 0) {
                std::size_t u = nrng.index(data.graph.n_nodes);
                std::size_t v = nrng.index(data.graph.n_nodes);
                if (u == v) continue;
                Edge e{std::min(u, v), std::max(u, v)};
                if (full_edges.count(e)) continue;
                pairs.push_back(e);
                targets.push_back(0);
                --n_neg;
            }
            Tape::Ref scores = tape.pair_dot(emb, pairs);
            Tape::Ref loss = tape.bce_with_logits(scores, targets);
            double lv = tape.value(loss)(0, 0);
            if (!std::isfinite(lv))
                throw std::runtime_error("link_train_eval: non-finite loss");
            rr.train_loss.push_back(lv);
            for (Param* p : enc.params) p->zero_grad();
            tape.backward(loss);
            adam_step(enc.params, adam);
        }
        {
            Tape tape;
            Tape::Ref emb = enc.encode(tape, false, epoch);
            const Matrix& e = tape.value(emb);
            double val = roc_auc(pair_scores(e, ls.val_pos), pair_scores(e, ls.val_neg));
            rr.val_acc.push_back(val);
            if (val > best_val) {
                best_val = val;
                rr.best_epoch = epoch;
                since_best = 0;
                best_values.clear();
                for (Param* p : enc.params) best_values.push_back(p->value);
            } else {
                ++since_best;
            }
        }
        rr.epochs = epoch + 1;
        if (since_best > mc.patience) break;
    }

    if (best_values.empty()) throw std::runtime_error("link_train_eval: max_epochs must be >= 1");
    for (std::size_t k = 0; k < enc.params.size(); ++k) enc.params[k]->value = best_values[k];
    rr.best_val_acc = best_val;
    Tape tape;
    Tape::Ref emb = enc.encode(tape, false, rr.best_epoch);
    const Matrix& e = tape.value(emb);
    rr.auc = roc_auc(pair_scores(e, ls.test_pos), pair_scores(e, ls.test_neg));
    rr.ap = average_precision(pair_scores(e, ls.test_pos), pair_scores(e, ls.test_neg));
    rr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rr;
}

namespace {

std::string fmt_double(double v) {
    if (v < 0.0) return "";  // sentinel for not-applicable
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_mr(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string row_key(const ResultRow& r) {
    return method_name(r.method) + "|" + scenario_name(r.scenario) + "|" + fmt_mr(r.mr) + "|" +
           std::to_string(r.seed);
}

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "method,scenario,mr,seed,test_acc,val_acc,epochs,alpha_lp_mean,alpha_fp_mean,auc,ap,seconds\n";
    for (const auto& r : rows) {
        out << method_name(r.method) << ',' << scenario_name(r.scenario) << ',' << fmt_mr(r.mr)
            << ',' << r.seed << ',' << fmt_double(r.result.test_acc) << ','
            << fmt_double(r.result.best_val_acc) << ',' << r.result.epochs << ','
            << fmt_double(r.result.alpha_lp_mean) << ',' << fmt_double(r.result.alpha_fp_mean)
            << ',' << fmt_double(r.result.auc) << ',' << fmt_double(r.result.ap) << ','
            << fmt_double(r.result.seconds) << '\n';
    }
    return out.str();
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& path,
                  const std::string& format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write results: " + path);
    if (format == "csv") {
        out << results_csv(rows);
    } else if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json row;
            row["method"] = method_name(r.method);
            row["scenario"] = scenario_name(r.scenario);
            row["mr"] = r.mr;
            row["seed"] = r.seed;
            auto opt = [](double v) {
                return v < 0.0 ? nlohmann::json() : nlohmann::json(v);
            };
            row["test_acc"] = opt(r.result.test_acc);
            row["val_acc"] = opt(r.result.best_val_acc);
            row["epochs"] = r.result.epochs;
            row["alpha_lp_mean"] = opt(r.result.alpha_lp_mean);
            row["alpha_fp_mean"] = opt(r.result.alpha_fp_mean);
            row["auc"] = opt(r.result.auc);
            row["ap"] = opt(r.result.ap);
            row["seconds"] = r.result.seconds;
            j.push_back(std::move(row));
        }
        out << j.dump(2) << "\n";
    } else {
        throw std::invalid_argument("unknown format: " + format);
    }
}

namespace {

// Completed (method,scenario,mr,seed) keys with their stored rows, for resume.
std::vector<ResultRow> parse_existing_csv(const std::string& path) {
    std::vector<ResultRow> rows;
    std::ifstream in(path);
    if (!in) return rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) { header = false; continue; }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        while (cells.size() < 12) cells.push_back("");
        if (cells.size() != 12) continue;
        try {
            ResultRow r;
            r.method = parse_method(cells[0]);
            r.scenario = parse_scenario(cells[1]);
            r.mr = std::stod(cells[2]);
            r.seed = std::stoull(cells[3]);
            auto num = [](const std::string& s) { return s.empty() ? -1.0 : std::stod(s); };
            r.result.test_acc = num(cells[4]);
            r.result.best_val_acc = num(cells[5]);
            r.result.epochs = cells[6].empty() ? 0 : std::stoul(cells[6]);
            r.result.alpha_lp_mean = num(cells[7]);
            r.result.alpha_fp_mean = num(cells[8]);
            r.result.auc = num(cells[9]);
            r.result.ap = num(cells[10]);
            r.result.seconds = num(cells[11]);
            rows.push_back(std::move(r));
        } catch (const std::exception&) {
            // ignore malformed rows
        }
    }
    return rows;
}

}  // namespace

std::vector<ResultRow> sweep(const ExperimentConfig& cfg) {
    std::vector<double> grid = cfg.mr_grid.empty() ? default_mr_grid() : cfg.mr_grid;
    for (double mr : grid)
        if (mr < 0.0 || mr > 1.0) throw std::invalid_argument("sweep: mr outside [0,1]");
    if (cfg.seeds.empty()) throw std::invalid_argument("sweep: need at least one seed");

    std::vector<ResultRow> done;
    std::set<std::string> done_keys;
    if (cfg.format == "csv" && std::filesystem::exists(cfg.out_path)) {
        for (auto& r : parse_existing_csv(cfg.out_path)) {
            done_keys.insert(row_key(r));
            done.push_back(std::move(r));
        }
    }

    struct Cell {
        Method method;
        double mr;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (Method m : cfg.methods)
        for (double mr : grid)
            for (std::uint64_t s : cfg.seeds) {
                ResultRow probe;
                probe.method = m;
                probe.scenario = cfg.scenario;
                probe.mr = mr;
                probe.seed = s;
                if (!done_keys.count(row_key(probe))) cells.push_back({m, mr, s});
            }

    std::size_t n_threads = 1;
    if (const char* env = std::getenv("GOODIE_THREADS")) {
        n_threads = std::max<std::size_t>(1, std::stoul(env));
    }
    n_threads = std::min(n_threads, std::max<std::size_t>(1, cells.size()));

    std::vector<ResultRow> fresh(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) break;
            const Cell& c = cells[k];
            ResultRow r;
            r.method = c.method;
            r.scenario = cfg.scenario;
            r.mr = c.mr;
            r.seed = c.seed;
            try {
                PreparedData data = prepare_data(cfg, c.seed);
                r.result = cfg.task == "link"
                               ? link_train_eval(c.method, data, cfg.scenario, c.mr, c.seed, cfg)
                               : run_node_method(c.method, data, cfg.scenario, c.mr, c.seed, cfg);
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
            fresh[k] = std::move(r);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!errors[k].empty())
            throw std::runtime_error("sweep cell failed (" + row_key(fresh[k]) + "): " + errors[k]);
    }

    std::vector<ResultRow> all = std::move(done);
    for (auto& r : fresh) all.push_back(std::move(r));
    std::sort(all.begin(), all.end(), [](const ResultRow& a, const ResultRow& b) {
        return row_key(a) < row_key(b);
    });
    return all;
}

}  // namespace goodie
