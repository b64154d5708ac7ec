#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "goodie/baselines.hpp"
#include "goodie/model.hpp"
#include "goodie/synthetic.hpp"

namespace goodie {

enum class Method { goodie, lp, gcn_zero, gcn_nm, fp_gcn };

Method parse_method(const std::string& s);
std::string method_name(Method m);
MissingScenario parse_scenario(const std::string& s);
std::string scenario_name(MissingScenario s);

struct ExperimentConfig {
    std::string dataset_dir;  // empty -> synthetic
    SyntheticSpec synthetic;
    MissingScenario scenario = MissingScenario::structural;
    std::vector<double> mr_grid;
    std::vector<Method> methods{Method::goodie};
    GoodieConfig model;
    std::vector<std::uint64_t> seeds{0};
    std::string out_path = "results.csv";
    std::string format = "csv";
    std::size_t per_class_train = 20;
    std::size_t n_val = 1500;
    std::string task = "node";  // node | link
    double link_test_frac = 0.10;
    double link_val_frac = 0.05;
};

// Union of the rates used across the reported figures and tables.
std::vector<double> default_mr_grid();

struct RunResult {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> val_acc;     // per epoch
    std::size_t best_epoch = 0;
    std::size_t epochs = 0;
    double best_val_acc = 0.0;
    double test_acc = -1.0;
    double alpha_lp_mean = -1.0;
    double alpha_fp_mean = -1.0;
    double auc = -1.0;
    double ap = -1.0;
    double seconds = 0.0;
};

// One training step / eval pass. In eval mode (training=false) only the
// prediction output matters. alpha outputs may stay empty.
struct TrainHooks {
    std::vector<Param*> params;
    std::function<Tape::Ref(Tape&, bool training, std::uint64_t epoch, Tape::Ref* logits_out,
                            std::vector<double>* alpha_lp, std::vector<double>* alpha_fp)>
        forward;
};

RunResult train_loop(TrainHooks& hooks, const LabelTable& labels, double lr,
                     std::size_t patience, std::size_t max_epochs);

struct PreparedData {
    Graph graph;
    NormalizedAdjacency adj;
    Matrix features;
    std::vector<std::size_t> labels;
    std::vector<uint8_t> pre_observed;  // empty = fully observed input
};

PreparedData prepare_data(const ExperimentConfig& cfg, std::uint64_t seed);

RunResult run_node_method(Method method, const PreparedData& data, MissingScenario scenario,
                          double mr, std::uint64_t seed, const ExperimentConfig& cfg);

struct LinkSplit {
    Graph train_graph;
    std::vector<Edge> val_pos, val_neg, test_pos, test_neg;
};

LinkSplit link_split(const Graph& graph, double test_frac, double val_frac, std::uint64_t seed);

RunResult link_train_eval(Method method, const PreparedData& data, MissingScenario scenario,
                          double mr, std::uint64_t seed, const ExperimentConfig& cfg);

struct ResultRow {
    Method method;
    MissingScenario scenario;
    double mr = 0.0;
    std::uint64_t seed = 0;
    RunResult result;
};

std::vector<ResultRow> sweep(const ExperimentConfig& cfg);

void emit_results(const std::vector<ResultRow>& rows, const std::string& path,
                  const std::string& format);

std::string results_csv(const std::vector<ResultRow>& rows);

}  // namespace goodie
