#pragma once

#include <map>
#include <string>

#include "goodie/harness.hpp"

namespace goodie {

struct Dataset {
    Graph graph;
    Matrix features;
    std::vector<std::size_t> labels;
};

// Directory layout: edges.tsv (src<TAB>dst), features.csv (one row per node,
// `nan` allowed), labels.tsv (node_id<TAB>class_id).
Dataset load_dataset(const std::string& dir);

Matrix load_features_csv(const std::string& path);
std::vector<std::size_t> load_labels_tsv(const std::string& path, std::size_t n_nodes);

void export_splits_json(const LabelTable& lt, const std::string& path);

// Versioned JSON map name -> {shape, row-major values}.
void save_checkpoint(GoodieParams& params, const std::string& path);
void load_checkpoint(GoodieParams& params, const std::string& path);

// Flat `key = value` text; `#` comments.
std::map<std::string, std::string> parse_kv_config(const std::string& path);

// Applies recognized keys onto the experiment config; throws on bad values.
void apply_config(const std::map<std::string, std::string>& kv, ExperimentConfig& cfg);

}  // namespace goodie
