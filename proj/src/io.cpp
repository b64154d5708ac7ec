#include "goodie/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace goodie {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace

Matrix load_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open features file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            if (cell == "nan" || cell == "NaN" || cell.empty())
                row.push_back(std::nan(""));
            else
                row.push_back(std::stod(cell));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("features file: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("features file empty: " + path);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

std::vector<std::size_t> load_labels_tsv(const std::string& path, std::size_t n_nodes) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    std::vector<std::size_t> labels(n_nodes, 0);
    std::vector<uint8_t> seen(n_nodes, 0);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        long long node, cls;
        if (!(ss >> node >> cls)) continue;
        if (node < 0 || static_cast<std::size_t>(node) >= n_nodes)
            throw std::runtime_error("labels file: node id out of range");
        labels[node] = static_cast<std::size_t>(cls);
        seen[node] = 1;
    }
    for (std::size_t i = 0; i < n_nodes; ++i)
        if (!seen[i]) throw std::runtime_error("labels file: missing label for node " + std::to_string(i));
    return labels;
}

Dataset load_dataset(const std::string& dir) {
    Dataset d;
    std::size_t max_idx = 0;
    auto edges = load_edge_list(dir + "/edges.tsv", max_idx);
    d.features = load_features_csv(dir + "/features.csv");
    if (d.features.rows <= max_idx)
        throw std::runtime_error("dataset: edge index exceeds feature row count");
    d.graph = build_graph(edges, d.features.rows);
    d.labels = load_labels_tsv(dir + "/labels.tsv", d.features.rows);
    return d;
}

void export_splits_json(const LabelTable& lt, const std::string& path) {
    nlohmann::json j;
    j["train"] = lt.train_idx;
    j["val"] = lt.val_idx;
    j["test"] = lt.test_idx;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write splits file: " + path);
    out << j.dump(2) << "\n";
}

namespace {

nlohmann::json param_json(const Param& p) {
    return {{"shape", {p.value.rows, p.value.cols}}, {"values", p.value.data}};
}

void param_from_json(Param& p, const nlohmann::json& j) {
    std::size_t r = j["shape"][0], c = j["shape"][1];
    p = Param(Matrix(r, c));
    auto vals = j["values"].get<std::vector<double>>();
    if (vals.size() != r * c) throw std::runtime_error("checkpoint: value count mismatch");
    p.value.data = std::move(vals);
}

}  // namespace

void save_checkpoint(GoodieParams& params, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["params"] = {{"w_lp", param_json(params.w_lp)},
                   {"w_fp", param_json(params.w_fp)},
                   {"attn", param_json(params.attn)},
                   {"w_cls", param_json(params.w_cls)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump() << "\n";
}

void load_checkpoint(GoodieParams& params, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format_version", 0) != 1)
        throw std::runtime_error("checkpoint: unsupported format version");
    param_from_json(params.w_lp, j["params"]["w_lp"]);
    param_from_json(params.w_fp, j["params"]["w_fp"]);
    param_from_json(params.attn, j["params"]["attn"]);
    param_from_json(params.w_cls, j["params"]["w_cls"]);
}

std::map<std::string, std::string> parse_kv_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

void apply_config(const std::map<std::string, std::string>& kv, ExperimentConfig& cfg) {
    for (const auto& [key, val] : kv) {
        if (key == "dataset_dir") cfg.dataset_dir = val;
        else if (key == "scenario") cfg.scenario = parse_scenario(val);
        else if (key == "task") cfg.task = val;
        else if (key == "out") cfg.out_path = val;
        else if (key == "format") cfg.format = val;
        else if (key == "mr") {
            cfg.mr_grid.clear();
            for (const auto& t : split_list(val)) cfg.mr_grid.push_back(std::stod(t));
        } else if (key == "seeds") {
            cfg.seeds.clear();
            for (const auto& t : split_list(val)) cfg.seeds.push_back(std::stoull(t));
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& t : split_list(val)) cfg.methods.push_back(parse_method(t));
        } else if (key == "per_class_train") cfg.per_class_train = std::stoul(val);
        else if (key == "n_val") cfg.n_val = std::stoul(val);
        else if (key == "alpha") cfg.model.alpha = std::stod(val);
        else if (key == "tau") cfg.model.tau = std::stod(val);
        else if (key == "lambda") cfg.model.lambda = std::stod(val);
        else if (key == "k_lp") cfg.model.k_lp = std::stoul(val);
        else if (key == "k_fp") cfg.model.k_fp = std::stoul(val);
        else if (key == "dropout") cfg.model.dropout = std::stod(val);
        else if (key == "lr") cfg.model.lr = std::stod(val);
        else if (key == "hidden") cfg.model.hidden = std::stoul(val);
        else if (key == "scaled_loss") cfg.model.scaled_loss = (val == "true" || val == "1");
        else if (key == "attention_variant") cfg.model.attention_variant = parse_attention_variant(val);
        else if (key == "loss_variant") cfg.model.loss_variant = parse_loss_variant(val);
        else if (key == "patience") cfg.model.patience = std::stoul(val);
        else if (key == "max_epochs") cfg.model.max_epochs = std::stoul(val);
        else if (key == "synthetic_nodes") cfg.synthetic.n_nodes = std::stoul(val);
        else if (key == "synthetic_classes") cfg.synthetic.n_classes = std::stoul(val);
        else if (key == "synthetic_features") cfg.synthetic.feature_dim = std::stoul(val);
        else if (key == "synthetic_intra_p") cfg.synthetic.intra_p = std::stod(val);
        else if (key == "synthetic_inter_p") cfg.synthetic.inter_p = std::stod(val);
        else if (key == "synthetic_signal") cfg.synthetic.signal = std::stod(val);
        else if (key == "link_test_frac") cfg.link_test_frac = std::stod(val);
        else if (key == "link_val_frac") cfg.link_val_frac = std::stod(val);
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

}  // namespace goodie
