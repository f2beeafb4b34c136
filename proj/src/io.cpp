#include "cdag/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cdag/errors.hpp"

namespace cdag {

using nlohmann::json;

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(strip(item));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void write_meta_comment(std::ostream& os, const json& meta) {
    if (!meta.is_null()) os << "# " << meta.dump() << '\n';
}

json edge_list(const std::vector<std::pair<int, int>>& edges) {
    json arr = json::array();
    for (auto [a, b] : edges) arr.push_back({a, b});
    return arr;
}

std::vector<std::pair<int, int>> parse_edge_list(const json& arr, const char* what) {
    if (!arr.is_array()) throw InputError(std::string(what) + " must be an array of [i, j] pairs");
    std::vector<std::pair<int, int>> out;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw InputError(std::string(what) + " entries must be [i, j] integer pairs");
        out.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return out;
}

std::string stderr_field(const BenchmarkRow& row) {
    return row.stderr_shd ? format_double(*row.stderr_shd) : std::string("NA");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json metadata(const std::string& command, std::uint64_t seed, json config) {
    return json{{"tool", "cdag"}, {"version", kVersion}, {"command", command}, {"seed", seed}, {"config", std::move(config)}};
}

json graph_to_json(const Dag& g) { return json{{"p", g.p()}, {"edges", edge_list(g.edges())}}; }

Dag graph_from_json(const json& j) {
    if (!j.is_object() || !j.contains("p") || !j["p"].is_number_integer())
        throw InputError("graph JSON needs an integer field \"p\"");
    const auto edges = parse_edge_list(j.value("edges", json::array()), "graph \"edges\"");
    return Dag(j["p"].get<int>(), edges);
}

json truth_to_json(const GroundTruth& t) {
    return json{{"g", graph_to_json(t.g)}, {"g_prime", graph_to_json(t.g_prime)}, {"misspec", edge_list(t.misspec)}};
}

GroundTruth truth_from_json(const json& j) {
    if (!j.is_object() || !j.contains("g") || !j.contains("g_prime"))
        throw InputError("truth JSON needs \"g\" and \"g_prime\"");
    GroundTruth t{graph_from_json(j["g"]), graph_from_json(j["g_prime"]),
                  parse_edge_list(j.value("misspec", json::array()), "truth \"misspec\"")};
    for (auto [i, k] : t.misspec)
        if (i < 0 || k < 0 || i >= t.g.p() || k >= t.g.p() || !t.g.has_edge(i, k))
            throw InputError("misspecified edge without a matching primary edge");
    return t;
}

json score_table_to_json(const ScoreTable& table) {
    json out = json::object();
    for (int j = 0; j < table.node_count(); ++j) {
        json child = json::object();
        table.for_each(j, [&](std::uint64_t mask, double score) {
            std::string key = "[";
            bool first = true;
            for (auto m = mask; m; m &= m - 1) {
                key += (first ? "" : ",") + std::to_string(std::countr_zero(m));
                first = false;
            }
            key += "]";
            child[key] = std::isfinite(score) ? json(score) : json(nullptr);
        });
        out[std::to_string(j)] = std::move(child);
    }
    return out;
}

void write_dataset_csv(std::ostream& os, const Dataset& d, const json& meta) {
    write_meta_comment(os, meta);
    const int p = d.p();
    for (int i = 0; i < p; ++i) os << (i ? "," : "") << 'y' << i + 1;
    if (d.has_secondary())
        for (int i = 0; i < p; ++i) os << ",x" << i + 1;
    os << '\n';
    for (int r = 0; r < d.n(); ++r) {
        for (int i = 0; i < p; ++i) os << (i ? "," : "") << format_double(d.y()(r, i));
        if (d.has_secondary())
            for (int i = 0; i < p; ++i) os << ',' << format_double(d.x()(r, i));
        os << '\n';
    }
}

Dataset read_dataset_csv(std::istream& is) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        header = split_csv(s);
        break;
    }
    if (header.empty()) throw InputError("dataset CSV has no header");

    // Column position -> (is_secondary, 0-based index)
    std::vector<std::pair<bool, int>> layout;
    std::map<std::pair<bool, int>, int> seen;
    int max_y = 0, max_x = 0;
    for (const auto& name : header) {
        if (name.size() < 2 || (name[0] != 'y' && name[0] != 'x'))
            throw InputError("dataset column '" + name + "' is not y<i> or x<i>");
        int idx = 0;
        try {
            std::size_t used = 0;
            idx = std::stoi(name.substr(1), &used);
            if (used != name.size() - 1) throw InputError("");
        } catch (...) {
            throw InputError("dataset column '" + name + "' has a bad index");
        }
        if (idx < 1 || idx > kMaxPrimary) throw InputError("dataset column '" + name + "' index out of range");
        const bool secondary = name[0] == 'x';
        if (!seen.emplace(std::pair{secondary, idx - 1}, 0).second) throw InputError("duplicate column '" + name + "'");
        layout.emplace_back(secondary, idx - 1);
        (secondary ? max_x : max_y) = std::max(secondary ? max_x : max_y, idx);
    }
    const int p = max_y;
    if (static_cast<int>(seen.size()) != p + max_x || (max_x != 0 && max_x != p))
        throw InputError("dataset needs columns y1..yp and optionally x1..xp");

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        const auto fields = split_csv(s);
        if (fields.size() != header.size())
            throw InputError("dataset line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(header.size()));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            char* end = nullptr;
            row[c] = std::strtod(fields[c].c_str(), &end);
            if (fields[c].empty() || end != fields[c].c_str() + fields[c].size())
                throw InputError("dataset line " + std::to_string(line_no) + ": '" + fields[c] + "' is not a number");
        }
        rows.push_back(std::move(row));
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd y(n, p);
    std::optional<Eigen::MatrixXd> x;
    if (max_x) x = Eigen::MatrixXd(n, p);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < layout.size(); ++c) {
            auto [secondary, idx] = layout[c];
            (secondary ? *x : y)(r, idx) = rows[r][c];
        }
    }
    return Dataset(std::move(y), std::move(x));
}

void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report, const json& meta) {
    write_meta_comment(os, meta);
    os << "theta,p,n,estimator,mean_shd,stderr,reps\n";
    for (const auto& row : report.rows)
        os << format_double(row.theta) << ',' << row.p << ',' << row.n << ',' << to_string(row.estimator) << ','
           << format_double(row.mean_shd) << ',' << stderr_field(row) << ',' << row.replicates << '\n';
}

void write_misspec_csv(std::ostream& os, const BenchmarkReport& report, const json& meta) {
    write_meta_comment(os, meta);
    os << "misspec_prob,theta,p,n,estimator,mean_shd,stderr,reps\n";
    for (const auto& row : report.rows)
        os << format_double(row.misspec_prob) << ',' << format_double(row.theta) << ',' << row.p << ',' << row.n << ','
           << to_string(row.estimator) << ',' << format_double(row.mean_shd) << ',' << stderr_field(row) << ','
           << row.replicates << '\n';
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << contents;
    if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace cdag
