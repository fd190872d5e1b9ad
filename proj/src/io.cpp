#include "rankbandit/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rankbandit {

namespace {

std::string slurp(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

bool parse_double(const std::string &s, double &out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char *end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

double parse_field(const std::string &s, std::size_t line, const char *what) {
    double v = 0.0;
    if (!parse_double(s, v)) throw InputError("line " + std::to_string(line) + ": bad " + what + " '" + trim(s) + "'");
    return v;
}

std::size_t parse_index(const std::string &s, std::size_t line, const char *what) {
    const double v = parse_field(s, line, what);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw InputError("line " + std::to_string(line) + ": " + what + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

Matrix from_rows(const std::vector<std::vector<double>> &rows) {
    const std::size_t n = rows.size();
    if (n == 0) throw InputError("matrix is empty");
    Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != rows[0].size()) throw InputError("matrix rows differ in length");
        for (std::size_t j = 0; j < rows[i].size(); ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return M;
}

}  // namespace

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Matrix parse_matrix_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("matrix JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("matrix")) j = j["matrix"];
    if (!j.is_array()) throw InputError("matrix JSON must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto &row : j) {
        if (!row.is_array()) throw InputError("matrix JSON must be an array of rows");
        std::vector<double> r;
        for (const auto &v : row) {
            if (!v.is_number()) throw InputError("matrix JSON entries must be numbers");
            r.push_back(v.get<double>());
        }
        rows.push_back(std::move(r));
    }
    return from_rows(rows);
}

Matrix parse_matrix_csv(std::istream &in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        std::vector<double> r;
        bool numeric = true;
        for (const auto &c : cells) {
            double v = 0.0;
            numeric = numeric && parse_double(c, v);
            r.push_back(v);
        }
        if (!numeric) {
            if (rows.empty() && lineno == 1) continue;  // header
            throw InputError("matrix CSV line " + std::to_string(lineno) + " is not numeric");
        }
        rows.push_back(std::move(r));
    }
    return from_rows(rows);
}

Matrix read_matrix(const std::filesystem::path &path) {
    const std::string text = slurp(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (path.extension() == ".json" || (first != std::string::npos && (text[first] == '[' || text[first] == '{')))
        return parse_matrix_json(text);
    std::istringstream in(text);
    return parse_matrix_csv(in);
}

void write_decomposition(std::ostream &out, const Decomposition &d) {
    for (const auto &term : d.terms) {
        nlohmann::json j;
        j["weight"] = term.weight;
        j["permutation"] = term.permutation.order();
        out << j.dump() << '\n';
    }
}

PayoffTape parse_tape_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("tape CSV is empty");
    const auto header = split(trim(line), ',');
    if (header.size() != 3 || trim(header[0]) != "t" || trim(header[1]) != "item" || trim(header[2]) != "payoff")
        throw InputError("tape CSV header must be t,item,payoff");
    struct Entry {
        std::size_t t, item;
        double payoff;
    };
    std::vector<Entry> entries;
    std::size_t lineno = 1, n = 0, horizon = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 3) throw InputError("tape CSV line " + std::to_string(lineno) + ": expected 3 fields");
        Entry e{parse_index(cells[0], lineno, "t"), parse_index(cells[1], lineno, "item"),
                parse_field(cells[2], lineno, "payoff")};
        if (e.t == 0) throw InputError("tape CSV line " + std::to_string(lineno) + ": trials start at 1");
        n = std::max(n, e.item + 1);
        horizon = std::max(horizon, e.t);
        entries.push_back(e);
    }
    if (entries.size() != n * horizon) throw InputError("tape CSV must list every (t, item) pair exactly once");
    std::vector<double> values(n * horizon, 0.0);
    std::vector<bool> seen(n * horizon, false);
    for (const auto &e : entries) {
        const std::size_t k = (e.t - 1) * n + e.item;
        if (seen[k]) throw InputError("tape CSV repeats trial " + std::to_string(e.t) + ", item " + std::to_string(e.item));
        seen[k] = true;
        values[k] = e.payoff;
    }
    return make_tape(n, horizon, std::move(values));
}

void write_tape_csv(std::ostream &out, const PayoffTape &tape) {
    out << "t,item,payoff\n";
    for (std::size_t t = 1; t <= tape.horizon; ++t)
        for (std::size_t i = 0; i < tape.n; ++i) out << t << ',' << i << ',' << format_real(tape.at(t, i)) << '\n';
}

namespace {
constexpr char kTapeMagic[8] = {'R', 'B', 'T', 'A', 'P', 'E', '1', '\0'};
}

void write_tape_binary(const std::filesystem::path &path, const PayoffTape &tape) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    const std::uint64_t n = tape.n, T = tape.horizon;
    out.write(kTapeMagic, 8);
    out.write(reinterpret_cast<const char *>(&n), 8);
    out.write(reinterpret_cast<const char *>(&T), 8);
    out.write(reinterpret_cast<const char *>(tape.values.data()), static_cast<std::streamsize>(tape.values.size() * 8));
}

PayoffTape read_tape_binary(const std::filesystem::path &path) {
    const std::string bytes = slurp(path);
    if (bytes.size() < 24 || std::memcmp(bytes.data(), kTapeMagic, 8) != 0)
        throw InputError(path.string() + " is not a binary payoff tape");
    std::uint64_t n = 0, T = 0;
    std::memcpy(&n, bytes.data() + 8, 8);
    std::memcpy(&T, bytes.data() + 16, 8);
    if (bytes.size() != 24 + n * T * 8) throw InputError(path.string() + ": truncated binary tape");
    std::vector<double> values(n * T);
    std::memcpy(values.data(), bytes.data() + 24, n * T * 8);
    return make_tape(n, T, std::move(values));
}

PayoffTape read_tape(const std::filesystem::path &path) {
    {
        std::ifstream probe(path, std::ios::binary);
        char magic[8] = {};
        if (probe.read(magic, 8) && std::memcmp(magic, kTapeMagic, 8) == 0) return read_tape_binary(path);
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return parse_tape_csv(in);
}

void write_trace_csv(std::ostream &out, const RegretTrace &trace) {
    out << "t,window,selected,payoff,inst_regret,cum_regret\n";
    for (const auto &r : trace.records())
        out << r.t << ',' << r.window << ',' << r.selected << ',' << format_real(r.payoff) << ','
            << format_real(r.inst_regret) << ',' << format_real(r.cum_regret) << '\n';
}

std::vector<TraceRow> read_trace_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t,window,selected,payoff,inst_regret,cum_regret")
        throw InputError("trace CSV header must be t,window,selected,payoff,inst_regret,cum_regret");
    std::vector<TraceRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto c = split(line, ',');
        if (c.size() != 6) throw InputError("trace CSV line " + std::to_string(lineno) + ": expected 6 fields");
        rows.push_back({parse_index(c[0], lineno, "t"), parse_index(c[1], lineno, "window"),
                        parse_index(c[2], lineno, "selected"), parse_field(c[3], lineno, "payoff"),
                        parse_field(c[4], lineno, "inst_regret"), parse_field(c[5], lineno, "cum_regret")});
    }
    return rows;
}

}  // namespace rankbandit
