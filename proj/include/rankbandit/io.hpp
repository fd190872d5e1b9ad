#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rankbandit/environment.hpp"
#include "rankbandit/polytope.hpp"

namespace rankbandit {

/// Square matrix from JSON (array of rows) or CSV (one row per line; a
/// non-numeric first line is treated as a header).
Matrix read_matrix(const std::filesystem::path &path);
Matrix parse_matrix_json(const std::string &text);
Matrix parse_matrix_csv(std::istream &in);

/// One JSON object per line: {"weight": w, "permutation": [...]}.
void write_decomposition(std::ostream &out, const Decomposition &d);

/// Tape files. CSV: header `t,item,payoff`, t from 1, items from 0, every
/// (t, item) pair exactly once. Binary: magic "RBTAPE1\0", uint64 n,
/// uint64 T, then T*n little-endian float64 in row-major (trial, item) order.
PayoffTape read_tape(const std::filesystem::path &path);
PayoffTape parse_tape_csv(std::istream &in);
void write_tape_csv(std::ostream &out, const PayoffTape &tape);
void write_tape_binary(const std::filesystem::path &path, const PayoffTape &tape);
PayoffTape read_tape_binary(const std::filesystem::path &path);

/// Trace CSV: `t,window,selected,payoff,inst_regret,cum_regret`. Windows are
/// 1-based, items 0-based, reals printed with 17 significant digits.
void write_trace_csv(std::ostream &out, const RegretTrace &trace);

struct TraceRow {
    std::size_t t = 0, window = 0, selected = 0;
    double payoff = 0.0, inst_regret = 0.0, cum_regret = 0.0;
};
std::vector<TraceRow> read_trace_csv(std::istream &in);

std::string format_real(double v);

}  // namespace rankbandit
