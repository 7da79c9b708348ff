// Linearity benchmark harness.
//
// Parses generated inputs of increasing size and records wall time plus the
// rule-body evaluation counter. The counter is the primary linearity
// signal; wall time is kept as a secondary, noisier one.

#ifndef PEGLR_BENCH_HPP
#define PEGLR_BENCH_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "peglr/engine.hpp"

namespace peglr {

struct BenchRow {
    int size = 0;             // actual input length
    int error_count = 0;      // characters mutated into the input
    double wall_ms = 0.0;
    uint64_t rule_body_evals = 0;
    uint64_t error_chars = 0;  // total SyntaxError span in the result
};

struct BenchReport {
    std::vector<BenchRow> rows;
    // Least-squares slopes over rows; present only with >= 3 rows.
    std::optional<double> evals_per_char;
    std::optional<double> ms_per_char;
};

using InputGenerator = std::function<std::string(int size)>;

// Valid input for the canonical arithmetic grammar: digits and '+'
// alternating. Even sizes are rounded down to the nearest valid length.
std::string make_arithmetic_input(int size);

// The canonical left-recursive arithmetic grammar over single digits.
Grammar make_arithmetic_grammar();

// Runs one two-phase parse per size. error_rate in [0,1] mutates that
// fraction of characters to '?' at deterministically seeded positions.
// Sizes must be strictly increasing.
BenchReport bench_linearity(const Grammar& grammar, const InputGenerator& generate,
                            const std::vector<int>& sizes, double error_rate,
                            RecoveryConfig config = {}, uint32_t seed = 1u);

std::string bench_report_csv(const BenchReport& report);

}  // namespace peglr

#endif
