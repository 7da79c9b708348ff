#include "peglr/bench.hpp"

#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "peglr/grammar_text.hpp"
#include "peglr/tree_io.hpp"

namespace peglr {

std::string make_arithmetic_input(int size) {
    if (size < 1) throw std::invalid_argument("input size must be >= 1");
    int len = (size % 2 == 1) ? size : size - 1;
    std::string s;
    s.reserve(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) {
        s.push_back(i % 2 == 0 ? static_cast<char>('1' + (i / 2) % 9) : '+');
    }
    return s;
}

Grammar make_arithmetic_grammar() {
    return load_grammar({"E <- E '+' T / T ; T <- [0-9] ;", "<arith>"});
}

namespace {

int mutate(std::string& s, double rate, std::mt19937& rng) {
    if (rate <= 0.0 || s.empty()) return 0;
    int target = static_cast<int>(rate * static_cast<double>(s.size()) + 0.5);
    if (target <= 0) return 0;
    if (target > static_cast<int>(s.size())) target = static_cast<int>(s.size());
    std::unordered_set<size_t> chosen;
    std::uniform_int_distribution<size_t> dist(0, s.size() - 1);
    while (static_cast<int>(chosen.size()) < target) chosen.insert(dist(rng));
    for (size_t p : chosen) s[p] = '?';
    return target;
}

std::optional<double> slope(const std::vector<BenchRow>& rows, double (*y)(const BenchRow&)) {
    if (rows.size() < 3) return std::nullopt;
    double n = static_cast<double>(rows.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const BenchRow& r : rows) {
        double x = static_cast<double>(r.size);
        double v = y(r);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

BenchReport bench_linearity(const Grammar& grammar, const InputGenerator& generate,
                            const std::vector<int>& sizes, double error_rate,
                            RecoveryConfig config, uint32_t seed) {
    for (size_t i = 1; i < sizes.size(); ++i) {
        if (sizes[i] <= sizes[i - 1]) {
            throw std::invalid_argument("bench sizes must be strictly increasing");
        }
    }
    BenchReport report;
    std::mt19937 rng(seed);
    for (int requested : sizes) {
        std::string input = generate(requested);
        int errors = mutate(input, error_rate, rng);

        ParseSession session(grammar, input, config);
        auto t0 = std::chrono::steady_clock::now();
        const Match* root = session.parse();
        auto t1 = std::chrono::steady_clock::now();

        BenchRow row;
        row.size = static_cast<int>(input.size());
        row.error_count = errors;
        row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.rule_body_evals = session.stats().rule_body_evals;
        for (const ErrorSpan& e : collect_errors(root)) {
            row.error_chars += static_cast<uint64_t>(e.len);
        }
        report.rows.push_back(row);
    }
    report.evals_per_char =
        slope(report.rows, [](const BenchRow& r) { return static_cast<double>(r.rule_body_evals); });
    report.ms_per_char = slope(report.rows, [](const BenchRow& r) { return r.wall_ms; });
    return report;
}

std::string bench_report_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "size,errors,wall_ms,rule_body_evals,error_chars\n";
    for (const BenchRow& r : report.rows) {
        os << r.size << ',' << r.error_count << ',' << r.wall_ms << ',' << r.rule_body_evals
           << ',' << r.error_chars << '\n';
    }
    if (report.evals_per_char) {
        os << "# fit: rule_body_evals/char = " << *report.evals_per_char << "\n";
    }
    if (report.ms_per_char) {
        os << "# fit: ms/char = " << *report.ms_per_char << "\n";
    }
    return os.str();
}

}  // namespace peglr
