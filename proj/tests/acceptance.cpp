// One PASS/FAIL line per acceptance criterion; `acceptance rows.csv` also writes every row.
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "ltft/ltft.hpp"

using namespace ltft::verify;

namespace {

struct Criterion {
    int id;
    std::string name;
    std::vector<std::string> headline;   // metrics echoed on the summary line
    std::function<std::vector<Row>()> run;
};

std::string summary(const std::vector<Row>& rows, const std::vector<std::string>& headline) {
    std::string out;
    char buf[160];
    for (const auto& metric : headline) {
        const Row* aggregate = nullptr;
        const Row* worst = nullptr;   // largest value among per-signal rows
        for (const Row& r : rows) {
            if (r.metric != metric) continue;
            if (r.params.find("signal=") == std::string::npos) {
                aggregate = &r;
                break;
            }
            if (!worst || r.value > worst->value) worst = &r;
        }
        if (aggregate) std::snprintf(buf, sizeof buf, " %s=%.4g (%s)", metric.c_str(), aggregate->value, aggregate->threshold.c_str());
        else if (worst) std::snprintf(buf, sizeof buf, " max %s=%.4g (%s)", metric.c_str(), worst->value, worst->threshold.c_str());
        else continue;
        out += buf;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "frame filter validity", {"A_est", "max_equivalence_rel_err", "runtime_s"}, [] { return criterion_frame_filter(); }},
        {2, "reconstruction", {"residual", "runtime_s"}, [] { return criterion_reconstruction(); }},
        {3, "MC convergence", {"slope", "slope_ci95_half_width", "runtime_s"}, [] { return criterion_convergence(); }},
        {4, "LVD linearity", {"mu_over_M_variation", "trunc_error"}, [] { return criterion_lvd(); }},
        {5, "CWT volume bound", {"M0", "mu_over_3WM", "trunc_error"}, [] { return criterion_cwt(); }},
        {6, "STFT Parseval", {"energy_ratio"}, [] { return criterion_stft_parseval(); }},
        {7, "vocoder sanity", {"duration_ratio", "peak_offset_bins", "snr_db"}, [] { return criterion_vocoder(); }},
        {8, "complexity", {"relative_gap", "fft_term"}, [] { return criterion_complexity(); }},
        {9, "atom FT identity", {"max_rel_err"}, [] { return criterion_atom_ft(); }},
    };

    std::ofstream csv;
    if (argc > 1) {
        csv.open(argv[1]);
        write_csv_header(csv);
    }
    int failed = 0;
    for (const Criterion& c : criteria) {
        std::vector<Row> rows;
        std::string error;
        try {
            rows = c.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const bool pass = error.empty() && all_pass(rows);
        failed += pass ? 0 : 1;
        std::size_t good = 0;
        for (const Row& r : rows) good += r.pass ? 1 : 0;
        std::printf("%s criterion %d %s: %zu/%zu rows pass%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), good, rows.size(),
                    summary(rows, c.headline).c_str());
        if (!error.empty()) std::printf("    error: %s\n", error.c_str());
        for (const Row& r : rows)
            if (!r.pass)
                std::printf("    failing row: %s %s %s=%.6g (%s)\n", r.test_id.c_str(), r.params.c_str(), r.metric.c_str(), r.value,
                            r.threshold.c_str());
        std::fflush(stdout);
        if (csv) write_csv(csv, rows);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
