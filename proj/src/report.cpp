#include "clinduct/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace clinduct {

namespace {

using nlohmann::json;

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string format_number(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string run_report_json(const RunReport& r, bool strip_residuals) {
    json solutions = json::array();
    for (const auto& s : r.solutions)
        solutions.push_back(render(s));
    json j = {
        {"task", r.task},
        {"basis", r.basis},
        {"strip_residuals", strip_residuals},
        {"seed", r.seed},
        {"generations", r.generations},
        {"first_exact_iteration", optional_json(r.first_exact_iteration)},
        {"best",
         {{"genome", render(r.best.genome)},
          {"fitness", r.best.fitness},
          {"size", r.best.size},
          {"exact", r.best.exact},
          {"output", r.best.output}}},
        {"continuation", optional_json(r.continuation)},
        {"solution_count", r.solution_count},
        {"solutions", std::move(solutions)},
        {"fitness_trace", r.fitness_trace},
    };
    return j.dump();
}

void write_run_reports(std::ostream& out, const std::vector<RunReport>& reports, bool strip_residuals) {
    for (const auto& r : reports)
        out << run_report_json(r, strip_residuals) << '\n';
}

std::string summary_csv_header() {
    return "task,basis,strip,runs,successes,success_rate,median_first_exact,distinct_solutions,"
           "continuation_agreement";
}

std::string summary_csv_row(const ExperimentSummary& s) {
    std::string row = s.task + ',' + s.basis_spec + ',' + (s.strip_residuals ? "on" : "off") + ',' +
                      std::to_string(s.runs) + ',' + std::to_string(s.successes) + ',' +
                      format_number(s.success_rate) + ',';
    row += s.median_first_exact_iteration ? format_number(*s.median_first_exact_iteration, 1) : "";
    row += ',' + std::to_string(s.distinct_solutions) + ',';
    row += s.continuation_agreement ? format_number(*s.continuation_agreement) : "";
    return row;
}

void write_summary_csv(std::ostream& out, const std::vector<ExperimentSummary>& rows) {
    out << summary_csv_header() << '\n';
    for (const auto& r : rows)
        out << summary_csv_row(r) << '\n';
}

}  // namespace clinduct
