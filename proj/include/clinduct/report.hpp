#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "clinduct/evolve.hpp"
#include "clinduct/harness.hpp"

namespace clinduct {

/// One JSON object on a single line; expressions use the term syntax.
std::string run_report_json(const RunReport& report, bool strip_residuals = false);
void write_run_reports(std::ostream& out, const std::vector<RunReport>& reports, bool strip_residuals = false);

std::string summary_csv_header();
std::string summary_csv_row(const ExperimentSummary& s);
void write_summary_csv(std::ostream& out, const std::vector<ExperimentSummary>& rows);

/// Fixed-point rendering used in tables.
std::string format_number(double v, int digits = 4);

}  // namespace clinduct
