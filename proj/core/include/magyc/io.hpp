#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "magyc/eval.hpp"
#include "magyc/sim.hpp"
#include "magyc/solver.hpp"

// File formats are part of the public contract:
//   datasets    CSV  header t,mx,my,mz,wx,wy,wz[,roll,pitch,heading]
//               units s, mG, rad/s, rad; UTF-8, LF, 17 significant digits
//   truth       JSON schema magyc.truth/1
//   results     JSON schema magyc.result/1
//   reports     JSON schema magyc.report/1
namespace magyc {

inline constexpr const char* kTruthSchema = "magyc.truth/1";
inline constexpr const char* kResultSchema = "magyc.result/1";
inline constexpr const char* kReportSchema = "magyc.report/1";
inline constexpr const char* kSummarySchema = "magyc.summary/1";

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);

/// Parse errors name the offending column or line. A truth sidecar, when
/// available, is attached by the caller.
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_truth_json(const SimulationTruth& truth, const std::filesystem::path& path);
SimulationTruth read_truth_json(const std::filesystem::path& path);

struct ResultDocument {
    std::string method;
    CalibrationResult result;
};

void write_result_json(const ResultDocument& doc, const std::filesystem::path& path);
ResultDocument read_result_json(const std::filesystem::path& path);

void write_report_json(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport read_report_json(const std::filesystem::path& path);

/// Per-sample heading error trace for external plotting.
void write_heading_errors_csv(std::span<const double> t, std::span<const double> error_deg,
                              const std::filesystem::path& path);

}  // namespace magyc
