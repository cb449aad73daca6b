#include "magyc/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace magyc {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw input_error("io-error", "cannot open for writing: " + path.string());
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw input_error("io-error", "cannot open for reading: " + path.string());
    }
    return in;
}

double parse_double(const std::string& cell, const std::string& column, std::size_t line_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw input_error("parse-error", "line " + std::to_string(line_no) +
                                             ": column '" + column +
                                             "' is not a number: '" + cell + "'");
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

const std::vector<std::string> kBaseColumns = {"t", "mx", "my", "mz", "wx", "wy", "wz"};
const std::vector<std::string> kAttitudeColumns = {"roll", "pitch", "heading"};

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) {
        throw input_error("parse-error", "field '" + field + "' must be a 3-array");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec6_to_json(const Vec6& v) {
    return json::array({v(0), v(1), v(2), v(3), v(4), v(5)});
}

Vec6 vec6_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 6) {
        throw input_error("parse-error", "field '" + field + "' must be a 6-array");
    }
    Vec6 v;
    for (int i = 0; i < 6; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json mat3_to_json(const Mat3& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
        rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
    }
    return rows;
}

Mat3 mat3_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) {
        throw input_error("parse-error", "field '" + field + "' must be a 3x3 array");
    }
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != 3) {
            throw input_error("parse-error", "field '" + field + "' must be a 3x3 array");
        }
        for (int c = 0; c < 3; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json load_json(const std::filesystem::path& path, const char* expected_schema) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error("parse-error", path.string() + ": " + e.what());
    }
    if (!j.contains("schema") || j["schema"].get<std::string>() != expected_schema) {
        throw input_error("schema-mismatch",
                          path.string() + ": expected schema '" + expected_schema + "'");
    }
    return j;
}

json state_to_json(const CalibrationState& x) {
    return json{{"c", vec6_to_json(x.c.c)},
                {"m_b", vec3_to_json(x.m_b)},
                {"w_b", vec3_to_json(x.w_b)}};
}

CalibrationState state_from_json(const json& j) {
    CalibrationState x;
    x.c.c = vec6_from_json(j.at("c"), "c");
    x.m_b = vec3_from_json(j.at("m_b"), "m_b");
    x.w_b = vec3_from_json(j.at("w_b"), "w_b");
    return x;
}

}  // namespace

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
    auto out = open_out(path);
    const bool attitude = ds.has_attitude();
    out << "t,mx,my,mz,wx,wy,wz";
    if (attitude) out << ",roll,pitch,heading";
    out << "\n";
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const MeasurementSample& s = ds.samples[i];
        out << fmt17(s.t) << ',' << fmt17(s.m.x()) << ',' << fmt17(s.m.y()) << ','
            << fmt17(s.m.z()) << ',' << fmt17(s.w.x()) << ',' << fmt17(s.w.y()) << ','
            << fmt17(s.w.z());
        if (attitude) {
            const AttitudeSample& a = ds.attitude[i];
            out << ',' << fmt17(a.roll) << ',' << fmt17(a.pitch) << ',' << fmt17(a.heading);
        }
        out << '\n';
    }
    if (!out) {
        throw input_error("io-error", "write failed: " + path.string());
    }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw input_error("empty-dataset", path.string() + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_csv(line);
    for (std::size_t i = 0; i < kBaseColumns.size(); ++i) {
        if (i >= header.size() || header[i] != kBaseColumns[i]) {
            throw input_error("parse-error",
                              path.string() + ": missing or misplaced column '" +
                                  kBaseColumns[i] + "' in header");
        }
    }
    bool attitude = false;
    if (header.size() == 10) {
        for (std::size_t i = 0; i < kAttitudeColumns.size(); ++i) {
            if (header[7 + i] != kAttitudeColumns[i]) {
                throw input_error("parse-error",
                                  path.string() + ": missing or misplaced column '" +
                                      kAttitudeColumns[i] + "' in header");
            }
        }
        attitude = true;
    } else if (header.size() != kBaseColumns.size()) {
        throw input_error("parse-error", path.string() + ": unexpected column count " +
                                             std::to_string(header.size()));
    }

    Dataset ds;
    const std::size_t expected = attitude ? 10 : 7;
    std::size_t line_no = 1;
    double prev_t = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != expected) {
            throw input_error("parse-error",
                              path.string() + ": line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " columns, expected " +
                                  std::to_string(expected));
        }
        MeasurementSample s;
        s.t = parse_double(cells[0], "t", line_no);
        s.m = Vec3(parse_double(cells[1], "mx", line_no), parse_double(cells[2], "my", line_no),
                   parse_double(cells[3], "mz", line_no));
        s.w = Vec3(parse_double(cells[4], "wx", line_no), parse_double(cells[5], "wy", line_no),
                   parse_double(cells[6], "wz", line_no));
        if (!ds.samples.empty() && !(s.t > prev_t)) {
            throw input_error("parse-error", path.string() + ": line " +
                                                 std::to_string(line_no) +
                                                 ": timestamps must be strictly increasing");
        }
        prev_t = s.t;
        ds.samples.push_back(s);
        if (attitude) {
            AttitudeSample a;
            a.t = s.t;
            a.roll = parse_double(cells[7], "roll", line_no);
            a.pitch = parse_double(cells[8], "pitch", line_no);
            a.heading = parse_double(cells[9], "heading", line_no);
            ds.attitude.push_back(a);
        }
    }
    if (ds.samples.empty()) {
        throw input_error("empty-dataset", path.string() + ": no data rows");
    }
    ds.label = path.stem().string();
    return ds;
}

void write_truth_json(const SimulationTruth& truth, const std::filesystem::path& path) {
    json j{{"schema", kTruthSchema},
           {"m0", vec3_to_json(truth.m0)},
           {"soft_iron_terms", vec6_to_json(truth.a.c)},
           {"m_b", vec3_to_json(truth.m_b)},
           {"w_b", vec3_to_json(truth.w_b)},
           {"sigma_mag", truth.sigma_mag},
           {"sigma_gyro", truth.sigma_gyro}};
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

SimulationTruth read_truth_json(const std::filesystem::path& path) {
    const json j = load_json(path, kTruthSchema);
    SimulationTruth t;
    t.m0 = vec3_from_json(j.at("m0"), "m0");
    t.a.c = vec6_from_json(j.at("soft_iron_terms"), "soft_iron_terms");
    t.m_b = vec3_from_json(j.at("m_b"), "m_b");
    t.w_b = vec3_from_json(j.at("w_b"), "w_b");
    t.sigma_mag = j.at("sigma_mag").get<double>();
    t.sigma_gyro = j.at("sigma_gyro").get<double>();
    return t;
}

void write_result_json(const ResultDocument& doc, const std::filesystem::path& path) {
    const CalibrationResult& r = doc.result;
    json j{{"schema", kResultSchema},
           {"method", doc.method},
           {"converged", r.converged},
           {"iterations", r.iterations},
           {"final_cost", r.final_cost},
           {"soft_iron", mat3_to_json(r.soft_iron)},
           {"hard_iron", vec3_to_json(r.hard_iron)},
           {"gyro_bias", vec3_to_json(r.gyro_bias)},
           {"state", state_to_json(r.state)}};
    if (!r.state_history.empty()) {
        json history = json::array();
        for (const HistoryEntry& e : r.state_history) {
            json entry = state_to_json(e.state);
            entry["held"] = e.held;
            history.push_back(std::move(entry));
        }
        j["state_history"] = std::move(history);
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

ResultDocument read_result_json(const std::filesystem::path& path) {
    const json j = load_json(path, kResultSchema);
    ResultDocument doc;
    doc.method = j.at("method").get<std::string>();
    CalibrationResult& r = doc.result;
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.final_cost = j.at("final_cost").get<double>();
    r.soft_iron = mat3_from_json(j.at("soft_iron"), "soft_iron");
    r.hard_iron = vec3_from_json(j.at("hard_iron"), "hard_iron");
    r.gyro_bias = vec3_from_json(j.at("gyro_bias"), "gyro_bias");
    r.state = state_from_json(j.at("state"));
    if (j.contains("state_history")) {
        for (const json& entry : j["state_history"]) {
            HistoryEntry e;
            e.state = state_from_json(entry);
            e.held = entry.value("held", false);
            r.state_history.push_back(e);
        }
    }
    return doc;
}

void write_report_json(const EvaluationReport& report, const std::filesystem::path& path) {
    json j{{"schema", kReportSchema},
           {"method", report.method},
           {"dataset", report.dataset},
           {"heading_rmse_deg", report.heading_rmse_deg},
           {"heading_std_deg", report.heading_std_deg},
           {"mag_field_std_mg", report.mag_field_std_mg}};
    if (report.params) {
        j["parameter_errors"] = json{
            {"hard_iron_error", vec3_to_json(report.params->hard_iron_error)},
            {"soft_iron_error", mat3_to_json(report.params->soft_iron_error)},
            {"gyro_bias_error", vec3_to_json(report.params->gyro_bias_error)},
            {"scale", report.params->scale}};
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

EvaluationReport read_report_json(const std::filesystem::path& path) {
    const json j = load_json(path, kReportSchema);
    EvaluationReport r;
    r.method = j.at("method").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.heading_rmse_deg = j.at("heading_rmse_deg").get<double>();
    r.heading_std_deg = j.at("heading_std_deg").get<double>();
    r.mag_field_std_mg = j.at("mag_field_std_mg").get<double>();
    if (j.contains("parameter_errors")) {
        const json& p = j["parameter_errors"];
        ParameterErrors e;
        e.hard_iron_error = vec3_from_json(p.at("hard_iron_error"), "hard_iron_error");
        e.soft_iron_error = mat3_from_json(p.at("soft_iron_error"), "soft_iron_error");
        e.gyro_bias_error = vec3_from_json(p.at("gyro_bias_error"), "gyro_bias_error");
        e.scale = p.at("scale").get<double>();
        r.params = e;
    }
    return r;
}

void write_heading_errors_csv(std::span<const double> t, std::span<const double> error_deg,
                              const std::filesystem::path& path) {
    if (t.size() != error_deg.size()) {
        throw input_error("io-error", "time and error traces must have equal length");
    }
    auto out = open_out(path);
    out << "t,heading_error_deg\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << fmt17(t[i]) << ',' << fmt17(error_deg[i]) << '\n';
    }
}

}  // namespace magyc
