#include "gms/ground_motion.hpp"

#include "gms/error.hpp"
#include "gms/io.hpp"
#include "gms/log.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gms {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') {
                current.pop_back();
            }
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) {
        lines.push_back(current);
    }
    return lines;
}

double parse_double_token(const std::string& token, const std::string& what) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || static_cast<std::size_t>(end - begin) != token.size()) {
        throw MalformedHeader("cannot parse " + what + " from '" + token + "'");
    }
    return v;
}

} // namespace

void GroundMotionRecord::validate() const {
    if (accel.empty()) {
        throw SampleCountMismatch("record '" + id + "' has no samples");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw MalformedHeader("record '" + id + "' has invalid dt");
    }
    for (std::size_t i = 0; i < accel.size(); ++i) {
        if (!std::isfinite(accel[i])) {
            throw NonFiniteSample("record '" + id + "' has a non-finite sample at index " +
                                  std::to_string(i));
        }
    }
}

GroundMotionRecord parse_at2(const std::string& text, const std::string& id) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.size() < 4) {
        throw MalformedHeader("AT2 record '" + id + "': fewer than 4 header lines");
    }

    // Fourth line: "NPTS=   4096, DT=   .0100 SEC" (spacing varies by vintage).
    static const std::regex npts_re(R"(NPTS\s*=?\s*([0-9]+))", std::regex::icase);
    static const std::regex dt_re(R"(DT\s*=?\s*([0-9.eE+\-]+))", std::regex::icase);
    std::smatch m_npts;
    std::smatch m_dt;
    if (!std::regex_search(lines[3], m_npts, npts_re) ||
        !std::regex_search(lines[3], m_dt, dt_re)) {
        throw MalformedHeader("AT2 record '" + id + "': NPTS/DT not found on line 4: '" +
                              lines[3] + "'");
    }
    const std::size_t npts = static_cast<std::size_t>(std::stoull(m_npts[1].str()));
    const double dt = parse_double_token(m_dt[1].str(), "DT");
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw MalformedHeader("AT2 record '" + id + "': DT must be positive");
    }
    if (npts == 0) {
        throw MalformedHeader("AT2 record '" + id + "': NPTS must be positive");
    }

    GroundMotionRecord rec;
    rec.id = id;
    rec.dt = dt;
    rec.accel.reserve(npts);
    for (std::size_t li = 4; li < lines.size(); ++li) {
        std::istringstream ss(lines[li]);
        std::string token;
        while (ss >> token) {
            const double v = parse_double_token(token, "sample");
            if (!std::isfinite(v)) {
                throw NonFiniteSample("AT2 record '" + id + "': non-finite sample at index " +
                                      std::to_string(rec.accel.size()));
            }
            rec.accel.push_back(v);
        }
    }
    if (rec.accel.size() != npts) {
        throw SampleCountMismatch("AT2 record '" + id + "': header declares " +
                                  std::to_string(npts) + " samples, file contains " +
                                  std::to_string(rec.accel.size()));
    }
    rec.source_meta["format"] = "AT2";
    rec.source_meta["header_1"] = lines[0];
    rec.source_meta["header_2"] = lines[1];
    rec.source_meta["header_3"] = lines[2];
    return rec;
}

GroundMotionRecord parse_csv_record(const std::string& text, const std::string& id) {
    const std::vector<std::string> lines = split_lines(text);
    std::vector<double> times;
    std::vector<double> values;
    bool saw_header = false;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        if (line.empty() || line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw MalformedHeader("CSV record '" + id + "': line " + std::to_string(li + 1) +
                                  " has no comma");
        }
        std::string a = line.substr(0, comma);
        std::string b = line.substr(comma + 1);
        if (li == 0 && !saw_header) {
            // Accept a "time,accel_g" header row; tolerate header-less files.
            char* end = nullptr;
            std::strtod(a.c_str(), &end);
            if (end == a.c_str()) {
                saw_header = true;
                continue;
            }
        }
        times.push_back(parse_double_token(a, "time"));
        const double v = parse_double_token(b, "acceleration");
        if (!std::isfinite(v)) {
            throw NonFiniteSample("CSV record '" + id + "': non-finite sample at row " +
                                  std::to_string(li + 1));
        }
        values.push_back(v);
    }
    if (values.size() < 2) {
        throw SampleCountMismatch("CSV record '" + id + "': needs at least two data rows");
    }
    const double dt = times[1] - times[0];
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw MalformedHeader("CSV record '" + id + "': time column must be increasing");
    }
    const double tol = std::max(1e-9, 1e-6 * dt);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double expected = times[0] + static_cast<double>(i) * dt;
        if (std::abs(times[i] - expected) > tol) {
            throw MalformedHeader("CSV record '" + id + "': time column is not a uniform grid (row " +
                                  std::to_string(i + 1) + ")");
        }
    }
    GroundMotionRecord rec;
    rec.id = id;
    rec.dt = dt;
    rec.accel = std::move(values);
    rec.source_meta["format"] = "CSV";
    return rec;
}

GroundMotionRecord load_record(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const std::string text = io::read_text_file(path);
    const std::string id = path.stem().string();
    GroundMotionRecord rec;
    if (ext == ".at2") {
        rec = parse_at2(text, id);
    } else if (ext == ".csv") {
        rec = parse_csv_record(text, id);
    } else {
        throw IoError("unsupported record format '" + ext + "' (expected .at2 or .csv): " +
                      path.string());
    }
    rec.validate();
    return rec;
}

void save_record_csv(const GroundMotionRecord& record, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "time,accel_g\n";
    for (std::size_t i = 0; i < record.accel.size(); ++i) {
        out << io::format_full(static_cast<double>(i) * record.dt) << ','
            << io::format_full(record.accel[i]) << '\n';
    }
    io::write_text_file(path, out.str());
}

GroundMotionRecord resample(const GroundMotionRecord& record, double dt_target) {
    record.validate();
    if (!(dt_target > 0.0) || !std::isfinite(dt_target)) {
        throw Error("resample: dt_target must be positive");
    }
    if (dt_target == record.dt) {
        return record;
    }
    GroundMotionRecord out;
    out.id = record.id;
    out.dt = dt_target;
    out.source_meta = record.source_meta;

    const std::size_t n = record.accel.size();
    if (n == 1) {
        out.accel = {record.accel[0]};
        return out;
    }
    const double duration = record.duration();
    // Small forgiveness so durations that are an exact multiple of dt_target
    // keep their final sample despite rounding in the division.
    const std::size_t n_new =
        static_cast<std::size_t>(std::floor(duration / dt_target + 1e-9)) + 1;
    out.accel.resize(n_new);
    for (std::size_t i = 0; i < n_new; ++i) {
        const double pos = static_cast<double>(i) * dt_target / record.dt;
        std::size_t k = static_cast<std::size_t>(pos);
        if (k > n - 2) {
            k = n - 2;
        }
        double theta = pos - static_cast<double>(k);
        theta = std::clamp(theta, 0.0, 1.0);
        out.accel[i] = record.accel[k] + theta * (record.accel[k + 1] - record.accel[k]);
    }
    return out;
}

GroundMotionRecord pad_or_truncate(const GroundMotionRecord& record, std::size_t n_steps) {
    GroundMotionRecord out = record;
    if (record.accel.size() > n_steps) {
        log::warn("record '" + record.id + "': truncating " +
                  std::to_string(record.accel.size()) + " samples to the suite grid of " +
                  std::to_string(n_steps));
        out.accel.resize(n_steps);
    } else if (record.accel.size() < n_steps) {
        out.accel.resize(n_steps, 0.0);
    }
    return out;
}

std::size_t suite_steps(double duration, double dt) {
    if (!(dt > 0.0) || !(duration >= 0.0)) {
        throw Error("suite_steps: duration must be >= 0 and dt > 0");
    }
    return static_cast<std::size_t>(std::llround(duration / dt)) + 1;
}

GroundMotionRecord SuiteMatrix::column(std::size_t j) const {
    if (j >= m()) {
        throw Error("suite column index out of range");
    }
    GroundMotionRecord rec;
    rec.id = record_ids[j];
    rec.dt = dt;
    rec.accel.assign(data.col(j), data.col(j) + n_steps);
    if (j < source_meta.size()) {
        rec.source_meta = source_meta[j];
    }
    return rec;
}

SuiteMatrix build_suite(const std::vector<GroundMotionRecord>& records, double dt,
                        double duration) {
    if (records.empty()) {
        throw Error("build_suite: no records given");
    }
    SuiteMatrix suite;
    suite.dt = dt;
    suite.n_steps = suite_steps(duration, dt);
    suite.data = linalg::Matrix(suite.n_steps, records.size());
    for (std::size_t j = 0; j < records.size(); ++j) {
        const GroundMotionRecord aligned =
            pad_or_truncate(resample(records[j], dt), suite.n_steps);
        std::copy(aligned.accel.begin(), aligned.accel.end(), suite.data.col(j));
        suite.record_ids.push_back(records[j].id);
        suite.source_meta.push_back(records[j].source_meta);
    }
    return suite;
}

namespace {

constexpr char kSuiteMagic[8] = {'Q', 'S', 'U', 'I', 'T', 'E', '0', '1'};

} // namespace

void save_suite(const SuiteMatrix& suite, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write suite file: " + path.string());
    }
    out.write(kSuiteMagic, sizeof(kSuiteMagic));
    io::write_u32(out, static_cast<std::uint32_t>(suite.n_steps));
    io::write_u32(out, static_cast<std::uint32_t>(suite.m()));
    io::write_f64_array(out, suite.data.data().data(), suite.data.data().size());
    out.close();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }

    nlohmann::json manifest;
    manifest["format"] = "QSUITE01";
    manifest["dt"] = suite.dt;
    manifest["n_steps"] = suite.n_steps;
    manifest["m"] = suite.m();
    manifest["sha256"] = io::sha256_file(path);
    nlohmann::json records = nlohmann::json::array();
    for (std::size_t j = 0; j < suite.m(); ++j) {
        nlohmann::json r;
        r["id"] = suite.record_ids[j];
        r["source_meta"] = j < suite.source_meta.size()
                               ? nlohmann::json(suite.source_meta[j])
                               : nlohmann::json::object();
        records.push_back(std::move(r));
    }
    manifest["records"] = std::move(records);
    io::write_json_file(path.string() + ".json", manifest);
}

SuiteMatrix load_suite(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open suite file: " + path.string());
    }
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kSuiteMagic)) {
        throw IoError("not a QSUITE01 file: " + path.string());
    }
    SuiteMatrix suite;
    suite.n_steps = io::read_u32(in);
    const std::size_t m = io::read_u32(in);
    suite.data = linalg::Matrix(suite.n_steps, m);
    io::read_f64_array(in, suite.data.data().data(), suite.data.data().size());

    const std::filesystem::path manifest_path = path.string() + ".json";
    if (!std::filesystem::exists(manifest_path)) {
        throw IoError("suite manifest not found: " + manifest_path.string());
    }
    const nlohmann::json manifest = io::read_json_file(manifest_path);
    suite.dt = manifest.at("dt").get<double>();
    if (manifest.contains("records")) {
        for (const auto& r : manifest.at("records")) {
            suite.record_ids.push_back(r.at("id").get<std::string>());
            std::map<std::string, std::string> meta;
            if (r.contains("source_meta")) {
                for (const auto& [k, v] : r.at("source_meta").items()) {
                    meta[k] = v.get<std::string>();
                }
            }
            suite.source_meta.push_back(std::move(meta));
        }
    }
    if (suite.record_ids.size() != m) {
        throw IoError("suite manifest lists " + std::to_string(suite.record_ids.size()) +
                      " records for a file with " + std::to_string(m) + " columns");
    }
    return suite;
}

} // namespace gms
