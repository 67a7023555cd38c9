#include "ncb/harness/export.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ncb/error.hpp"

namespace ncb {

namespace {

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ConfigError("csv line " + std::to_string(line) + ": '" + s + "' is not a number");
    return v;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "': " + std::strerror(errno));
    out << content;
    out.close();
    if (!out) throw Error("failed writing '" + path + "': " + std::strerror(errno));
}

}  // namespace

void write_log_csv(std::ostream& os, const EpisodeLog& log) {
    os << "k,r,u,y,e";
    if (log.has_reference()) os << ",r_prime";
    for (const auto& c : log.extra_columns()) os << ',' << c;
    os << '\n';
    for (const auto& row : log.rows()) {
        os << row.k << ',' << number(row.r) << ',' << number(row.u) << ',' << number(row.y) << ',' << number(row.e);
        if (log.has_reference()) os << ',' << number(row.r_prime);
        for (double v : row.extra) os << ',' << number(v);
        os << '\n';
    }
}

EpisodeLog read_log_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("csv is empty");
    const auto header = split(line);
    if (header.size() < 5 || header[0] != "k" || header[1] != "r" || header[2] != "u" || header[3] != "y" ||
        header[4] != "e")
        throw ConfigError("csv header must start with k,r,u,y,e");
    std::size_t first_extra = 5;
    const bool has_reference = header.size() > 5 && header[5] == "r_prime";
    if (has_reference) ++first_extra;
    EpisodeLog log(std::vector<std::string>(header.begin() + long(first_extra), header.end()), has_reference);

    std::size_t n = 1;
    while (std::getline(is, line)) {
        ++n;
        const auto f = split(line);
        if (f.size() != header.size())
            throw ConfigError("csv line " + std::to_string(n) + ": expected " + std::to_string(header.size()) + " fields");
        EpisodeRow row;
        row.k = long(parse_number(f[0], n));
        row.r = parse_number(f[1], n);
        row.u = parse_number(f[2], n);
        row.y = parse_number(f[3], n);
        row.e = parse_number(f[4], n);
        if (has_reference) row.r_prime = parse_number(f[5], n);
        for (std::size_t i = first_extra; i < f.size(); ++i) row.extra.push_back(parse_number(f[i], n));
        log.add(std::move(row));
    }
    return log;
}

std::string meta_json(const RunResult& result) {
    using nlohmann::json;
    json meta;
    meta["config"] = json::parse(config_to_json(result.config));
    meta["seed"] = result.seed;
    meta["metrics"] = {{"iae", result.report.iae},
                       {"final_window_mean_abs_e", result.report.final_window_mean_abs_e},
                       {"max_abs_u", result.report.max_abs_u},
                       {"diverged", result.report.diverged},
                       {"rows", result.log.size()}};
    meta["artifacts"] = result.artifacts;
    meta["training"] = result.training;
    meta["warnings"] = result.warnings;
    if (result.divergence_tick)
        meta["divergence"] = {{"tick", *result.divergence_tick}, {"message", result.divergence_message}};
    else
        meta["divergence"] = nullptr;
    return meta.dump(2) + "\n";
}

void export_run(const RunResult& result, const std::string& prefix) {
    std::ostringstream csv;
    write_log_csv(csv, result.log);
    write_file(prefix + ".csv", csv.str());
    write_file(prefix + ".meta.json", meta_json(result));
}

}  // namespace ncb
