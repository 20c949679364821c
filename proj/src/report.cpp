#include "fiet/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "fiet/error.hpp"
#include "fiet/parallel.hpp"
#include "fiet/version.hpp"

namespace fiet {

std::size_t default_threads() {
    if (const char* env = std::getenv("FIET_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

nlohmann::ordered_json ExperimentReport::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["version"] = kVersion;
    j["seed"] = seed;
    j["parameters"] = parameters;
    j["summary"] = summary;
    j["passed"] = passed;
    j["gate"] = gate;
    j["columns"] = columns;
    j["rows"] = rows;
    return j;
}

namespace {
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}
}  // namespace

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << "# version=" << kVersion << " seed=" << seed << " experiment=" << experiment << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << csv_field(columns[i]);
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << '\n';
    }
    return os.str();
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("fit_line needs distinct abscissae");
    LinearFit f;
    f.points = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.slope * x[i] + f.intercept);
        sse += r * r;
    }
    f.r2 = syy == 0.0 ? 1.0 : 1.0 - sse / syy;
    f.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return f;
}

double binomial_stderr(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace fiet
