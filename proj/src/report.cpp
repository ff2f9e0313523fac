#include "avocado/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>

#include "avocado/rng.hpp"

namespace avocado {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_trace(std::ostream& os, const char* stage, const FlowTrace& t) {
    os << stage << "_converged = " << (t.converged ? "true" : "false") << "\n";
    os << stage << "_iterations = " << t.iterations << "\n";
    os << stage << "_stop_reason = " << t.stop_reason << "\n";
    os << stage << "_max_divergence_ratio = " << format_double(t.max_divergence_ratio) << "\n";
    os << stage << "_energy =";
    for (double e : t.energy) os << " " << format_double(e);
    os << "\n";
}

}  // namespace

void write_metrics_block(std::ostream& os, const MetricsReport& m) {
    if (m.has_jacobian) {
        os << "jacobian_min = " << format_double(m.jacobian_min) << "\n";
        os << "jacobian_mean = " << format_double(m.jacobian_mean) << "\n";
        os << "jacobian_max = " << format_double(m.jacobian_max) << "\n";
    }
    if (m.has_tre) {
        os << "tre_mm =";
        for (std::size_t i = 0; i < m.tre_per_landmark.size(); ++i) {
            if (m.tre_valid[i])
                os << " " << format_double(m.tre_per_landmark[i]);
            else
                os << " excluded";
        }
        os << "\n";
        os << "tre_mean_mm = " << format_double(m.tre_mean) << "\n";
        os << "tre_std_mm = " << format_double(m.tre_std) << "\n";
    }
    if (m.has_volume) {
        os << "volume_before = " << format_double(m.volume_before) << "\n";
        os << "volume_after = " << format_double(m.volume_after) << "\n";
        os << "volume_change_pct = " << format_double(m.volume_change_pct) << "\n";
    }
    if (m.dice_value) {
        os << "dice = " << format_double(*m.dice_value) << "\n";
        if (m.dice_both_empty) os << "dice_both_empty = true\n";
    }
}

void write_report(std::ostream& os, const RegistrationResult& result, const RunConfig& config) {
    os << "format = avocado-report-1\n";
    std::time_t now = std::time(nullptr);
    char ts[64];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    os << "timestamp = " << ts << "\n";  // the one line excluded from comparisons
    os << "mode = " << config.mode << "\n";
    os << "seed = " << config.seed << "\n";
    os << "rng = " << kRngName << "\n";

    const Grid& g = result.map.grid();
    os << "grid_dims =";
    for (int d = 0; d < g.ndims(); ++d) os << " " << g.dim(d);
    os << "\ngrid_spacing =";
    for (int d = 0; d < g.ndims(); ++d) os << " " << format_double(g.spacing(d));
    os << "\ngrid_origin =";
    for (int d = 0; d < g.ndims(); ++d) os << " " << format_double(g.origin(d));
    os << "\n";

    const int nd = result.rigid.ndims;
    os << "rigid_rotation =";
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) os << " " << format_double(result.rigid.rotation[i][j]);
    os << "\nrigid_translation =";
    for (int d = 0; d < nd; ++d) os << " " << format_double(result.rigid.translation[d]);
    os << "\n";

    os << "stage_landmark = " << (result.landmark_trace ? "run" : "skipped") << "\n";
    if (result.landmark_trace) write_trace(os, "landmark", *result.landmark_trace);
    os << "stage_intensity = " << (result.intensity_trace ? "run" : "skipped") << "\n";
    if (result.intensity_trace) write_trace(os, "intensity", *result.intensity_trace);

    bool converged = true;
    if (result.landmark_trace) converged = converged && result.landmark_trace->converged;
    if (result.intensity_trace) converged = converged && result.intensity_trace->converged;
    os << "converged = " << (converged ? "true" : "false") << "\n";

    write_metrics_block(os, result.metrics);
}

std::map<std::string, std::string> parse_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("report: cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

}  // namespace avocado
