#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spinreduce/cli.hpp"

namespace spinreduce {

namespace {

std::string fmt_double(double x) {
    if (std::isnan(x)) {
        return "null";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void append_outcome_stat(std::ostringstream& os, const char* key, const OutcomeStat& s) {
    os << "\"" << key << "\": {\"value\": " << fmt_double(s.frequency)
       << ", \"se\": " << fmt_double(s.se) << ", \"count\": " << s.count << "}";
}

}  // namespace

void validate_config(const RunConfig& config) {
    if (config.model != "energy" && config.model != "local-spins" && config.model != "custom") {
        throw ConfigError("unknown model '" + config.model + "'");
    }
    if (config.model == "custom" && config.custom_generators.empty()) {
        throw ConfigError("--custom-generators is required with --model custom");
    }
    if (!(config.sigma > 0.0)) {
        throw ConfigError("sigma must be positive");
    }
    if (config.n < 1) {
        throw ConfigError("ensemble size must be at least 1");
    }
    if (!(config.dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    if (!(config.collapse_tol > 0.0)) {
        throw ConfigError("collapse tolerance must be positive");
    }
    if (config.max_steps < 1) {
        throw ConfigError("max steps must be at least 1");
    }
    if (config.snapshots < 0) {
        throw ConfigError("snapshot count must be nonnegative");
    }
    if (config.z_bins < 1 || config.phi_bins < 1) {
        throw ConfigError("bin counts must be at least 1");
    }
}

ReductionModel model_from_config(const RunConfig& config) {
    if (config.model == "energy") {
        return model_energy(config.sigma);
    }
    if (config.model == "local-spins") {
        return model_local_spins(config.sigma);
    }
    if (config.model == "custom") {
        return load_custom_model(config.custom_generators);
    }
    throw ConfigError("unknown model '" + config.model + "'");
}

SimulationParams params_from_config(const RunConfig& config) {
    return {config.dt, config.collapse_tol, config.max_steps, config.snapshots};
}

std::string format_report_json(const RunConfig& config, const EnsembleReport& report,
                               std::span<const LudersOutcome> luders) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"config\": {\"model\": \"" << config.model << "\", \"custom_generators\": \""
       << config.custom_generators << "\", \"sigma\": " << fmt_double(config.sigma)
       << ", \"n\": " << config.n << ", \"dt\": " << fmt_double(config.dt)
       << ", \"collapse_tol\": " << fmt_double(config.collapse_tol)
       << ", \"max_steps\": " << config.max_steps << ", \"seed\": " << config.seed
       << ", \"snapshots\": " << config.snapshots << "},\n";
    os << "  \"frequencies\": {";
    append_outcome_stat(os, "+1", report.freq_plus);
    os << ", ";
    append_outcome_stat(os, "0", report.freq_zero);
    os << ", ";
    append_outcome_stat(os, "-1", report.freq_minus);
    os << "},\n";
    os << "  \"p_hat\": " << fmt_double(report.p_hat.value) << ",\n";
    os << "  \"p_hat_se\": " << fmt_double(report.p_hat.se) << ",\n";
    os << "  \"conservation\": " << fmt_double(report.conservation.value) << ",\n";
    os << "  \"conservation_se\": " << fmt_double(report.conservation.se) << ",\n";
    os << "  \"s2\": " << fmt_double(report.s2.value) << ",\n";
    os << "  \"s2_se\": " << fmt_double(report.s2.se) << ",\n";
    os << "  \"n_total\": " << report.n_total << ",\n";
    os << "  \"n_degenerate\": " << report.n_degenerate << ",\n";
    os << "  \"n_failed\": " << report.n_failed << ",\n";
    os << "  \"luders_reference\": {";
    for (std::size_t i = 0; i < luders.size(); ++i) {
        const LudersOutcome& o = luders[i];
        if (i > 0) {
            os << ", ";
        }
        os << "\"" << (o.eigenvalue > 0 ? "+1" : o.eigenvalue < 0 ? "-1" : "0")
           << "\": {\"probability\": " << fmt_double(o.probability) << ", \"state\": [";
        for (int c = 0; c < 4; ++c) {
            if (c > 0) {
                os << ", ";
            }
            os << "[" << fmt_double(o.state.amplitude(c).real()) << ", "
               << fmt_double(o.state.amplitude(c).imag()) << "]";
        }
        os << "]}";
    }
    os << "}\n}\n";
    return os.str();
}

std::string format_records_csv(std::span<const OutcomeRecord> records) {
    std::ostringstream os;
    os << "index,seed,eigenvalue,steps,theta,phi,re_uu,im_uu,re_ud,im_ud,re_du,im_du,re_dd,im_dd\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const OutcomeRecord& r = records[i];
        os << i << "," << r.seed << "," << r.eigenvalue << "," << r.steps << ",";
        if (r.sphere) {
            os << fmt_double(r.sphere->theta) << "," << fmt_double(r.sphere->phi);
        } else {
            os << ",";
        }
        for (int c = 0; c < 4; ++c) {
            os << "," << fmt_double(r.final_state.amplitude(c).real()) << ","
               << fmt_double(r.final_state.amplitude(c).imag());
        }
        os << "\n";
    }
    return os.str();
}

std::string format_martingale_csv(std::span<const SeriesPoint> energy,
                                  std::span<const SeriesPoint> variance) {
    if (energy.size() != variance.size()) {
        throw ScheduleMismatchError("energy and variance series differ in length");
    }
    std::ostringstream os;
    os << "time,energy_mean,energy_se,var_mean,var_se\n";
    for (std::size_t i = 0; i < energy.size(); ++i) {
        os << fmt_double(energy[i].time) << "," << fmt_double(energy[i].mean) << ","
           << fmt_double(energy[i].se) << "," << fmt_double(variance[i].mean) << ","
           << fmt_double(variance[i].se) << "\n";
    }
    return os.str();
}

std::string format_histogram_csv(const SphereHistogram& hist) {
    std::ostringstream os;
    os << "cos_theta_low,cos_theta_high,phi_low,phi_high,count\n";
    for (int i = 0; i < hist.n_z_bins; ++i) {
        for (int j = 0; j < hist.n_phi_bins; ++j) {
            os << fmt_double(hist.z_edge(i)) << "," << fmt_double(hist.z_edge(i + 1)) << ","
               << fmt_double(hist.phi_edge(j)) << "," << fmt_double(hist.phi_edge(j + 1)) << ","
               << hist.count(i, j) << "\n";
        }
    }
    return os.str();
}

ReductionModel load_custom_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open custom model file '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("custom model file '" + path + "' is not valid JSON: " + e.what());
    }
    ReductionModel model;
    try {
        for (const auto& gen : doc.at("generators")) {
            Eigen::Matrix4cd m;
            for (int r = 0; r < 4; ++r) {
                for (int c = 0; c < 4; ++c) {
                    const auto& entry = gen.at(r).at(c);
                    m(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
                }
            }
            model.generators.emplace_back(m);
        }
        for (const auto& s : doc.at("couplings")) {
            model.couplings.push_back(s.get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("custom model file '" + path + "' has the wrong shape: " + e.what());
    } catch (const HermiticityError& e) {
        throw ConfigError("custom model file '" + path + "': " + e.what());
    }
    try {
        validate_model(model);
    } catch (const ModelError& e) {
        throw ConfigError("custom model file '" + path + "': " + e.what());
    }
    return model;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("failed writing '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

}  // namespace spinreduce
