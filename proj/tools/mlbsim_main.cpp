#include "mlb/metrics.hpp"
#include "mlb/scenario.hpp"
#include "mlb/simkernel.hpp"
#include "mlb/sweep.hpp"
#include "mlb/validate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct RunFlags {
    std::string out_dir;
    std::int64_t seed = -1;
    double horizon = -1.0;
    std::string rc_formula;
    bool corrected_semantics = false;
    bool with_json = false;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

// Flag overrides land after file parse and before validation.
void apply_flags(mlb::Scenario& scenario, const RunFlags& flags) {
    if (flags.seed >= 0) scenario.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.horizon >= 0.0) scenario.horizon = flags.horizon;
    if (flags.rc_formula == "printed") scenario.flags.rc_formula = mlb::RcFormula::Printed;
    else if (flags.rc_formula == "normalized") {
        scenario.flags.rc_formula = mlb::RcFormula::Normalized;
    }
    if (flags.corrected_semantics) scenario.flags.corrected_semantics = true;
}

int do_validate(const std::string& path) {
    mlb::Scenario scenario;
    try {
        scenario = mlb::load_scenario_file(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    const auto violations = mlb::validate_scenario(scenario);
    if (violations.empty()) {
        std::cout << "scenario ok\n";
        return kExitOk;
    }
    for (const auto& v : violations) {
        std::cout << "violation: " << v.entity << ": " << v.message << '\n';
    }
    return kExitValidation;
}

int do_run(const std::string& path, const RunFlags& flags) {
    mlb::Scenario scenario;
    try {
        scenario = mlb::load_scenario_file(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    apply_flags(scenario, flags);
    const auto violations = mlb::validate_scenario(scenario);
    if (!violations.empty()) {
        std::cerr << "validation error: " << violations.front().entity << ": "
                  << violations.front().message << '\n';
        return kExitValidation;
    }
    try {
        const mlb::EventTrace trace = mlb::run(scenario);
        const mlb::MetricsReport report = mlb::build_report(trace, scenario);

        std::filesystem::create_directories(flags.out_dir);
        const std::filesystem::path out(flags.out_dir);
        write_file(out / "trace.jsonl", trace.to_jsonl());
        write_file(out / "report.csv", mlb::export_csv(report));
        if (flags.with_json) {
            write_file(out / "report.json", mlb::export_json(report).dump(2) + "\n");
        }

        const mlb::MetricsSummary& s = report.summary;
        std::printf("events %zu | admitted %llu completed %llu | fault%% %.2f | "
                    "mean_cd%% %.2f | net %.4f%s\n",
                    trace.records.size(), static_cast<unsigned long long>(s.admitted),
                    static_cast<unsigned long long>(s.completed), s.fault_percent,
                    s.mean_cd_percent, s.cost.net_benefit,
                    s.truncated ? " | TRUNCATED" : "");
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int do_sweep(const std::string& path, const std::string& out_dir, bool with_json) {
    mlb::SweepSpec spec;
    try {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open sweep file: " + path);
        nlohmann::json doc;
        in >> doc;
        spec = mlb::sweep_from_json(doc, std::filesystem::path(path).parent_path().string());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    try {
        const auto points = mlb::run_sweep(spec);
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path out(out_dir);
        std::size_t failures = 0;
        for (const auto& point : points) {
            char name[32];
            std::snprintf(name, sizeof(name), "point_%03zu", point.index);
            const auto dir = out / name;
            std::filesystem::create_directories(dir);
            write_file(dir / "scenario.json", point.scenario_doc.dump(2) + "\n");
            if (point.failed) {
                ++failures;
                write_file(dir / "error.txt", point.error + "\n");
                std::cout << name << ": error: " << point.error << '\n';
                continue;
            }
            write_file(dir / "trace.jsonl", point.trace.to_jsonl());
            write_file(dir / "report.csv", mlb::export_csv(point.report));
            if (with_json) {
                write_file(dir / "report.json", mlb::export_json(point.report).dump(2) + "\n");
            }
            std::cout << name << ": ok";
            for (const auto& label : point.labels) std::cout << ' ' << label;
            std::cout << " | mean_cd% " << point.report.summary.mean_cd_percent << '\n';
        }
        write_file(out / "combined.csv", mlb::combined_csv(spec, points));
        std::cout << points.size() << " grid points, " << failures << " failed\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative multi-load-balancer cluster simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    RunFlags flags;

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    auto* run_cmd = app.add_subcommand("run", "Run one scenario");
    run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run_cmd->add_option("--out", flags.out_dir, "Output directory")->required();
    run_cmd->add_option("--seed", flags.seed, "Override the scenario seed");
    run_cmd->add_option("--horizon", flags.horizon, "Override the horizon (seconds)");
    run_cmd->add_option("--rc-formula", flags.rc_formula, "printed or normalized")
        ->check(CLI::IsMember({"printed", "normalized"}));
    run_cmd->add_flag("--corrected-semantics", flags.corrected_semantics,
                      "Swap the capacity-correction branches");
    run_cmd->add_flag("--json", flags.with_json, "Also write report.json");

    std::string sweep_path;
    std::string sweep_out;
    bool sweep_json = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
    sweep_cmd->add_option("sweep", sweep_path, "Sweep JSON file")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();
    sweep_cmd->add_flag("--json", sweep_json, "Also write report.json per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (validate->parsed()) return do_validate(scenario_path);
    if (run_cmd->parsed()) return do_run(scenario_path, flags);
    if (sweep_cmd->parsed()) return do_sweep(sweep_path, sweep_out, sweep_json);
    return kExitUsage;
}
