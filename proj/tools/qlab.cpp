// qlab: measurement laboratory for quantum systems in arbitrary-signature
// orthogonal geometries. One command per invocation; scenarios come from a
// JSON file or a built-in fixture. Exit codes: 0 success, 2 input error,
// 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "qlab/qlab.hpp"

namespace {

struct CliOptions {
    std::string scenario_file;
    std::string fixture_name;
    std::string format = "text";
    double tol = -1.0;       // override for bell_tol when >= 0
    double norm_cap = -1.0;  // override when >= 0
    std::string constraints;
    long long steps = -1;
};

void add_common(CLI::App* cmd, CliOptions& opt, bool needs_scenario) {
    if (needs_scenario) {
        auto* sc = cmd->add_option("--scenario", opt.scenario_file, "scenario JSON file");
        auto* fx = cmd->add_option("--fixture", opt.fixture_name, "built-in fixture name");
        sc->excludes(fx);
    }
    cmd->add_option("--format", opt.format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--tol", opt.tol, "comparison tolerance override");
    cmd->add_option("--norm-cap", opt.norm_cap, "Hilbert-norm cap for the witness search");
    cmd->add_option("--constraints", opt.constraints, "nonnegativity constraint set")
        ->check(CLI::IsMember({"none", "marginals_nonneg", "pairwise_nonneg", "triple_nonneg"}));
    cmd->add_option("--steps", opt.steps, "evolution steps");
}

qlab::Scenario load_scenario(const CliOptions& opt) {
    if (!opt.fixture_name.empty()) return qlab::fixture(opt.fixture_name);
    if (opt.scenario_file.empty())
        throw qlab::ParseError(qlab::ParseError::Code::Value,
                               "either --scenario FILE or --fixture NAME is required");
    std::ifstream in(opt.scenario_file);
    if (!in)
        throw qlab::ParseError(qlab::ParseError::Code::Value,
                               "cannot open scenario file '" + opt.scenario_file + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return qlab::parse_scenario(buf.str());
}

void apply_overrides(qlab::Scenario& s, const CliOptions& opt) {
    if (opt.tol >= 0.0) s.options.bell_tol = opt.tol;
    if (opt.norm_cap >= 0.0) s.options.norm_cap = opt.norm_cap;
    if (!opt.constraints.empty()) s.options.constraints = qlab::constraint_from_name(opt.constraints);
    if (opt.steps >= 0) s.options.steps = static_cast<std::size_t>(opt.steps);
}

void emit(const qlab::Report& rep, const std::string& format) {
    if (format == "json")
        std::cout << rep.to_json().dump(2) << "\n";
    else
        std::cout << rep.to_text();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heisenberg measurements in arbitrary-signature orthogonal geometries"};
    app.require_subcommand(1);

    CliOptions opt;
    const std::vector<std::pair<std::string, bool>> commands = {
        {"measure", true}, {"bell", true},    {"search", true},
        {"evolve", true},  {"spectral", true}, {"verify-paper", false},
    };
    for (const auto& [name, needs_scenario] : commands) {
        auto* cmd = app.add_subcommand(name);
        add_common(cmd, opt, needs_scenario);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "verify-paper") {
            const qlab::Report rep = qlab::run_verify_paper();
            emit(rep, opt.format);
            return rep.payload["all_pass"].get<bool>() ? 0 : 3;
        }
        qlab::Scenario s = load_scenario(opt);
        apply_overrides(s, opt);
        emit(qlab::run(s, qlab::command_from_name(name)), opt.format);
        return 0;
    } catch (const qlab::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const qlab::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const qlab::Error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
