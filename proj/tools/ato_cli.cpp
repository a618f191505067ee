// ato_cli.cpp: Command-line harness: validate, second-laws, ergotropy, accept.
//
// Exit codes: 0 pass, 1 criterion failure, 2 usage or validation error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ato/acceptance.hpp"
#include "ato/harness.hpp"

#ifndef ATO_SCENARIO_DIR
#define ATO_SCENARIO_DIR "scenarios"
#endif

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
    std::string scenario;
    std::string out;
    std::vector<std::uint64_t> seeds;
    std::vector<double> epsilons;
    std::size_t restarts{32};
    std::string format{"table"};
    std::string scenario_dir{ATO_SCENARIO_DIR};
};

void emit(const std::string& text, const Options& opt) {
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(opt.out);
    if (!f) throw ato::ScenarioError("cannot write " + opt.out);
    f << text;
}

ato::Scenario load(const Options& opt) {
    auto s = ato::Scenario::load(opt.scenario);
    if (!opt.seeds.empty()) s.set_seeds(opt.seeds);
    if (!opt.epsilons.empty()) s.set_epsilons(opt.epsilons);
    return s;
}

int finish(const ato::RunRecord& rec, const Options& opt) {
    if (opt.format == "machine") {
        emit(ato::render_machine(rec).dump(2) + "\n", opt);
    } else {
        emit(ato::render_table_text(rec), opt);
    }
    std::cerr << rec.command << ": " << (rec.ok ? "pass" : "FAIL") << " (" << rec.elapsed_ms << " ms)\n";
    return rec.ok ? kPass : kFail;
}

int cmd_validate(const Options& opt) {
    const auto s = load(opt);
    const auto v = ato::validate_scenario(s);
    std::string text = s.name() + " [" + s.fingerprint() + "]: " + v.summary + "\n";
    if (opt.format == "machine") {
        nlohmann::json j{{"scenario", s.name()},
                         {"fingerprint", s.fingerprint()},
                         {"blocks", v.block_sizes},
                         {"bohr_ok", v.bohr.ok},
                         {"totals_degenerate", v.totals_degenerate},
                         {"summary", v.summary}};
        text = j.dump(2) + "\n";
    }
    emit(text, opt);
    return v.ok() ? kPass : kUsage;
}

int cmd_accept(const Options& opt) {
    const ato::acceptance::ScenarioSet set(opt.scenario_dir);
    const auto results = ato::acceptance::run_all(set);
    bool all = true;
    std::string text;
    for (const auto& r : results) {
        all = all && r.passed;
        text += ato::acceptance::summary_line(r) + "\n";
        std::cerr << "criterion " << r.id << ": " << r.seconds << " s (budget " << r.budget << " s)\n";
    }
    text += std::string("acceptance: ") + (all ? "PASS" : "FAIL") + "\n";
    if (opt.format == "machine") text = ato::acceptance::to_json(results).dump(2) + "\n";
    emit(text, opt);
    return all ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal operations laboratory: exact and perturbed thermal channels, second laws, ergotropy"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool needs_scenario) {
        auto* s = sub->add_option("--scenario", opt.scenario, "Scenario file (JSON)");
        if (needs_scenario) s->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Write output here instead of stdout");
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"table", "machine"}));
    };
    auto add_sweep = [&](CLI::App* sub) {
        sub->add_option("--seeds", opt.seeds, "Override scenario seeds (comma separated)")->delimiter(',');
        sub->add_option("--epsilons", opt.epsilons, "Override scenario epsilons (comma separated)")->delimiter(',');
    };

    auto* validate = app.add_subcommand("validate", "Check a scenario: Bohr spectrum, energy blocks, gating");
    add_common(validate, true);
    auto* laws = app.add_subcommand("second-laws", "Residuals of the first-order transformation laws vs the channel");
    add_common(laws, true);
    add_sweep(laws);
    auto* ergo = app.add_subcommand("ergotropy", "Closed-form vs brute-force ergotropy under perturbed thermal unitaries");
    add_common(ergo, true);
    add_sweep(ergo);
    ergo->add_option("--restarts", opt.restarts, "Optimizer restarts")->check(CLI::PositiveNumber);
    auto* accept = app.add_subcommand("accept", "Run the acceptance criteria on the bundled scenarios");
    add_common(accept, false);
    accept->add_option("--scenario-dir", opt.scenario_dir, "Directory holding the bundled scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*validate) return cmd_validate(opt);
        if (*laws) return finish(ato::run_second_laws(load(opt)), opt);
        if (*ergo) return finish(ato::run_ergotropy(load(opt), opt.restarts), opt);
        if (*accept) return cmd_accept(opt);
    } catch (const ato::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
