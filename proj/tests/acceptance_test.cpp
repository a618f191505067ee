// Acceptance gate: one test per criterion, each printing its summary line.

#include <gtest/gtest.h>

#include <iostream>

#include "ato/acceptance.hpp"

namespace ato::acceptance {
namespace {

const ScenarioSet& bundled() {
    static const ScenarioSet set{ATO_SCENARIO_DIR};
    return set;
}

void report(const CriterionResult& r) {
    std::cout << summary_line(r) << std::endl;
    EXPECT_TRUE(r.passed) << r.detail;
    EXPECT_LE(r.seconds, r.budget);
}

TEST(Acceptance, Criterion1GibbsPreservation) { report(gibbs_preservation(bundled())); }
TEST(Acceptance, Criterion2ExactSecondLaws) { report(exact_second_laws(bundled())); }
TEST(Acceptance, Criterion3ApproximateSecondLaws) { report(approximate_second_laws(bundled())); }
TEST(Acceptance, Criterion4CoherenceGeneration) { report(coherence_generation(bundled())); }
TEST(Acceptance, Criterion5ErgotropyNoGo) { report(to_ergotropy_no_go(bundled())); }
TEST(Acceptance, Criterion6PerturbedErgotropy) { report(toeps_ergotropy(bundled())); }
TEST(Acceptance, Criterion7PerturbationOracle) { report(perturbation_oracle(bundled())); }

TEST(Acceptance, Criterion8Determinism) {
    std::vector<CriterionResult> first;
    for (const auto& fn : numeric_criteria()) first.push_back(fn(bundled()));
    report(determinism(bundled(), first));
}

TEST(Acceptance, FullRunPassesWithinBudget) {
    const auto results = run_all(bundled());
    ASSERT_EQ(results.size(), 8u);
    for (const auto& r : results) EXPECT_TRUE(r.passed) << summary_line(r);
    EXPECT_EQ(to_json(results)["passed"], true);
}

TEST(Acceptance, EmptyScenarioDirectoryIsAnError) {
    const auto empty = std::filesystem::temp_directory_path() / "ato_empty_scenarios";
    std::filesystem::create_directories(empty);
    EXPECT_THROW(ScenarioSet{empty}, NoScenarios);
}

} // namespace
} // namespace ato::acceptance
