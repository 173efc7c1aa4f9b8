#include <lepage/suites.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

// End-to-end acceptance gate: each criterion runs the corresponding
// verification suite under a wall-clock budget and prints one line.

namespace {

struct Criterion {
    int number;
    std::string label;
    double budget_seconds;
    std::function<lepage::SuiteResult()> run;
};

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    std::vector<Criterion> criteria = {
        {1, "first-order Caratheodory: contraction route vs product formula", 60.0,
         [] { return lepage::suite_caratheodory_first(); }},
        {2, "second-order Caratheodory: closed formula and Lepage conditions", 300.0,
         [] { return lepage::suite_caratheodory_second(); }},
        {3, "principal component: Lepage conditions and Euler-Lagrange form", 300.0,
         [] { return lepage::suite_lepage_theta(); }},
        {4, "fundamental form: frozen expansion and closedness for trivial data", 30.0,
         [] { return lepage::suite_fundamental(); }},
        {5, "second-order chart invariance of both equivalents", 120.0,
         [] { return lepage::suite_invariance(); }},
        {6, "third-order obstruction brackets vs invariance", 300.0,
         [] { return lepage::suite_obstruction(); }},
        {7, "gravitational Lagrangian in dimensions two and three", 660.0,
         [] {
             lepage::SuiteResult two = lepage::suite_hilbert2();
             lepage::SuiteResult three = lepage::suite_hilbert3();
             lepage::SuiteResult merged{"hilbert"};
             merged.ok = two.ok && three.ok;
             merged.lines = two.lines;
             merged.lines.insert(merged.lines.end(), three.lines.begin(), three.lines.end());
             return merged;
         }},
        {8, "exterior calculus property families, 50+ instances each", 120.0,
         [] { return lepage::suite_calculus(); }},
    };

    bool all_ok = true;
    for (const Criterion& c : criteria) {
        auto t0 = clock::now();
        lepage::SuiteResult r = c.run();
        double elapsed =
            std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - t0)
                .count();
        bool in_budget = elapsed <= c.budget_seconds;
        bool pass = r.ok && in_budget;
        all_ok = all_ok && pass;
        std::printf("criterion %d: %s  [%s, %.1fs]\n", c.number,
                    pass ? "PASS" : "FAIL", c.label.c_str(), elapsed);
        if (!r.ok)
            for (const std::string& line : r.lines)
                if (line.rfind("FAIL", 0) == 0) std::printf("  %s\n", line.c_str());
        if (!in_budget)
            std::printf("  FAIL: exceeded the %.0fs budget\n", c.budget_seconds);
        std::fflush(stdout);
    }
    std::printf("acceptance: %s\n", all_ok ? "PASS" : "FAIL");
    return all_ok ? 0 : 1;
}
