// One PASS/FAIL line per acceptance criterion; runtime is measured here against each suite's budget.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sdheat/errors.hpp"
#include "sdheat/verify.hpp"

using nlohmann::ordered_json;

namespace {

void scalars(const ordered_json& j, const std::string& prefix, std::ostringstream& os) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix + it.key();
        const auto& v = it.value();
        if (v.is_object()) {
            scalars(v, key + ".", os);
        } else if (v.is_array() && !v.empty() && v.front().is_object() && v.front().contains("l1")) {
            os << ' ' << key << ".l1=[";
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i]["l1"].dump();
            os << ']';
        } else if (v.is_number() || v.is_boolean()) {
            os << ' ' << key << '=' << v.dump();
        }
    }
}

// summary of the headline numbers; argmax details and echoes stay in the JSON
std::string summary(const sdheat::SuiteReport& r) {
    ordered_json m = r.metrics;
    std::ostringstream os;
    if (r.suite == "lorentz-kernel") {
        for (auto it = m["per_m"].begin(); it != m["per_m"].end(); ++it) {
            os << ' ' << it.key() << ".sup=" << it.value()["sup_ratio"].dump() << ' ' << it.key()
               << ".spread=" << it.value()["spread"].dump() << ' ' << it.key() << ".pass=" << it.value()["pass"].dump();
        }
        return os.str();
    }
    m.erase("argmax");
    m.erase("per_dx");
    scalars(m, "", os);
    return os.str();
}

int usage() {
    std::cerr << "usage: acceptance [--only AC-n] [--json]\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    bool full_json = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) only = argv[++i];
        else if (a == "--json") full_json = true;
        else return usage();
    }

    int ran = 0, failed = 0;
    for (const auto& suite : sdheat::suite_names()) {
        const std::string ac = sdheat::suite_criterion(suite);
        if (!only.empty() && only != ac) continue;
        ++ran;
        const double budget = sdheat::suite_budget(suite);
        const auto t0 = std::chrono::steady_clock::now();
        sdheat::SuiteReport r;
        std::string err;
        try {
            r = sdheat::run_suite(suite);
        } catch (const std::exception& e) {
            err = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = secs < budget;
        const bool pass = err.empty() && r.pass && in_budget;
        if (!pass) ++failed;

        char timing[64];
        std::snprintf(timing, sizeof timing, " time=%.2fs/%gs", secs, budget);
        std::cout << ac << ' ' << (pass ? "PASS" : "FAIL") << ' ' << suite << timing;
        if (!err.empty()) std::cout << " error=\"" << err << '"';
        else std::cout << summary(r);
        if (err.empty() && r.pass && !in_budget) std::cout << " over_budget=true";
        std::cout << '\n';
        if (full_json && err.empty()) std::cout << r.to_json().dump(2) << '\n';
        std::cout.flush();
    }
    if (ran == 0) {
        std::cerr << "no criterion matches " << only << '\n';
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
