#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdheat/bounds.hpp"

namespace sdheat {

struct VerifyOptions {
    std::uint64_t seed = 1;
};

// {suite, pass, metrics, config_echo}
struct SuiteReport {
    std::string suite;
    bool pass = false;
    nlohmann::ordered_json metrics;
    nlohmann::ordered_json config_echo;

    nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& suite_names();
// acceptance label AC-n for a suite
std::string suite_criterion(const std::string& suite);
// wall-clock budget in seconds; reports carry no timings so they stay reproducible
double suite_budget(const std::string& suite);

// unknown suite -> ArgumentError
SuiteReport run_suite(const std::string& suite, const VerifyOptions& opt = {});

// empirical constant of one estimate over a sample sweep
struct BoundCheckConfig {
    std::string bound = "lorentz";  // lorentz | gaussian | pang | prop53
    int dim = 1;                    // lorentz, gaussian
    int m = 0;                      // lorentz difference order
    double c = 1.0;                 // isotropic coefficient
    std::vector<double> dxs = {0.25, 0.125, 0.0625};
    double t_min = 1e-3, t_max = 10.0;
    int per_decade = 40;
    double x_halfwidth = 4.0;   // lorentz and prop53 offsets |alpha dx| <= x_halfwidth
    int alpha_max = 64;         // gaussian |alpha^j|, pang |n|
    double C1 = 1.0;            // prop53 weight scale
    double eta_halfwidth = 64;  // prop53 convolution window
};

BoundReport bound_check(const BoundCheckConfig& cfg);

}  // namespace sdheat
