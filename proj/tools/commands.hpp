#pragma once

#include <string>
#include <vector>

namespace oblique::cli {

struct CommonArgs {
    std::string curve = "circle";
    int N = 256;
    double tol = 1e-9;
    std::string out;
    std::string manifest;  // default: <out>.manifest.json
};

struct DispersionArgs {
    CommonArgs common;
    std::string n = "1";
    double lambda_min = -10, lambda_max = -0.1;
    int lambda_steps = 20;
};

struct SpectrumArgs {
    CommonArgs common;
    double alpha = -1;
    int count = 10;
};

struct EigenfunctionArgs {
    CommonArgs common;
    double alpha = -1;
    int n = 1;
    int grid = 41;
};

struct DeltaCompareArgs {
    CommonArgs common;
    double alpha = -50;
    double oblique_alpha = -0.05;
    int count = 1;
};

struct NonrelArgs {
    CommonArgs common;
    double alpha = -1;
    double lambda_re = 0, lambda_im = 1;
    std::string c_list = "8,16,32,64,128";
    std::string summary;  // default: <out>.summary.json
    double box_half_width = 0;
    double spacing = 0.1;
};

struct OracleArgs {
    CommonArgs common;
    double lambda = -1;
    double gate = 1e-8;
};

// Each returns the process exit code; errors propagate as exceptions.
int cmd_dispersion(const DispersionArgs& a);
int cmd_spectrum(const SpectrumArgs& a);
int cmd_eigenfunction(const EigenfunctionArgs& a);
int cmd_delta_compare(const DeltaCompareArgs& a);
int cmd_nonrel_limit(const NonrelArgs& a);
int cmd_oracle_check(const OracleArgs& a);

// "2", "1..3" or "1,4,5"
std::vector<int> parse_index_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

}  // namespace oblique::cli
