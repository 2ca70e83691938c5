#pragma once

#include <map>
#include <string>
#include <vector>

#include "oblique/dirac.hpp"
#include "oblique/geometry.hpp"
#include "oblique/spectral.hpp"

namespace oblique {

// {"kind":"circle","R":1}, {"kind":"ellipse","a":2,"b":1}, {"kind":"kite"} or
// {"kind":"custom","name":..,"x_coeffs":{"cos":[..],"sin":[..]},"y_coeffs":{..}}.
// Malformed input throws ParameterError.
Curve parse_curve_json(const std::string& text);
std::string curve_to_json(const Curve& curve);

// Builtin name (circle, circle:R, ellipse, ellipse:a,b, kite), inline JSON or a JSON file path.
Curve curve_from_spec(const std::string& spec);

// printf %.17g
std::string format_double(double v);

std::string spectrum_to_json(const SpectrumResult& r);
std::string dispersion_csv(const std::vector<DispersionSample>& rows);
std::string limit_csv(const LimitStudyResult& r);
std::string limit_summary_json(const LimitStudyResult& r);

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::string curve_json;
    int N = 0;
    std::map<std::string, double> tolerances;
    double wall_time_s = 0;
    std::string version;
    std::map<std::string, std::string> output_digests;  // path -> sha256 hex
};

std::string manifest_to_json(const RunManifest& m);
std::string sha256_hex(const std::string& data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

const char* version_string();

}  // namespace oblique
