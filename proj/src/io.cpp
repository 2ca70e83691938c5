#include "oblique/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "oblique/errors.hpp"

namespace oblique {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ParameterError(std::string("curve field '") + key + "' must be a number");
    return j[key].get<double>();
}

std::vector<double> coeff_list(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    if (!j[key].is_array()) throw ParameterError(std::string("'") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) throw ParameterError("curve coefficients must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

TrigPoly trig_poly(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_object()) throw ParameterError(std::string("custom curve needs object '") + key + "'");
    return {coeff_list(j[key], "cos"), coeff_list(j[key], "sin")};
}

json trig_json(const TrigPoly& p) {
    return {{"cos", p.cos}, {"sin", p.sin}};
}

json curve_obj(const Curve& c) {
    return {{"kind", "custom"},
            {"name", c.name()},
            {"x_coeffs", trig_json(c.x_coeffs())},
            {"y_coeffs", trig_json(c.y_coeffs())}};
}

json entries_json(const std::vector<SpectrumEntry>& es) {
    json a = json::array();
    for (const auto& e : es)
        a.push_back({{"n", e.n}, {"lambda", e.lambda}, {"residual", e.residual}, {"N", e.N},
                     {"multiplicity", e.multiplicity}});
    return a;
}

json complex_json(cdouble z) {
    return {z.real(), z.imag()};
}

json blocks_json(const BlockNorms& b) {
    return {{b[0][0], b[0][1]}, {b[1][0], b[1][1]}};
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParameterError("invalid number '" + s + "' in curve spec");
    }
    if (pos != s.size()) throw ParameterError("invalid number '" + s + "' in curve spec");
    return v;
}

}  // namespace

Curve parse_curve_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed curve JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ParameterError("curve JSON needs a string field 'kind'");
    const std::string kind = j["kind"];
    if (kind == "circle") return make_circle(number(j, "R", 1.0));
    if (kind == "ellipse") return make_ellipse(number(j, "a", 2.0), number(j, "b", 1.0));
    if (kind == "kite") return make_kite();
    if (kind == "custom") {
        std::string name = "custom";
        if (j.contains("name")) {
            if (!j["name"].is_string()) throw ParameterError("curve name must be a string");
            name = j["name"];
        }
        return make_custom(name, trig_poly(j, "x_coeffs"), trig_poly(j, "y_coeffs"));
    }
    throw ParameterError("unknown curve kind '" + kind + "'");
}

std::string curve_to_json(const Curve& curve) {
    return curve_obj(curve).dump();
}

Curve curve_from_spec(const std::string& spec) {
    if (spec.empty()) throw ParameterError("empty curve spec");
    if (spec.front() == '{') return parse_curve_json(spec);
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "circle") return make_circle(args.empty() ? 1.0 : parse_number(args));
    if (head == "ellipse") {
        if (args.empty()) return make_ellipse();
        const auto comma = args.find(',');
        if (comma == std::string::npos) throw ParameterError("ellipse spec is ellipse:a,b");
        return make_ellipse(parse_number(args.substr(0, comma)), parse_number(args.substr(comma + 1)));
    }
    if (head == "kite" && args.empty()) return make_kite();
    std::ifstream in(spec);
    if (!in) throw ParameterError("curve '" + spec + "' is neither a builtin nor a readable file");
    return parse_curve_json(read_file(spec));
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string spectrum_to_json(const SpectrumResult& r) {
    json j;
    j["problem"] = r.problem;
    j["alpha"] = r.alpha;
    j["curve"] = r.curve;
    j["N"] = r.N;
    j["tolerances"] = {{"tol", r.tol}, {"residual_gate", r.residual_gate}};
    j["eigenvalues"] = entries_json(r.eigenvalues);
    json probes = json::array();
    for (const auto& p : r.probes)
        probes.push_back({{"lambda", p.lambda}, {"max_eigenvalue", p.max_eigenvalue},
                          {"spectral_radius", p.spectral_radius}});
    j["probes"] = probes;
    j["empty_branches"] = r.empty_branches;
    return j.dump(2) + "\n";
}

std::string dispersion_csv(const std::vector<DispersionSample>& rows) {
    std::string s = "lambda,n,value\n";
    for (const auto& r : rows) s += format_double(r.lambda) + "," + std::to_string(r.n) + "," + format_double(r.value) + "\n";
    return s;
}

std::string limit_csv(const LimitStudyResult& r) {
    std::string s = "c,gap_a0,gap_phi,gap_phistar,gap_c\n";
    for (const auto& g : r.gaps)
        s += format_double(g.c) + "," + format_double(g.a0) + "," + format_double(g.phi) + "," +
             format_double(g.phistar) + "," + format_double(g.cz) + "\n";
    return s;
}

std::string limit_summary_json(const LimitStudyResult& r) {
    static const char* names[4] = {"gap_a0", "gap_phi", "gap_phistar", "gap_c"};
    json j;
    j["curve"] = r.curve;
    j["lambda"] = complex_json(r.lambda);
    j["alpha"] = r.alpha;
    j["N"] = r.N;
    j["c_values"] = r.c_values;
    json slopes, consts, dec;
    for (int k = 0; k < 4; ++k) {
        slopes[names[k]] = r.slopes[k];
        consts[names[k]] = r.constants[k];
        dec[names[k]] = r.decreasing[k];
    }
    j["slopes"] = slopes;
    j["fitted_constants"] = consts;
    j["decreasing"] = dec;
    j["sqrt_bounds_threshold_c"] = r.sqrt_threshold_c;
    json corr = json::array();
    for (const auto& b : r.corrections)
        corr.push_back({{"c", b.c},
                        {"difference_norm", b.difference_norm},
                        {"dirac_norm", b.dirac_norm},
                        {"reference_norm", b.reference_norm},
                        {"difference_blocks", blocks_json(b.difference)},
                        {"dirac_blocks", blocks_json(b.dirac)},
                        {"reference_blocks", blocks_json(b.reference)},
                        {"min_singular_value", b.min_singular_value}});
    j["correction"] = {{"samples", corr}, {"slope", r.correction_slope}, {"slope_block22", r.correction_22_slope}};
    return j.dump(2) + "\n";
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["parameters"] = m.parameters;
    j["curve"] = m.curve_json.empty() ? json() : json::parse(m.curve_json);
    j["N"] = m.N;
    j["tolerances"] = m.tolerances;
    j["wall_time_s"] = m.wall_time_s;
    j["version"] = m.version;
    j["outputs"] = m.output_digests;
    return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw InconsistencyError("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ParameterError("write to '" + path + "' failed");
}

const char* version_string() { return "0.1.0"; }

}  // namespace oblique
