#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <json.hpp>

#include "oblique/dirac.hpp"
#include "oblique/errors.hpp"
#include "oblique/io.hpp"
#include "oblique/spectral.hpp"

namespace oblique::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

SpectralOptions options(const CommonArgs& c) {
    SpectralOptions o;
    o.N = c.N;
    o.tol = c.tol;
    if (!(c.tol > 0) || !(c.tol < 1)) throw ParameterError("--tol must lie in (0, 1)");
    if (c.N < 16 || c.N % 2) throw ParameterError("--N must be even and >= 16");
    return o;
}

struct Run {
    RunManifest m;
    Clock::time_point start = Clock::now();
    std::vector<std::pair<std::string, std::string>> outputs;

    Run(const std::string& command, const CommonArgs& c, const Curve& curve) {
        m.command = command;
        m.curve_json = curve_to_json(curve);
        m.N = c.N;
        m.version = version_string();
        m.parameters["curve"] = c.curve;
        m.parameters["N"] = std::to_string(c.N);
        m.parameters["tol"] = format_double(c.tol);
        m.tolerances["tol"] = c.tol;
    }

    void param(const std::string& k, const std::string& v) { m.parameters[k] = v; }
    void param(const std::string& k, double v) { m.parameters[k] = format_double(v); }

    void emit(const std::string& path, const std::string& content) {
        if (path.empty()) {
            std::cout << content;
        } else {
            write_file(path, content);
            m.output_digests[path] = sha256_hex(content);
        }
    }

    void finish(const CommonArgs& c) {
        m.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
        std::string path = c.manifest;
        if (path.empty() && !c.out.empty()) path = c.out + ".manifest.json";
        if (!path.empty()) write_file(path, manifest_to_json(m));
    }
};

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw ParameterError("--lambda-steps must be positive");
    if (n == 1) return {a};
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
    return v;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

int to_int(const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw ParameterError("invalid integer '" + s + "'");
    }
    if (pos != s.size()) throw ParameterError("invalid integer '" + s + "'");
    return v;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParameterError("invalid number '" + s + "'");
    }
    if (pos != s.size()) throw ParameterError("invalid number '" + s + "'");
    return v;
}

json entry_list(const std::vector<SpectrumEntry>& es) {
    json a = json::array();
    for (const auto& e : es) a.push_back({{"n", e.n}, {"lambda", e.lambda}, {"residual", e.residual}});
    return a;
}

}  // namespace

std::vector<int> parse_index_list(const std::string& s) {
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int a = to_int(trim(s.substr(0, dots))), b = to_int(trim(s.substr(dots + 2)));
        if (a > b) throw ParameterError("empty index range '" + s + "'");
        for (int i = a; i <= b; ++i) out.push_back(i);
    } else {
        for (const auto& p : split(s, ',')) out.push_back(to_int(p));
    }
    for (int i : out)
        if (i < 1) throw ParameterError("indices start at 1");
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(to_double(p));
    return out;
}

int cmd_dispersion(const DispersionArgs& a) {
    const Curve curve = curve_from_spec(a.common.curve);
    options(a.common);
    const auto ns = parse_index_list(a.n);
    if (!(a.lambda_min < 0) || !(a.lambda_max < 0)) throw ParameterError("the lambda grid must be negative");
    const auto grid = linspace(a.lambda_min, a.lambda_max, a.lambda_steps);
    Run run("dispersion", a.common, curve);
    run.param("n", a.n);
    run.param("lambda_min", a.lambda_min);
    run.param("lambda_max", a.lambda_max);
    run.param("lambda_steps", std::to_string(a.lambda_steps));

    std::vector<DispersionSample> rows;
    for (double lam : grid) {
        const SingleLayerSpectrum sp = single_layer_spectrum(curve, lam, a.common.N);
        for (int n : ns) {
            if (n > int(sp.mu.size())) throw ResolutionError("n exceeds the discretization size");
            rows.push_back({lam, n, lam * sp.mu[n - 1], sp.N});
        }
    }
    run.emit(a.common.out, dispersion_csv(rows));
    run.finish(a.common);
    return 0;
}

int cmd_spectrum(const SpectrumArgs& a) {
    const Curve curve = curve_from_spec(a.common.curve);
    const SpectralOptions opt = options(a.common);
    Run run("spectrum", a.common, curve);
    run.param("alpha", a.alpha);
    run.param("count", std::to_string(a.count));
    run.m.tolerances["residual_gate"] = opt.residual_gate;
    run.m.tolerances["cluster_tol"] = opt.cluster_tol;
    const SpectrumResult r = enumerate_spectrum(curve, a.alpha, a.count, opt);
    run.emit(a.common.out, spectrum_to_json(r));
    run.finish(a.common);
    return 0;
}

int cmd_eigenfunction(const EigenfunctionArgs& a) {
    const Curve curve = curve_from_spec(a.common.curve);
    const SpectralOptions opt = options(a.common);
    if (a.n < 1) throw ParameterError("--n must be >= 1");
    if (a.grid < 2) throw ParameterError("--grid must be >= 2");
    Run run("eigenfunction", a.common, curve);
    run.param("alpha", a.alpha);
    run.param("n", std::to_string(a.n));
    run.param("grid", std::to_string(a.grid));

    const SpectrumResult spec = enumerate_spectrum(curve, a.alpha, a.n, opt);
    if (int(spec.eigenvalues.size()) < a.n) throw InconsistencyError("no eigenvalue with the requested index");
    const double lambda = spec.eigenvalues[a.n - 1].lambda;

    const QuadratureGrid qg(curve, opt.N);
    Vec2 centre = Vec2::Zero();
    for (const Vec2& p : qg.points()) centre += p;
    centre /= qg.size();
    VolumeGrid vg = make_volume_grid(centre, curve.diameter(), a.grid);
    vg = exclude_near_curve(vg, curve, vg.h / 4);

    SpectralOptions eo = opt;
    eo.N = spec.eigenvalues[a.n - 1].N;
    const EigenfunctionField ef = eigenfunction(curve, a.alpha, lambda, a.n, vg.points, eo);
    const TransmissionCheck tc = eigenfunction_transmission(curve, ef, a.alpha);

    json j;
    j["alpha"] = a.alpha;
    j["n"] = a.n;
    j["lambda"] = lambda;
    j["N"] = ef.N;
    j["bs_eigenvalue"] = ef.bs_eigenvalue;
    j["transmission"] = {{"residual", tc.residual}, {"jump_norm", tc.jump_norm}, {"dzbar_norm", tc.dzbar_norm}};
    json dens = json::array();
    for (int k = 0; k < ef.density.size(); ++k) dens.push_back({ef.density[k].real(), ef.density[k].imag()});
    j["density"] = dens;
    json field = json::array();
    for (std::size_t i = 0; i < ef.field.points.size(); ++i)
        field.push_back({ef.field.points[i].x(), ef.field.points[i].y(), ef.field.values[i].real(),
                         ef.field.values[i].imag()});
    j["field"] = field;
    run.emit(a.common.out, j.dump(2) + "\n");
    run.finish(a.common);
    return 0;
}

int cmd_delta_compare(const DeltaCompareArgs& a) {
    const Curve curve = curve_from_spec(a.common.curve);
    const SpectralOptions opt = options(a.common);
    Run run("delta-compare", a.common, curve);
    run.param("alpha", a.alpha);
    run.param("oblique_alpha", a.oblique_alpha);
    run.param("count", std::to_string(a.count));

    const SpectrumResult d = delta_spectrum(curve, a.alpha, a.count, opt);
    const SpectrumResult o = enumerate_spectrum(curve, a.oblique_alpha, a.count, opt);
    json j;
    j["curve"] = curve.name();
    j["N"] = opt.N;
    json dj;
    dj["alpha"] = a.alpha;
    dj["eigenvalues"] = entry_list(d.eigenvalues);
    dj["empty_branches"] = d.empty_branches;
    dj["asymptote"] = -a.alpha * a.alpha / 4;
    dj["ratio_E1"] = d.eigenvalues.empty() ? json() : json(d.eigenvalues[0].lambda / (-a.alpha * a.alpha / 4));
    json oj;
    oj["alpha"] = a.oblique_alpha;
    oj["eigenvalues"] = entry_list(o.eigenvalues);
    oj["asymptote"] = -4 / (a.oblique_alpha * a.oblique_alpha);
    oj["ratio_lambda1"] =
        o.eigenvalues.empty() ? json() : json(o.eigenvalues[0].lambda * a.oblique_alpha * a.oblique_alpha / -4);
    j["delta"] = dj;
    j["oblique"] = oj;
    run.emit(a.common.out, j.dump(2) + "\n");
    run.finish(a.common);
    return 0;
}

int cmd_nonrel_limit(const NonrelArgs& a) {
    const Curve curve = curve_from_spec(a.common.curve);
    options(a.common);
    const auto cs = parse_double_list(a.c_list);
    Run run("nonrel-limit", a.common, curve);
    run.param("alpha", a.alpha);
    run.param("lambda_re", a.lambda_re);
    run.param("lambda_im", a.lambda_im);
    run.param("c_list", a.c_list);
    run.param("box_half_width", a.box_half_width);
    run.param("spacing", a.spacing);

    const LimitStudyResult r = limit_study(curve, cdouble(a.lambda_re, a.lambda_im), a.alpha, cs, a.common.N,
                                           VolumeBox{a.box_half_width, a.spacing});
    run.emit(a.common.out, limit_csv(r));
    std::string summary = a.summary;
    if (summary.empty() && !a.common.out.empty()) summary = a.common.out + ".summary.json";
    run.emit(summary, limit_summary_json(r));
    run.finish(a.common);
    return 0;
}

int cmd_oracle_check(const OracleArgs& a) {
    const Curve curve = curve_from_spec(a.common.curve);
    options(a.common);
    const auto& xc = curve.x_coeffs();
    const auto& yc = curve.y_coeffs();
    const bool circle = xc.cos.size() == 2 && xc.sin.size() <= 1 && yc.cos.size() <= 1 && yc.sin.size() == 2 &&
                        xc.cos[1] == yc.sin[1] && (yc.cos.empty() || yc.cos[0] == 0) && xc.cos[0] == 0;
    if (!circle) throw ParameterError("oracle-check needs a centred circle");
    if (!(a.lambda < 0)) throw ParameterError("--lambda must be negative");
    const double R = xc.cos[1];
    Run run("oracle-check", a.common, curve);
    run.param("lambda", a.lambda);
    run.m.tolerances["gate"] = a.gate;

    const SingleLayerSpectrum sp = single_layer_spectrum(curve, a.lambda, a.common.N, false);
    std::vector<double> oracle{circle_oracle_mu(0, R, a.lambda)};
    for (int m = 1; int(oracle.size()) < a.common.N; ++m) {
        const double mu = circle_oracle_mu(m, R, a.lambda);
        oracle.push_back(mu);
        oracle.push_back(mu);
    }
    std::sort(oracle.begin(), oracle.end(), std::greater<>());
    const int count = a.common.N / 4;
    double mismatch = 0;
    for (int k = 0; k < count; ++k) mismatch = std::max(mismatch, std::abs(sp.mu[k] - oracle[k]));

    json j;
    j["R"] = R;
    j["lambda"] = a.lambda;
    j["N"] = sp.N;
    j["compared"] = count;
    j["max_mismatch"] = mismatch;
    j["gate"] = a.gate;
    j["pass"] = mismatch <= a.gate;
    run.emit(a.common.out, j.dump(2) + "\n");
    run.finish(a.common);
    if (mismatch > a.gate) {
        std::cerr << "oracle mismatch " << format_double(mismatch) << " exceeds " << format_double(a.gate) << "\n";
        return 1;
    }
    return 0;
}

}  // namespace oblique::cli
