#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "oblique/errors.hpp"

using namespace oblique::cli;

namespace {

void add_common(CLI::App* sub, CommonArgs& c) {
    sub->add_option("--curve", c.curve, "builtin (circle, circle:R, ellipse, ellipse:a,b, kite), JSON or file");
    sub->add_option("--N", c.N, "boundary nodes");
    sub->add_option("--tol", c.tol, "relative root tolerance");
    sub->add_option("--out", c.out, "output file (stdout if omitted)");
    sub->add_option("--manifest", c.manifest, "run manifest path (default <out>.manifest.json)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of Schroedinger operators with oblique transmission conditions"};
    app.require_subcommand(1);

    DispersionArgs disp;
    auto* s_disp = app.add_subcommand("dispersion", "lambda mu_n(S(lambda)) on a lambda grid, CSV");
    add_common(s_disp, disp.common);
    s_disp->add_option("--n", disp.n, "branch indices: 2, 1..3 or 1,4");
    s_disp->add_option("--lambda-min", disp.lambda_min);
    s_disp->add_option("--lambda-max", disp.lambda_max);
    s_disp->add_option("--lambda-steps", disp.lambda_steps);

    SpectrumArgs spec;
    auto* s_spec = app.add_subcommand("spectrum", "discrete eigenvalues, JSON");
    add_common(s_spec, spec.common);
    s_spec->add_option("--alpha", spec.alpha)->required();
    s_spec->add_option("--count", spec.count);

    EigenfunctionArgs eig;
    auto* s_eig = app.add_subcommand("eigenfunction", "eigenfunction density and field samples, JSON");
    add_common(s_eig, eig.common);
    s_eig->add_option("--alpha", eig.alpha)->required();
    s_eig->add_option("--n", eig.n);
    s_eig->add_option("--grid", eig.grid, "field samples per side");

    DeltaCompareArgs dc;
    auto* s_dc = app.add_subcommand("delta-compare", "delta-shell vs oblique lowest eigenvalues, JSON");
    add_common(s_dc, dc.common);
    s_dc->add_option("--alpha", dc.alpha, "delta-shell strength");
    s_dc->add_option("--oblique-alpha", dc.oblique_alpha);
    s_dc->add_option("--count", dc.count);

    NonrelArgs nr;
    auto* s_nr = app.add_subcommand("nonrel-limit", "Dirac non-relativistic limit study, CSV + JSON summary");
    add_common(s_nr, nr.common);
    s_nr->add_option("--alpha", nr.alpha);
    s_nr->add_option("--lambda-re", nr.lambda_re);
    s_nr->add_option("--lambda-im", nr.lambda_im);
    s_nr->add_option("--c-list", nr.c_list);
    s_nr->add_option("--summary", nr.summary, "summary JSON (default <out>.summary.json)");
    s_nr->add_option("--box", nr.box_half_width, "probe box half-width (0: three diameters)");
    s_nr->add_option("--spacing", nr.spacing, "probe grid spacing");

    OracleArgs oc;
    auto* s_oc = app.add_subcommand("oracle-check", "S(lambda) eigenvalues against the circle oracle, JSON");
    add_common(s_oc, oc.common);
    s_oc->add_option("--lambda", oc.lambda);
    s_oc->add_option("--gate", oc.gate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (s_disp->parsed()) return cmd_dispersion(disp);
        if (s_spec->parsed()) return cmd_spectrum(spec);
        if (s_eig->parsed()) return cmd_eigenfunction(eig);
        if (s_dc->parsed()) return cmd_delta_compare(dc);
        if (s_nr->parsed()) return cmd_nonrel_limit(nr);
        if (s_oc->parsed()) return cmd_oracle_check(oc);
    } catch (const oblique::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.error_class() == oblique::ErrorClass::usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
