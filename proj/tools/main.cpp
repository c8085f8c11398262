#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tail/norm calculus for generalized Lebesgue and exponential Orlicz spaces"};
    app.require_subcommand(1);

    tailnorm::cli::CommonOptions opt;
    std::string scenario;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config file");
        sub->add_option("--out", opt.out_path, "output path (default stdout)");
        sub->add_option("--format", opt.format, "output format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--grid-points", opt.grid_points, "points per grid level");
        sub->add_option("--levels", opt.levels, "refinement levels");
        sub->add_option("--tolerance", opt.tolerance, "quadrature/fit tolerance override");
        return sub;
    };

    auto* conj = add_common(app.add_subcommand("conjugate", "Legendre transform of a generating function"));
    auto* mom = add_common(app.add_subcommand("moments", "moment curve of a tail"));
    auto* gls = add_common(app.add_subcommand("gls-norm", "moment-family norm of a tail"));
    auto* bphi = add_common(app.add_subcommand("bphi-norm", "exponential-moment norm of a tail"));
    auto* bound = add_common(app.add_subcommand("tail-bound", "tail bound induced by a weight or generating function"));
    auto* lor = add_common(app.add_subcommand("lorentz", "tail-ratio quasinorm of a tail against a bound"));
    auto* ce = add_common(app.add_subcommand("counterexample", "run a sharpness scenario"));
    ce->add_option("scenario", scenario,
                   "one of: A, B, example1, example2, example3")->required();
    auto* rep = add_common(app.add_subcommand("report", "run the full scenario suite"));

    CLI11_PARSE(app, argc, argv);

    using namespace tailnorm::cli;
    if (conj->parsed()) return cmd_conjugate(opt);
    if (mom->parsed()) return cmd_moments(opt);
    if (gls->parsed()) return cmd_gls_norm(opt);
    if (bphi->parsed()) return cmd_bphi_norm(opt);
    if (bound->parsed()) return cmd_tail_bound(opt);
    if (lor->parsed()) return cmd_lorentz(opt);
    if (ce->parsed()) return cmd_counterexample(opt, scenario);
    if (rep->parsed()) return cmd_report(opt);
    return 2;
}
