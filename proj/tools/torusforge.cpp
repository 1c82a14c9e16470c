#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "torusforge/commands.hpp"
#include "torusforge/errors.hpp"

namespace {

int dispatch(const torusforge::cli::RunConfig& cfg) {
    using namespace torusforge;
    if (cfg.command == "lift") return cli::cmd_lift(cfg);
    if (cfg.command == "double") return cli::cmd_double(cfg);
    if (cfg.command == "verify") return cli::cmd_verify(cfg);
    if (cfg.command == "tables") return cli::cmd_tables(cfg);
    if (cfg.command == "selftest") return cli::cmd_selftest(cfg);
    throw InputError("unknown command '" + cfg.command + "'");
}

} // namespace

int main(int argc, char** argv) {
    torusforge::cli::RunConfig cfg;

    CLI::App app{"torusforge: certify invariant tori of polynomial vector fields"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
        sub->add_option("--emit", cfg.emit, "artifact kinds to write")
            ->check(CLI::IsMember({"csv", "json", "svg"}));
        sub->add_option("--tol-rel", cfg.tol_rel, "relative integrator tolerance override");
        sub->add_option("--tol-abs", cfg.tol_abs, "absolute integrator tolerance override");
    };

    auto* lift = app.add_subcommand("lift", "suspend a planar system into a rotational "
                                            "one-parameter 3D family");
    lift->add_option("input", cfg.input, "planar system JSON")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(lift);

    auto* dbl = app.add_subcommand("double", "apply verified coordinate-squaring pullbacks");
    dbl->add_option("input", cfg.input, "spatial (or planar, lifted first) system JSON")
        ->required()
        ->check(CLI::ExistingFile);
    dbl->add_option("--eps", cfg.eps,
                    "exact value binding the perturbation parameter, e.g. 1/50");
    dbl->add_option("-k,--reps", cfg.reps, "number of pullback repetitions")
        ->capture_default_str();
    add_common(dbl);

    auto* verify = app.add_subcommand("verify", "certify invariant tori over the limit "
                                                "cycles of a planar system");
    verify->add_option("input", cfg.input, "planar system JSON with cycle guesses")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("--eps", cfg.eps,
                       "sweep values as exact literals (default 0.08 0.04 0.02 0.01)");
    verify->add_option("--octants", cfg.octants,
                       "also verify the doubled field at the largest eps in these octants "
                       "('all' or comma separated sign triples like '+-+')");
    add_common(verify);

    auto* tables = app.add_subcommand("tables", "emit torus-count lower bound tables");
    tables->add_option("input", cfg.input,
                       "optional planar bounds JSON (defaults to the built-in constants)")
        ->check(CLI::ExistingFile);
    add_common(tables);

    auto* selftest = app.add_subcommand("selftest", "run the built-in consistency checks");
    selftest->add_option("--seed", cfg.seed, "seed for the random draws")
        ->capture_default_str();
    selftest->add_option("--tol-rel", cfg.tol_rel, "relative integrator tolerance override");
    selftest->add_option("--tol-abs", cfg.tol_abs, "absolute integrator tolerance override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto* sub : {lift, dbl, verify, tables, selftest})
        if (sub->parsed()) cfg.command = sub->get_name();

    try {
        return dispatch(cfg);
    } catch (const torusforge::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const torusforge::InternalError& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    } catch (const torusforge::CertificationError& e) {
        std::fprintf(stderr, "certification failed: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
}
