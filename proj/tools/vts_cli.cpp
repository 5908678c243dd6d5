// Command-line entry point: vts {detect,spot,eval,sim} [--config FILE] [overrides]

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "vts/config.hpp"
#include "vts/errors.hpp"
#include "vts/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitFormat = 3;

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string policy;
    std::optional<int> window_n;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--policy", o.policy, "selection policy")->check(CLI::IsMember({"tr", "pcw", "hfp"}));
    cmd->add_option("--window-n", o.window_n, "aggregation half-window")->check(CLI::NonNegativeNumber);
}

vts::RunConfig resolve_config(const Overrides& o) {
    vts::RunConfig cfg = o.config.empty() ? vts::RunConfig{} : vts::load_run_config(o.config);
    if (!o.out.empty()) cfg.paths.out = o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (!o.policy.empty()) cfg.policy = *vts::quality::parse_policy(o.policy);
    if (o.window_n) cfg.window_n = *o.window_n;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Video text spotting pipeline: detect, spot, eval, sim"};
    app.require_subcommand(1);

    Overrides o;
    auto* detect = app.add_subcommand("detect", "spatial-temporal text detection over a frame directory");
    auto* spot = app.add_subcommand("spot", "track observations and recommend one region per stream");
    auto* eval = app.add_subcommand("eval", "score detections, streams and decisions against ground truth");
    auto* sim = app.add_subcommand("sim", "generate a synthetic scenario");
    for (auto* c : {detect, spot, eval, sim}) add_common(c, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        vts::pipeline::apply_thread_env();
        const auto cfg = resolve_config(o);
        if (detect->parsed()) {
            (void)vts::pipeline::cmd_detect(cfg, std::cout);
        } else if (spot->parsed()) {
            (void)vts::pipeline::cmd_spot(cfg, std::cout);
        } else if (eval->parsed()) {
            (void)vts::pipeline::cmd_eval(cfg, std::cout);
        } else {
            (void)vts::pipeline::cmd_sim(cfg, std::cout);
        }
    } catch (const vts::MissingInputError& e) {
        std::cerr << "error: missing input: " << e.path() << '\n';
        return kExitMissingInput;
    } catch (const vts::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFormat;
    } catch (const vts::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFormat;
    } catch (const vts::ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFormat;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
