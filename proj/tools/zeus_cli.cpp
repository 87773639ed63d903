// zeus: command-line front end for the uncertainty-guided demonstration
// pipeline. Exit codes: 0 success, 1 invalid input or configuration,
// 2 backend failure (transport, protocol, incomplete pool).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "zeus/error.hpp"
#include "zeus/pipeline.hpp"

namespace {

struct GlobalOptions {
    std::string config;
    std::string cache_dir;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string mock;
    bool show_calls = false;
};

zeus::RunConfig make_config(const GlobalOptions& g) {
    auto c = zeus::load_config(g.config);
    if (!g.cache_dir.empty()) c.cache_dir = g.cache_dir;
    if (!g.out_dir.empty()) c.out_dir = g.out_dir;
    if (g.seed) c.seed = *g.seed;
    if (!g.mock.empty()) {
        c.provider.backend = "mock";
        c.provider.mock_scenario = g.mock;
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zeus: uncertainty-guided chain-of-thought demonstration selection"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config, "Run configuration (JSON)")->required();
    app.add_option("--cache-dir", g.cache_dir, "Response and pool cache directory");
    app.add_option("--out-dir", g.out_dir, "Directory for output artifacts");
    app.add_option("--seed", g.seed, "Seed for splitting and clustering");
    app.add_option("--mock", g.mock, "Use the mock backend with this scenario file");
    app.add_flag("--show-calls", g.show_calls, "Print the number of backend requests to stderr");

    auto* estimate = app.add_subcommand("estimate", "Collect answer pools and estimate uncertainty");

    std::string strategy;
    auto* select = app.add_subcommand("select", "Select questions inside a strategy band");
    select->add_option("--strategy", strategy, "Strategy name (e.g. Challenging)")->required();

    std::string demo_strategy;
    std::optional<int> k;
    auto* build = app.add_subcommand("build-demos", "Cluster selected questions into demonstrations");
    build->add_option("--strategy", demo_strategy, "Strategy name, AutoCoT or FewShot")->required();
    build->add_option("-k", k, "Number of demonstrations");

    std::string methods;
    auto* evaluate = app.add_subcommand("evaluate", "Score methods on the test set");
    evaluate->add_option("--methods", methods, "Comma-separated methods, e.g. ZeroShotCoT,AutoCoT,ZEUS(Hard)");

    auto* rank = app.add_subcommand("rank-strategies", "Rank strategies by Temp-Perb uncertainty");
    auto* sensitivity = app.add_subcommand("sensitivity", "Fit accuracy against modal confidence");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        zeus::Pipeline pipeline(make_config(g));
        if (estimate->parsed()) {
            const auto batch = pipeline.estimate();
            std::cout << "estimated " << batch.estimates.size() << " questions: mean " << batch.stats.mean
                      << ", stddev " << batch.stats.stddev << "\n";
        } else if (select->parsed()) {
            const auto sel = pipeline.select(zeus::parse_strategy(strategy));
            std::cout << zeus::strategy_name(sel.spec.strategy) << ": selected " << sel.selected_ids.size() << " of "
                      << sel.total_count << " questions\n";
        } else if (build->parsed()) {
            const auto set = pipeline.build_demos(demo_strategy, k);
            for (const auto& w : set.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << set.strategy << ": " << set.demos.size() << " demonstrations\n";
        } else if (evaluate->parsed()) {
            const auto specs =
                methods.empty() ? pipeline.config().methods : zeus::MethodSpec::parse_list(methods);
            for (const auto& r : pipeline.evaluate(specs)) {
                std::cout << r.method << ": " << r.mean_accuracy << "\n";
            }
        } else if (rank->parsed()) {
            const auto ranking = pipeline.rank_strategies();
            for (const auto& w : pipeline.warnings()) std::cerr << "warning: " << w << "\n";
            for (const auto& s : ranking.scores) {
                std::cout << zeus::strategy_name(s.strategy) << ": mean entropy " << s.mean_entropy;
                if (s.accuracy) std::cout << ", accuracy " << *s.accuracy;
                std::cout << "\n";
            }
            std::cout << "ZEUS(LU): " << zeus::strategy_name(ranking.chosen_lu) << "\n";
            if (ranking.chosen_ha) std::cout << "ZEUS(HA): " << zeus::strategy_name(*ranking.chosen_ha) << "\n";
        } else if (sensitivity->parsed()) {
            const auto fit = pipeline.sensitivity();
            std::cout << "slope " << fit.fit.slope << ", intercept " << fit.fit.intercept << " (binned slope "
                      << fit.binned_fit.slope << ")\n";
        }
        if (g.show_calls) std::cerr << "provider calls: " << pipeline.provider_calls() << "\n";
    } catch (const zeus::TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const zeus::ProtocolError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const zeus::PoolIncompleteError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
