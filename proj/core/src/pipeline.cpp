#include "zeus/pipeline.hpp"

#include <algorithm>

#include "zeus/error.hpp"
#include "zeus/mock_backend.hpp"
#include "zeus/perturb.hpp"
#include "zeus/remote_backend.hpp"

namespace zeus {

struct Pipeline::Providers {
    std::shared_ptr<CountingGenerator> counting;
    std::shared_ptr<CachingGenerator> generator;
    std::shared_ptr<CountingGenerator> rephrase_counting;
    std::shared_ptr<CachingGenerator> rephraser;
    std::unique_ptr<Embedder> embedder;
    std::unique_ptr<PoolStore> store;
};

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)), providers_(std::make_unique<Providers>()) {
    validate_config(config_);
    const TaskKind& kind = config_.dataset.task;

    auto all = load_questions(config_.dataset.path);
    prepare_questions(all, kind);
    std::vector<Question> everything;
    if (config_.dataset.presplit) {
        auto test = load_questions(config_.dataset.test_path);
        prepare_questions(test, kind);
        everything = all;
        everything.insert(everything.end(), test.begin(), test.end());
        split_ = {std::move(all), std::move(test)};
    } else {
        everything = all;
        split_ = split_dataset(all, config_.dataset.unlabeled_fraction,
                               config_.dataset.split_seed.value_or(config_.seed));
    }

    std::shared_ptr<TextGenerator> base;
    std::shared_ptr<TextGenerator> rephrase_base;
    if (config_.provider.backend == "mock") {
        auto scenario = MockScenario::load(config_.provider.mock_scenario);
        if (!config_.model_id.empty()) scenario.model_id = config_.model_id;
        scenario.validate(everything);
        base = std::make_shared<MockGenerator>(std::move(scenario), everything);
    } else {
        RemoteConfig rc = config_.provider.remote;
        rc.model = config_.model_id;
        base = std::make_shared<RemoteGenerator>(rc);
        if (!config_.provider.rephrase_model.empty() && config_.provider.rephrase_model != config_.model_id) {
            rc.model = config_.provider.rephrase_model;
            rephrase_base = std::make_shared<RemoteGenerator>(rc);
        }
    }

    auto cache = std::make_shared<ResponseCache>(config_.cache_dir);
    providers_->counting = std::make_shared<CountingGenerator>(base);
    providers_->generator = std::make_shared<CachingGenerator>(providers_->counting, cache);
    if (rephrase_base) {
        providers_->rephrase_counting = std::make_shared<CountingGenerator>(rephrase_base);
        providers_->rephraser = std::make_shared<CachingGenerator>(providers_->rephrase_counting, cache);
    }

    if (config_.provider.embedding_backend == "remote") {
        RemoteConfig ec = config_.provider.remote;
        ec.endpoint = config_.provider.embedding_endpoint;
        ec.model = config_.provider.embedding_model;
        providers_->embedder = std::make_unique<RemoteEmbedder>(ec);
    } else {
        providers_->embedder = std::make_unique<HashingEmbedder>(config_.provider.embedding_dim);
    }
    providers_->store = std::make_unique<PoolStore>(config_.cache_dir);
}

Pipeline::~Pipeline() = default;

TextGenerator& Pipeline::generator() { return *providers_->generator; }

std::size_t Pipeline::provider_calls() const {
    std::size_t n = providers_->counting->calls();
    if (providers_->rephrase_counting) n += providers_->rephrase_counting->calls();
    return n;
}

std::filesystem::path Pipeline::estimates_path() const { return config_.out_dir / "estimates.jsonl"; }
std::filesystem::path Pipeline::stats_path() const { return config_.out_dir / "stats.json"; }
std::filesystem::path Pipeline::selection_path(Strategy s) const {
    return config_.out_dir / ("selection_" + strategy_name(s) + ".json");
}
std::filesystem::path Pipeline::demos_path(const std::string& name) const {
    return config_.out_dir / ("demos_" + name + ".json");
}
std::filesystem::path Pipeline::report_path() const { return config_.out_dir / "report.json"; }

namespace {

void require_file(const std::filesystem::path& p, const std::string& produced_by) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) {
        throw ValidationError("missing '" + p.string() + "'; run '" + produced_by + "' first");
    }
}

}  // namespace

EstimateBatch Pipeline::estimate() {
    PoolContext ctx;
    ctx.generator = providers_->generator.get();
    ctx.rephraser = providers_->rephraser ? providers_->rephraser.get() : nullptr;
    ctx.store = providers_->store.get();
    const auto pools = collect_pools(split_.unlabeled, config_.plan, config_.dataset.task, ctx);
    auto batch = estimate_all(pools, config_.dataset.task);
    save_estimates(estimates_path(), batch.estimates);
    save_stats(stats_path(), batch.stats);
    return batch;
}

std::vector<UncertaintyEstimate> Pipeline::require_estimates() const {
    require_file(estimates_path(), "estimate");
    return load_estimates(estimates_path());
}

Selection Pipeline::select(Strategy strategy) {
    const auto estimates = require_estimates();
    require_file(stats_path(), "estimate");
    const auto stats = load_stats(stats_path());
    Selection sel;
    sel.spec = resolve_strategy(strategy, stats);
    sel.selected_ids = filter_questions(estimates, sel.spec);
    sel.total_count = estimates.size();
    if (sel.selected_ids.empty()) throw ValidationError("strategy selected no questions");
    save_selection(selection_path(strategy), sel);
    return sel;
}

DemonstrationSet Pipeline::build_demos(const std::string& strategy, std::optional<int> k) {
    const int kk = k.value_or(config_.k);
    if (kk < 1) throw ValidationError("k must be at least 1");
    DemoBuildContext ctx{providers_->embedder.get(), providers_->generator.get(), 0};
    const TaskKind& kind = config_.dataset.task;
    DemonstrationSet set;
    std::string name;
    MethodSpec method{MethodKind::Zeus, Strategy::All};
    try {
        method = MethodSpec::parse(strategy);
    } catch (const ValidationError&) {
        method.strategy = parse_strategy(strategy);
    }
    if (method.kind == MethodKind::AutoCoT) {
        name = "AutoCoT";
        set = build_autocot_demonstrations(split_.unlabeled, kind, kk, config_.seed, config_.filters, ctx);
    } else if (method.kind == MethodKind::FewShot) {
        name = "FewShot";
        require_file(demos_path("AutoCoT"), "build-demos --strategy AutoCoT");
        std::vector<UncertaintyEstimate> estimates;
        std::error_code ec;
        if (std::filesystem::is_regular_file(estimates_path(), ec)) estimates = load_estimates(estimates_path());
        set = make_fewshot_demos(load_demos(demos_path("AutoCoT")), split_.unlabeled, estimates);
    } else if (method.kind == MethodKind::Zeus) {
        const Strategy s = method.strategy;
        name = strategy_name(s);
        require_file(selection_path(s), "select --strategy " + name);
        const auto sel = load_selection(selection_path(s));
        set = build_demonstrations(sel.selected_ids, split_.unlabeled, kind, kk, config_.seed, config_.filters, ctx,
                                   name);
    } else {
        throw ValidationError("build-demos does not handle '" + strategy + "'");
    }
    save_demos(demos_path(name), set);
    return set;
}

DemonstrationSet Pipeline::demos_for(const MethodSpec& method) {
    switch (method.kind) {
        case MethodKind::Zeus: {
            const auto name = strategy_name(method.strategy);
            require_file(demos_path(name), "build-demos --strategy " + name);
            return load_demos(demos_path(name));
        }
        case MethodKind::AutoCoT:
            require_file(demos_path("AutoCoT"), "build-demos --strategy AutoCoT");
            return load_demos(demos_path("AutoCoT"));
        case MethodKind::FewShot: {
            std::error_code ec;
            if (std::filesystem::is_regular_file(demos_path("FewShot"), ec)) return load_demos(demos_path("FewShot"));
            return build_demos("FewShot");
        }
        case MethodKind::ManualCoT:
            if (config_.manual_demos.empty()) {
                throw ValidationError("ManualCoT needs a manual demo file (config key manual_demos)");
            }
            return load_demos(config_.manual_demos);
        default: break;
    }
    return {};
}

Report Pipeline::current_report() const {
    Report report;
    std::error_code ec;
    if (std::filesystem::is_regular_file(report_path(), ec)) report = load_report(report_path());
    report.model_id = providers_->generator->model_id();
    report.dataset = config_.dataset.path.stem().string();
    if (std::filesystem::is_regular_file(stats_path(), ec)) report.stats = load_stats(stats_path());
    return report;
}

std::vector<EvalResult> Pipeline::evaluate(const std::vector<MethodSpec>& methods) {
    if (methods.empty()) throw ValidationError("no methods to evaluate");
    if (split_.test.empty()) throw ValidationError("the test set is empty");
    InferenceOptions opts;
    opts.runs = config_.runs;
    std::vector<EvalResult> results;
    for (const auto& m : methods) {
        std::optional<DemonstrationSet> demos;
        if (m.needs_demos()) demos = demos_for(m);
        results.push_back(run_inference(split_.test, m, demos ? &*demos : nullptr, config_.dataset.task,
                                        *providers_->generator, opts));
    }
    Report report = current_report();
    for (const auto& r : results) report.upsert(r);
    emit_report(report, config_.out_dir);
    return results;
}

StrategyRanking Pipeline::rank_strategies() {
    std::vector<std::pair<Strategy, DemonstrationSet>> sets;
    for (Strategy s : config_.strategies) {
        std::error_code ec;
        const auto p = demos_path(strategy_name(s));
        if (!std::filesystem::is_regular_file(p, ec)) {
            warnings_.push_back("skipping " + strategy_name(s) + ": no '" + p.string() + "'");
            continue;
        }
        sets.emplace_back(s, load_demos(p));
    }
    if (sets.empty()) throw ValidationError("no strategy has demonstrations; run 'build-demos' first");
    auto ranking = zeus::rank_strategies(split_.unlabeled, sets, config_.temp_perb, config_.dataset.task,
                                         *providers_->generator);

    Report report = current_report();
    const bool labeled = !split_.test.empty() &&
                         std::all_of(split_.test.begin(), split_.test.end(),
                                     [](const Question& q) { return q.gold_answer.has_value(); });
    if (labeled) {
        InferenceOptions opts;
        opts.runs = config_.runs;
        std::vector<std::pair<Strategy, double>> accuracies;
        for (const auto& [s, demos] : sets) {
            auto result = run_inference(split_.test, MethodSpec{MethodKind::Zeus, s}, &demos, config_.dataset.task,
                                        *providers_->generator, opts);
            accuracies.emplace_back(s, result.mean_accuracy);
            report.upsert(std::move(result));
        }
        attach_accuracies(ranking, accuracies);
    }
    report.set_ranking(ranking);
    emit_report(report, config_.out_dir);
    return ranking;
}

SensitivityFit Pipeline::sensitivity() {
    const auto estimates = require_estimates();
    auto points = sensitivity_points(estimates, split_.unlabeled, config_.dataset.task);
    if (points.size() < 2) {
        throw ValidationError("sensitivity needs at least 2 unlabeled questions with gold answers");
    }
    auto fit = sensitivity_fit(std::move(points));
    Report report = current_report();
    report.sensitivity = fit;
    emit_report(report, config_.out_dir);
    return fit;
}

}  // namespace zeus
