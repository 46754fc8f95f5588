#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "shelf/engine.hpp"
#include "shelf/evaluate.hpp"
#include "shelf/http_server.hpp"
#include "shelf/simulate.hpp"

using namespace shelf;
using nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    out << text << '\n';
}

std::optional<std::string> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

std::string generator_sidecar(const std::string& log_path) { return log_path + ".meta.json"; }

int cmd_index(const std::string& catalog_path, const std::string& out_path) {
    const Catalog catalog = load_catalog_file(catalog_path);
    if (catalog.empty()) std::cerr << "warning: catalog " << catalog_path << " contains no entities\n";
    const InstantIndex index = InstantIndex::build(catalog);
    std::size_t available = 0;
    for (const auto& v : catalog.videos()) available += v.available ? 1 : 0;
    const json manifest = {{"catalog", catalog_path},
                           {"entities", catalog.size()},
                           {"videos", catalog.videos().size()},
                           {"available_videos", available},
                           {"talents", catalog.talents().size()},
                           {"collections", catalog.collections().size()},
                           {"indexed_entities", index.entity_count()},
                           {"prefixes", index.prefix_count()},
                           {"postings", index.posting_count()},
                           {"feature_schema_version", kFeatureSchemaVersion}};
    emit(manifest.dump(2), out_path);
    return 0;
}

int cmd_simulate(const SimConfig& config, const std::string& catalog_path, const std::string& out_path) {
    const Catalog catalog = load_catalog_file(catalog_path);
    if (out_path.empty()) {
        simulate_logs(config, catalog, std::cout);
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    simulate_logs(config, catalog, out);
    std::ofstream meta(generator_sidecar(out_path));
    meta << to_json(config).dump(2) << '\n';
    return 0;
}

int cmd_gen_catalog(const CatalogGenConfig& config, const std::string& out_path) {
    const Catalog catalog = generate_catalog(config);
    if (out_path.empty()) {
        write_catalog_jsonl(catalog, std::cout);
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    write_catalog_jsonl(catalog, out);
    return 0;
}

int cmd_train(const std::string& catalog_path, const std::string& logs_path, const std::string& groups_path,
              const TrainConfig& config, const std::string& out_path) {
    Catalog catalog = load_catalog_file(catalog_path);
    const InteractionLog log = load_logs_file(logs_path, catalog);
    EditorialConfig editorial = groups_path.empty() ? default_editorial_config() : load_editorial_config_file(groups_path);
    const auto snapshot = build_snapshot(std::move(catalog), log, default_relevance_model(), std::move(editorial));

    const LabeledExamples labeled = label_from_logs(log, [&](const SearchEvent& event) {
        return run_pipeline(*snapshot, SearchRequest{event.query, snapshot->config.default_k, RetrievalPolicy::Full})
            .ranked;
    });
    std::cerr << "examples " << labeled.examples.size() << " (positive " << labeled.positives << ", negative "
              << labeled.negatives << ", skipped searches " << labeled.skipped << ")\n";

    const TrainResult result = train(labeled.examples, config);
    for (std::size_t epoch = 0; epoch < result.loss_history.size(); ++epoch) {
        std::printf("epoch %zu loss %.9f\n", epoch, result.loss_history[epoch]);
    }
    if (out_path.empty()) {
        std::cout << to_json(result.model).dump(2) << '\n';
    } else {
        save_relevance_model(result.model, out_path);
    }
    return 0;
}

int cmd_serve(const SnapshotSources& sources, const std::string& host, int port) {
    // Loading everything first means a bad input exits before the port is bound.
    SearchService service(sources);
    const auto health = service.health();
    std::cerr << "snapshot " << health.snapshot << ": " << health.entities << " entities, " << health.play_events
              << " plays, " << health.search_events << " searches\n";
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!serve_http(service, host, port)) {
        std::cerr << "error: cannot bind " << host << ':' << port << '\n';
        return 1;
    }
    return 0;
}

int cmd_eval(const std::string& catalog_path, const std::string& logs_path, const std::string& model_path,
             const std::string& groups_path, const EvalConfig& config, const std::string& out_path) {
    const Catalog catalog = load_catalog_file(catalog_path);
    const InteractionLog log = load_logs_file(logs_path, catalog);
    const RelevanceModel model = model_path.empty() ? default_relevance_model() : load_relevance_model(model_path);
    const EditorialConfig editorial =
        groups_path.empty() ? default_editorial_config() : load_editorial_config_file(groups_path);
    EvalReport report = evaluate(catalog, log, model, editorial, EngineConfig{}, config);
    if (std::ifstream meta(generator_sidecar(logs_path)); meta) report.generator = json::parse(meta);
    emit(to_json(report).dump(2), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Typeahead search that groups matches and recommendations into rows"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    std::string catalog_path, logs_path, model_path, groups_path, out_path;

    auto* index = app.add_subcommand("index", "Validate a catalog and report index statistics");
    index->add_option("--catalog", catalog_path, "Catalog JSONL")->required();
    index->add_option("--out", out_path, "Manifest output (default stdout)");

    SimConfig sim;
    auto* simulate = app.add_subcommand("simulate", "Generate synthetic interaction logs");
    simulate->add_option("--catalog", catalog_path, "Catalog JSONL")->required();
    simulate->add_option("--out", out_path, "Log output (default stdout)");
    simulate->add_option("--seed", sim.seed);
    simulate->add_option("--profiles", sim.n_profiles)->check(CLI::PositiveNumber);
    simulate->add_option("--fetch-sessions", sim.n_fetch_sessions);
    simulate->add_option("--explore-sessions", sim.n_explore_sessions);
    simulate->add_option("--plays-per-explore", sim.plays_per_explore_session);
    simulate->add_option("--tags-per-profile", sim.tags_per_profile);
    simulate->add_option("--min-typed", sim.min_typed_chars);
    simulate->add_option("--stop-typing", sim.stop_typing_probability)->check(CLI::Range(0.0, 1.0));

    CatalogGenConfig gen;
    auto* gen_catalog = app.add_subcommand("gen-catalog", "Generate a synthetic catalog");
    gen_catalog->add_option("--out", out_path, "Catalog output (default stdout)");
    gen_catalog->add_option("--seed", gen.seed);
    gen_catalog->add_option("--videos", gen.videos);
    gen_catalog->add_option("--talents", gen.talents);
    gen_catalog->add_option("--tags", gen.tags);
    gen_catalog->add_option("--unavailable", gen.unavailable_fraction)->check(CLI::Range(0.0, 1.0));

    TrainConfig train_config;
    auto* train_cmd = app.add_subcommand("train", "Fit the relevance model on logged searches");
    train_cmd->add_option("--catalog", catalog_path, "Catalog JSONL")->required();
    train_cmd->add_option("--logs", logs_path, "Interaction log JSONL")->required();
    train_cmd->add_option("--groups", groups_path, "Editorial group definitions");
    train_cmd->add_option("--out", out_path, "Model output (default stdout)");
    train_cmd->add_option("--epochs", train_config.epochs)->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--lr", train_config.learning_rate)->check(CLI::PositiveNumber);
    train_cmd->add_option("--l2", train_config.l2)->check(CLI::NonNegativeNumber);

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--catalog", catalog_path, "Catalog JSONL")->envname("SHELF_CATALOG")->required();
    serve->add_option("--logs", logs_path, "Interaction log JSONL")->envname("SHELF_LOGS");
    serve->add_option("--model", model_path, "Relevance model JSON")->envname("SHELF_MODEL");
    serve->add_option("--groups", groups_path, "Editorial group definitions")->envname("SHELF_GROUPS");
    serve->add_option("--port", port)->envname("SHELF_PORT")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host)->envname("SHELF_HOST");

    EvalConfig eval_config;
    auto* eval = app.add_subcommand("eval", "Replay held-out searches and report metrics");
    eval->add_option("--catalog", catalog_path, "Catalog JSONL")->required();
    eval->add_option("--logs", logs_path, "Interaction log JSONL")->required();
    eval->add_option("--model", model_path, "Relevance model JSON");
    eval->add_option("--groups", groups_path, "Editorial group definitions");
    eval->add_option("--out", out_path, "Report output (default stdout)");
    eval->add_option("--holdout", eval_config.holdout)->check(CLI::Range(0.0, 1.0));
    eval->add_option("--seed", eval_config.seed);
    eval->add_option("--k", eval_config.k)->check(CLI::PositiveNumber);
    eval->add_option("--max-prefix", eval_config.max_prefix)->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*index) return cmd_index(catalog_path, out_path);
        if (*simulate) return cmd_simulate(sim, catalog_path, out_path);
        if (*gen_catalog) return cmd_gen_catalog(gen, out_path);
        if (*train_cmd) return cmd_train(catalog_path, logs_path, groups_path, train_config, out_path);
        if (*serve) {
            return cmd_serve(SnapshotSources{catalog_path, opt_path(logs_path), opt_path(model_path),
                                             opt_path(groups_path)},
                             host, port);
        }
        if (*eval) return cmd_eval(catalog_path, logs_path, model_path, groups_path, eval_config, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
