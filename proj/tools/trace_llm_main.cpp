// trace-llm: forensic toolkit turning Ethereum execution traces into ranked
// anomalous paths, enclosing subgraphs, and incident reports.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tracellm/anomaly_model.hpp"
#include "tracellm/chain_access.hpp"
#include "tracellm/chain_detect.hpp"
#include "tracellm/enclosing_subgraph.hpp"
#include "tracellm/extract_refine.hpp"
#include "tracellm/gateway.hpp"
#include "tracellm/report_pipeline.hpp"
#include "tracellm/synth.hpp"

namespace {

using nlohmann::json;
using namespace tracellm;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitTransport = 3;
constexpr int kExitGateway = 4;

// Fully resolved settings; precedence flags > environment > config file.
struct CliConfig {
    std::string config_file;
    std::string fixtures;
    std::string rpc_url;
    std::string explorer_url;
    std::string explorer_key;
    std::string gateway_url;
    std::string gateway_key;
    std::string gateway_model;
    std::string signature_db;
    std::string suspicious_set;
    std::string out_dir = ".";
    int jobs = 0;  // 0 = library defaults
    size_t cutoff = 20;
    size_t k = 1;
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

// Config file grammar: one "key = value" per line, '#' comments, blank lines
// ignored. Unknown keys are rejected.
void apply_config_file(CliConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file: " + path);
    std::map<std::string, std::string*> keys = {
        {"fixtures", &cfg.fixtures},       {"rpc_url", &cfg.rpc_url},
        {"explorer_url", &cfg.explorer_url}, {"explorer_key", &cfg.explorer_key},
        {"gateway_url", &cfg.gateway_url}, {"gateway_key", &cfg.gateway_key},
        {"gateway_model", &cfg.gateway_model}, {"signature_db", &cfg.signature_db},
        {"suspicious_set", &cfg.suspicious_set}, {"out", &cfg.out_dir},
    };
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "jobs") {
            cfg.jobs = std::stoi(value);
        } else if (key == "cutoff") {
            cfg.cutoff = std::stoul(value);
        } else if (key == "k") {
            cfg.k = std::stoul(value);
        } else {
            auto it = keys.find(key);
            if (it == keys.end())
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": unknown config key '" + key + "'");
            *it->second = value;
        }
    }
}

ChainConfig chain_config(const CliConfig& cfg) {
    ChainConfig cc;
    cc.rpc_url = cfg.rpc_url;
    cc.explorer_url = cfg.explorer_url;
    cc.explorer_key = cfg.explorer_key;
    if (cfg.jobs > 0)
        cc.parallelism = cfg.jobs;
    return cc;
}

std::unique_ptr<ChainClient> open_chain(const CliConfig& cfg) {
    if (cfg.fixtures.empty() && cfg.rpc_url.empty())
        throw ValidationError("no chain source: set --fixtures/TRACELLM_FIXTURES or "
                              "--rpc-url/TRACELLM_RPC_URL");
    return make_chain_client(chain_config(cfg), cfg.fixtures);
}

SuspiciousMethodSet suspicious_set(const CliConfig& cfg) {
    return cfg.suspicious_set.empty() ? SuspiciousMethodSet::defaults()
                                      : SuspiciousMethodSet::load(cfg.suspicious_set);
}

PipelineConfig pipeline_config(const CliConfig& cfg, const std::string& model_file) {
    PipelineConfig pc;
    pc.cutoff = cfg.cutoff;
    pc.k = cfg.k;
    pc.signature_db_path = cfg.signature_db;
    pc.suspicious = suspicious_set(cfg);
    if (!model_file.empty())
        pc.model = AnomalyModel::load(model_file);
    return pc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    out << content;
}

json scope_result_json(const ScopeResult& result, const AnalysisScope& scope) {
    json j;
    j["scope"] = scope.to_json();
    j["addresses"] = json::array();
    for (const auto& a : result.addresses)
        j["addresses"].push_back(a);
    j["transactions"] = json::array();
    for (const auto& tx : result.transactions)
        j["transactions"].push_back(tx_to_json(tx));
    j["proxies"] = json::array();
    for (const auto& p : result.proxies) {
        json pj;
        pj["address"] = p.address;
        pj["is_proxy"] = p.is_proxy;
        pj["implementation"] = p.implementation ? json(*p.implementation) : json(nullptr);
        pj["mechanism"] = proxy_mechanism_name(p.mechanism);
        if (p.diagnostic)
            pj["diagnostic"] = *p.diagnostic;
        j["proxies"].push_back(pj);
    }
    j["creators"] = json::array();
    for (const auto& c : result.creators) {
        json cj;
        cj["contract"] = c.contract;
        cj["creator_eoa"] = c.creator_eoa;
        cj["creation_tx"] = c.creation_tx;
        cj["deployed_set"] = json::array();
        for (const auto& d : c.deployed_set)
            cj["deployed_set"].push_back(d);
        cj["factory_chain"] = c.factory_chain;
        if (c.diagnostic)
            cj["diagnostic"] = *c.diagnostic;
        j["creators"].push_back(cj);
    }
    return j;
}

int cmd_scope(const CliConfig& cfg, const std::vector<std::string>& addresses,
              uint64_t from_block, uint64_t to_block) {
    auto chain = open_chain(cfg);
    std::set<Address> seeds;
    for (const auto& a : addresses)
        seeds.insert(normalize_address(a));
    BlockRange range{from_block, to_block};
    if (!range.valid())
        throw ValidationError("--from-block must not exceed --to-block");
    auto result = build_scope(*chain, seeds, range);
    AnalysisScope scope;
    scope.contracts.assign(seeds.begin(), seeds.end());
    scope.block_range = range;
    std::cout << scope_result_json(result, scope).dump(2) << "\n";
    return kExitOk;
}

int cmd_tree(const CliConfig& cfg, const std::string& tx_hash) {
    auto chain = open_chain(cfg);
    SignatureDB db;
    if (!cfg.signature_db.empty())
        db = load_signature_db(cfg.signature_db);
    auto frame = chain->fetch_trace(tx_hash);
    auto records = flatten(frame, db);
    auto forest = build_forest(records);
    std::cout << forest.to_json().dump(2) << "\n";
    return kExitOk;
}

int cmd_rank(const CliConfig& cfg, const std::string& scope_file,
             const std::string& model_file) {
    auto chain = open_chain(cfg);
    auto scope = parse_scope(read_file(scope_file));
    auto context = run_pipeline(*chain, scope, pipeline_config(cfg, model_file));
    json j;
    j["incident"] = scope.label ? json(*scope.label) : json(nullptr);
    j["cutoff"] = cfg.cutoff;
    j["ranked"] = json::array();
    for (const auto& f : context.flagged) {
        json fj;
        fj["path_key"] = f.path_key;
        fj["tx_hash"] = f.tx_hash;
        fj["probability"] = f.probability;
        fj["entry_from"] = f.entry_from;
        fj["leaf_to"] = f.leaf_to;
        fj["path"] = f.path_summary;
        j["ranked"].push_back(fj);
    }
    for (const auto& d : context.diagnostics)
        std::cerr << "warning: " << d << "\n";
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_subgraph(const CliConfig& cfg, const std::string& tx_hash, size_t leaf, size_t k) {
    auto chain = open_chain(cfg);
    SignatureDB db;
    if (!cfg.signature_db.empty())
        db = load_signature_db(cfg.signature_db);
    auto forest = build_forest(flatten(chain->fetch_trace(tx_hash), db));
    ExecPath target;
    bool found = false;
    for (const auto& path : enumerate_paths(forest)) {
        if (path.nodes.back() == leaf) {
            target = path;
            found = true;
            break;
        }
    }
    if (!found)
        throw ValidationError("no root-to-leaf path ends at node " + std::to_string(leaf));
    std::string key = tx_hash + ":" + std::to_string(leaf);
    auto sg = extract_subgraph(forest, target, k, key);
    std::cout << subgraph_to_json(forest, sg, target).dump(2) << "\n";
    return kExitOk;
}

int cmd_extract(const CliConfig& cfg, const std::string& address,
                const std::string& decompiler_cmd, const std::string& cache_dir,
                int timeout_s, const std::string& gateway_kind,
                const std::string& replay_dir) {
    auto chain = open_chain(cfg);
    ExtractorConfig ec;
    ec.decompiler_cmd = decompiler_cmd;
    ec.cache_dir = cache_dir;
    ec.decompiler_timeout_s = timeout_s;
    if (cfg.jobs > 0)
        ec.decompiler_workers = cfg.jobs;
    std::unique_ptr<Gateway> gateway;
    if (!gateway_kind.empty()) {
        GatewayConfig gc{cfg.gateway_url, cfg.gateway_key, GatewayParams{}};
        if (!cfg.gateway_model.empty())
            gc.params.model = cfg.gateway_model;
        gateway = make_gateway(gateway_kind, gc, replay_dir);
    }
    Extractor extractor(*chain, ec, gateway.get());
    auto artifact = extractor.extract(normalize_address(address));
    std::cout << artifact.to_json().dump(2) << "\n";
    return kExitOk;
}

int cmd_train(const CliConfig& cfg, const std::string& dataset_path,
              const std::string& model_out, bool class_weights, size_t vocab_size) {
    auto paths = load_jsonl_dataset(dataset_path);
    auto incidents = synth::group_by_incident(paths);

    TrainConfig tc;
    tc.class_weights = class_weights;
    tc.vocab_size = vocab_size;

    SuspiciousMethodSet susp = suspicious_set(cfg);
    std::map<std::string, size_t> df;
    for (const auto& [id, group] : incidents) {
        PathCorpus corpus = PathCorpus([&] {
            std::vector<std::vector<std::string>> sigs;
            for (const auto& p : group)
                sigs.push_back(p.sig);
            return sigs;
        }());
        for (const auto& [tok, n] : corpus.document_frequencies())
            df[tok] += n;
    }
    auto vocab = build_vocab(df, tc.vocab_size);

    std::vector<TrainSample> samples;
    for (const auto& [id, group] : incidents) {
        auto matrix = incident_feature_matrix(group, vocab, susp);
        for (size_t i = 0; i < group.size(); ++i)
            samples.push_back({matrix[i], group[i].label});
    }
    auto model = train(samples, tc);
    model.vocab = vocab;
    model.save(model_out);

    json j;
    j["model_file"] = model_out;
    j["samples"] = samples.size();
    j["dimension"] = model.weights.size();
    j["vocab_size"] = vocab.size();
    j["config_digest"] = model.config_digest;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_eval(const CliConfig& cfg, const std::string& dataset_path, bool baseline,
             bool class_weights, size_t vocab_size) {
    auto paths = load_jsonl_dataset(dataset_path);
    auto incidents = synth::group_by_incident(paths);
    SuspiciousMethodSet susp = suspicious_set(cfg);

    LogoResult result;
    if (baseline) {
        result = logo_evaluate_scorer(incidents, baseline_semantic_scorer(susp), cfg.cutoff);
    } else {
        TrainConfig tc;
        tc.class_weights = class_weights;
        tc.vocab_size = vocab_size;
        result = logo_evaluate(incidents, tc, cfg.cutoff);
    }

    json j;
    j["method"] = baseline ? "semantic_baseline" : "full_model";
    j["cutoff"] = cfg.cutoff;
    j["folds"] = json::array();
    for (const auto& f : result.folds) {
        json fj;
        fj["incident"] = f.incident_id;
        fj["recall"] = f.recall;
        fj["skipped"] = f.skipped;
        j["folds"].push_back(fj);
    }
    char mean[32];
    snprintf(mean, sizeof(mean), "%.4f", result.mean_recall);
    j["mean_recall"] = result.mean_recall;
    j["mean_recall_text"] = mean;
    std::cerr << "mean recall@" << cfg.cutoff << " = " << mean << "\n";
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_report(const CliConfig& cfg, const std::string& scope_file,
               const std::string& gateway_kind, const std::string& model_file,
               const std::string& replay_dir) {
    auto chain = open_chain(cfg);
    auto scope = parse_scope(read_file(scope_file));
    auto context = run_pipeline(*chain, scope, pipeline_config(cfg, model_file));

    std::filesystem::path out(cfg.out_dir);
    write_file(out / "incident_context.json", context.to_json().dump(2) + "\n");

    GatewayConfig gc{cfg.gateway_url, cfg.gateway_key, GatewayParams{}};
    if (!cfg.gateway_model.empty())
        gc.params.model = cfg.gateway_model;
    auto gateway = make_gateway(gateway_kind, gc, replay_dir);

    IncidentReport report;
    try {
        report = render_report(context, *gateway, gc.params);
    } catch (const GatewayError& e) {
        // Save the assembled prompt so the run can be replayed later.
        write_file(out / "prompt.txt", build_report_prompt(context));
        std::cerr << "error: gateway failure: " << e.what() << "\n";
        std::cerr << "prompt saved to " << (out / "prompt.txt").string() << "\n";
        return kExitGateway;
    }
    write_file(out / "incident_report.json", report.to_json().dump(2) + "\n");
    write_file(out / "incident_report.txt", report.to_text());
    for (const auto& d : context.diagnostics)
        std::cerr << "warning: " << d << "\n";
    std::cout << report.to_json().dump(2) << "\n";
    return kExitOk;
}

int cmd_synth(const CliConfig& cfg, uint64_t seed, size_t n_incidents,
              const std::string& dataset_out, const std::string& fixtures_out,
              const std::string& sigdb_out, const std::string& scope_out) {
    json j;
    if (!dataset_out.empty()) {
        auto bench = synth::generate_benchmark(seed, n_incidents);
        auto dataset = synth::benchmark_dataset(bench);
        save_jsonl_dataset(dataset_out, dataset);
        j["dataset"] = dataset_out;
        j["incidents"] = n_incidents;
        j["paths"] = dataset.size();
    }
    if (!fixtures_out.empty()) {
        if (sigdb_out.empty())
            throw ValidationError("--fixtures-out requires --sigdb-out");
        std::filesystem::create_directories(fixtures_out);
        auto scope = synth::write_incident_fixtures(fixtures_out, sigdb_out, seed);
        if (!scope_out.empty())
            write_file(scope_out, scope.dump(2) + "\n");
        j["fixtures"] = fixtures_out;
        j["scope"] = scope;
    }
    (void)cfg;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-llm: EVM trace forensics and incident report toolkit"};
    app.require_subcommand(1);

    CliConfig cfg;
    cfg.fixtures = env_or("TRACELLM_FIXTURES", "");
    cfg.rpc_url = env_or("TRACELLM_RPC_URL", "");
    cfg.explorer_key = env_or("TRACELLM_EXPLORER_KEY", "");
    cfg.gateway_url = env_or("TRACELLM_GATEWAY_URL", "");
    cfg.gateway_key = env_or("TRACELLM_GATEWAY_KEY", "");

    app.add_option("--config", cfg.config_file, "key = value config file");
    app.add_option("--fixtures", cfg.fixtures, "fixture directory (offline replay)");
    app.add_option("--rpc-url", cfg.rpc_url, "JSON-RPC endpoint");
    app.add_option("--explorer-url", cfg.explorer_url, "block-explorer API endpoint");
    app.add_option("--explorer-key", cfg.explorer_key, "block-explorer API key");
    app.add_option("--gateway-url", cfg.gateway_url, "LLM gateway endpoint");
    app.add_option("--gateway-key", cfg.gateway_key, "LLM gateway API key");
    app.add_option("--gateway-model", cfg.gateway_model, "LLM model name");
    app.add_option("--signature-db", cfg.signature_db, "selector signature database file");
    app.add_option("--suspicious-set", cfg.suspicious_set, "suspicious method names file");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--jobs", cfg.jobs, "parallelism bound");
    app.add_option("--cutoff", cfg.cutoff, "ranking cutoff (top-k)");
    app.add_option("--k", cfg.k, "subgraph hop count");

    auto* scope_cmd = app.add_subcommand("scope", "resolve incident scope around seed contracts");
    std::vector<std::string> scope_addresses;
    uint64_t from_block = 0, to_block = 0;
    scope_cmd->add_option("--address", scope_addresses, "seed contract address")->required();
    scope_cmd->add_option("--from-block", from_block, "first block")->required();
    scope_cmd->add_option("--to-block", to_block, "last block")->required();

    auto* tree_cmd = app.add_subcommand("tree", "reconstruct the call forest of a transaction");
    std::string tree_tx;
    tree_cmd->add_option("--tx", tree_tx, "transaction hash")->required();

    auto* rank_cmd = app.add_subcommand("rank", "rank anomalous paths for a scope");
    std::string rank_scope_file, rank_model_file;
    rank_cmd->add_option("--scope", rank_scope_file, "scope JSON file")->required();
    rank_cmd->add_option("--model-file", rank_model_file, "trained model JSON");

    auto* sub_cmd = app.add_subcommand("subgraph", "k-hop enclosing subgraph of one path");
    std::string sub_tx;
    size_t sub_leaf = 0;
    sub_cmd->add_option("--tx", sub_tx, "transaction hash")->required();
    sub_cmd->add_option("--leaf", sub_leaf, "leaf record index of the path")->required();

    auto* extract_cmd = app.add_subcommand("extract", "best-available code artifact");
    std::string extract_address, decompiler_cmd, cache_dir, extract_gateway, extract_replay;
    int decompile_timeout = 120;
    extract_cmd->add_option("--address", extract_address, "contract address")->required();
    extract_cmd->add_option("--decompiler", decompiler_cmd,
                            "decompiler command template ({BYTECODE_FILE}/{BYTECODE})");
    extract_cmd->add_option("--cache", cache_dir, "artifact cache directory");
    extract_cmd->add_option("--timeout", decompile_timeout, "decompiler timeout (seconds)");
    extract_cmd->add_option("--gateway", extract_gateway, "refinement gateway: mock|replay|live");
    extract_cmd->add_option("--replay-dir", extract_replay, "replay recordings directory");

    auto* train_cmd = app.add_subcommand("train", "train the anomaly classifier");
    std::string train_dataset, train_model_out = "model.json";
    bool train_class_weights = false;
    size_t train_vocab = 512;
    train_cmd->add_option("--dataset", train_dataset, "labeled paths JSONL")->required();
    train_cmd->add_option("--out-model", train_model_out, "model output file");
    train_cmd->add_flag("--class-weights", train_class_weights, "inverse-frequency class weights");
    train_cmd->add_option("--vocab-size", train_vocab, "vocabulary truncation");

    auto* eval_cmd = app.add_subcommand("eval", "leave-one-incident-out evaluation");
    std::string eval_dataset;
    bool eval_baseline = false, eval_class_weights = false;
    size_t eval_vocab = 512;
    eval_cmd->add_option("--dataset", eval_dataset, "labeled paths JSONL")->required();
    eval_cmd->add_flag("--baseline", eval_baseline, "semantic-only statistical baseline");
    eval_cmd->add_flag("--class-weights", eval_class_weights, "inverse-frequency class weights");
    eval_cmd->add_option("--vocab-size", eval_vocab, "vocabulary truncation");

    auto* report_cmd = app.add_subcommand("report", "full pipeline + LLM incident report");
    std::string report_scope_file, report_gateway = "mock", report_model_file, report_replay;
    report_cmd->add_option("--scope", report_scope_file, "scope JSON file")->required();
    report_cmd->add_option("--gateway", report_gateway, "mock|replay|live");
    report_cmd->add_option("--model-file", report_model_file, "trained model JSON");
    report_cmd->add_option("--replay-dir", report_replay, "replay recordings directory");

    auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic benchmark/fixtures");
    uint64_t synth_seed = 42;
    size_t synth_incidents = 12;
    std::string synth_dataset, synth_fixtures, synth_sigdb, synth_scope;
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--incidents", synth_incidents, "number of incidents");
    synth_cmd->add_option("--dataset-out", synth_dataset, "labeled paths JSONL output");
    synth_cmd->add_option("--fixtures-out", synth_fixtures, "fixture store output directory");
    synth_cmd->add_option("--sigdb-out", synth_sigdb, "signature DB output file");
    synth_cmd->add_option("--scope-out", synth_scope, "scope JSON output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (!cfg.config_file.empty()) {
            // File values fill only the settings left unset by flags and env.
            CliConfig from_file = cfg;
            apply_config_file(from_file, cfg.config_file);
            auto keep = [](const std::string& flag_or_env, const std::string& file_value) {
                return flag_or_env.empty() ? file_value : flag_or_env;
            };
            cfg.fixtures = keep(cfg.fixtures, from_file.fixtures);
            cfg.rpc_url = keep(cfg.rpc_url, from_file.rpc_url);
            cfg.explorer_url = keep(cfg.explorer_url, from_file.explorer_url);
            cfg.explorer_key = keep(cfg.explorer_key, from_file.explorer_key);
            cfg.gateway_url = keep(cfg.gateway_url, from_file.gateway_url);
            cfg.gateway_key = keep(cfg.gateway_key, from_file.gateway_key);
            cfg.gateway_model = keep(cfg.gateway_model, from_file.gateway_model);
            cfg.signature_db = keep(cfg.signature_db, from_file.signature_db);
            cfg.suspicious_set = keep(cfg.suspicious_set, from_file.suspicious_set);
        }

        if (scope_cmd->parsed())
            return cmd_scope(cfg, scope_addresses, from_block, to_block);
        if (tree_cmd->parsed())
            return cmd_tree(cfg, tree_tx);
        if (rank_cmd->parsed())
            return cmd_rank(cfg, rank_scope_file, rank_model_file);
        if (sub_cmd->parsed())
            return cmd_subgraph(cfg, sub_tx, sub_leaf, cfg.k);
        if (extract_cmd->parsed())
            return cmd_extract(cfg, extract_address, decompiler_cmd, cache_dir,
                               decompile_timeout, extract_gateway, extract_replay);
        if (train_cmd->parsed())
            return cmd_train(cfg, train_dataset, train_model_out, train_class_weights,
                             train_vocab);
        if (eval_cmd->parsed())
            return cmd_eval(cfg, eval_dataset, eval_baseline, eval_class_weights, eval_vocab);
        if (report_cmd->parsed())
            return cmd_report(cfg, report_scope_file, report_gateway, report_model_file,
                              report_replay);
        if (synth_cmd->parsed())
            return cmd_synth(cfg, synth_seed, synth_incidents, synth_dataset, synth_fixtures,
                             synth_sigdb, synth_scope);
    } catch (const GatewayError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGateway;
    } catch (const TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
