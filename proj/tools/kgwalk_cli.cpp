// Copyright 2026 The kgwalk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// kgwalk: batch command-line front end.
//
//   kgwalk kg validate|stats     kgwalk walks sample|split
//   kgwalk onehop generate       kgwalk mixture tasks|build
//   kgwalk oracle complete       kgwalk eval qa|walks|parse
//   kgwalk pipeline path|mixhop  kgwalk simulate noisy
//
// Exit status: 0 success, 1 usage or validation error, 2 I/O or adapter
// protocol error. Every command that writes files also writes
// manifest.json next to them.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "kgwalk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kgwalk::cli {
namespace {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 digest failed");
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{md[i]};
  return hex.str();
}

// Everything in "run" is a function of the inputs and flags; wall-clock
// data lives under "timing".
class RunManifest {
 public:
  RunManifest() : start_(std::chrono::steady_clock::now()), started_(std::time(nullptr)) {}

  void set_command(const std::vector<std::string>& argv) { run_["command"] = argv; }

  void set_config(const CLI::App& sub) {
    json config = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
      const std::string name = opt->get_name();
      if (name == "--help" || name.empty()) continue;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        config[name] = r.size() == 1 ? json(r.front()) : json(r);
      } else if (!opt->get_default_str().empty()) {
        config[name] = opt->get_default_str();
      }
    }
    run_["config"] = config;
  }

  // Reads an input once; the digest covers exactly the bytes returned.
  std::string read_input(const fs::path& p) {
    auto in = io::open_input(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + p.string() + "'");
    std::string bytes = buf.str();
    run_["inputs"][p.string()] = "sha256:" + sha256_hex(bytes);
    return bytes;
  }
  void add_output(const fs::path& p) { outputs_.push_back(p); }
  json& counts() { return run_["counts"]; }

  void write() const {
    if (outputs_.empty()) return;
    json run = run_;
    run["version"] = KGWALK_VERSION;
    run["outputs"] = json::array();
    for (const auto& p : outputs_) run["outputs"].push_back(p.string());
    if (!run.contains("inputs")) run["inputs"] = json::object();
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started_));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json doc = {{"run", run}, {"timing", {{"started_utc", stamp}, {"duration_seconds", secs}}}};
    std::set<fs::path> dirs;
    for (const auto& p : outputs_) dirs.insert(p.has_parent_path() ? p.parent_path() : fs::path("."));
    for (const auto& d : dirs) {
      auto out = io::open_output(d / "manifest.json");
      out << io::dump(doc, 2) << '\n';
    }
  }

 private:
  json run_ = json::object();
  std::vector<fs::path> outputs_;
  std::chrono::steady_clock::time_point start_;
  std::time_t started_;
};

// ---------------------------------------------------------------------------
// Loading and writing

KnowledgeGraph load_kg(RunManifest& m, const std::string& path, const std::string& format) {
  std::istringstream in(m.read_input(path));
  TripleFormat f = TripleFormat::kTsv;
  if (format == "jsonl" || (format == "auto" && (path.ends_with(".jsonl") || path.ends_with(".json"))))
    f = TripleFormat::kJsonLines;
  auto kg = load_triples(in, f);
  if (kg.duplicates_dropped())
    std::cerr << "kgwalk: " << kg.duplicates_dropped() << " duplicate triples dropped\n";
  return kg;
}

std::vector<QAInstance> load_qa(RunManifest& m, const std::string& path) {
  std::istringstream in(m.read_input(path));
  return read_qa(in);
}

std::vector<WalkRecord> load_walks(RunManifest& m, const std::string& path) {
  std::istringstream in(m.read_input(path));
  return read_walks(in);
}

std::vector<AdapterResponse> load_responses(RunManifest& m, const std::string& path) {
  std::istringstream in(m.read_input(path));
  return read_responses(in);
}

template <typename Fn>
void write_file(RunManifest& m, const fs::path& path, Fn&& fn) {
  auto out = io::open_output(path);
  fn(out);
  out.flush();
  if (!out) throw IoError("write failure on '" + path.string() + "'");
  m.add_output(path);
}

void emit_report(RunManifest& m, const EvalReport& report, const std::string& out_path,
                 const std::string& per_example, const std::string& format) {
  if (!per_example.empty())
    write_file(m, per_example, [&](std::ostream& o) { write_per_example(o, report); });
  const std::string text = format == "table" ? summary_table(report) : io::dump(to_json(report), 2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(m, out_path, [&](std::ostream& o) { o << text; });
  }
  for (const auto& [k, v] : report.metrics) m.counts()[k] = v;
  m.counts()["n"] = report.n;
}

// ---------------------------------------------------------------------------
// Adapters named on the command line

enum class Stage { kParse, kHop, kMixhop };

struct AdapterContext {
  const KnowledgeGraph* kg = nullptr;
  const std::vector<QAInstance>* questions = nullptr;
  NoiseSpec noise;
  bool have_seed = false;
  double timeout_seconds = 600;
  RunManifest* manifest = nullptr;
  std::vector<std::shared_ptr<ProcessAdapter>> processes;
};

std::unordered_map<std::string, std::string> gold_key(const AdapterContext& ctx, Stage stage) {
  std::unordered_map<std::string, std::string> key;
  if (!ctx.questions) throw ConfigError("the gold adapter needs --questions");
  for (const auto& qa : *ctx.questions) {
    if (!evidence_chains(qa)) continue;
    key[qa.id] = stage == Stage::kParse ? serialize(evidence_query(qa)) : serialize(evidence_path(qa));
  }
  return key;
}

const KnowledgeGraph& need_kg(const AdapterContext& ctx, const std::string& spec) {
  if (!ctx.kg) throw ConfigError("adapter '" + spec + "' needs --kg");
  return *ctx.kg;
}

// oracle | gold | noisy | replay:FILE | cmd:COMMAND | COMMAND
std::shared_ptr<Adapter> make_adapter(const std::string& spec, Stage stage, AdapterContext& ctx) {
  if (spec == "gold") return std::make_shared<GoldAdapter>(gold_key(ctx, stage));
  if (spec == "oracle") {
    const auto& kg = need_kg(ctx, spec);
    if (stage == Stage::kParse) throw ConfigError("the oracle cannot parse questions; use gold");
    if (stage == Stage::kHop) return std::make_shared<OracleAdapter>(kg);
    return std::make_shared<ComposedAdapter>(make_adapter("gold", Stage::kParse, ctx),
                                             std::make_shared<OracleAdapter>(kg));
  }
  if (spec == "noisy") {
    const auto& kg = need_kg(ctx, spec);
    if (!ctx.have_seed) throw ConfigError("the noisy adapter needs --seed");
    auto gold = ctx.questions ? make_adapter("gold", Stage::kParse, ctx) : nullptr;
    auto noisy = std::make_shared<NoisyAdapter>(kg, ctx.noise, gold);
    if (stage == Stage::kMixhop) return std::make_shared<ComposedAdapter>(noisy, noisy);
    return noisy;
  }
  if (spec.starts_with("replay:")) {
    const std::string path = spec.substr(7);
    std::istringstream in(ctx.manifest->read_input(path));
    return std::make_shared<ReplayAdapter>(read_responses(in));
  }
  const std::string command = spec.starts_with("cmd:") ? spec.substr(4) : spec;
  if (command.empty()) throw ConfigError("empty adapter command");
  auto proc = std::make_shared<ProcessAdapter>(
      command, std::chrono::milliseconds(static_cast<long long>(ctx.timeout_seconds * 1000)));
  ctx.processes.push_back(proc);
  return proc;
}

void finish_processes(AdapterContext& ctx) {
  for (auto& p : ctx.processes) p->finish();
}

void add_adapter_options(CLI::App* sub, double& timeout) {
  sub->add_option("--timeout", timeout, "Seconds to wait for a child adapter's batch")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------

struct Options {
  std::string kg, kg_format = "auto", out, out_dir, walks, qa, qa_train, qa_val, qa_test,
      templates, gold, pred, per_example, report_format = "json", questions, adapter,
      parse_adapter, hop_adapter, requests, kind, task = "parse";
  std::vector<std::string> components, queries;
  SamplerConfig sampler;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::size_t epoch_size = 0;
  double p_entity = 0.0, p_parse = 0.0, timeout = 600;
  bool enumerate_all = false;
};

int run(int argc, char** argv) {
  CLI::App app{"Knowledge-graph walk corpora and multi-hop QA evaluation"};
  app.set_version_flag("--version", KGWALK_VERSION);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options o;
  RunManifest manifest;
  std::function<void()> action;
  CLI::App* leaf = nullptr;

  auto add_kg = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--kg", o.kg, "Triple file (TSV or JSON Lines)");
    if (required) opt->required();
    sub->add_option("--kg-format", o.kg_format, "tsv, jsonl or auto (by extension)")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "tsv", "jsonl"}));
  };
  auto leaf_cmd = [&](CLI::App* group, const std::string& name, const std::string& help) {
    auto* sub = group->add_subcommand(name, help);
    sub->parse_complete_callback([&, sub] { leaf = sub; });
    return sub;
  };

  // kg ---------------------------------------------------------------------
  auto* kg_cmd = app.add_subcommand("kg", "Knowledge-graph files");
  kg_cmd->require_subcommand(1);
  auto* kg_validate = leaf_cmd(kg_cmd, "validate", "Load a triple file and report problems");
  add_kg(kg_validate);
  kg_validate->add_option("--out", o.out, "Write the statistics as JSON here");
  auto* kg_stats = leaf_cmd(kg_cmd, "stats", "Entity, relation and triple counts");
  add_kg(kg_stats);
  kg_stats->add_option("--out", o.out, "Write the statistics here instead of stdout");
  auto kg_action = [&](bool print) {
    const auto kg = load_kg(manifest, o.kg, o.kg_format);
    const auto s = kg.stats();
    const json j = {{"entities", s.entities}, {"relations", s.relations}, {"triples", s.triples},
                    {"duplicates_dropped", kg.duplicates_dropped()}};
    manifest.counts() = j;
    if (!o.out.empty()) write_file(manifest, o.out, [&](std::ostream& out) { out << io::dump(j, 2) << '\n'; });
    if (print && o.out.empty()) std::cout << io::dump(j, 2) << '\n';
    if (!print) std::cerr << "ok: " << s.entities << " entities, " << s.relations << " relations, "
                          << s.triples << " triples\n";
  };
  kg_validate->final_callback([&] { action = [&] { kg_action(false); }; });
  kg_stats->final_callback([&] { action = [&] { kg_action(true); }; });

  // walks ------------------------------------------------------------------
  auto* walks_cmd = app.add_subcommand("walks", "Random-walk corpora");
  walks_cmd->require_subcommand(1);
  auto* sample = leaf_cmd(walks_cmd, "sample", "Sample a random-walk corpus");
  add_kg(sample);
  sample->add_option("--length,--length-entities", o.sampler.length_entities, "Entities per walk")
      ->capture_default_str();
  sample->add_option("--cap,--per-entity-cap", o.sampler.per_entity_cap, "Walks per entity per round")
      ->capture_default_str();
  sample->add_option("--rounds", o.sampler.rounds, "Sampling rounds")->capture_default_str();
  sample->add_option("--seed,--base-seed", o.sampler.base_seed, "Base seed")->required();
  sample->add_option("--attempt-factor", o.sampler.attempt_factor, "Attempts per accepted walk")
      ->capture_default_str();
  sample->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sample->add_option("--out", o.out, "Corpus JSON Lines")->required();
  sample->final_callback([&] {
    action = [&] {
      const auto kg = load_kg(manifest, o.kg, o.kg_format);
      const auto corpus = sample_walks(kg, o.sampler, o.jobs);
      write_file(manifest, o.out, [&](std::ostream& out) { write_walks(out, corpus.walks); });
      manifest.counts() = {{"walks", corpus.walks.size()}, {"attempts", corpus.attempts},
                           {"dead_ends", corpus.dead_ends}, {"repeats", corpus.repeats}};
      std::cerr << "sampled " << corpus.walks.size() << " walks (" << corpus.attempts << " attempts, "
                << corpus.dead_ends << " dead ends, " << corpus.repeats << " repeats)\n";
    };
  });

  auto* split = leaf_cmd(walks_cmd, "split", "Hold out validation/test evidence from a corpus");
  split->add_option("--walks", o.walks, "Sampled corpus")->required();
  split->add_option("--qa-val", o.qa_val, "Validation questions")->required();
  split->add_option("--qa-test", o.qa_test, "Test questions")->required();
  split->add_option("--out-dir", o.out_dir, "Writes train/validation/test.jsonl")->required();
  split->final_callback([&] {
    action = [&] {
      const auto walks = load_walks(manifest, o.walks);
      const auto val = load_qa(manifest, o.qa_val);
      const auto test = load_qa(manifest, o.qa_test);
      WalkCorpus corpus;
      corpus.walks = walks;
      const auto s = split_with_holdout(corpus, val, test);
      const fs::path dir = o.out_dir;
      write_file(manifest, dir / "train.jsonl", [&](std::ostream& out) { write_walks(out, s.train); });
      write_file(manifest, dir / "validation.jsonl", [&](std::ostream& out) { write_walks(out, s.validation); });
      write_file(manifest, dir / "test.jsonl", [&](std::ostream& out) { write_walks(out, s.test); });
      manifest.counts() = {{"train", s.train.size()}, {"validation", s.validation.size()},
                           {"test", s.test.size()}, {"discarded", s.discarded_count}};
      std::cerr << s.train.size() << " train walks kept, " << s.discarded_count << " discarded\n";
    };
  });

  // onehop -----------------------------------------------------------------
  auto* onehop_cmd = app.add_subcommand("onehop", "Single-hop questions from templates");
  onehop_cmd->require_subcommand(1);
  auto* gen = leaf_cmd(onehop_cmd, "generate", "Render one question per triple");
  gen->add_option("--templates", o.templates, "Relation template table (JSON Lines)")->required();
  gen->add_option("--seed", o.seed, "Template choice seed")->required();
  add_kg(gen, false);
  gen->add_option("--out", o.out, "Questions for every --kg triple");
  gen->add_option("--qa-train", o.qa_train, "Multi-hop training questions");
  gen->add_option("--qa-val", o.qa_val, "Multi-hop validation questions");
  gen->add_option("--qa-test", o.qa_test, "Multi-hop test questions");
  gen->add_option("--out-dir", o.out_dir, "Writes train/validation/test.jsonl from the --qa-* splits");
  gen->final_callback([&] {
    action = [&] {
      std::istringstream tin(manifest.read_input(o.templates));
      const auto table = read_template_table(tin);
      if (!o.kg.empty()) {
        if (o.out.empty()) throw ConfigError("--kg needs --out");
        const auto kg = load_kg(manifest, o.kg, o.kg_format);
        std::vector<SurfaceTriple> triples;
        for (const auto& t : kg.triples()) triples.push_back(kg.spell(t));
        const auto qas = generate_onehop(triples, table, o.seed);
        write_file(manifest, o.out, [&](std::ostream& out) { write_qa(out, qas); });
        manifest.counts() = {{"questions", qas.size()}};
        return;
      }
      if (o.out_dir.empty() || o.qa_train.empty() || o.qa_val.empty() || o.qa_test.empty())
        throw ConfigError("give either --kg and --out, or --qa-train, --qa-val, --qa-test and --out-dir");
      const auto s = generate_onehop_splits(load_qa(manifest, o.qa_train), load_qa(manifest, o.qa_val),
                                            load_qa(manifest, o.qa_test), table, o.seed);
      const fs::path dir = o.out_dir;
      write_file(manifest, dir / "train.jsonl", [&](std::ostream& out) { write_qa(out, s.train); });
      write_file(manifest, dir / "validation.jsonl", [&](std::ostream& out) { write_qa(out, s.validation); });
      write_file(manifest, dir / "test.jsonl", [&](std::ostream& out) { write_qa(out, s.test); });
      manifest.counts() = {{"train", s.train.size()}, {"validation", s.validation.size()},
                           {"test", s.test.size()}};
    };
  });

  // mixture ----------------------------------------------------------------
  auto* mixture_cmd = app.add_subcommand("mixture", "Training task streams and mixtures");
  mixture_cmd->require_subcommand(1);
  auto* tasks = leaf_cmd(mixture_cmd, "tasks", "Turn triples, walks or questions into task records");
  tasks->add_option("--kind", o.kind, "ki, walk, qa, parse or mixhop-qa")
      ->required()
      ->check(CLI::IsMember({"ki", "walk", "qa", "parse", "mixhop-qa"}));
  add_kg(tasks, false);
  tasks->add_option("--walks", o.walks, "Walk corpus (kind walk)");
  tasks->add_option("--qa", o.qa, "Questions (kinds qa, parse, mixhop-qa)");
  tasks->add_option("--out", o.out, "Task records")->required();
  tasks->final_callback([&] {
    action = [&] {
      const TaskKind kind = parse_task_kind(o.kind);
      std::vector<TaskInstance> out;
      if (kind == TaskKind::kKi) {
        if (o.kg.empty()) throw ConfigError("--kind ki needs --kg");
        out = make_ki_instances(load_kg(manifest, o.kg, o.kg_format));
      } else if (kind == TaskKind::kWalk) {
        if (o.walks.empty()) throw ConfigError("--kind walk needs --walks");
        out = make_walk_instances(load_walks(manifest, o.walks));
      } else {
        if (o.qa.empty()) throw ConfigError("--kind " + o.kind + " needs --qa");
        out = make_qa_instances(load_qa(manifest, o.qa), kind);
      }
      write_file(manifest, o.out, [&](std::ostream& s) { write_tasks(s, out); });
      manifest.counts() = {{"tasks", out.size()}};
    };
  });

  auto* build = leaf_cmd(mixture_cmd, "build", "Materialise one epoch of a task mixture");
  build->add_option("--component", o.components, "NAME=FILE:PROPORTION (repeatable)")->required();
  build->add_option("--epoch-size", o.epoch_size, "Records per epoch")->required();
  build->add_option("--seed", o.seed, "Mixture seed")->required();
  build->add_option("--out", o.out, "Mixed task records")->required();
  build->final_callback([&] {
    action = [&] {
      MixtureSpec spec;
      spec.seed = o.seed;
      spec.epoch_size = o.epoch_size;
      std::map<std::string, std::vector<TaskInstance>> streams;
      for (const auto& c : o.components) {
        const auto eq = c.find('=');
        const auto colon = c.rfind(':');
        if (eq == std::string::npos || colon == std::string::npos || colon < eq)
          throw ConfigError("--component must look like NAME=FILE:PROPORTION, got '" + c + "'");
        const std::string name = c.substr(0, eq);
        const std::string file = c.substr(eq + 1, colon - eq - 1);
        double proportion = 0.0;
        try {
          std::size_t used = 0;
          proportion = std::stod(c.substr(colon + 1), &used);
          if (used != c.size() - colon - 1) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
          throw ConfigError("bad proportion in --component '" + c + "'");
        }
        spec.components.push_back({name, proportion});
        std::istringstream in(manifest.read_input(file));
        streams[name] = read_tasks(in);
      }
      const auto mix = build_mixture(streams, spec);
      write_file(manifest, o.out, [&](std::ostream& s) { write_tasks(s, mix.items); });
      manifest.counts() = {{"items", mix.items.size()}, {"per_component", mix.counts}};
    };
  });

  // oracle -----------------------------------------------------------------
  auto* oracle_cmd = app.add_subcommand("oracle", "Symbolic walk completion");
  oracle_cmd->require_subcommand(1);
  auto* complete = leaf_cmd(oracle_cmd, "complete", "Complete walk queries against a graph");
  add_kg(complete);
  complete->add_option("--query", o.queries, "Query string 'e ; r1 ; r2' (repeatable)");
  complete->add_option("--requests", o.requests, "Adapter requests (JSON Lines)");
  complete->add_flag("--all", o.enumerate_all, "Print every completion of each --query");
  complete->add_option("--out", o.out, "Output file instead of stdout");
  complete->final_callback([&] {
    action = [&] {
      if (o.queries.empty() == o.requests.empty()) throw ConfigError("give exactly one of --query or --requests");
      const auto kg = load_kg(manifest, o.kg, o.kg_format);
      std::ostringstream text;
      std::size_t n = 0;
      if (!o.requests.empty()) {
        std::istringstream in(manifest.read_input(o.requests));
        OracleAdapter oracle(kg);
        const auto responses = run_batch(oracle, read_requests(in));
        write_responses(text, responses);
        n = responses.size();
      } else {
        for (const auto& qs : o.queries) {
          const QueryFields f = extract_query_fields(qs);
          if (f.malformed) throw ValidationError("malformed query '" + qs + "'");
          const WalkQuery q{f.entity, f.relations};
          if (o.enumerate_all) {
            for (const auto& p : enumerate_walks(kg, q)) text << serialize(p) << '\n', ++n;
          } else {
            text << serialize(complete_walk(kg, q)) << '\n';
            ++n;
          }
        }
      }
      manifest.counts() = {{"outputs", n}};
      if (o.out.empty())
        std::cout << text.str();
      else
        write_file(manifest, o.out, [&](std::ostream& s) { s << text.str(); });
    };
  });

  // eval -------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions");
  eval_cmd->require_subcommand(1);
  auto add_eval = [&](const std::string& name, const std::string& help, const std::string& gold_help) {
    auto* sub = leaf_cmd(eval_cmd, name, help);
    sub->add_option("--gold", o.gold, gold_help)->required();
    sub->add_option("--pred", o.pred, "Predictions: {\"id\", \"output\"} per line")->required();
    sub->add_option("--out", o.out, "Report file (stdout when absent)");
    sub->add_option("--per-example", o.per_example, "Per-example scores (JSON Lines)");
    sub->add_option("--format", o.report_format, "json or table")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "table"}));
    return sub;
  };
  auto* eval_qa_cmd = add_eval("qa", "Answer EM/F1", "Gold questions");
  add_kg(eval_qa_cmd, false);
  eval_qa_cmd->final_callback([&] {
    action = [&] {
      const auto golds = load_qa(manifest, o.gold);
      const auto preds = to_predictions(load_responses(manifest, o.pred));
      std::optional<KnowledgeGraph> kg;
      if (!o.kg.empty()) kg = load_kg(manifest, o.kg, o.kg_format);
      emit_report(manifest, eval_qa(preds, golds, kg ? &*kg : nullptr), o.out, o.per_example, o.report_format);
    };
  });
  add_eval("walks", "Whole-path EM/F1", "Gold walk records")->final_callback([&] {
    action = [&] {
      const auto golds = load_walks(manifest, o.gold);
      const auto preds = to_predictions(load_responses(manifest, o.pred));
      emit_report(manifest, eval_walks(preds, golds), o.out, o.per_example, o.report_format);
    };
  });
  add_eval("parse", "Relation/entity/full EM of question parses", "Gold questions")->final_callback([&] {
    action = [&] {
      const auto golds = load_qa(manifest, o.gold);
      const auto preds = to_predictions(load_responses(manifest, o.pred));
      emit_report(manifest, eval_parse(preds, golds), o.out, o.per_example, o.report_format);
    };
  });

  // pipeline ---------------------------------------------------------------
  auto* pipeline_cmd = app.add_subcommand("pipeline", "End-to-end question answering");
  pipeline_cmd->require_subcommand(1);
  auto add_noise = [&](CLI::App* sub) {
    sub->add_option("--p-entity", o.p_entity, "Noisy adapter: entity corruption rate")->capture_default_str();
    sub->add_option("--p-parse", o.p_parse, "Noisy adapter: parse corruption rate")->capture_default_str();
    sub->add_option("--seed", o.seed, "Noisy adapter seed");
  };
  auto add_pipeline_io = [&](CLI::App* sub) {
    sub->add_option("--questions", o.questions, "Questions (JSON Lines)")->required();
    add_kg(sub, false);
    sub->add_option("--out-dir", o.out_dir, "Write outputs, predictions and report here");
    sub->add_option("--format", o.report_format, "json or table")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "table"}));
    add_noise(sub);
    add_adapter_options(sub, o.timeout);
  };
  auto context = [&](const std::vector<QAInstance>& qs, const std::optional<KnowledgeGraph>& kg) {
    AdapterContext ctx;
    ctx.kg = kg ? &*kg : nullptr;
    ctx.questions = &qs;
    ctx.noise = {o.p_entity, o.p_parse, o.seed};
    ctx.have_seed = leaf && leaf->count("--seed") > 0;
    ctx.timeout_seconds = o.timeout;
    ctx.manifest = &manifest;
    return ctx;
  };
  auto write_answers = [&](const fs::path& path, const std::vector<QAInstance>& qs, const Predictions& answers) {
    write_file(manifest, path, [&](std::ostream& s) {
      for (const auto& qa : qs) {
        auto it = answers.find(qa.id);
        io::write_json_line(s, {{"id", qa.id}, {"output", it == answers.end() ? "" : it->second}});
      }
    });
  };

  auto* path_cmd = leaf_cmd(pipeline_cmd, "path", "Parse each question, then complete the parse");
  add_pipeline_io(path_cmd);
  path_cmd->add_option("--parse-adapter", o.parse_adapter, "gold, noisy, replay:FILE or a command")->required();
  path_cmd->add_option("--hop-adapter", o.hop_adapter, "oracle, gold, noisy, replay:FILE or a command")->required();
  path_cmd->final_callback([&] {
    action = [&] {
      const auto qs = load_qa(manifest, o.questions);
      std::optional<KnowledgeGraph> kg;
      if (!o.kg.empty()) kg = load_kg(manifest, o.kg, o.kg_format);
      auto ctx = context(qs, kg);
      auto parse = make_adapter(o.parse_adapter, Stage::kParse, ctx);
      auto hop = make_adapter(o.hop_adapter, Stage::kHop, ctx);
      const auto res = run_path_pipeline(qs, *parse, *hop);
      finish_processes(ctx);
      std::string report_path;
      if (!o.out_dir.empty()) {
        const fs::path dir = o.out_dir;
        write_file(manifest, dir / "parses.jsonl", [&](std::ostream& s) { write_responses(s, res.parses); });
        write_file(manifest, dir / "hop_requests.jsonl", [&](std::ostream& s) { write_requests(s, res.hop_requests); });
        write_file(manifest, dir / "paths.jsonl", [&](std::ostream& s) { write_responses(s, res.paths); });
        write_answers(dir / "predictions.jsonl", qs, res.answers);
        report_path = (dir / "report.json").string();
      }
      emit_report(manifest, res.report, report_path,
                  o.out_dir.empty() ? "" : (fs::path(o.out_dir) / "per_example.jsonl").string(),
                  o.report_format);
    };
  });

  auto* mixhop_cmd = leaf_cmd(pipeline_cmd, "mixhop", "Map each question directly to a path");
  add_pipeline_io(mixhop_cmd);
  mixhop_cmd->add_option("--adapter", o.adapter, "oracle, gold, noisy, replay:FILE or a command")->required();
  mixhop_cmd->final_callback([&] {
    action = [&] {
      const auto qs = load_qa(manifest, o.questions);
      std::optional<KnowledgeGraph> kg;
      if (!o.kg.empty()) kg = load_kg(manifest, o.kg, o.kg_format);
      auto ctx = context(qs, kg);
      auto adapter = make_adapter(o.adapter, Stage::kMixhop, ctx);
      const auto res = run_mixhop_eval(qs, *adapter);
      finish_processes(ctx);
      std::string report_path;
      if (!o.out_dir.empty()) {
        const fs::path dir = o.out_dir;
        write_file(manifest, dir / "outputs.jsonl", [&](std::ostream& s) { write_responses(s, res.outputs); });
        write_answers(dir / "predictions.jsonl", qs, res.answers);
        report_path = (dir / "report.json").string();
      }
      emit_report(manifest, res.report, report_path,
                  o.out_dir.empty() ? "" : (fs::path(o.out_dir) / "per_example.jsonl").string(),
                  o.report_format);
    };
  });

  auto* export_cmd = leaf_cmd(pipeline_cmd, "requests", "Write adapter requests for file mode");
  export_cmd->add_option("--questions", o.questions, "Questions (JSON Lines)")->required();
  export_cmd->add_option("--task", o.task, "parse, mixhop or qa")
      ->capture_default_str()
      ->check(CLI::IsMember({"parse", "mixhop", "qa"}));
  export_cmd->add_option("--out", o.out, "Requests (JSON Lines)")->required();
  export_cmd->final_callback([&] {
    action = [&] {
      const auto qs = load_qa(manifest, o.questions);
      std::vector<AdapterRequest> reqs;
      for (const auto& qa : qs) reqs.push_back({qa.id, o.task, qa.question});
      write_file(manifest, o.out, [&](std::ostream& s) { write_requests(s, reqs); });
      manifest.counts() = {{"requests", reqs.size()}};
    };
  });

  // simulate ---------------------------------------------------------------
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulated imperfect models");
  simulate_cmd->require_subcommand(1);
  auto* noisy_cmd = leaf_cmd(simulate_cmd, "noisy", "Answer adapter requests with the noisy oracle");
  add_kg(noisy_cmd);
  noisy_cmd->add_option("--requests", o.requests, "Adapter requests (JSON Lines)")->required();
  noisy_cmd->add_option("--questions", o.questions, "Gold questions, the parse source for parse requests");
  noisy_cmd->add_option("--p-entity", o.p_entity, "Entity corruption rate")->capture_default_str();
  noisy_cmd->add_option("--p-parse", o.p_parse, "Parse corruption rate")->capture_default_str();
  noisy_cmd->add_option("--seed", o.seed, "Noise seed")->required();
  noisy_cmd->add_option("--out", o.out, "Responses (stdout when absent)");
  noisy_cmd->final_callback([&] {
    action = [&] {
      const auto kg = load_kg(manifest, o.kg, o.kg_format);
      std::vector<QAInstance> qs;
      if (!o.questions.empty()) qs = load_qa(manifest, o.questions);
      std::istringstream in(manifest.read_input(o.requests));
      const auto reqs = read_requests(in);
      std::shared_ptr<Adapter> source;
      if (!qs.empty()) {
        std::unordered_map<std::string, std::string> key;
        for (const auto& qa : qs)
          if (evidence_chains(qa)) key[qa.id] = serialize(evidence_query(qa));
        source = std::make_shared<GoldAdapter>(std::move(key));
      }
      NoisyAdapter noisy(kg, {o.p_entity, o.p_parse, o.seed}, source);
      const auto out = run_batch(noisy, reqs);
      std::size_t corrupted = 0;
      for (const auto& r : out) corrupted += r.diagnostics.count("noise");
      manifest.counts() = {{"responses", out.size()}, {"corrupted", corrupted}};
      if (o.out.empty())
        write_responses(std::cout, out);
      else
        write_file(manifest, o.out, [&](std::ostream& s) { write_responses(s, out); });
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (!action || !leaf) return 1;

  std::vector<std::string> args(argv, argv + argc);
  args.front() = "kgwalk";
  manifest.set_command(args);
  manifest.set_config(*leaf);
  action();
  manifest.write();
  return 0;
}

}  // namespace
}  // namespace kgwalk::cli

int main(int argc, char** argv) {
  try {
    return kgwalk::cli::run(argc, argv);
  } catch (const kgwalk::ValidationError& e) {
    std::cerr << "kgwalk: error: " << e.what() << '\n';
    return 1;
  } catch (const kgwalk::AdapterError& e) {
    std::cerr << "kgwalk: adapter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kgwalk: " << e.what() << '\n';
    return 2;
  }
}
