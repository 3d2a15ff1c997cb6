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

// Scoring for direct QA, walk generation and question parsing, plus the
// two-stage parse-then-hop pipeline and the single-stage mixed-task
// evaluation. Every mode passes predictions through extract_answer (or
// extract_query_fields), so bare answers and full paths are scored on the
// same footing and malformed outputs are scored, never rejected.

#pragma once

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/adapter_protocol.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/hopper_oracle.hpp"
#include "kgwalk/io.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/metrics.hpp"
#include "kgwalk/path_grammar.hpp"
#include "kgwalk/qa_types.hpp"
#include "kgwalk/walk_sampler.hpp"

namespace kgwalk {

using Predictions = std::unordered_map<std::string, std::string>;

struct ExampleScore {
  std::string id;
  std::string prediction;
  std::string gold;
  std::map<std::string, double> flags;
};

struct EvalReport {
  std::string mode;                            // qa | walk | parse | path-pipeline | mixhop
  std::map<std::string, double> metrics;       // percentages in [0, 100]
  std::size_t n = 0;
  std::vector<ExampleScore> per_example;       // input order
  std::map<std::string, std::size_t> diagnostics;
  std::map<std::string, std::string> metadata;
};

inline Predictions to_predictions(const std::vector<AdapterResponse>& responses) {
  Predictions out;
  for (const auto& r : responses) out.insert_or_assign(r.id, r.output);
  return out;
}

namespace detail {

inline const std::string& lookup(const Predictions& preds, const std::string& id,
                                 EvalReport& report) {
  static const std::string kEmpty;
  auto it = preds.find(id);
  if (it == preds.end()) {
    ++report.diagnostics["missing-prediction"];
    return kEmpty;
  }
  return it->second;
}

inline void average(EvalReport& report, const std::vector<std::string>& names) {
  for (const auto& name : names) {
    double sum = 0.0;
    for (const auto& ex : report.per_example) sum += ex.flags.at(name);
    report.metrics[name] = report.n ? 100.0 * sum / static_cast<double>(report.n) : 0.0;
  }
}

inline void count_shape(EvalReport& report, const std::string& prediction) {
  ++report.diagnostics["shape:" + std::string(to_string(parse_segments(prediction).shape))];
}

}  // namespace detail

// QA exact match and F1 of the final answer segment of each prediction.
// Missing predictions score as empty strings. With a graph, questions
// whose evidence query has several completions are counted as
// "ambiguous-oracle".
inline EvalReport eval_qa(const Predictions& preds, const std::vector<QAInstance>& golds,
                          const KnowledgeGraph* kg = nullptr) {
  EvalReport report;
  report.mode = "qa";
  report.n = golds.size();
  for (const auto& qa : golds) {
    const std::string& pred = detail::lookup(preds, qa.id, report);
    const ExtractedAnswer ans = extract_answer(pred);
    if (preds.count(qa.id)) {
      if (ans.malformed) ++report.diagnostics["malformed-output"];
      detail::count_shape(report, pred);
    }
    ExampleScore ex{qa.id, pred, qa.answer, {}};
    ex.flags["em"] = exact_match(ans.answer, qa.answer) ? 1.0 : 0.0;
    ex.flags["f1"] = token_f1(ans.answer, qa.answer);
    if (ex.flags["em"] == 0.0 && ex.flags["f1"] == 0.0) ++report.diagnostics["no-token-overlap"];
    if (kg && evidence_chains(qa) && kg->find_entity(qa.evidence.front().subject) &&
        count_completions(*kg, evidence_query(qa), 2) > 1)
      ++report.diagnostics["ambiguous-oracle"];
    report.per_example.push_back(std::move(ex));
  }
  detail::average(report, {"em", "f1"});
  return report;
}

// Exact match and F1 over whole serialized paths (normalized, so the
// delimiters themselves do not count as tokens).
inline EvalReport eval_walks(const Predictions& preds, const std::vector<WalkRecord>& golds) {
  EvalReport report;
  report.mode = "walk";
  report.n = golds.size();
  report.metadata["f1_text"] = "normalized";
  for (const auto& w : golds) {
    const std::string& pred = detail::lookup(preds, w.id, report);
    const std::string gold = serialize(w.path);
    if (preds.count(w.id)) {
      if (parse_segments(pred).shape != Shape::kFullWalk) ++report.diagnostics["malformed-output"];
      detail::count_shape(report, pred);
    }
    ExampleScore ex{w.id, pred, gold, {}};
    ex.flags["em"] = exact_match(pred, gold) ? 1.0 : 0.0;
    ex.flags["f1"] = token_f1(pred, gold);
    ex.flags["answer_em"] = exact_match(extract_answer(pred).answer, w.path.answer()) ? 1.0 : 0.0;
    report.per_example.push_back(std::move(ex));
  }
  detail::average(report, {"em", "f1", "answer_em"});
  return report;
}

// Parse-step metrics: relation list, seed entity, and whole string, each
// by exact match against the query of the gold evidence chain.
inline EvalReport eval_parse(const Predictions& preds, const std::vector<QAInstance>& golds) {
  EvalReport report;
  report.mode = "parse";
  report.n = golds.size();
  for (const auto& qa : golds) {
    const std::string& pred = detail::lookup(preds, qa.id, report);
    const std::string gold = serialize(evidence_query(qa));
    const QueryFields p = extract_query_fields(pred);
    const QueryFields g = extract_query_fields(gold);
    if (p.malformed && preds.count(qa.id)) ++report.diagnostics["malformed-output"];
    ExampleScore ex{qa.id, pred, gold, {}};
    ex.flags["relation_em"] =
        exact_match(join_segments(p.relations), join_segments(g.relations)) ? 1.0 : 0.0;
    ex.flags["entity_em"] = exact_match(p.entity, g.entity) ? 1.0 : 0.0;
    ex.flags["full_em"] = exact_match(pred, gold) ? 1.0 : 0.0;
    report.per_example.push_back(std::move(ex));
  }
  detail::average(report, {"relation_em", "entity_em", "full_em"});
  return report;
}

namespace detail {

inline std::vector<AdapterResponse> run_stage(Adapter& adapter,
                                              const std::vector<AdapterRequest>& requests,
                                              const std::string& stage) {
  try {
    return run_batch(adapter, requests);
  } catch (const AdapterError& e) {
    throw AdapterError(stage + ": " + e.what(), e.partial(), e.missing_ids());
  }
}

// Path-level diagnostics shared by the pipeline and mixed-task modes.
inline void add_path_scores(EvalReport& report, const std::vector<QAInstance>& questions,
                            const std::vector<AdapterResponse>& outputs) {
  std::size_t scored = 0;
  double em = 0.0;
  double f1 = 0.0;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& out = outputs[i];
    if (parse_segments(out.output).shape != Shape::kFullWalk) ++report.diagnostics["non-path-output"];
    if (auto it = out.diagnostics.find("error"); it != out.diagnostics.end())
      ++report.diagnostics["adapter:" + it->second];
    if (out.diagnostics.count("ambiguous")) ++report.diagnostics["ambiguous-oracle"];
    if (!evidence_chains(questions[i])) continue;
    const std::string gold = serialize(evidence_path(questions[i]));
    const double e = exact_match(out.output, gold) ? 1.0 : 0.0;
    const double f = token_f1(out.output, gold);
    report.per_example[i].flags["path_em"] = e;
    report.per_example[i].flags["path_f1"] = f;
    em += e;
    f1 += f;
    ++scored;
  }
  if (scored) {
    report.metrics["path_em"] = 100.0 * em / static_cast<double>(scored);
    report.metrics["path_f1"] = 100.0 * f1 / static_cast<double>(scored);
  }
}

}  // namespace detail

struct PipelineResult {
  std::vector<AdapterRequest> parse_requests;
  std::vector<AdapterResponse> parses;
  std::vector<AdapterRequest> hop_requests;   // inputs are the parses, byte for byte
  std::vector<AdapterResponse> paths;
  Predictions answers;                        // extract_answer of each path
  EvalReport report;
};

// Stage 1 sends every question to `parse_adapter` (task "parse"); stage 2
// sends each stage-1 output verbatim to `hop_adapter` (task "hop"). The
// report carries QA metrics on the final answers, parse metrics on the
// stage-1 outputs, and walk diagnostics on the stage-2 outputs.
inline PipelineResult run_path_pipeline(const std::vector<QAInstance>& questions,
                                        Adapter& parse_adapter, Adapter& hop_adapter) {
  PipelineResult res;
  for (const auto& qa : questions) res.parse_requests.push_back({qa.id, "parse", qa.question});
  res.parses = detail::run_stage(parse_adapter, res.parse_requests, "stage 1 (parse)");
  for (const auto& p : res.parses) res.hop_requests.push_back({p.id, "hop", p.output});
  res.paths = detail::run_stage(hop_adapter, res.hop_requests, "stage 2 (hop)");
  for (const auto& p : res.paths) res.answers[p.id] = extract_answer(p.output).answer;

  res.report = eval_qa(to_predictions(res.paths), questions);
  res.report.mode = "path-pipeline";
  std::vector<QAInstance> parseable;
  for (const auto& qa : questions)
    if (evidence_chains(qa)) parseable.push_back(qa);
  const EvalReport parse = eval_parse(to_predictions(res.parses), parseable);
  for (const auto& [k, v] : parse.metrics) res.report.metrics["parse_" + k] = v;
  if (auto it = parse.diagnostics.find("malformed-output"); it != parse.diagnostics.end())
    res.report.diagnostics["malformed-parse"] = it->second;
  detail::add_path_scores(res.report, questions, res.paths);
  return res;
}

struct MixhopResult {
  std::vector<AdapterRequest> requests;
  std::vector<AdapterResponse> outputs;
  Predictions answers;
  EvalReport report;
};

// One batch of questions (task "mixhop"); the answer is the last segment
// of whatever the model emits.
inline MixhopResult run_mixhop_eval(const std::vector<QAInstance>& questions, Adapter& adapter) {
  MixhopResult res;
  for (const auto& qa : questions) res.requests.push_back({qa.id, "mixhop", qa.question});
  res.outputs = detail::run_stage(adapter, res.requests, "mixhop");
  for (const auto& p : res.outputs) res.answers[p.id] = extract_answer(p.output).answer;
  res.report = eval_qa(to_predictions(res.outputs), questions);
  res.report.mode = "mixhop";
  detail::add_path_scores(res.report, questions, res.outputs);
  return res;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  nlohmann::json diagnostics = nlohmann::json::object();
  for (const auto& [k, v] : r.diagnostics) diagnostics[k] = v;
  nlohmann::json j = {{"mode", r.mode}, {"metrics", metrics}, {"n", r.n},
                      {"diagnostics", diagnostics}};
  if (!r.metadata.empty()) j["metadata"] = r.metadata;
  return j;
}

inline void write_per_example(std::ostream& out, const EvalReport& r) {
  for (const auto& ex : r.per_example) {
    nlohmann::json flags = nlohmann::json::object();
    for (const auto& [k, v] : ex.flags) flags[k] = v;
    io::write_json_line(out, {{"id", ex.id}, {"prediction", ex.prediction}, {"gold", ex.gold},
                              {"scores", flags}});
  }
}

inline std::string metric_label(const std::string& key) {
  static const std::map<std::string, std::string> labels = {
      {"em", "EM"},
      {"f1", "F1"},
      {"answer_em", "Answer EM"},
      {"relation_em", "Relation EM"},
      {"entity_em", "Entity EM"},
      {"full_em", "Full EM"},
      {"parse_relation_em", "Parse Relation EM"},
      {"parse_entity_em", "Parse Entity EM"},
      {"parse_full_em", "Parse Full EM"},
      {"path_em", "Path EM"},
      {"path_f1", "Path F1"}};
  auto it = labels.find(key);
  return it == labels.end() ? key : it->second;
}

// Plain-text table: one header row of metric names, one row of values.
inline std::string summary_table(const EvalReport& r) {
  std::vector<std::string> order;
  for (const char* k : {"em", "f1", "answer_em", "relation_em", "entity_em", "full_em",
                        "parse_relation_em", "parse_entity_em", "parse_full_em", "path_em",
                        "path_f1"})
    if (r.metrics.count(k)) order.emplace_back(k);
  for (const auto& [k, v] : r.metrics)
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);

  std::ostringstream head;
  std::ostringstream vals;
  head << std::left << std::setw(16) << "Mode";
  vals << std::left << std::setw(16) << r.mode;
  for (const auto& k : order) {
    const std::string label = metric_label(k);
    const int width = static_cast<int>(std::max<std::size_t>(label.size(), 6)) + 2;
    head << std::right << std::setw(width) << label;
    vals << std::right << std::setw(width) << std::fixed << std::setprecision(2) << r.metrics.at(k);
  }
  head << std::right << std::setw(8) << "N";
  vals << std::right << std::setw(8) << r.n;
  std::string out = head.str() + "\n" + vals.str() + "\n";
  for (const auto& [k, v] : r.diagnostics) out += "  " + k + ": " + std::to_string(v) + "\n";
  return out;
}

}  // namespace kgwalk
