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

#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/error.hpp"
#include "kgwalk/io.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/path_grammar.hpp"

namespace kgwalk {

// One question with its gold answer and the ordered evidence triples that
// answer it (length 1 for one-hop questions, 2 for two-hop).
struct QAInstance {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<SurfaceTriple> evidence;
  int hop_count = 0;

  friend bool operator==(const QAInstance&, const QAInstance&) = default;
};

inline bool evidence_chains(const QAInstance& qa) {
  if (qa.evidence.empty()) return false;
  for (std::size_t i = 0; i + 1 < qa.evidence.size(); ++i)
    if (qa.evidence[i].object != qa.evidence[i + 1].subject) return false;
  return true;
}

// The evidence rendered as a walk. Throws ValidationError when the
// evidence is empty or does not chain object-to-subject.
inline WalkPath evidence_path(const QAInstance& qa) {
  if (qa.evidence.empty())
    throw ValidationError("question '" + qa.id + "' has no evidence");
  if (!evidence_chains(qa))
    throw ValidationError("evidence of question '" + qa.id + "' does not chain");
  WalkPath p;
  p.entities.push_back(qa.evidence.front().subject);
  for (const auto& t : qa.evidence) {
    p.relations.push_back(t.relation);
    p.entities.push_back(t.object);
  }
  return p;
}

// The parse target: seed entity plus the relation sequence.
inline WalkQuery evidence_query(const QAInstance& qa) {
  return query_of(evidence_path(qa));
}

inline nlohmann::json to_json(const QAInstance& qa) {
  nlohmann::json evidence = nlohmann::json::array();
  for (const auto& t : qa.evidence) evidence.push_back({t.subject, t.relation, t.object});
  return {{"id", qa.id},
          {"question", qa.question},
          {"answer", qa.answer},
          {"evidence", std::move(evidence)},
          {"hops", qa.hop_count}};
}

inline QAInstance qa_from_json(const nlohmann::json& j, std::size_t line) {
  QAInstance qa;
  qa.id = io::require_string(j, "id", line);
  qa.question = io::require_string(j, "question", line);
  qa.answer = io::require_string(j, "answer", line);
  if (j.contains("evidence")) {
    const auto& ev = j["evidence"];
    if (!ev.is_array()) throw ParseError(line, "\"evidence\" must be an array");
    for (const auto& t : ev) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_string() || !t[1].is_string() ||
          !t[2].is_string())
        throw ParseError(line, "evidence entries must be [s, r, o] string triples");
      qa.evidence.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                             t[2].get<std::string>()});
    }
  }
  if (j.contains("hops")) {
    if (!j["hops"].is_number_integer()) throw ParseError(line, "\"hops\" must be an integer");
    qa.hop_count = j["hops"].get<int>();
  } else {
    qa.hop_count = static_cast<int>(qa.evidence.size());
  }
  return qa;
}

inline std::vector<QAInstance> read_qa(std::istream& in) {
  std::vector<QAInstance> out;
  io::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    out.push_back(qa_from_json(j, line));
  });
  return out;
}

inline void write_qa(std::ostream& out, const std::vector<QAInstance>& items) {
  for (const auto& qa : items) io::write_json_line(out, to_json(qa));
}

}  // namespace kgwalk
