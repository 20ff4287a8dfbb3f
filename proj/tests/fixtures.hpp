// Copyright 2026 FairLENS contributors
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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairlens/commands.hpp"
#include "fairlens/corpus.hpp"

namespace fixtures {

inline fairlens::AttributeSchema solo_schema(const std::vector<std::size_t>& sizes) {
  std::vector<fairlens::Attribute> attrs;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    fairlens::Attribute attr{"A" + std::to_string(a), {}};
    for (std::size_t l = 0; l < sizes[a]; ++l) attr.labels.push_back("L" + std::to_string(l));
    attrs.push_back(attr);
  }
  return fairlens::AttributeSchema(attrs);
}

inline fairlens::AttributeSchema demo_schema() {
  return fairlens::AttributeSchema({{"Sex", {"Female", "Male"}},
                                    {"Age", {"Teen", "Adult", "Senior"}},
                                    {"Race", {"Asian", "Black", "Latinx", "White"}},
                                    {"Accent", {"Native", "Indian", "Chinese", "Spanish", "Other Accent"}}});
}

inline fairlens::Utterance utt(std::string id, std::vector<std::string> labels, std::string reference = "a b c") {
  fairlens::Utterance u;
  u.id = std::move(id);
  u.labels = std::move(labels);
  u.reference = std::move(reference);
  return u;
}

// Corpus whose depth-2 cells over two attributes have the given counts,
// cells enumerated with the second attribute fastest.
inline fairlens::Corpus cell_corpus(const fairlens::AttributeSchema& schema, const std::vector<std::size_t>& counts) {
  const auto& attrs = schema.attributes();
  std::vector<fairlens::Utterance> us;
  std::size_t cell = 0;
  for (const auto& a : attrs[0].labels) {
    for (const auto& b : attrs[1].labels) {
      for (std::size_t k = 0; k < counts.at(cell); ++k) {
        us.push_back(utt("u" + std::to_string(us.size()), {a, b}));
      }
      ++cell;
    }
  }
  return fairlens::Corpus(schema, std::move(us));
}

inline std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                                              int alphabet) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = std::string(1, static_cast<char>('a' + sym(rng)));
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("fairlens-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fairlens");
  std::ostringstream out, err;
  const int code = fairlens::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Four-group accuracy fixture: one attribute with four groups, one utterance of
// 1000 tokens per group, so that word accuracy moves in steps of 0.1.
struct AccuracyFixture {
  std::string schema, manifest, hyp_a, hyp_b;
};

inline AccuracyFixture write_accuracy_fixture(const TempDir& dir, const std::vector<int>& errors_a,
                                              const std::vector<int>& errors_b) {
  AccuracyFixture f{dir / "schema.json", dir / "manifest.jsonl", dir / "A.jsonl", dir / "B.jsonl"};
  write_text(f.schema,
             R"({"mode":"solo","attributes":[{"name":"Group","labels":["G1","G2","G3","G4"]}]})");
  std::string manifest, ha, hb;
  for (int g = 0; g < 4; ++g) {
    std::string ref, a, b;
    for (int t = 0; t < 1000; ++t) {
      const std::string w = "w" + std::to_string(t);
      ref += (t ? " " : "") + w;
      a += (t ? " " : "") + (t < errors_a[g] ? std::string("x") : w);
      b += (t ? " " : "") + (t < errors_b[g] ? std::string("x") : w);
    }
    const std::string id = "g" + std::to_string(g + 1);
    manifest += R"({"id":")" + id + R"(","reference":")" + ref + R"(","attributes":{"Group":"G)" +
                std::to_string(g + 1) + "\"}}\n";
    ha += R"({"id":")" + id + R"(","hypothesis":")" + a + "\"}\n";
    hb += R"({"id":")" + id + R"(","hypothesis":")" + b + "\"}\n";
  }
  write_text(f.manifest, manifest);
  write_text(f.hyp_a, ha);
  write_text(f.hyp_b, hb);
  return f;
}

// Errors per 1000 words giving accuracies 89.5/94.3/93.4/72.5 and 91.2/92.3/91.7/78.0.
inline const std::vector<int> kErrorsA{105, 57, 66, 275};
inline const std::vector<int> kErrorsB{88, 77, 83, 220};

}  // namespace fixtures
