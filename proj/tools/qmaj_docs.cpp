// Copyright 2026 The qmaj developers
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
//
// Generates docs/math_map.md from `//! map: <concept> :: <symbol>` source
// annotations and fails when a required concept has no implementation entry
// or a relative link in the docs is broken. The table is generated, never
// hand-maintained.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Concept key -> human description. Every one of these must be implemented
// and annotated somewhere in the sources.
const std::vector<std::pair<std::string, std::string>> kRequired = {
    {"conditional-min-entropy", "conditional min-entropy H_min(A|B), base-2 bits"},
    {"min-entropy-primal", "primal covering program min Tr w with 1 (x) w >= rho"},
    {"min-entropy-dual", "dual pairing program max Tr(X rho), Tr_A X = I_B"},
    {"self-adjoint-extension", "covering value for self-adjoint operators (bound form)"},
    {"positive-linfl1", "sup-congruence norm of positive bipartite operators"},
    {"norm-duality-attainment", "channel-pairing attainment of the covering value"},
    {"choi-application", "channel action from its Choi matrix"},
    {"one-sided-channel-action", "(id (x) Phi) and (Phi (x) id) on bipartite operators"},
    {"channel-adjoint", "bilinear-pairing adjoint of a channel"},
    {"choi-positivity-tests", "CP/TP/TNI/unital/EB flags from the Choi matrix"},
    {"measure-and-prepare", "entanglement-breaking channels from POVM ensembles"},
    {"channel-composition", "composition through the Choi representation"},
    {"reduced-state", "partial trace"},
    {"hermitian-schmidt-split", "operator-Schmidt decomposition with Hermitian factors"},
    {"trace-norm", "trace norm"},
    {"majorization-decision", "bipartite majorization decision with certificates"},
    {"channel-pairing-sup", "sup over channels of a pairing functional"},
    {"witness-extraction", "entanglement-breaking witness construction"},
    {"family-convertibility", "simultaneous conversion of a family of states"},
    {"subfamily-scan", "finite-subfamily obstruction scan"},
    {"post-factorization", "left factorization Phi o T = S"},
    {"pre-factorization", "right factorization T o Phi = S"},
    {"choi-correspondence", "factorization vs majorization of Choi states"},
    {"diamond-norm", "completely bounded trace norm"},
    {"approx-conversion", "minimal conversion error"},
    {"approx-factorization", "minimal factorization error"},
    {"approx-state-slack", "state-side slack inequality"},
    {"approx-channel-slack", "channel-side slack inequality"},
    {"trace-distance-variational", "variational form of the trace distance"},
    {"min-entropy-grid-oracle", "grid re-evaluation of the covering value"},
    {"data-processing-suite", "data-processing / duality property suite"},
    {"roundtrip-suite", "planted majorization roundtrip suite"},
};

// Areas deliberately not covered at this (finite) level; listed so coverage
// audits are explicit about what is absent by design.
const std::vector<std::string> kNotCovered = {
    "infinite-dimensional von Neumann algebra formulations (semifinite traces, "
    "weak*-topology closure arguments): finite dimension makes the closures automatic",
    "injectivity characterizations: trivially satisfied here; retained only as the "
    "norm-coincidence property test",
    "tracial separation theorems beyond the finite-dimensional witness extraction",
    "abstract operator-space generalizations of the duality",
};

struct Entry {
  std::string symbol;
  std::string file;
  int line;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: qmaj_docs <source-root> <output-dir>\n";
    return 2;
  }
  fs::path root = argv[1];
  fs::path outdir = argv[2];

  std::map<std::string, std::vector<Entry>> found;
  std::regex marker(R"(//!\s*map:\s*([a-z0-9-]+)\s*::\s*(\S+))");
  for (const char* sub : {"src", "include", "tools"}) {
    fs::path dir = root / sub;
    if (!fs::exists(dir)) continue;
    for (const auto& p : fs::recursive_directory_iterator(dir)) {
      if (!p.is_regular_file()) continue;
      auto ext = p.path().extension().string();
      if (ext != ".cpp" && ext != ".hpp") continue;
      std::ifstream in(p.path());
      std::string line;
      int ln = 0;
      while (std::getline(in, line)) {
        ++ln;
        std::smatch m;
        if (std::regex_search(line, m, marker))
          found[m[1]].push_back({m[2], fs::relative(p.path(), root).string(), ln});
      }
    }
  }

  int missing = 0;
  std::ostringstream md;
  md << "# Math-to-code map\n\n"
     << "Generated from source annotations by `qmaj_docs`; do not edit by hand.\n\n"
     << "| Concept | Implementation | Source |\n|---|---|---|\n";
  for (const auto& [key, desc] : kRequired) {
    auto it = found.find(key);
    if (it == found.end()) {
      std::cerr << "missing concept annotation: " << key << "\n";
      ++missing;
      continue;
    }
    for (const auto& e : it->second)
      md << "| " << desc << " | `" << e.symbol << "` | `" << e.file << ":" << e.line << "` |\n";
  }
  md << "\n## Not covered by design\n\n";
  for (const auto& s : kNotCovered) md << "- " << s << "\n";

  fs::create_directories(outdir);
  std::ofstream(outdir / "math_map.md") << md.str();

  // Broken-link check over the hand-written docs.
  std::regex link(R"(\]\(([^)#http][^)#]*)\)?)");
  int broken = 0;
  fs::path docs = root / "docs";
  if (fs::exists(docs)) {
    for (const auto& p : fs::directory_iterator(docs)) {
      if (p.path().extension() != ".md") continue;
      std::ifstream in(p.path());
      std::string line;
      while (std::getline(in, line)) {
        auto begin = std::sregex_iterator(line.begin(), line.end(), link);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
          std::string target = (*it)[1];
          if (target.rfind("http", 0) == 0) continue;
          fs::path cand = p.path().parent_path() / target;
          fs::path cand2 = outdir / target;
          if (!fs::exists(cand) && !fs::exists(cand2)) {
            std::cerr << "broken link in " << p.path().filename().string() << ": " << target
                      << "\n";
            ++broken;
          }
        }
      }
    }
  }

  if (missing || broken) return 1;
  std::cout << "docs: " << kRequired.size() << " concepts mapped, links ok\n";
  return 0;
}
