#pragma once

#include <string>
#include <vector>

#include "conslaw/sysfile.hpp"

namespace conslaw {

struct CorpusFile {
  std::string name;  // file stem
  std::string text;
};

// System files compiled into the library from corpus/*.sys.
const std::vector<CorpusFile>& builtin_corpus();

struct ClaimResult {
  std::string id;        // <file>/<kind>[:<subject>]
  std::string instance;  // "symbolic" or a constant instantiation such as "eps=0"
  bool pass = false;
  std::string detail;
};

struct CorpusReport {
  std::vector<ClaimResult> results;
  std::size_t failures() const;
  bool ok() const { return failures() == 0; }
};

ClaimResult check_claim(const SystemFile& f, const Claim& c, const std::string& file);

// Every claim of one file; files declaring `eps` also run with eps in {0, 1, -1}.
std::vector<ClaimResult> run_file(const CorpusFile& file, const std::string& filter = "");

// Claims whose id contains `filter`, over the built-in corpus.
CorpusReport run_corpus(const std::string& filter = "");

}  // namespace conslaw
