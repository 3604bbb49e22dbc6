#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conslaw/potential.hpp"

namespace conslaw {

struct PotentialDecl {
  PotentialKind kind = PotentialKind::TwoDim;
  std::string name;
  std::string cv_ref;  // named conserved vector, empty when given inline
  VectorFunction tuple;
};

struct NprimeDecl {
  std::string equation;  // label of a base equation
  std::string family;
  std::optional<Expr> multiplier;
};

struct LevelDecl {
  std::vector<PotentialDecl> potentials;
  std::vector<NprimeDecl> nprime;
  bool detect_nprime = true;
};

// Free-form line kept for the corpus runner: `claim <kind> <text>`.
struct Claim {
  std::string kind;
  std::string text;
  int line = 0;
  int level = 0;  // number of potential levels defined before the claim
};

struct LoadOptions {
  // Constants replaced by rational values while loading, e.g. eps -> 0.
  std::map<std::string, Rational> constants;
  // Base weights overriding `dep ... weight` declarations.
  std::map<std::string, int> weights;
};

struct SystemFile {
  // Declarations in file order, used for printing.
  std::vector<std::string> indep;
  std::vector<std::string> consts;
  std::vector<std::pair<std::string, int>> deps;
  std::vector<std::string> funcs;

  ContextPtr ctx;  // final context, potentials included
  DiffSystem base;
  std::vector<LevelDecl> level_decls;
  std::vector<PotentialStructure> levels;
  std::vector<std::pair<std::string, VectorFunction>> cvs;
  std::vector<Claim> claims;
  std::map<std::string, Rational> constants;  // bindings applied while loading
  // Order of the blocks after the header: 'c' cv, 'l' level, 'k' claim.
  std::string layout;

  // The system of the top level, or the base system.
  const DiffSystem& system() const { return levels.empty() ? base : levels.back().system; }
  const PotentialStructure* top() const { return levels.empty() ? nullptr : &levels.back(); }
  const DiffSystem& system_at(int level) const { return level == 0 ? base : levels.at(level - 1).system; }
  const PotentialStructure* top_at(int level) const { return level == 0 ? nullptr : &levels.at(level - 1); }
  // Parses in the final context and applies the constant bindings.
  Expr parse(const std::string& text) const;
  VectorFunction parse_tuple(const std::string& text) const;
  const VectorFunction& cv(const std::string& name) const;
  bool has_cv(const std::string& name) const;
};

SystemFile parse_system_file(const std::string& text, const LoadOptions& opt = {});
SystemFile load_system_file(const std::string& path, const LoadOptions& opt = {});
std::string print_system_file(const SystemFile& f);

// Index of the equation with this label (or leading jet text) in S.
int find_equation(const DiffSystem& S, const std::string& label);

}  // namespace conslaw
