#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conslaw/conslaw.hpp"

namespace conslaw {

enum class PotentialKind { TwoDim, Abelian, Standard, Covering };
const char* kind_name(PotentialKind k);

struct PotentialFamily {
  std::string name;
  // Dependent variables introduced: {name}, or name + x_i + x_j for i < j (standard).
  std::vector<std::string> components;
  // v_i = fluxes[i] (2D, Abelian, covering); for standard systems the conserved tuple G^i.
  VectorFunction fluxes;
  // Indices in the combined system of the defining equations, ordered by direction.
  std::vector<int> equations;
};

struct PotentialStructure {
  PotentialKind kind = PotentialKind::TwoDim;
  DiffSystem base;
  DiffSystem system;  // base equations first, then the potential equations
  std::vector<PotentialFamily> potentials;
  std::vector<int> nprime;  // base equations moved out of the minimal set
  int level = 1;

  std::vector<std::string> potential_deps() const;
  std::vector<int> potential_equations() const;
  // Minimal base equations followed by the potential equations.
  std::vector<int> extended_equations() const;
  int family_index(const std::string& name) const;
};

struct BuildOptions {
  std::vector<std::string> names;  // default v1, v2, ...
  bool detect_nprime = true;
  int level = 1;
};

// v^s_x = F^s, v^s_t = -G^s for conserved vectors (F^s, G^s); n = 2.
PotentialStructure build_potential_system_2d(const DiffSystem& S, const std::vector<VectorFunction>& cvs,
                                             const BuildOptions& opt = {});
// v^s_i = G^{si}[u], compatible on solutions of S.
PotentialStructure build_abelian_covering(const DiffSystem& S, const std::vector<VectorFunction>& fluxes,
                                          const BuildOptions& opt = {});
// sum_j D_j v^{sij} = G^{si} with v^{sij} = -v^{sji}; n > 2.
PotentialStructure build_standard_potential_system(const DiffSystem& S, const std::vector<VectorFunction>& cvs,
                                                   const BuildOptions& opt = {});
// v^s_i = G^{si}[u|v], compatible under the prolonged total derivatives.
PotentialStructure build_general_covering(const DiffSystem& S, const std::vector<VectorFunction>& fluxes,
                                          const BuildOptions& opt = {});

// Reduced D_i G^{sj} - D_j G^{si} for each s and i < j (prolonged derivatives for coverings).
std::vector<Expr> compatibility_residuals(const DiffSystem& S, const std::vector<VectorFunction>& fluxes,
                                          const std::vector<std::string>& names, bool covering);

Weighting extend_weighting(const PotentialStructure& P);

// Declares base equation `eq` a consequence of family `family`'s equations with multiplier M
// (detected when absent); the identity is checked exactly.
void declare_nprime(PotentialStructure& P, int eq, int family, const std::optional<Expr>& M = std::nullopt);

Characteristic completely_reduce_characteristic(const Characteristic& lambda, const PotentialStructure& P);

// Usual characteristic of P zero-padded to the extended equation list.
Characteristic pad_to_extended(const Characteristic& lambda, const PotentialStructure& P);
bool verify_extended_characteristic(const Characteristic& lambda, const VectorFunction& F, const PotentialStructure& P);

enum class Verdict { Induced, PurelyPotential };
const char* verdict_name(Verdict v);

struct PurityResult {
  Verdict verdict = Verdict::Induced;
  bool trivial = false;
  std::string label;
  Characteristic reduced;
  std::vector<Atom> potential_atoms;     // potential jets occurring in the reduced characteristic
  std::vector<std::string> assumptions;  // non-generic function symbols the verdict relies on
  std::optional<VectorFunction> local;   // potential-free conserved vector when F is supplied
};

PurityResult purity_test(const Characteristic& lambda, const PotentialStructure& P,
                         const std::optional<VectorFunction>& F = std::nullopt);

// Potential-free conserved vector of the base system equivalent to F on P.
VectorFunction localize_conserved_vector(const VectorFunction& F, const PotentialStructure& P);

struct DerivedLaw {
  VectorFunction cv;
  Characteristic characteristic;
  bool conserved = false;
  bool characteristic_holds = false;  // up to a trivial characteristic
};

// d/dv^s of F and of its characteristic.
DerivedLaw potential_derivative_cv(const VectorFunction& F, const std::string& potential, const PotentialStructure& P,
                                   const std::optional<Characteristic>& lambda = std::nullopt);
// Components of lambda on v^s's equations as a conserved vector, paired with +d lambda / dv^s.
DerivedLaw char_components_as_cv(const Characteristic& lambda, const std::string& potential,
                                 const PotentialStructure& P);

// Extended characteristic of a conserved vector affine in the potentials.
Extraction linear_cv_to_extended_char(const VectorFunction& F, const PotentialStructure& P);

struct CoherenceReport {
  bool induced = false;
  bool potential_free_cv = false;
  bool induced_extended_char = false;
  bool potential_free_char = false;
  std::optional<VectorFunction> local;
  bool consistent() const {
    return induced == potential_free_cv && induced == induced_extended_char && induced == potential_free_char;
  }
};

// Evaluates the four equivalent statements on F independently.
CoherenceReport induction_coherence(const VectorFunction& F, const PotentialStructure& P);

}  // namespace conslaw
