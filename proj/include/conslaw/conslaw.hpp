#pragma once

#include <vector>

#include "conslaw/diffsys.hpp"
#include "conslaw/variational.hpp"

namespace conslaw {

// Multipliers attached to a list of equations of a system.
struct Characteristic {
  std::vector<Expr> components;
  std::vector<int> equations;  // equation indices, same order as components
  bool extended = false;
  bool completely_reduced = false;
};

bool verify_conserved_vector(const VectorFunction& F, const DiffSystem& S);

// Div F - sum lambda^mu L^mu over the given equations.
Expr characteristic_defect(const std::vector<Expr>& lambda, const std::vector<int>& eqs,
                           const VectorFunction& F, const DiffSystem& S);

// Exact identity Div F = sum lambda^mu L^mu over the minimal set of S.
bool verify_characteristic(const std::vector<Expr>& lambda, const VectorFunction& F, const DiffSystem& S);
bool verify_characteristic(const Characteristic& lambda, const VectorFunction& F, const DiffSystem& S);

struct Extraction {
  Characteristic lambda;
  VectorFunction F_tilde;     // Div F_tilde = sum lambda^mu L^mu exactly
  VectorFunction correction;  // F - F_tilde, a trivial conserved vector
};

// Characteristic over the minimal set of S, or over `allowed`. Equations outside
// `allowed` are eliminated through their stored syzygies.
Extraction extract_characteristic(const VectorFunction& F, const DiffSystem& S);
Extraction extract_characteristic(const VectorFunction& F, const DiffSystem& S, const std::vector<int>& allowed);

bool cosymmetry_test(const std::vector<Expr>& lambda, const DiffSystem& S);

// Every component vanishes on solutions.
bool is_trivial_characteristic(const std::vector<Expr>& lambda, const DiffSystem& S);

// Decided through characteristics; assumes S is normal and totally nondegenerate.
bool equivalent_conserved_vectors(const VectorFunction& F1, const VectorFunction& F2, const DiffSystem& S);

}  // namespace conslaw
