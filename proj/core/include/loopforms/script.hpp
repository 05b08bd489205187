#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopforms/superpoly.hpp"

namespace loopforms::script {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(col) +
                           ": " + msg),
        line(line),
        col(col) {}
  int line, col;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Ref, D, Pow, Mul, Add, Sub, Neg };
  Kind kind;
  Rat number;        // Number
  std::string name;  // Ref
  ExprPtr a, b;
  int power = 0;  // Pow
};

struct VarDecl {
  Parity parity = Parity::Even;
  std::vector<std::string> names;
  std::optional<int> cap;
};

struct FormDecl {
  std::string name;
  ExprPtr value;
};

struct CoordAssign {
  std::string coord;
  ExprPtr value;
};

struct LoopDecl {
  std::string name;
  std::vector<CoordAssign> coords;
};

struct PoleSpec {
  ExprPtr location;
  bool flip = false;  // r / (location - t) instead of r / (t - location)
  std::vector<ExprPtr> residues;
};

struct PolesDecl {
  std::string name;
  std::vector<PoleSpec> poles;
  std::vector<CoordAssign> tail;
};

struct MatrixDecl {
  std::string name;
  int d1 = 0, d2 = 0;
  std::vector<std::vector<ExprPtr>> rows;
};

struct Command {
  std::string kind;  // sl12, exactness, truncation, transgress, radon, hessian,
                     // additivity, psi-scaling, berezinian, taylor
  std::vector<std::string> names;
  std::vector<int> ints;
  std::optional<std::vector<Rat>> at_point;
};

struct Script {
  std::vector<VarDecl> vars;
  std::vector<FormDecl> forms;
  std::vector<LoopDecl> loops;
  std::vector<PolesDecl> pole_families;
  std::vector<MatrixDecl> matrices;
  Command command;

  std::string to_canonical_string() const;
};

Script parse(const std::string& text);

struct RunOptions {
  std::optional<int> caps;  // overrides slice caps in check commands
  uint64_t seed = 0;        // echoed; reserved for randomized extensions
};

struct RunResult {
  Json report;
  bool ok = false;
};

RunResult run(const Script& s, const RunOptions& opts = {});

std::string render_text(const Json& report);

}  // namespace loopforms::script
